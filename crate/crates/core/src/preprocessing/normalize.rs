use serde::{Deserialize, Serialize};

use super::geo::GeoBounds;
use crate::error::{Error, Result};
use crate::feature_space::{FeatureKind, FeatureSchema, FeatureValue, Pattern, Scaling};

/// `(c - m) / (M - m)` clamped to `[0, 1]`; a constant feature (`M = m`) maps to 0.
pub fn affine_normalize(c: f64, min: f64, max: f64) -> Result<f64> {
    if max < min {
        return Err(Error::Stats(format!("max {max} below min {min}")));
    }
    if max == min {
        return Ok(0.0);
    }
    Ok(((c - min) / (max - min)).clamp(0.0, 1.0))
}

/// Zero mean, unit (population) variance. A constant column maps to zeros.
pub fn standardize(column: &[f64]) -> Vec<f64> {
    let (mean, std) = mean_std(column);
    column
        .iter()
        .map(|x| if std > 0.0 { (x - mean) / std } else { 0.0 })
        .collect()
}

pub(crate) fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (0.0, 0.0);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Fitted scaling parameters of one numeric feature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scaling", rename_all = "snake_case")]
pub enum ScalarStats {
    Affine { min: f64, max: f64 },
    Standardize { mean: f64, std: f64 },
}

impl ScalarStats {
    pub fn apply(&self, c: f64) -> f64 {
        match *self {
            ScalarStats::Affine { min, max } => affine_normalize(c, min, max).expect("fitted stats are ordered"),
            ScalarStats::Standardize { mean, std } => {
                if std > 0.0 {
                    (c - mean) / std
                } else {
                    0.0
                }
            }
        }
    }
}

/// Everything fitted on a training set that must be reapplied unchanged at
/// inference time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizationStats {
    /// One entry per schema feature; `None` for features used as stored.
    pub features: Vec<Option<ScalarStats>>,
    /// Bounding rectangle of the spatial inputs, when they were engineered.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spatial: Option<GeoBounds>,
}

impl NormalizationStats {
    /// Stats that leave every feature as stored.
    pub fn identity(schema: &FeatureSchema) -> Self {
        NormalizationStats {
            features: vec![None; schema.len()],
            spatial: None,
        }
    }

    /// Fits scaling parameters on raw `patterns`.
    pub fn fit(schema: &FeatureSchema, patterns: &[Pattern]) -> Result<Self> {
        let mut features = Vec::with_capacity(schema.len());
        for (j, f) in schema.features().iter().enumerate() {
            let numeric = matches!(f.kind, FeatureKind::Quantitative | FeatureKind::SpecialQuantitative);
            if !numeric || f.scaling == Scaling::Identity {
                features.push(None);
                continue;
            }
            if f.kind == FeatureKind::SpecialQuantitative && f.scaling == Scaling::Standardize {
                return Err(Error::Schema(format!(
                    "special feature `{}` must stay in [0, 1]; standardization is not allowed",
                    f.name
                )));
            }
            let column: Vec<f64> = patterns
                .iter()
                .filter_map(|p| match p.values.get(j) {
                    Some(FeatureValue::Scalar(x)) | Some(FeatureValue::Special(Some(x))) => Some(*x),
                    _ => None,
                })
                .collect();
            let stats = match f.scaling {
                Scaling::Affine => {
                    let (min, max) = column
                        .iter()
                        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
                    if column.is_empty() {
                        ScalarStats::Affine { min: 0.0, max: 0.0 }
                    } else {
                        ScalarStats::Affine { min, max }
                    }
                }
                Scaling::Standardize => {
                    let (mean, std) = mean_std(&column);
                    ScalarStats::Standardize { mean, std }
                }
                Scaling::Identity => unreachable!(),
            };
            features.push(Some(stats));
        }
        Ok(NormalizationStats { features, spatial: None })
    }

    /// Applies the fitted scaling to one raw pattern.
    pub fn apply(&self, pattern: &Pattern) -> Result<Pattern> {
        if pattern.len() != self.features.len() {
            return Err(Error::Schema(format!(
                "pattern has {} values, stats cover {} features",
                pattern.len(),
                self.features.len()
            )));
        }
        let values = pattern
            .values
            .iter()
            .zip(&self.features)
            .map(|(v, s)| match (v, s) {
                (FeatureValue::Scalar(x), Some(s)) => FeatureValue::Scalar(s.apply(*x)),
                (FeatureValue::Special(Some(x)), Some(s)) => FeatureValue::Special(Some(s.apply(*x))),
                _ => v.clone(),
            })
            .collect();
        Ok(Pattern::new(values))
    }

    pub fn apply_all(&self, patterns: &[Pattern]) -> Result<Vec<Pattern>> {
        patterns.iter().map(|p| self.apply(p)).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("stats serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::json("normalization stats", e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::feature_space::FeatureDescriptor;
    use proptest::prelude::*;

    #[test]
    fn affine_examples() {
        assert_eq!(affine_normalize(5.0, 0.0, 10.0).unwrap(), 0.5);
        assert_eq!(affine_normalize(0.0, 0.0, 10.0).unwrap(), 0.0);
        assert_eq!(affine_normalize(12.0, 0.0, 10.0).unwrap(), 1.0);
        assert_eq!(affine_normalize(3.0, 3.0, 3.0).unwrap(), 0.0);
        assert!(matches!(affine_normalize(1.0, 2.0, 1.0), Err(Error::Stats(_))));
    }

    #[test]
    fn standardize_examples() {
        assert_eq!(standardize(&[1.0, 1.0, 1.0]), vec![0.0, 0.0, 0.0]);
        assert_eq!(standardize(&[0.0, 2.0]), vec![-1.0, 1.0]);
    }

    #[test]
    fn fit_apply_and_json_round_trip() {
        let schema = FeatureSchema::new(vec![
            FeatureDescriptor::quantitative("a"),
            FeatureDescriptor::quantitative("b").with_scaling(Scaling::Standardize),
            FeatureDescriptor::special("s"),
            FeatureDescriptor::circular("t", 364),
        ])
        .unwrap();
        let raw = vec![
            Pattern::new(vec![
                FeatureValue::Scalar(1.0),
                FeatureValue::Scalar(0.1),
                FeatureValue::Special(None),
                FeatureValue::Circular(5),
            ]),
            Pattern::new(vec![
                FeatureValue::Scalar(3.0),
                FeatureValue::Scalar(0.7),
                FeatureValue::Special(Some(40.0)),
                FeatureValue::Circular(300),
            ]),
            Pattern::new(vec![
                FeatureValue::Scalar(2.0),
                FeatureValue::Scalar(1.0 / 3.0),
                FeatureValue::Special(Some(20.0)),
                FeatureValue::Circular(1),
            ]),
        ];
        let stats = NormalizationStats::fit(&schema, &raw).unwrap();
        let norm = stats.apply_all(&raw).unwrap();
        assert_eq!(norm[2].values[0], FeatureValue::Scalar(0.5));
        assert_eq!(norm[0].values[2], FeatureValue::Special(None));
        assert_eq!(norm[1].values[2], FeatureValue::Special(Some(1.0)));
        assert_eq!(norm[1].values[3], FeatureValue::Circular(300));
        let back = NormalizationStats::from_json(&stats.to_json()).unwrap();
        assert_eq!(back, stats);
        // bit-exact floats
        if let (Some(ScalarStats::Standardize { mean, std }), Some(ScalarStats::Standardize { mean: m2, std: s2 })) =
            (stats.features[1], back.features[1])
        {
            assert_eq!(mean.to_bits(), m2.to_bits());
            assert_eq!(std.to_bits(), s2.to_bits());
        } else {
            panic!("expected standardization stats");
        }
    }

    proptest! {
        #[test]
        fn inference_never_leaves_unit_interval(train in prop::collection::vec(-100.0..100.0f64, 1..20), probe in -1e3..1e3f64) {
            let schema = FeatureSchema::quantitative(1).unwrap();
            let raw: Vec<Pattern> = train.iter().map(|&x| Pattern::scalars(&[x])).collect();
            let stats = NormalizationStats::fit(&schema, &raw).unwrap();
            for p in stats.apply_all(&raw).unwrap().iter().chain([stats.apply(&Pattern::scalars(&[probe])).unwrap()].iter()) {
                match p.values[0] {
                    FeatureValue::Scalar(v) => prop_assert!((0.0..=1.0).contains(&v)),
                    _ => unreachable!(),
                }
            }
        }

        #[test]
        fn standardized_moments(xs in prop::collection::vec(-50.0..50.0f64, 2..40)) {
            let z = standardize(&xs);
            let (mean, std) = mean_std(&z);
            prop_assert!(mean.abs() < 1e-9);
            let (_, raw_std) = mean_std(&xs);
            if raw_std > 1e-9 {
                prop_assert!((std - 1.0).abs() < 1e-9);
            }
        }
    }
}
