//! Synthetic targets and uniformly generated non-targets.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::io::Record;
use crate::error::{Error, Result};
use crate::feature_space::{FeatureKind, FeatureSchema, FeatureValue, Pattern};
use crate::seed;

/// Per-feature facts about a (normalized) target set that uniform non-target
/// generation has to mimic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonTargetProfile {
    /// Fraction of "not applicable" values, per feature (0 for non-special features).
    pub not_applicable_rate: Vec<f64>,
    /// Observed (min, max) sequence length, per feature (timeseries only).
    pub sequence_length: Vec<(usize, usize)>,
    /// Observed (min, max) event value, per feature (timeseries only).
    pub event_range: Vec<(f64, f64)>,
}

impl NonTargetProfile {
    pub fn fit(schema: &FeatureSchema, targets: &[Pattern]) -> Self {
        let m = schema.len();
        let mut not_applicable_rate = vec![0.0; m];
        let mut sequence_length = vec![(0, 0); m];
        let mut event_range = vec![(0.0, 0.0); m];
        for (j, f) in schema.features().iter().enumerate() {
            match f.kind {
                FeatureKind::SpecialQuantitative if !targets.is_empty() => {
                    let missing = targets
                        .iter()
                        .filter(|p| matches!(p.values[j], FeatureValue::Special(None)))
                        .count();
                    not_applicable_rate[j] = missing as f64 / targets.len() as f64;
                }
                FeatureKind::Timeseries => {
                    let seqs = targets.iter().filter_map(|p| match &p.values[j] {
                        FeatureValue::Events(xs) => Some(xs),
                        _ => None,
                    });
                    let (mut lmin, mut lmax) = (usize::MAX, 0);
                    let (mut vmin, mut vmax) = (f64::INFINITY, f64::NEG_INFINITY);
                    for xs in seqs {
                        lmin = lmin.min(xs.len());
                        lmax = lmax.max(xs.len());
                        for &x in xs {
                            vmin = vmin.min(x);
                            vmax = vmax.max(x);
                        }
                    }
                    sequence_length[j] = if lmin == usize::MAX { (0, 0) } else { (lmin, lmax) };
                    event_range[j] = if vmin.is_finite() { (vmin, vmax) } else { (0.0, 0.0) };
                }
                _ => {}
            }
        }
        NonTargetProfile {
            not_applicable_rate,
            sequence_length,
            event_range,
        }
    }
}

/// Draws `n` patterns with every feature uniform over its domain: `[0, 1]`
/// for numeric values, the label set, `{0, .., period}`, and sequences of
/// uniform length and values within the observed target ranges. Special
/// features are "not applicable" at the target set's rate.
pub fn generate_uniform_nontargets(
    schema: &FeatureSchema,
    profile: &NonTargetProfile,
    n: usize,
    seed: u64,
) -> Vec<Pattern> {
    let mut rng = seed::rng(seed, &[]);
    (0..n)
        .map(|_| {
            let values = schema
                .features()
                .iter()
                .enumerate()
                .map(|(j, f)| match &f.kind {
                    FeatureKind::Categorical { domain } => {
                        FeatureValue::Label(domain[rng.random_range(0..domain.len())].clone())
                    }
                    FeatureKind::Quantitative => FeatureValue::Scalar(rng.random::<f64>()),
                    FeatureKind::Circular { period } => FeatureValue::Circular(rng.random_range(0..=*period)),
                    FeatureKind::SpecialQuantitative => {
                        if rng.random::<f64>() < profile.not_applicable_rate[j] {
                            FeatureValue::Special(None)
                        } else {
                            FeatureValue::Special(Some(rng.random::<f64>()))
                        }
                    }
                    FeatureKind::Timeseries => {
                        let (lmin, lmax) = profile.sequence_length[j];
                        let (vmin, vmax) = profile.event_range[j];
                        let len = rng.random_range(lmin..=lmax);
                        let mut xs: Vec<f64> = (0..len).map(|_| vmin + (vmax - vmin) * rng.random::<f64>()).collect();
                        xs.sort_by(f64::total_cmp);
                        FeatureValue::Events(xs)
                    }
                })
                .collect();
            Pattern::new(values)
        })
        .collect()
}

/// Two-dimensional Gaussian target clusters plus uniform non-targets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub centers: Vec<[f64; 2]>,
    /// Per-cluster standard deviation along each axis.
    pub spreads: Vec<f64>,
    pub train_targets: usize,
    pub validation_targets: usize,
    pub test_targets: usize,
    pub validation_nontargets: usize,
    pub test_nontargets: usize,
    /// Non-targets closer than this to a center are redrawn (0 disables).
    #[serde(default)]
    pub exclusion_radius: f64,
    pub seed: u64,
}

impl SyntheticSpec {
    /// Three well-separated clusters at (0.2, 0.2), (0.5, 0.8), (0.8, 0.3).
    pub fn three_gaussians(spread: f64, seed: u64) -> Self {
        SyntheticSpec {
            centers: vec![[0.2, 0.2], [0.5, 0.8], [0.8, 0.3]],
            spreads: vec![spread; 3],
            train_targets: 150,
            validation_targets: 150,
            test_targets: 150,
            validation_nontargets: 150,
            test_nontargets: 1500,
            exclusion_radius: 0.0,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.centers.is_empty() {
            return Err(Error::InvalidArgument("at least one cluster center".into()));
        }
        if self.spreads.len() != self.centers.len() {
            return Err(Error::InvalidArgument(format!(
                "{} spreads for {} centers",
                self.spreads.len(),
                self.centers.len()
            )));
        }
        if self.spreads.iter().any(|s| !(*s >= 0.0) || !s.is_finite()) {
            return Err(Error::InvalidArgument("spreads must be finite and non-negative".into()));
        }
        Ok(())
    }

    /// Smallest distance between two centers.
    pub fn min_center_distance(&self) -> f64 {
        let mut best = f64::INFINITY;
        for (i, a) in self.centers.iter().enumerate() {
            for b in &self.centers[i + 1..] {
                best = best.min(((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt());
            }
        }
        best
    }
}

/// Training targets, and labeled validation and test sets.
#[derive(Debug, Clone)]
pub struct SyntheticSplits {
    pub train: Vec<Pattern>,
    pub validation: Vec<Record>,
    pub test: Vec<Record>,
}

fn gaussian_targets(spec: &SyntheticSpec, n: usize, stream: u64) -> Vec<Pattern> {
    let mut rng = seed::rng(spec.seed, &[stream]);
    let unit = Normal::new(0.0, 1.0).expect("unit normal");
    (0..n)
        .map(|i| {
            let c = i % spec.centers.len();
            let [cx, cy] = spec.centers[c];
            let s = spec.spreads[c];
            let x = (cx + s * unit.sample(&mut rng)).clamp(0.0, 1.0);
            let y = (cy + s * unit.sample(&mut rng)).clamp(0.0, 1.0);
            Pattern::scalars(&[x, y])
        })
        .collect()
}

fn uniform_square(spec: &SyntheticSpec, n: usize, stream: u64) -> Vec<Pattern> {
    let mut rng = seed::rng(spec.seed, &[stream]);
    let r2 = spec.exclusion_radius * spec.exclusion_radius;
    (0..n)
        .map(|_| loop {
            let (x, y) = (rng.random::<f64>(), rng.random::<f64>());
            let clear = spec
                .centers
                .iter()
                .all(|c| (x - c[0]).powi(2) + (y - c[1]).powi(2) >= r2);
            if clear {
                break Pattern::scalars(&[x, y]);
            }
        })
        .collect()
}

/// Samples the three splits. Targets are clipped to the unit square.
pub fn generate_gaussian_clusters(spec: &SyntheticSpec) -> Result<SyntheticSplits> {
    spec.validate()?;
    let labeled = |targets: Vec<Pattern>, others: Vec<Pattern>| -> Vec<Record> {
        targets
            .into_iter()
            .map(Record::target)
            .chain(others.into_iter().map(Record::non_target))
            .collect()
    };
    Ok(SyntheticSplits {
        train: gaussian_targets(spec, spec.train_targets, 0),
        validation: labeled(
            gaussian_targets(spec, spec.validation_targets, 1),
            uniform_square(spec, spec.validation_nontargets, 2),
        ),
        test: labeled(
            gaussian_targets(spec, spec.test_targets, 3),
            uniform_square(spec, spec.test_nontargets, 4),
        ),
    })
}
