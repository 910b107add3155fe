use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How raw numeric values of a feature are brought onto a common scale.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scaling {
    /// `(c - m) / (M - m)` against the fitting set, clamped to `[0, 1]`.
    #[default]
    Affine,
    /// Zero mean, unit variance.
    Standardize,
    /// Values are used as stored.
    Identity,
}

impl Scaling {
    fn is_default(&self) -> bool {
        *self == Scaling::Affine
    }
}

/// The five supported feature kinds and their parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FeatureKind {
    Categorical { domain: Vec<String> },
    Quantitative,
    /// Integers on `{0, .., period}` compared with the wrap-around difference.
    Circular { period: u32 },
    /// Quantitative value that may be "not applicable".
    SpecialQuantitative,
    /// Variable-length sequence of event times.
    Timeseries,
}

impl FeatureKind {
    pub fn name(&self) -> &'static str {
        match self {
            FeatureKind::Categorical { .. } => "categorical",
            FeatureKind::Quantitative => "quantitative",
            FeatureKind::Circular { .. } => "circular",
            FeatureKind::SpecialQuantitative => "special_quantitative",
            FeatureKind::Timeseries => "timeseries",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureDescriptor {
    pub name: String,
    #[serde(flatten)]
    pub kind: FeatureKind,
    /// Only meaningful for quantitative and special quantitative features.
    #[serde(default, skip_serializing_if = "Scaling::is_default")]
    pub scaling: Scaling,
}

impl FeatureDescriptor {
    pub fn new(name: impl Into<String>, kind: FeatureKind) -> Self {
        FeatureDescriptor {
            name: name.into(),
            kind,
            scaling: Scaling::Affine,
        }
    }

    pub fn quantitative(name: impl Into<String>) -> Self {
        Self::new(name, FeatureKind::Quantitative)
    }

    pub fn categorical<S: Into<String>>(name: impl Into<String>, domain: impl IntoIterator<Item = S>) -> Self {
        Self::new(
            name,
            FeatureKind::Categorical {
                domain: domain.into_iter().map(Into::into).collect(),
            },
        )
    }

    pub fn circular(name: impl Into<String>, period: u32) -> Self {
        Self::new(name, FeatureKind::Circular { period })
    }

    pub fn special(name: impl Into<String>) -> Self {
        Self::new(name, FeatureKind::SpecialQuantitative)
    }

    pub fn timeseries(name: impl Into<String>) -> Self {
        Self::new(name, FeatureKind::Timeseries)
    }

    pub fn with_scaling(mut self, scaling: Scaling) -> Self {
        self.scaling = scaling;
        self
    }
}

#[derive(Deserialize)]
struct SchemaRepr {
    features: Vec<FeatureDescriptor>,
}

/// Ordered feature descriptors defining the product feature space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SchemaRepr")]
pub struct FeatureSchema {
    features: Vec<FeatureDescriptor>,
    #[serde(skip)]
    ts_slots: Vec<Option<usize>>,
}

impl TryFrom<SchemaRepr> for FeatureSchema {
    type Error = Error;

    fn try_from(repr: SchemaRepr) -> Result<Self> {
        FeatureSchema::new(repr.features)
    }
}

impl FeatureSchema {
    pub fn new(features: Vec<FeatureDescriptor>) -> Result<Self> {
        if features.is_empty() {
            return Err(Error::Schema("schema needs at least one feature".into()));
        }
        let mut seen = HashSet::new();
        for f in &features {
            if !seen.insert(f.name.as_str()) {
                return Err(Error::Schema(format!("duplicate feature name `{}`", f.name)));
            }
            match &f.kind {
                FeatureKind::Circular { period } if *period < 1 => {
                    return Err(Error::Schema(format!(
                        "circular feature `{}` needs a period >= 1",
                        f.name
                    )));
                }
                FeatureKind::Categorical { domain } => {
                    if domain.is_empty() {
                        return Err(Error::Schema(format!(
                            "categorical feature `{}` has an empty domain",
                            f.name
                        )));
                    }
                    let mut labels = HashSet::new();
                    if !domain.iter().all(|l| labels.insert(l)) {
                        return Err(Error::Schema(format!(
                            "categorical feature `{}` repeats a label",
                            f.name
                        )));
                    }
                }
                _ => {}
            }
        }
        let mut next = 0;
        let ts_slots = features
            .iter()
            .map(|f| {
                matches!(f.kind, FeatureKind::Timeseries).then(|| {
                    next += 1;
                    next - 1
                })
            })
            .collect();
        Ok(FeatureSchema { features, ts_slots })
    }

    /// Schema of `m` plain quantitative features named `x0..`.
    pub fn quantitative(m: usize) -> Result<Self> {
        Self::new((0..m).map(|j| FeatureDescriptor::quantitative(format!("x{j}"))).collect())
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn features(&self) -> &[FeatureDescriptor] {
        &self.features
    }

    pub fn feature(&self, j: usize) -> &FeatureDescriptor {
        &self.features[j]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.features.iter().position(|f| f.name == name)
    }

    /// Number of timeseries features.
    pub fn ts_count(&self) -> usize {
        self.ts_slots.iter().flatten().count()
    }

    /// Position of feature `j` among the timeseries features.
    pub fn ts_slot(&self, j: usize) -> Option<usize> {
        self.ts_slots[j]
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::json("schema", e))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("schema serializes")
    }
}

/// One component of a pattern.
#[derive(Debug, Clone, PartialEq)]
pub enum FeatureValue {
    Label(String),
    Scalar(f64),
    Circular(u32),
    /// `None` is the "not applicable" symbol.
    Special(Option<f64>),
    Events(Vec<f64>),
}

impl FeatureValue {
    pub fn matches(&self, kind: &FeatureKind) -> bool {
        matches!(
            (self, kind),
            (FeatureValue::Label(_), FeatureKind::Categorical { .. })
                | (FeatureValue::Scalar(_), FeatureKind::Quantitative)
                | (FeatureValue::Circular(_), FeatureKind::Circular { .. })
                | (FeatureValue::Special(_), FeatureKind::SpecialQuantitative)
                | (FeatureValue::Events(_), FeatureKind::Timeseries)
        )
    }

    fn variant(&self) -> &'static str {
        match self {
            FeatureValue::Label(_) => "label",
            FeatureValue::Scalar(_) => "scalar",
            FeatureValue::Circular(_) => "circular",
            FeatureValue::Special(_) => "special",
            FeatureValue::Events(_) => "event sequence",
        }
    }
}

/// A heterogeneous record aligned to a [`FeatureSchema`].
#[derive(Debug, Clone, PartialEq)]
pub struct Pattern {
    pub values: Vec<FeatureValue>,
}

impl Pattern {
    pub fn new(values: Vec<FeatureValue>) -> Self {
        Pattern { values }
    }

    pub fn scalars(xs: &[f64]) -> Self {
        Pattern::new(xs.iter().map(|&x| FeatureValue::Scalar(x)).collect())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Checks arity, value variants and value domains against `schema`.
    pub fn validate(&self, schema: &FeatureSchema) -> Result<()> {
        if self.values.len() != schema.len() {
            return Err(Error::Schema(format!(
                "pattern has {} values, schema has {} features",
                self.values.len(),
                schema.len()
            )));
        }
        for (v, f) in self.values.iter().zip(schema.features()) {
            if !v.matches(&f.kind) {
                return Err(Error::Schema(format!(
                    "feature `{}` is {} but the value is a {}",
                    f.name,
                    f.kind.name(),
                    v.variant()
                )));
            }
            match (v, &f.kind) {
                (FeatureValue::Label(l), FeatureKind::Categorical { domain }) if !domain.contains(l) => {
                    return Err(Error::Domain(format!("`{l}` is not in the domain of `{}`", f.name)));
                }
                (FeatureValue::Circular(x), FeatureKind::Circular { period }) if x > period => {
                    return Err(Error::Domain(format!(
                        "`{}` value {x} exceeds period {period}",
                        f.name
                    )));
                }
                (FeatureValue::Scalar(x), _) | (FeatureValue::Special(Some(x)), _) if !x.is_finite() => {
                    return Err(Error::Domain(format!("`{}` value is not finite", f.name)));
                }
                (FeatureValue::Events(xs), _) if xs.iter().any(|x| !x.is_finite() || *x < 0.0) => {
                    return Err(Error::Domain(format!(
                        "`{}` events must be finite and non-negative",
                        f.name
                    )));
                }
                _ => {}
            }
        }
        Ok(())
    }
}

/// Per-feature weights, each in `[0, 1]`. No sum constraint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    pub fn new(w: Vec<f64>) -> Result<Self> {
        if let Some(bad) = w.iter().find(|x| !(0.0..=1.0).contains(*x)) {
            return Err(Error::Domain(format!("weight {bad} outside [0, 1]")));
        }
        Ok(WeightVector(w))
    }

    pub fn ones(m: usize) -> Self {
        WeightVector(vec![1.0; m])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}
