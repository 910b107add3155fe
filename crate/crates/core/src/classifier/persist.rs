//! Model file: a versioned JSON document holding an [`Ensemble`].

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use super::ensemble::Ensemble;
use super::model::{OccModel, Region, RegionShape};
use crate::clustering::ExtentStrategy;
use crate::error::{Error, Result};
use crate::feature_space::{FeatureSchema, TsNormalizer, WeightVector};
use crate::preprocessing::io::{decode_pattern, encode_pattern, write_text};
use crate::preprocessing::NormalizationStats;

pub const MODEL_FORMAT: &str = "hetocc-model/1";

/// Where an artifact came from. Deliberately free of timestamps and paths so
/// that identical runs produce identical files.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub generator: String,
    /// SHA-256 of the canonical run configuration.
    pub config_hash: String,
    pub seed: u64,
}

impl Provenance {
    pub fn new(config_hash: impl Into<String>, seed: u64) -> Self {
        Provenance {
            generator: concat!("hetocc ", env!("CARGO_PKG_VERSION")).into(),
            config_hash: config_hash.into(),
            seed,
        }
    }
}

/// Lowercase hex SHA-256.
pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut s = String::with_capacity(64);
    for b in digest {
        write!(s, "{b:02x}").expect("write to string");
    }
    s
}

#[derive(Serialize, Deserialize)]
struct RegionRepr {
    representative: Value,
    extent: f64,
    tolerance: f64,
    size: usize,
}

#[derive(Serialize, Deserialize)]
struct ReplicateRepr {
    weights: WeightVector,
    regions: Vec<RegionRepr>,
}

#[derive(Serialize, Deserialize)]
struct ModelRepr {
    format: String,
    provenance: Provenance,
    schema: FeatureSchema,
    stats: NormalizationStats,
    ts_normalizer: TsNormalizer,
    extent_strategy: ExtentStrategy,
    selected: usize,
    replicates: Vec<ReplicateRepr>,
}

pub fn model_to_json(ensemble: &Ensemble, provenance: &Provenance) -> String {
    let first = ensemble.selected_model();
    let repr = ModelRepr {
        format: MODEL_FORMAT.into(),
        provenance: provenance.clone(),
        schema: first.schema.clone(),
        stats: first.stats.clone(),
        ts_normalizer: first.ts_normalizer.clone(),
        extent_strategy: first.extent_strategy,
        selected: ensemble.selected,
        replicates: ensemble
            .replicates
            .iter()
            .map(|m| ReplicateRepr {
                weights: m.weights.clone(),
                regions: m
                    .regions
                    .iter()
                    .map(|r| RegionRepr {
                        representative: encode_pattern(&r.representative),
                        extent: r.shape.extent,
                        tolerance: r.shape.tolerance,
                        size: r.size,
                    })
                    .collect(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&repr).expect("model serializes")
}

pub fn model_from_json(text: &str) -> Result<(Ensemble, Provenance)> {
    let head: Value = serde_json::from_str(text).map_err(|e| Error::json("model file", e))?;
    match head.get("format").and_then(Value::as_str) {
        Some(MODEL_FORMAT) => {}
        Some(other) => return Err(Error::Format(format!("model format `{other}`, expected `{MODEL_FORMAT}`"))),
        None => return Err(Error::Format("model file without a format tag".into())),
    }
    let repr: ModelRepr = serde_json::from_value(head).map_err(|e| Error::json("model file", e))?;
    let replicates = repr
        .replicates
        .into_iter()
        .map(|rep| {
            if rep.weights.len() != repr.schema.len() {
                return Err(Error::Format(format!(
                    "{} weights for {} features",
                    rep.weights.len(),
                    repr.schema.len()
                )));
            }
            let regions = rep
                .regions
                .into_iter()
                .map(|r| {
                    Ok(Region {
                        representative: decode_pattern(&r.representative, &repr.schema).map_err(Error::Format)?,
                        shape: RegionShape {
                            extent: r.extent,
                            tolerance: r.tolerance,
                        },
                        size: r.size,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(OccModel {
                schema: repr.schema.clone(),
                weights: rep.weights,
                regions,
                ts_normalizer: repr.ts_normalizer.clone(),
                stats: repr.stats.clone(),
                extent_strategy: repr.extent_strategy,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((Ensemble::new(replicates, repr.selected)?, repr.provenance))
}

pub fn save_model(path: &Path, ensemble: &Ensemble, provenance: &Provenance) -> Result<()> {
    write_text(path, &model_to_json(ensemble, provenance))
}

pub fn load_model(path: &Path) -> Result<(Ensemble, Provenance)> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    model_from_json(&text)
}
