//! Decision regions, hard and soft rules, and replicate voting.

mod ensemble;
mod fuzzy;
mod model;
pub mod persist;

pub use ensemble::{ensemble_classify, select_replicate, vote, Ensemble, REPLICATES};
pub use fuzzy::{fuzzy_entropy, sigmoid_membership};
pub use model::{cluster_regions, decide, Decision, FitContext, OccModel, Region, RegionShape};
pub use persist::{load_model, save_model, sha256_hex, Provenance, MODEL_FORMAT};
