//! Ingestion, normalization, feature engineering and synthetic data.

mod current;
mod geo;
pub mod io;
mod normalize;
pub mod surrogate;
mod synth;

pub use current::{backbone_current_feature, normalize_backbone_column, SAMPLE_MINUTES};
pub use geo::{geodesic_distance, great_circle, normalize_spatial, vincenty_inverse, GeoBounds, GeoPoint, Geodesic};
pub use io::{load_dataset, read_records, read_schema, read_stats, write_records, write_schema, write_stats, Record};
pub use normalize::{affine_normalize, standardize, NormalizationStats, ScalarStats};
pub(crate) use normalize::mean_std;
pub use surrogate::{generate_fault_surrogate, SurrogateData, SurrogateSpec};
pub use synth::{
    generate_gaussian_clusters, generate_uniform_nontargets, NonTargetProfile, SyntheticSpec, SyntheticSplits,
};
