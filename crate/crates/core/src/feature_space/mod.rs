//! Heterogeneous patterns and their weighted dissimilarity.

mod dissimilarity;
mod kernels;
mod schema;

pub use dissimilarity::{
    composite_dissimilarity, dissimilarity_matrix, fit_ts_normalizer, ComponentTable, DissimilarityMatrix,
    FeatureSpace, TsNormalizer,
};
pub use kernels::{circular_diff, circular_diff_max, dtw, simple_matching, special_diff};
pub use schema::{FeatureDescriptor, FeatureKind, FeatureSchema, FeatureValue, Pattern, Scaling, WeightVector};
