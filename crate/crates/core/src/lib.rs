//! One-class classification over heterogeneous feature spaces.
//!
//! Target patterns are partitioned with k-medoids under a weighted
//! dissimilarity; each cluster gets a decision region of radius
//! `extent + tolerance`. A genetic algorithm learns the feature weights and
//! the tolerances. Decisions come with a sigmoid membership degree and the
//! fuzzy entropy of a set of memberships measures how reliable they are.

pub mod classifier;
pub mod clustering;
pub mod error;
pub mod evaluation;
pub mod feature_space;
pub mod optimizer;
pub mod preprocessing;
pub(crate) mod seed;

pub use error::{Error, Result};
