//! Genetic search of feature weights and region tolerances, and selection of
//! the model order.

mod config;
mod ga;
mod problem;
mod train;

pub use config::GaConfig;
pub use ga::{
    evolve, gaussian_mutation, rank_expectations, scattered_crossover, stochastic_uniform, Evolution, TrainingTrace,
};
pub use problem::{accuracy, fitness, Evaluation, Genome, Problem};
pub use train::{select_k, train_occ, validate_ensemble, KReport, TrainingOutcome};
