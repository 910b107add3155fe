//! Metrics, information measures, embeddings and experiment runners.

mod embedding;
mod experiments;
mod information;
mod metrics;
pub mod report;
mod uci;

pub use embedding::embed_dissimilarity;
pub use experiments::{
    embed_patterns, evaluate_ensemble, run_gaussian_experiment, run_heterogeneous_experiment,
    run_implicit_fpr_experiment, run_uci_experiment, train_and_test, uci_problem, ExperimentRun, ImplicitFprDesign,
    ImplicitFprOutcome, KRow, RatioPoint, TestEvaluation, UciOutcome,
};
pub use information::{mutual_information, pearson_correlation, weight_density, weight_entropy, BINS};
pub use metrics::{confusion_metrics, roc_auc, ConfusionCounts, ConfusionMetrics, RocCurve};
pub use uci::{parse_table, LabeledTable, UciDataset};
