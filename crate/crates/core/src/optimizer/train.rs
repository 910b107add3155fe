use serde::{Deserialize, Serialize};

use super::config::GaConfig;
use super::ga::{evolve, TrainingTrace};
use super::problem::{accuracy, Genome, Problem};
use crate::classifier::{fuzzy_entropy, Ensemble};
use crate::error::{Error, Result};

/// Validation results of the model trained for one `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KReport {
    pub k: usize,
    pub genome: Genome,
    pub best_fitness: f64,
    /// Accuracy of the voted ensemble.
    pub validation_accuracy: f64,
    /// Fuzzy entropy of the selected replicate's validation memberships.
    pub validation_fuzzy_entropy: f64,
    pub selected_replicate: usize,
    pub trace: TrainingTrace,
}

/// One ensemble and report per `k`, and which of them was chosen.
#[derive(Debug, Clone)]
pub struct TrainingOutcome {
    pub ensembles: Vec<Ensemble>,
    pub reports: Vec<KReport>,
    pub selected: usize,
}

impl TrainingOutcome {
    pub fn ensemble(&self) -> &Ensemble {
        &self.ensembles[self.selected]
    }

    pub fn k(&self) -> usize {
        self.reports[self.selected].k
    }

    pub fn selected_report(&self) -> &KReport {
        &self.reports[self.selected]
    }

    pub fn into_ensemble(mut self) -> Ensemble {
        self.ensembles.swap_remove(self.selected)
    }
}

/// Voted validation accuracy and the selected replicate's fuzzy entropy.
pub fn validate_ensemble(problem: &Problem, ensemble: &Ensemble) -> Result<(f64, f64)> {
    let decisions = problem
        .validation
        .iter()
        .map(|x| ensemble.classify(x))
        .collect::<Result<Vec<_>>>()?;
    let predicted: Vec<bool> = decisions.iter().map(|d| d.target).collect();
    let memberships: Vec<f64> = decisions.iter().map(|d| d.membership).collect();
    Ok((accuracy(&predicted, &problem.labels), fuzzy_entropy(&memberships)?))
}

/// Index of the preferred report: highest accuracy, then lowest fuzzy
/// entropy, then the earliest (lowest `k`).
pub fn select_k(reports: &[KReport]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, r) in reports.iter().enumerate() {
        let better = match best {
            None => true,
            Some(b) => {
                let cur = &reports[b];
                r.validation_accuracy > cur.validation_accuracy
                    || (r.validation_accuracy == cur.validation_accuracy
                        && r.validation_fuzzy_entropy < cur.validation_fuzzy_entropy)
            }
        };
        if better {
            best = Some(i);
        }
    }
    best
}

/// Trains one ensemble per `k` in the configured range and keeps the best.
pub fn train_occ(config: &GaConfig, problem: &Problem) -> Result<TrainingOutcome> {
    config.validate()?;
    let n = problem.train.len();
    if config.k_max > n {
        return Err(Error::InvalidArgument(format!(
            "k range [{}, {}] exceeds the {n} training patterns",
            config.k_min, config.k_max
        )));
    }
    let mut reports = Vec::new();
    let mut ensembles = Vec::new();
    for k in config.k_min..=config.k_max {
        let evolution = evolve(config, problem, k)?;
        let ensemble = problem.ensemble(&evolution.best, config.seed)?;
        let (validation_accuracy, validation_fuzzy_entropy) = validate_ensemble(problem, &ensemble)?;
        log::info!(
            "k = {k}: fitness {:.6}, validation accuracy {validation_accuracy:.4}, fuzzy entropy {validation_fuzzy_entropy:.4}, {} generations",
            evolution.best_fitness,
            evolution.trace.generations()
        );
        reports.push(KReport {
            k,
            genome: evolution.best,
            best_fitness: evolution.best_fitness,
            validation_accuracy,
            validation_fuzzy_entropy,
            selected_replicate: ensemble.selected,
            trace: evolution.trace,
        });
        ensembles.push(ensemble);
    }
    let selected = select_k(&reports).expect("at least one k");
    Ok(TrainingOutcome {
        ensembles,
        reports,
        selected,
    })
}
