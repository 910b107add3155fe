use super::fuzzy::fuzzy_entropy;
use super::model::{Decision, OccModel};
use crate::error::{Error, Result};
use crate::feature_space::Pattern;

/// Number of independently initialized replicates per ensemble.
pub const REPLICATES: usize = 3;

/// Replicates of the same model order trained from different initializations.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    pub replicates: Vec<OccModel>,
    /// Replicate whose memberships are reported.
    pub selected: usize,
}

/// Index of the lowest fuzzy entropy, first one on ties.
pub fn select_replicate(entropies: &[f64]) -> Result<usize> {
    if entropies.is_empty() {
        return Err(Error::InvalidArgument("no replicates to select from".into()));
    }
    let mut best = 0;
    for (i, &fe) in entropies.iter().enumerate().skip(1) {
        if fe < entropies[best] {
            best = i;
        }
    }
    Ok(best)
}

/// Majority vote of hard labels; the soft part of the decision comes from
/// `selected`.
pub fn vote(decisions: &[Decision], selected: usize) -> Decision {
    let yes = decisions.iter().filter(|d| d.target).count();
    Decision {
        target: 2 * yes > decisions.len(),
        ..decisions[selected]
    }
}

impl Ensemble {
    pub fn new(replicates: Vec<OccModel>, selected: usize) -> Result<Self> {
        if replicates.is_empty() || selected >= replicates.len() {
            return Err(Error::InvalidArgument(format!(
                "selected replicate {selected} of {}",
                replicates.len()
            )));
        }
        let k = replicates[0].k();
        if replicates.iter().any(|r| r.k() != k || r.schema != replicates[0].schema) {
            return Err(Error::InvalidArgument("replicates differ in order or schema".into()));
        }
        Ok(Ensemble { replicates, selected })
    }

    /// Builds the ensemble selecting the replicate with the lowest fuzzy
    /// entropy over `validation` patterns.
    pub fn select_on(replicates: Vec<OccModel>, validation: &[Pattern]) -> Result<Self> {
        let entropies = replicates
            .iter()
            .map(|r| {
                let mus = validation
                    .iter()
                    .map(|x| r.membership(x))
                    .collect::<Result<Vec<_>>>()?;
                fuzzy_entropy(&mus)
            })
            .collect::<Result<Vec<_>>>()?;
        Ensemble::new(replicates, select_replicate(&entropies)?)
    }

    pub fn k(&self) -> usize {
        self.replicates[0].k()
    }

    pub fn selected_model(&self) -> &OccModel {
        &self.replicates[self.selected]
    }

    pub fn classify(&self, x: &Pattern) -> Result<Decision> {
        let decisions = self
            .replicates
            .iter()
            .map(|r| r.classify(x))
            .collect::<Result<Vec<_>>>()?;
        Ok(vote(&decisions, self.selected))
    }
}

/// Free-function form of [`Ensemble::classify`].
pub fn ensemble_classify(x: &Pattern, e: &Ensemble) -> Result<Decision> {
    e.classify(x)
}
