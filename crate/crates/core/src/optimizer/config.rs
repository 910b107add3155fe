use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Genetic algorithm and model-selection settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GaConfig {
    pub population: usize,
    /// Share of non-elite offspring produced by crossover; the rest by mutation.
    pub crossover_fraction: f64,
    pub elites: usize,
    pub max_generations: usize,
    /// Stop when the best fitness improved by less than `stall_tolerance`
    /// over this many generations.
    pub stall_generations: usize,
    pub stall_tolerance: f64,
    /// Accuracy weight in the fitness.
    pub alpha: f64,
    /// Upper bound of every tolerance gene.
    pub sigma_max: f64,
    /// Mutation standard deviation as a fraction of the gene range, at the
    /// first and at the last generation.
    pub mutation_start: f64,
    pub mutation_end: f64,
    /// Divide the tolerance term of the fitness by `k`.
    pub per_cluster_tolerance: bool,
    pub k_min: usize,
    pub k_max: usize,
    pub seed: u64,
}

impl Default for GaConfig {
    fn default() -> Self {
        GaConfig {
            population: 50,
            crossover_fraction: 0.8,
            elites: 2,
            max_generations: 250,
            stall_generations: 50,
            stall_tolerance: 1e-6,
            alpha: 0.8,
            sigma_max: 0.5,
            mutation_start: 0.1,
            mutation_end: 0.01,
            per_cluster_tolerance: false,
            k_min: 1,
            k_max: 5,
            seed: 0,
        }
    }
}

fn check(ok: bool, what: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidArgument(what.into()))
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<()> {
        check(self.population >= 2, "population must be at least 2")?;
        check(self.elites <= self.population, "elites must not exceed population")?;
        check(
            (0.0..=1.0).contains(&self.crossover_fraction),
            "crossover_fraction must be in [0, 1]",
        )?;
        check(self.max_generations >= 1, "max_generations must be at least 1")?;
        check(self.stall_generations >= 1, "stall_generations must be at least 1")?;
        check(self.stall_tolerance >= 0.0, "stall_tolerance must be non-negative")?;
        check((0.0..=1.0).contains(&self.alpha), "alpha must be in [0, 1]")?;
        check(
            self.sigma_max > 0.0 && self.sigma_max.is_finite(),
            "sigma_max must be positive",
        )?;
        check(
            self.mutation_start >= 0.0 && self.mutation_end >= 0.0,
            "mutation scales must be non-negative",
        )?;
        check(self.k_min >= 1, "k_min must be at least 1")?;
        check(self.k_min <= self.k_max, "k_min must not exceed k_max")?;
        Ok(())
    }

    /// Mutation scale (fraction of the gene range) at `generation`, shrinking
    /// linearly from `mutation_start` to `mutation_end`.
    pub fn mutation_scale(&self, generation: usize) -> f64 {
        if self.max_generations <= 1 {
            return self.mutation_start;
        }
        let t = generation.min(self.max_generations - 1) as f64 / (self.max_generations - 1) as f64;
        self.mutation_start + (self.mutation_end - self.mutation_start) * t
    }
}
