//! Real-coded GA: rank-scaled stochastic uniform selection, scattered
//! crossover, Gaussian mutation with a shrinking scale, and elitism.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::config::GaConfig;
use super::problem::{Genome, Problem};
use crate::error::Result;
use crate::evaluation::weight_entropy;
use crate::seed;

const INIT_STREAM: u64 = 1;
const SELECT_STREAM: u64 = 2;
const CHILD_STREAM: u64 = 3;

/// Per-generation history of a GA run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainingTrace {
    pub best_fitness: Vec<f64>,
    /// Weight entropy of the best genome of each generation.
    pub best_weight_entropy: Vec<f64>,
    pub mean_fitness: Vec<f64>,
}

impl TrainingTrace {
    pub fn generations(&self) -> usize {
        self.best_fitness.len()
    }
}

/// Best genome found and how the search went.
#[derive(Debug, Clone)]
pub struct Evolution {
    pub best: Genome,
    pub best_fitness: f64,
    pub trace: TrainingTrace,
}

/// Gene bounds: weights in `[0, 1]`, tolerances in `[0, sigma_max]`.
fn upper_bounds(m: usize, k: usize, sigma_max: f64) -> Vec<f64> {
    let mut ub = vec![1.0; m];
    ub.extend(std::iter::repeat_n(sigma_max, k));
    ub
}

/// Rank-based expectations: the i-th best gets weight `1 / sqrt(i + 1)`,
/// scaled so that the expectations sum to `parents`.
pub fn rank_expectations(n: usize, parents: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|i| 1.0 / ((i + 1) as f64).sqrt()).collect();
    let total: f64 = raw.iter().sum();
    raw.iter().map(|r| r * parents as f64 / total).collect()
}

/// Stochastic uniform sampling: `count` equally spaced pointers with a random
/// offset over the cumulative expectations. Returns indices into `expectations`.
pub fn stochastic_uniform<R: Rng>(expectations: &[f64], count: usize, rng: &mut R) -> Vec<usize> {
    let total: f64 = expectations.iter().sum();
    if count == 0 || total <= 0.0 {
        return vec![];
    }
    let step = total / count as f64;
    let mut pointer = rng.random::<f64>() * step;
    let mut chosen = Vec::with_capacity(count);
    let mut cumulative = expectations[0];
    let mut i = 0;
    for _ in 0..count {
        while pointer >= cumulative && i + 1 < expectations.len() {
            i += 1;
            cumulative += expectations[i];
        }
        chosen.push(i);
        pointer += step;
    }
    chosen
}

/// Uniform-mask crossover.
pub fn scattered_crossover<R: Rng>(a: &[f64], b: &[f64], rng: &mut R) -> Vec<f64> {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| if rng.random::<bool>() { x } else { y })
        .collect()
}

/// Per-gene Gaussian perturbation with standard deviation `scale` times the
/// gene range, clipped to `[0, upper]`.
pub fn gaussian_mutation<R: Rng>(genes: &[f64], upper: &[f64], scale: f64, rng: &mut R) -> Vec<f64> {
    let unit = Normal::new(0.0, 1.0).expect("unit normal");
    genes
        .iter()
        .zip(upper)
        .map(|(&g, &ub)| (g + scale * ub * unit.sample(rng)).clamp(0.0, ub))
        .collect()
}

fn stalled(best: &[f64], config: &GaConfig) -> bool {
    let n = best.len();
    n > config.stall_generations && best[n - 1] - best[n - 1 - config.stall_generations] < config.stall_tolerance
}

/// Searches weights and `k` tolerances maximizing the fitness on `problem`.
pub fn evolve(config: &GaConfig, problem: &Problem, k: usize) -> Result<Evolution> {
    config.validate()?;
    let m = problem.features();
    let upper = upper_bounds(m, k, config.sigma_max);
    let stream = |kind: u64, generation: usize, index: usize| {
        seed::rng(config.seed, &[k as u64, kind, generation as u64, index as u64])
    };

    let mut population: Vec<Vec<f64>> = (0..config.population)
        .map(|i| {
            let mut rng = stream(INIT_STREAM, 0, i);
            upper.iter().map(|&ub| ub * rng.random::<f64>()).collect()
        })
        .collect();
    let genomes = |pop: &[Vec<f64>]| -> Vec<Genome> { pop.iter().map(|g| Genome::from_genes(g, m)).collect() };
    let mut scores: Vec<f64> = problem
        .evaluate_all(&genomes(&population), config)?
        .iter()
        .map(|e| e.fitness)
        .collect();

    let n_elite = config.elites.min(config.population);
    let n_cross = ((config.population - n_elite) as f64 * config.crossover_fraction).round() as usize;
    let n_mut = config.population - n_elite - n_cross;
    let mut trace = TrainingTrace::default();

    for generation in 0..config.max_generations {
        // best first; stable on ties
        let mut order: Vec<usize> = (0..population.len()).collect();
        order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
        let best = order[0];
        trace.best_fitness.push(scores[best]);
        trace.best_weight_entropy.push(weight_entropy(&population[best][..m]));
        trace.mean_fitness.push(scores.iter().sum::<f64>() / scores.len() as f64);
        if generation + 1 == config.max_generations || stalled(&trace.best_fitness, config) {
            break;
        }

        let expectations = rank_expectations(order.len(), 2 * n_cross + n_mut);
        let mut select_rng = stream(SELECT_STREAM, generation, 0);
        let mut parents: Vec<usize> = stochastic_uniform(&expectations, 2 * n_cross + n_mut, &mut select_rng)
            .into_iter()
            .map(|rank| order[rank])
            .collect();
        parents.shuffle(&mut select_rng);

        let scale = config.mutation_scale(generation);
        let mut next: Vec<Vec<f64>> = order[..n_elite].iter().map(|&i| population[i].clone()).collect();
        let mut next_scores: Vec<Option<f64>> = order[..n_elite].iter().map(|&i| Some(scores[i])).collect();
        for c in 0..n_cross {
            let mut rng = stream(CHILD_STREAM, generation, next.len());
            next.push(scattered_crossover(
                &population[parents[2 * c]],
                &population[parents[2 * c + 1]],
                &mut rng,
            ));
            next_scores.push(None);
        }
        for c in 0..n_mut {
            let mut rng = stream(CHILD_STREAM, generation, next.len());
            next.push(gaussian_mutation(&population[parents[2 * n_cross + c]], &upper, scale, &mut rng));
            next_scores.push(None);
        }

        // Elites keep their score; fitness is deterministic in the genes.
        let fresh: Vec<usize> = (0..next.len()).filter(|&i| next_scores[i].is_none()).collect();
        let fresh_genomes: Vec<Genome> = fresh.iter().map(|&i| Genome::from_genes(&next[i], m)).collect();
        for (i, e) in fresh.iter().zip(problem.evaluate_all(&fresh_genomes, config)?) {
            next_scores[*i] = Some(e.fitness);
        }
        population = next;
        scores = next_scores.into_iter().map(|s| s.expect("scored")).collect();
    }

    let best = (0..population.len())
        .reduce(|a, b| if scores[b] > scores[a] { b } else { a })
        .expect("non-empty population");
    Ok(Evolution {
        best: Genome::from_genes(&population[best], m),
        best_fitness: scores[best],
        trace,
    })
}
