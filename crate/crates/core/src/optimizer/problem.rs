use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classifier::{cluster_regions, decide, Ensemble, FitContext, OccModel, RegionShape, REPLICATES};
use crate::clustering::{ExtentStrategy, Partition};
use crate::error::{Error, Result};
use crate::feature_space::{fit_ts_normalizer, ComponentTable, FeatureSchema, FeatureSpace, Pattern, TsNormalizer, WeightVector};
use crate::preprocessing::{NormalizationStats, Record};
use crate::seed;

use super::config::GaConfig;

const REPLICATE_STREAM: u64 = 0x5245_504c;

/// Weights followed by tolerances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Genome {
    pub weights: Vec<f64>,
    pub tolerances: Vec<f64>,
}

impl Genome {
    pub fn from_genes(genes: &[f64], m: usize) -> Self {
        Genome {
            weights: genes[..m].to_vec(),
            tolerances: genes[m..].to_vec(),
        }
    }

    pub fn genes(&self) -> Vec<f64> {
        self.weights.iter().chain(&self.tolerances).copied().collect()
    }

    pub fn len(&self) -> usize {
        self.weights.len() + self.tolerances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn within_bounds(&self, tolerance_max: f64) -> bool {
        self.weights.iter().all(|w| (0.0..=1.0).contains(w))
            && self.tolerances.iter().all(|s| (0.0..=tolerance_max).contains(s))
    }
}

/// `alpha * accuracy + (1 - alpha) * sum_i (1 - tolerance_i)`, the tolerance
/// term optionally divided by `k`.
pub fn fitness(accuracy: f64, tolerances: &[f64], alpha: f64, per_cluster: bool) -> f64 {
    let mut slack: f64 = tolerances.iter().map(|s| 1.0 - s).sum();
    if per_cluster && !tolerances.is_empty() {
        slack /= tolerances.len() as f64;
    }
    alpha * accuracy + (1.0 - alpha) * slack
}

/// Fraction of correct labels.
pub fn accuracy(predicted: &[bool], truth: &[bool]) -> f64 {
    let hits = predicted.iter().zip(truth).filter(|(p, t)| p == t).count();
    hits as f64 / truth.len() as f64
}

/// Outcome of scoring a genome.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub fitness: f64,
    /// Validation accuracy of each replicate.
    pub accuracies: Vec<f64>,
}

/// A training set and a labeled validation set with every per-feature
/// dissimilarity precomputed, so that scoring a genome costs only weighted sums.
#[derive(Debug, Clone)]
pub struct Problem {
    pub schema: FeatureSchema,
    pub stats: NormalizationStats,
    pub ts_normalizer: TsNormalizer,
    pub extent_strategy: ExtentStrategy,
    pub train: Vec<Pattern>,
    pub validation: Vec<Pattern>,
    pub labels: Vec<bool>,
    train_table: ComponentTable,
    validation_table: ComponentTable,
}

impl Problem {
    /// Fits the timeseries normalizer on `train` and tabulates dissimilarities.
    /// Validation records must be labeled.
    pub fn new(
        schema: &FeatureSchema,
        stats: &NormalizationStats,
        train: &[Pattern],
        validation: &[Record],
        extent_strategy: ExtentStrategy,
    ) -> Result<Self> {
        if train.is_empty() {
            return Err(Error::InvalidArgument("empty training set".into()));
        }
        if validation.is_empty() {
            return Err(Error::InvalidArgument("empty validation set".into()));
        }
        for p in train {
            p.validate(schema)?;
        }
        let labels = validation
            .iter()
            .enumerate()
            .map(|(i, r)| {
                r.target
                    .ok_or_else(|| Error::InvalidArgument(format!("validation record {} is unlabeled", i + 1)))
            })
            .collect::<Result<Vec<_>>>()?;
        let validation: Vec<Pattern> = validation.iter().map(|r| r.pattern.clone()).collect();
        for p in &validation {
            p.validate(schema)?;
        }
        let ts_normalizer = fit_ts_normalizer(schema, train);
        let space = FeatureSpace::new(schema, &ts_normalizer)?;
        let train_table = ComponentTable::square(&space, train)?;
        let validation_table = ComponentTable::between(&space, &validation, train)?;
        Ok(Problem {
            schema: schema.clone(),
            stats: stats.clone(),
            ts_normalizer,
            extent_strategy,
            train: train.to_vec(),
            validation,
            labels,
            train_table,
            validation_table,
        })
    }

    pub fn features(&self) -> usize {
        self.schema.len()
    }

    fn context(&self) -> FitContext<'_> {
        FitContext {
            schema: &self.schema,
            ts_normalizer: &self.ts_normalizer,
            stats: &self.stats,
            extent_strategy: self.extent_strategy,
        }
    }

    /// k-medoids seed of a replicate; fixed across genomes so that a genome's
    /// fitness is a deterministic function of its genes.
    pub fn replicate_seed(root: u64, k: usize, replicate: usize) -> u64 {
        seed::derive(root, &[REPLICATE_STREAM, k as u64, replicate as u64])
    }

    /// Clusters the training set for every replicate under `genome`.
    pub fn replicate_regions(&self, genome: &Genome, root_seed: u64) -> Result<Vec<(Partition, Vec<f64>)>> {
        let k = genome.tolerances.len();
        let d = self.train_table.weighted_square(&genome.weights);
        (0..REPLICATES)
            .map(|r| cluster_regions(&d, k, Self::replicate_seed(root_seed, k, r), self.extent_strategy))
            .collect()
    }

    /// Hard labels of the validation set for one clustered replicate.
    pub fn validation_labels(&self, genome: &Genome, partition: &Partition, extents: &[f64]) -> Vec<bool> {
        let shapes: Vec<RegionShape> = extents
            .iter()
            .zip(&genome.tolerances)
            .map(|(&extent, &tolerance)| RegionShape { extent, tolerance })
            .collect();
        let mut dists = vec![0.0; shapes.len()];
        (0..self.validation.len())
            .map(|v| {
                for (slot, &rep) in dists.iter_mut().zip(&partition.representatives) {
                    *slot = self.validation_table.weighted(v, rep, &genome.weights);
                }
                decide(&dists, &shapes).target
            })
            .collect()
    }

    pub fn evaluate(&self, genome: &Genome, config: &GaConfig) -> Result<Evaluation> {
        let accuracies = self
            .replicate_regions(genome, config.seed)?
            .iter()
            .map(|(p, e)| accuracy(&self.validation_labels(genome, p, e), &self.labels))
            .collect::<Vec<_>>();
        let mean = accuracies.iter().sum::<f64>() / accuracies.len() as f64;
        Ok(Evaluation {
            fitness: fitness(mean, &genome.tolerances, config.alpha, config.per_cluster_tolerance),
            accuracies,
        })
    }

    /// Scores a batch of genomes in parallel; results are in input order.
    pub fn evaluate_all(&self, genomes: &[Genome], config: &GaConfig) -> Result<Vec<Evaluation>> {
        genomes.par_iter().map(|g| self.evaluate(g, config)).collect()
    }

    /// The three replicates trained with `genome`, FE-selected on the
    /// validation set.
    pub fn ensemble(&self, genome: &Genome, root_seed: u64) -> Result<Ensemble> {
        let weights = WeightVector::new(genome.weights.clone())?;
        let replicates = self
            .replicate_regions(genome, root_seed)?
            .iter()
            .map(|(p, e)| OccModel::from_partition(self.context(), &self.train, weights.clone(), p, e, &genome.tolerances))
            .collect();
        Ensemble::select_on(replicates, &self.validation)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::feature_space::FeatureValue;

    #[test]
    fn fitness_examples() {
        assert!((fitness(1.0, &[0.0, 0.0, 0.0], 0.8, false) - 1.4).abs() < 1e-12);
        assert!((fitness(0.9, &[0.5, 0.5], 0.8, false) - 0.92).abs() < 1e-12);
        assert_eq!(fitness(0.73, &[0.2, 0.4], 1.0, false), 0.73);
        assert!((fitness(1.0, &[0.0, 0.0, 0.0], 0.8, true) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fast_path_matches_the_model() {
        let schema = FeatureSchema::new(vec![
            crate::feature_space::FeatureDescriptor::quantitative("x"),
            crate::feature_space::FeatureDescriptor::special("s"),
            crate::feature_space::FeatureDescriptor::timeseries("e"),
        ])
        .unwrap();
        let pat = |x: f64, s: Option<f64>, e: Vec<f64>| {
            Pattern::new(vec![FeatureValue::Scalar(x), FeatureValue::Special(s), FeatureValue::Events(e)])
        };
        let train: Vec<Pattern> = (0..20)
            .map(|i| {
                let f = i as f64 / 19.0;
                pat(f * f, if i % 5 == 0 { None } else { Some(f) }, (0..i % 3).map(|e| e as f64 * f).collect())
            })
            .collect();
        let validation: Vec<Record> = (0..15)
            .map(|i| {
                let f = (i as f64 * 0.37) % 1.0;
                let p = pat(f, Some(1.0 - f), vec![f * 3.0]);
                if i % 2 == 0 {
                    Record::target(p)
                } else {
                    Record::non_target(p)
                }
            })
            .collect();
        let stats = NormalizationStats::identity(&schema);
        let problem = Problem::new(&schema, &stats, &train, &validation, ExtentStrategy::Mean).unwrap();
        let genome = Genome {
            weights: vec![0.9, 0.4, 0.6],
            tolerances: vec![0.05, 0.2, 0.0],
        };
        let ensemble = problem.ensemble(&genome, 42).unwrap();
        for ((p, e), model) in problem.replicate_regions(&genome, 42).unwrap().iter().zip(&ensemble.replicates) {
            let fast = problem.validation_labels(&genome, p, e);
            let slow: Vec<bool> = problem.validation.iter().map(|x| model.hard_classify(x).unwrap()).collect();
            assert_eq!(fast, slow);
        }
    }

    #[test]
    fn unlabeled_validation_is_rejected() {
        let schema = FeatureSchema::quantitative(1).unwrap();
        let stats = NormalizationStats::identity(&schema);
        let train = vec![Pattern::scalars(&[0.1])];
        let validation = vec![Record {
            pattern: Pattern::scalars(&[0.2]),
            target: None,
        }];
        assert!(Problem::new(&schema, &stats, &train, &validation, ExtentStrategy::Mean).is_err());
        assert!(Problem::new(&schema, &stats, &train, &[], ExtentStrategy::Mean).is_err());
    }
}
