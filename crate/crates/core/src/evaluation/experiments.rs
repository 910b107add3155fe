//! End-to-end runs: train on a split, score the test set, tabulate.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::embedding::embed_dissimilarity;
use super::information::{mutual_information, pearson_correlation};
use super::metrics::{confusion_metrics, roc_auc, ConfusionCounts, ConfusionMetrics};
use super::uci::UciDataset;
use crate::classifier::{fuzzy_entropy, Ensemble, OccModel};
use crate::clustering::ExtentStrategy;
use crate::error::{Error, Result};
use crate::feature_space::{dissimilarity_matrix, Pattern};
use crate::optimizer::{train_occ, GaConfig, Problem, TrainingOutcome};
use crate::preprocessing::{
    generate_fault_surrogate, generate_gaussian_clusters, NormalizationStats, Record, SurrogateSpec, SyntheticSpec,
};
use crate::seed;

/// Scores of an ensemble on a labeled test set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestEvaluation {
    pub counts: ConfusionCounts,
    pub metrics: ConfusionMetrics,
    /// `None` when the test set holds a single class.
    pub auc: Option<f64>,
    /// Fuzzy entropy of the reported memberships.
    pub fuzzy_entropy: f64,
    /// Accuracy of each replicate on its own.
    pub replicate_accuracy: Vec<f64>,
}

fn labels(records: &[Record]) -> Result<Vec<bool>> {
    records
        .iter()
        .enumerate()
        .map(|(i, r)| r.target.ok_or_else(|| Error::InvalidArgument(format!("record {} is unlabeled", i + 1))))
        .collect()
}

pub fn evaluate_ensemble(ensemble: &Ensemble, test: &[Record]) -> Result<TestEvaluation> {
    let truth = labels(test)?;
    let per_replicate = ensemble
        .replicates
        .iter()
        .map(|m| test.iter().map(|r| m.classify(&r.pattern)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let decisions: Vec<_> = (0..test.len())
        .map(|i| {
            let row: Vec<_> = per_replicate.iter().map(|ds| ds[i]).collect();
            crate::classifier::vote(&row, ensemble.selected)
        })
        .collect();
    let counts = ConfusionCounts::tally(decisions.iter().map(|d| d.target).zip(truth.iter().copied()));
    let scores: Vec<(f64, bool)> = decisions.iter().map(|d| d.membership).zip(truth.iter().copied()).collect();
    let auc = if truth.iter().any(|&t| t) && truth.iter().any(|&t| !t) {
        Some(roc_auc(&scores)?.auc)
    } else {
        None
    };
    let memberships: Vec<f64> = decisions.iter().map(|d| d.membership).collect();
    let replicate_accuracy = per_replicate
        .iter()
        .map(|ds| ds.iter().zip(&truth).filter(|(d, t)| d.target == **t).count() as f64 / truth.len() as f64)
        .collect();
    Ok(TestEvaluation {
        metrics: confusion_metrics(&counts)?,
        counts,
        auc,
        fuzzy_entropy: fuzzy_entropy(&memberships)?,
        replicate_accuracy,
    })
}

/// One line of the per-`k` table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KRow {
    pub k: usize,
    pub generations: usize,
    pub best_fitness: f64,
    pub validation_accuracy: f64,
    pub validation_fuzzy_entropy: f64,
    pub test: TestEvaluation,
    /// Between the best-fitness and best-weight-entropy traces; `None` when
    /// the run was too short.
    pub mutual_information: Option<f64>,
}

/// Training outcome plus the test scores of every `k`.
#[derive(Debug, Clone)]
pub struct ExperimentRun {
    pub training: TrainingOutcome,
    pub rows: Vec<KRow>,
}

impl ExperimentRun {
    pub fn selected_row(&self) -> &KRow {
        &self.rows[self.training.selected]
    }
}

pub fn train_and_test(config: &GaConfig, problem: &Problem, test: &[Record]) -> Result<ExperimentRun> {
    let training = train_occ(config, problem)?;
    let rows = training
        .reports
        .iter()
        .zip(&training.ensembles)
        .map(|(r, e)| {
            Ok(KRow {
                k: r.k,
                generations: r.trace.generations(),
                best_fitness: r.best_fitness,
                validation_accuracy: r.validation_accuracy,
                validation_fuzzy_entropy: r.validation_fuzzy_entropy,
                test: evaluate_ensemble(e, test)?,
                mutual_information: mutual_information(&r.trace.best_fitness, &r.trace.best_weight_entropy).ok(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ExperimentRun { training, rows })
}

/// Gaussian clusters against uniform non-targets on the unit square.
pub fn run_gaussian_experiment(
    spec: &SyntheticSpec,
    config: &GaConfig,
    strategy: ExtentStrategy,
) -> Result<ExperimentRun> {
    let splits = generate_gaussian_clusters(spec)?;
    let schema = crate::feature_space::FeatureSchema::quantitative(2)?;
    let problem = Problem::new(
        &schema,
        &NormalizationStats::identity(&schema),
        &splits.train,
        &splits.validation,
        strategy,
    )?;
    train_and_test(config, &problem, &splits.test)
}

/// Ratio sweep: each point shrinks the test non-target count to
/// `train_targets / ratio` and widens the clusters linearly with the ratio.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImplicitFprDesign {
    pub ratios: Vec<f64>,
    /// Cluster spread at the smallest and at the largest ratio.
    pub spread_range: (f64, f64),
    pub base: SyntheticSpec,
}

impl ImplicitFprDesign {
    pub fn spread_at(&self, ratio: f64) -> f64 {
        let lo = self.ratios.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = self.ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if hi <= lo {
            return self.spread_range.0;
        }
        let t = (ratio - lo) / (hi - lo);
        self.spread_range.0 + t * (self.spread_range.1 - self.spread_range.0)
    }

    pub fn spec_at(&self, index: usize) -> SyntheticSpec {
        let ratio = self.ratios[index];
        let spread = self.spread_at(ratio);
        SyntheticSpec {
            spreads: vec![spread; self.base.centers.len()],
            test_nontargets: (self.base.train_targets as f64 / ratio).round() as usize,
            seed: seed::derive(self.base.seed, &[index as u64]),
            ..self.base.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioPoint {
    pub ratio: f64,
    pub spread: f64,
    pub k: usize,
    pub fpr: f64,
    pub accuracy: f64,
    pub auc: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImplicitFprOutcome {
    pub points: Vec<RatioPoint>,
    /// Pearson correlation of ratio and test FPR.
    pub correlation: f64,
}

pub fn run_implicit_fpr_experiment(
    design: &ImplicitFprDesign,
    config: &GaConfig,
    strategy: ExtentStrategy,
) -> Result<ImplicitFprOutcome> {
    if design.ratios.len() < 2 {
        return Err(Error::InvalidArgument(
            "a correlation needs at least two ratios".into(),
        ));
    }
    if let Some(r) = design.ratios.iter().find(|r| !(**r > 0.0)) {
        return Err(Error::InvalidArgument(format!("ratio {r} is not positive")));
    }
    let points = (0..design.ratios.len())
        .map(|i| {
            let spec = design.spec_at(i);
            let run = run_gaussian_experiment(&spec, config, strategy)?;
            let row = run.selected_row();
            Ok(RatioPoint {
                ratio: design.ratios[i],
                spread: spec.spreads[0],
                k: row.k,
                fpr: row.test.metrics.fpr,
                accuracy: row.test.metrics.accuracy,
                auc: row.test.auc,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let ratios: Vec<f64> = points.iter().map(|p| p.ratio).collect();
    let fprs: Vec<f64> = points.iter().map(|p| p.fpr).collect();
    let correlation = pearson_correlation(&ratios, &fprs)?;
    Ok(ImplicitFprOutcome { points, correlation })
}

/// Train/validation/test split of a benchmark table for one seed: targets
/// 50/25/25, non-targets split evenly between validation and test.
/// Standardization is fitted on the whole table.
pub fn uci_problem(dataset: UciDataset, split_seed: u64, strategy: ExtentStrategy) -> Result<(Problem, Vec<Record>)> {
    let table = dataset.load()?;
    let mut rng = seed::rng(split_seed, &[0x5543_49]);
    let mut targets: Vec<&Pattern> = table.rows.iter().filter(|r| r.1).map(|r| &r.0).collect();
    let mut others: Vec<&Pattern> = table.rows.iter().filter(|r| !r.1).map(|r| &r.0).collect();
    targets.shuffle(&mut rng);
    others.shuffle(&mut rng);
    let n_train = targets.len() / 2;
    let n_val = targets.len() / 4;
    let all: Vec<Pattern> = table.rows.iter().map(|r| r.0.clone()).collect();
    let stats = NormalizationStats::fit(&table.schema, &all)?;
    let norm = |p: &Pattern| stats.apply(p);
    let train = targets[..n_train].iter().map(|p| norm(p)).collect::<Result<Vec<_>>>()?;
    let half = others.len() / 2;
    let mut validation = Vec::new();
    for p in &targets[n_train..n_train + n_val] {
        validation.push(Record::target(norm(p)?));
    }
    for p in &others[..half] {
        validation.push(Record::non_target(norm(p)?));
    }
    let mut test = Vec::new();
    for p in &targets[n_train + n_val..] {
        test.push(Record::target(norm(p)?));
    }
    for p in &others[half..] {
        test.push(Record::non_target(norm(p)?));
    }
    let problem = Problem::new(&table.schema, &stats, &train, &validation, strategy)?;
    Ok((problem, test))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UciOutcome {
    pub dataset: UciDataset,
    pub aucs: Vec<f64>,
    pub ks: Vec<usize>,
    pub mean_auc: f64,
    pub std_auc: f64,
}

/// Mean test AUC over one run per seed; each seed drives both the split and
/// the GA.
pub fn run_uci_experiment(
    dataset: UciDataset,
    seeds: &[u64],
    config: &GaConfig,
    strategy: ExtentStrategy,
) -> Result<UciOutcome> {
    if seeds.is_empty() {
        return Err(Error::InvalidArgument("no seeds".into()));
    }
    let mut aucs = Vec::new();
    let mut ks = Vec::new();
    for &s in seeds {
        let (problem, test) = uci_problem(dataset, s, strategy)?;
        let run = train_and_test(&GaConfig { seed: s, ..config.clone() }, &problem, &test)?;
        let row = run.selected_row();
        aucs.push(row.test.auc.expect("both classes in the test split"));
        ks.push(row.k);
        log::info!("{} seed {s}: k = {}, AUC {:.4}", dataset.name(), row.k, aucs.last().unwrap());
    }
    let (mean_auc, std_auc) = crate::preprocessing::mean_std(&aucs);
    Ok(UciOutcome {
        dataset,
        aucs,
        ks,
        mean_auc,
        std_auc,
    })
}

/// Heterogeneous-schema run on the fault surrogate.
pub fn run_heterogeneous_experiment(
    spec: &SurrogateSpec,
    config: &GaConfig,
    strategy: ExtentStrategy,
) -> Result<ExperimentRun> {
    let data = generate_fault_surrogate(spec)?;
    let problem = Problem::new(&data.schema, &data.stats, &data.train, &data.validation, strategy)?;
    train_and_test(config, &problem, &data.test)
}

/// Two-dimensional PCA coordinates of `patterns` under a model's weighted
/// dissimilarity.
pub fn embed_patterns(model: &OccModel, patterns: &[Pattern]) -> Result<Vec<[f64; 2]>> {
    if patterns.is_empty() {
        return Ok(vec![]);
    }
    let d = dissimilarity_matrix(&model.schema, patterns, &model.weights, &model.ts_normalizer)?;
    embed_dissimilarity(d.as_slice(), d.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick(k: usize) -> GaConfig {
        GaConfig {
            population: 12,
            max_generations: 12,
            k_min: k,
            k_max: k,
            seed: 5,
            ..Default::default()
        }
    }

    #[test]
    fn gaussian_run_reports_every_k() {
        let mut spec = SyntheticSpec::three_gaussians(0.02, 1);
        spec.train_targets = 30;
        spec.validation_targets = 30;
        spec.test_targets = 30;
        spec.validation_nontargets = 30;
        spec.test_nontargets = 60;
        let config = GaConfig { k_min: 2, k_max: 3, ..quick(3) };
        let run = run_gaussian_experiment(&spec, &config, ExtentStrategy::Mean).unwrap();
        assert_eq!(run.rows.len(), 2);
        assert_eq!(run.rows[1].k, 3);
        assert_eq!(run.rows[0].test.counts.total(), 90);
        assert!(run.rows.iter().all(|r| r.mutual_information.is_some()));
    }

    #[test]
    fn single_ratio_is_rejected() {
        let design = ImplicitFprDesign {
            ratios: vec![0.1],
            spread_range: (0.03, 0.03),
            base: SyntheticSpec::three_gaussians(0.03, 0),
        };
        assert!(run_implicit_fpr_experiment(&design, &quick(3), ExtentStrategy::Mean).is_err());
    }

    #[test]
    fn ratio_design() {
        let design = ImplicitFprDesign {
            ratios: vec![0.1, 0.2, 0.3],
            spread_range: (0.03, 0.07),
            base: SyntheticSpec::three_gaussians(0.03, 0),
        };
        let spec = design.spec_at(1);
        assert_eq!(spec.test_nontargets, 750);
        assert!((spec.spreads[0] - 0.05).abs() < 1e-12);
        assert_eq!(design.spec_at(0).test_nontargets, 1500);
    }

    #[test]
    fn uci_split_sizes() {
        let (problem, test) = uci_problem(UciDataset::Iris, 3, ExtentStrategy::Mean).unwrap();
        assert_eq!(problem.train.len(), 25);
        assert_eq!(problem.validation.len(), 12 + 50);
        assert_eq!(test.len(), 13 + 50);
        let (again, _) = uci_problem(UciDataset::Iris, 3, ExtentStrategy::Mean).unwrap();
        assert_eq!(again.train, problem.train);
    }

    #[test]
    fn embedding_of_test_patterns() {
        let mut spec = SyntheticSpec::three_gaussians(0.02, 4);
        spec.train_targets = 15;
        spec.validation_targets = 15;
        spec.validation_nontargets = 15;
        let splits = generate_gaussian_clusters(&spec).unwrap();
        let schema = crate::feature_space::FeatureSchema::quantitative(2).unwrap();
        let problem = Problem::new(
            &schema,
            &NormalizationStats::identity(&schema),
            &splits.train,
            &splits.validation,
            ExtentStrategy::Mean,
        )
        .unwrap();
        let run = train_and_test(&quick(3), &problem, &splits.validation).unwrap();
        let pts: Vec<Pattern> = splits.validation.iter().map(|r| r.pattern.clone()).collect();
        let xy = embed_patterns(run.training.ensemble().selected_model(), &pts).unwrap();
        assert_eq!(xy.len(), 30);
        assert!(xy.iter().all(|p| p[0].is_finite() && p[1].is_finite()));
    }
}
