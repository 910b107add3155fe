//! Run configuration: a TOML file with nested blocks, overridden by flags.
//!
//! ```toml
//! seed = 7
//! output = "out"
//! extent_strategy = "mean"     # mean | max | std
//!
//! [data]
//! schema = "schema.json"
//! stats = "stats.json"         # optional; fitted on the training file otherwise
//! train = "train.jsonl"
//! validation = "validation.jsonl"
//! test = "test.jsonl"
//! model = "out/model.json"
//! input = "new.jsonl"          # patterns to classify
//!
//! [ga]                         # any GA setting, e.g.
//! k_min = 1
//! k_max = 5
//! alpha = 0.8
//! sigma_max = 0.5
//!
//! [synth]
//! kind = "gaussian"            # gaussian | surrogate
//! spread = 0.035
//! ratio = 0.1
//!
//! [experiment]
//! ratios = [0.1, 0.175, 0.25, 0.325, 0.4, 0.475]
//! spread_range = [0.035, 0.08]
//! datasets = ["iris", "breast_wisconsin", "ecoli", "diabetes"]
//! seeds = [1, 2, 3, 4, 5]
//! ```

use std::path::{Path, PathBuf};

use hetocc_core::clustering::ExtentStrategy;
use hetocc_core::evaluation::UciDataset;
use hetocc_core::optimizer::GaConfig;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    ImplicitFpr,
    Gaussian,
    Uci,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode", content = "experiment")]
pub enum Mode {
    Train,
    Classify,
    Evaluate,
    Synth,
    Experiment(ExperimentKind),
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Train => "train",
            Mode::Classify => "classify",
            Mode::Evaluate => "evaluate",
            Mode::Synth => "synth",
            Mode::Experiment(ExperimentKind::ImplicitFpr) => "experiment implicit-fpr",
            Mode::Experiment(ExperimentKind::Gaussian) => "experiment gaussian",
            Mode::Experiment(ExperimentKind::Uci) => "experiment uci",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DataPaths {
    pub schema: Option<PathBuf>,
    pub stats: Option<PathBuf>,
    pub train: Option<PathBuf>,
    pub validation: Option<PathBuf>,
    pub test: Option<PathBuf>,
    pub model: Option<PathBuf>,
    pub input: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SynthKind {
    #[default]
    Gaussian,
    Surrogate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthConfig {
    pub kind: SynthKind,
    /// Cluster standard deviation of the Gaussian data.
    pub spread: f64,
    /// Training targets per test non-target.
    pub ratio: f64,
    /// Uniform non-targets closer than this to a center are redrawn.
    pub exclusion_radius: f64,
    pub validation_nontargets: usize,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            kind: SynthKind::Gaussian,
            spread: 0.035,
            ratio: 0.1,
            exclusion_radius: 0.0,
            validation_nontargets: 150,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub ratios: Vec<f64>,
    pub spread_range: [f64; 2],
    pub datasets: Vec<String>,
    pub seeds: Vec<u64>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            ratios: vec![0.1, 0.175, 0.25, 0.325, 0.4, 0.475],
            spread_range: [0.035, 0.08],
            datasets: UciDataset::ALL.iter().map(|d| d.name().to_string()).collect(),
            seeds: vec![1, 2, 3, 4, 5],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Root seed; overrides `ga.seed` when given.
    pub seed: Option<u64>,
    pub output: PathBuf,
    pub extent_strategy: ExtentStrategy,
    pub data: DataPaths,
    pub ga: GaConfig,
    pub synth: SynthConfig,
    pub experiment: ExperimentConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: None,
            output: PathBuf::from("out"),
            extent_strategy: ExtentStrategy::Mean,
            data: DataPaths::default(),
            ga: GaConfig::default(),
            synth: SynthConfig::default(),
            experiment: ExperimentConfig::default(),
        }
    }
}

/// Values given on the command line; `None` leaves the file value alone.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub output: Option<PathBuf>,
    pub extent_strategy: Option<ExtentStrategy>,
    pub data: DataPaths,
    pub population: Option<usize>,
    pub crossover_fraction: Option<f64>,
    pub elites: Option<usize>,
    pub max_generations: Option<usize>,
    pub stall_generations: Option<usize>,
    pub alpha: Option<f64>,
    pub sigma_max: Option<f64>,
    pub per_cluster_tolerance: Option<bool>,
    pub k_min: Option<usize>,
    pub k_max: Option<usize>,
    pub synth_kind: Option<SynthKind>,
    pub spread: Option<f64>,
    pub ratio: Option<f64>,
    pub exclusion_radius: Option<f64>,
    pub validation_nontargets: Option<usize>,
    pub ratios: Option<Vec<f64>>,
    pub datasets: Option<Vec<String>>,
    pub seeds: Option<Vec<u64>>,
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

fn set_path(slot: &mut Option<PathBuf>, value: Option<PathBuf>) {
    if value.is_some() {
        *slot = value;
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::Config(e.message().to_string()))
    }

    pub fn from_file(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_toml(&text).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn apply(&mut self, o: Overrides) {
        if o.seed.is_some() {
            self.seed = o.seed;
        }
        set(&mut self.output, o.output);
        set(&mut self.extent_strategy, o.extent_strategy);
        let d = &mut self.data;
        set_path(&mut d.schema, o.data.schema);
        set_path(&mut d.stats, o.data.stats);
        set_path(&mut d.train, o.data.train);
        set_path(&mut d.validation, o.data.validation);
        set_path(&mut d.test, o.data.test);
        set_path(&mut d.model, o.data.model);
        set_path(&mut d.input, o.data.input);
        let g = &mut self.ga;
        set(&mut g.population, o.population);
        set(&mut g.crossover_fraction, o.crossover_fraction);
        set(&mut g.elites, o.elites);
        set(&mut g.max_generations, o.max_generations);
        set(&mut g.stall_generations, o.stall_generations);
        set(&mut g.alpha, o.alpha);
        set(&mut g.sigma_max, o.sigma_max);
        set(&mut g.per_cluster_tolerance, o.per_cluster_tolerance);
        set(&mut g.k_min, o.k_min);
        set(&mut g.k_max, o.k_max);
        let s = &mut self.synth;
        set(&mut s.kind, o.synth_kind);
        set(&mut s.spread, o.spread);
        set(&mut s.ratio, o.ratio);
        set(&mut s.exclusion_radius, o.exclusion_radius);
        set(&mut s.validation_nontargets, o.validation_nontargets);
        let e = &mut self.experiment;
        set(&mut e.ratios, o.ratios);
        set(&mut e.datasets, o.datasets);
        set(&mut e.seeds, o.seeds);
    }

    /// The seed every random stream derives from.
    pub fn root_seed(&self) -> u64 {
        self.seed.unwrap_or(self.ga.seed)
    }

    /// GA settings with the root seed filled in.
    pub fn ga_config(&self) -> GaConfig {
        GaConfig {
            seed: self.root_seed(),
            ..self.ga.clone()
        }
    }

    pub fn uci_datasets(&self) -> CliResult<Vec<UciDataset>> {
        self.experiment
            .datasets
            .iter()
            .map(|n| UciDataset::parse(n).map_err(|e| CliError::Config(e.to_string())))
            .collect()
    }

    /// Bounds and per-mode required paths.
    pub fn validate(&self, mode: Mode) -> CliResult<()> {
        self.ga_config().validate().map_err(|e| CliError::Config(e.to_string()))?;
        let s = &self.synth;
        bound(s.spread > 0.0 && s.spread.is_finite(), "synth.spread must be positive")?;
        bound(s.ratio > 0.0 && s.ratio.is_finite(), "synth.ratio must be positive")?;
        bound(
            (0.0..0.5).contains(&s.exclusion_radius),
            "synth.exclusion_radius must be in [0, 0.5)",
        )?;
        let e = &self.experiment;
        bound(
            e.ratios.len() >= 2 && e.ratios.iter().all(|r| *r > 0.0 && r.is_finite()),
            "experiment.ratios needs at least two positive values",
        )?;
        bound(
            e.spread_range.iter().all(|x| *x > 0.0 && x.is_finite()),
            "experiment.spread_range values must be positive",
        )?;
        bound(!e.seeds.is_empty(), "experiment.seeds must not be empty")?;
        self.uci_datasets()?;
        let d = &self.data;
        let need = |p: &Option<PathBuf>, key: &str| -> CliResult<()> {
            match p {
                Some(_) => Ok(()),
                None => Err(CliError::Config(format!("{} needs data.{key}", mode.name()))),
            }
        };
        match mode {
            Mode::Train => {
                need(&d.schema, "schema")?;
                need(&d.train, "train")?;
                need(&d.validation, "validation")
            }
            Mode::Classify => {
                need(&d.model, "model")?;
                need(&d.input, "input")
            }
            Mode::Evaluate => {
                need(&d.model, "model")?;
                need(&d.test, "test")
            }
            Mode::Synth | Mode::Experiment(_) => Ok(()),
        }
    }

    /// SHA-256 of the configuration with the output directory left out, so
    /// the same run written to two places carries the same hash.
    pub fn hash(&self, mode: Mode) -> String {
        let mut canonical = self.clone();
        canonical.output = PathBuf::new();
        canonical.seed = Some(self.root_seed());
        canonical.ga.seed = self.root_seed();
        let v = serde_json::json!({ "mode": mode, "config": canonical });
        hetocc_core::classifier::sha256_hex(v.to_string().as_bytes())
    }
}

fn bound(ok: bool, what: &str) -> CliResult<()> {
    if ok {
        Ok(())
    } else {
        Err(CliError::Config(what.into()))
    }
}

/// File values (when a file is given) with flags on top, validated for `mode`.
pub fn parse_config(path: Option<&Path>, overrides: Overrides, mode: Mode) -> CliResult<RunConfig> {
    let mut config = match path {
        Some(p) => RunConfig::from_file(p)?,
        None => RunConfig::default(),
    };
    config.apply(overrides);
    config.validate(mode)?;
    Ok(config)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn train_paths() -> Overrides {
        Overrides {
            data: DataPaths {
                schema: Some("s.json".into()),
                train: Some("t.jsonl".into()),
                validation: Some("v.jsonl".into()),
                ..Default::default()
            },
            ..Default::default()
        }
    }

    #[test]
    fn empty_config_gets_defaults() {
        let mut c = RunConfig::from_toml("").unwrap();
        c.apply(train_paths());
        c.validate(Mode::Train).unwrap();
        let g = c.ga_config();
        assert_eq!((g.population, g.max_generations, g.elites), (50, 250, 2));
        assert_eq!((g.alpha, g.crossover_fraction), (0.8, 0.8));
        assert_eq!(c.extent_strategy, ExtentStrategy::Mean);
    }

    #[test]
    fn alpha_out_of_bounds() {
        let mut c = RunConfig::from_toml("[ga]\nalpha = 1.5\n").unwrap();
        c.apply(train_paths());
        let err = c.validate(Mode::Train).unwrap_err().to_string();
        assert!(err.contains("alpha must be in [0, 1]"), "{err}");
    }

    #[test]
    fn unknown_key_is_named() {
        let err = RunConfig::from_toml("[ga]\nmutation_rate = 0.1\n").unwrap_err().to_string();
        assert!(err.contains("mutation_rate"), "{err}");
        let err = RunConfig::from_toml("colour = 1\n").unwrap_err().to_string();
        assert!(err.contains("colour"), "{err}");
    }

    #[test]
    fn flag_overrides_file_seed() {
        let mut c = RunConfig::from_toml("seed = 3\n[ga]\nk_max = 2\n").unwrap();
        assert_eq!(c.root_seed(), 3);
        c.apply(Overrides {
            seed: Some(9),
            ..Default::default()
        });
        assert_eq!(c.ga_config().seed, 9);
        assert_eq!(c.ga.k_max, 2);
    }

    #[test]
    fn missing_paths_are_reported_per_mode() {
        let c = RunConfig::default();
        assert!(c.validate(Mode::Synth).is_ok());
        let err = c.validate(Mode::Classify).unwrap_err().to_string();
        assert!(err.contains("data.model"), "{err}");
    }

    #[test]
    fn hash_ignores_output_directory() {
        let a = RunConfig::default();
        let b = RunConfig {
            output: "elsewhere".into(),
            ..RunConfig::default()
        };
        assert_eq!(a.hash(Mode::Train), b.hash(Mode::Train));
        assert_ne!(a.hash(Mode::Train), a.hash(Mode::Synth));
    }
}
