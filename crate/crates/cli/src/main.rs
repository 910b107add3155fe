use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hetocc_cli::{error_summary, parse_config, run, DataPaths, ExperimentKind, Mode, Overrides, SynthKind};
use hetocc_core::clustering::ExtentStrategy;

/// One-class classification over heterogeneous feature spaces.
///
/// Every command prints a JSON summary as its last stdout line. Exit status
/// is 0 on success, 1 on invalid configuration or data, 2 on I/O failure.
#[derive(Parser)]
#[command(name = "hetocc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// TOML run configuration; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Directory receiving every artifact.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    extent_strategy: Option<Strategy>,
    #[arg(long, global = true)]
    population: Option<usize>,
    #[arg(long, global = true)]
    crossover_fraction: Option<f64>,
    #[arg(long, global = true)]
    elites: Option<usize>,
    #[arg(long, global = true)]
    max_generations: Option<usize>,
    #[arg(long, global = true)]
    stall_generations: Option<usize>,
    #[arg(long, global = true)]
    alpha: Option<f64>,
    #[arg(long, global = true)]
    sigma_max: Option<f64>,
    #[arg(long, global = true)]
    per_cluster_tolerance: Option<bool>,
    #[arg(long, global = true)]
    k_min: Option<usize>,
    #[arg(long, global = true)]
    k_max: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Strategy {
    Mean,
    Max,
    Std,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Gaussian,
    Surrogate,
}

#[derive(Args, Default)]
struct Paths {
    #[arg(long)]
    schema: Option<PathBuf>,
    #[arg(long)]
    stats: Option<PathBuf>,
    #[arg(long)]
    train: Option<PathBuf>,
    #[arg(long)]
    validation: Option<PathBuf>,
    #[arg(long)]
    test: Option<PathBuf>,
}

#[derive(Args, Default)]
struct SynthArgs {
    #[arg(long, value_enum)]
    kind: Option<Kind>,
    #[arg(long)]
    spread: Option<f64>,
    #[arg(long)]
    ratio: Option<f64>,
    #[arg(long)]
    exclusion_radius: Option<f64>,
    #[arg(long)]
    validation_nontargets: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Train on target patterns, select k on the validation set, save the model.
    Train(Paths),
    /// Classify unlabeled patterns with a saved model.
    Classify {
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Score a saved model on a labeled test set.
    Evaluate {
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        test: Option<PathBuf>,
    },
    /// Write a synthetic dataset (schema, stats and three splits).
    Synth(SynthArgs),
    /// Run a packaged experiment.
    #[command(subcommand)]
    Experiment(Experiment),
}

#[derive(Subcommand)]
enum Experiment {
    /// Ratio sweep of the implicit false-positive rate.
    ImplicitFpr {
        #[command(flatten)]
        synth: SynthArgs,
        #[arg(long, value_delimiter = ',')]
        ratios: Option<Vec<f64>>,
    },
    /// Three Gaussian clusters against uniform non-targets.
    Gaussian(SynthArgs),
    /// Benchmark tables, several seeded splits each.
    Uci {
        #[arg(long, value_delimiter = ',')]
        datasets: Option<Vec<String>>,
        #[arg(long, value_delimiter = ',')]
        seeds: Option<Vec<u64>>,
    },
}

fn synth_overrides(o: &mut Overrides, s: SynthArgs) {
    o.synth_kind = s.kind.map(|k| match k {
        Kind::Gaussian => SynthKind::Gaussian,
        Kind::Surrogate => SynthKind::Surrogate,
    });
    o.spread = s.spread;
    o.ratio = s.ratio;
    o.exclusion_radius = s.exclusion_radius;
    o.validation_nontargets = s.validation_nontargets;
}

fn overrides(cli: Cli) -> (Mode, Option<PathBuf>, Overrides) {
    let c = cli.common;
    let mut o = Overrides {
        seed: c.seed,
        output: c.output,
        extent_strategy: c.extent_strategy.map(|s| match s {
            Strategy::Mean => ExtentStrategy::Mean,
            Strategy::Max => ExtentStrategy::Max,
            Strategy::Std => ExtentStrategy::Std,
        }),
        population: c.population,
        crossover_fraction: c.crossover_fraction,
        elites: c.elites,
        max_generations: c.max_generations,
        stall_generations: c.stall_generations,
        alpha: c.alpha,
        sigma_max: c.sigma_max,
        per_cluster_tolerance: c.per_cluster_tolerance,
        k_min: c.k_min,
        k_max: c.k_max,
        ..Default::default()
    };
    let mode = match cli.command {
        Command::Train(p) => {
            o.data = DataPaths {
                schema: p.schema,
                stats: p.stats,
                train: p.train,
                validation: p.validation,
                test: p.test,
                ..Default::default()
            };
            Mode::Train
        }
        Command::Classify { model, input } => {
            o.data.model = model;
            o.data.input = input;
            Mode::Classify
        }
        Command::Evaluate { model, test } => {
            o.data.model = model;
            o.data.test = test;
            Mode::Evaluate
        }
        Command::Synth(s) => {
            synth_overrides(&mut o, s);
            Mode::Synth
        }
        Command::Experiment(Experiment::ImplicitFpr { synth, ratios }) => {
            synth_overrides(&mut o, synth);
            o.ratios = ratios;
            Mode::Experiment(ExperimentKind::ImplicitFpr)
        }
        Command::Experiment(Experiment::Gaussian(s)) => {
            synth_overrides(&mut o, s);
            Mode::Experiment(ExperimentKind::Gaussian)
        }
        Command::Experiment(Experiment::Uci { datasets, seeds }) => {
            o.datasets = datasets;
            o.seeds = seeds;
            Mode::Experiment(ExperimentKind::Uci)
        }
    };
    (mode, c.config, o)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let (mode, path, o) = overrides(Cli::parse());
    let result = parse_config(path.as_deref(), o, mode).and_then(|config| run(mode, &config));
    match result {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("hetocc: {e}");
            let summary = error_summary(Some(mode), &e);
            println!("{summary}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
