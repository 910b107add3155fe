use std::fs;
use std::path::{Path, PathBuf};

use hetocc_core::classifier::persist::model_to_json;
use hetocc_core::classifier::{load_model, Ensemble, Provenance, MODEL_FORMAT};
use hetocc_core::evaluation::report::{self, provenance_header, REPORT_FORMAT};
use hetocc_core::evaluation::{
    embed_patterns, evaluate_ensemble, run_gaussian_experiment, run_implicit_fpr_experiment, run_uci_experiment,
    train_and_test, ImplicitFprDesign,
};
use hetocc_core::feature_space::{FeatureSchema, Pattern};
use hetocc_core::optimizer::{train_occ, Problem, TrainingOutcome};
use hetocc_core::preprocessing::io::format_records;
use hetocc_core::preprocessing::{
    generate_fault_surrogate, generate_gaussian_clusters, read_records, read_schema, read_stats,
    NormalizationStats, Record, SurrogateSpec, SyntheticSpec,
};
use serde_json::{json, Map, Value};

use crate::config::{ExperimentKind, Mode, RunConfig, SynthKind};
use crate::error::{CliError, CliResult};

/// Output directory plus the provenance stamped on everything written there.
struct Artifacts {
    dir: PathBuf,
    provenance: Provenance,
    written: Vec<String>,
}

impl Artifacts {
    fn create(dir: &Path, provenance: Provenance) -> CliResult<Self> {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        Ok(Artifacts {
            dir: dir.to_path_buf(),
            provenance,
            written: vec![],
        })
    }

    fn write(&mut self, name: &str, body: &str) -> CliResult<PathBuf> {
        let path = self.dir.join(name);
        fs::write(&path, body).map_err(|e| CliError::io(&path, e))?;
        self.written.push(path.display().to_string());
        Ok(path)
    }

    /// Table or dataset with the `#` provenance header in front.
    fn write_with_header(&mut self, name: &str, body: &str) -> CliResult<PathBuf> {
        let text = format!("{}{body}", provenance_header(&self.provenance));
        self.write(name, &text)
    }
}

fn read_labeled(path: &Path, schema: &FeatureSchema, stats: &NormalizationStats) -> CliResult<Vec<Record>> {
    read_records(path, schema)?
        .into_iter()
        .map(|r| {
            Ok(Record {
                pattern: stats.apply(&r.pattern)?,
                target: r.target,
            })
        })
        .collect()
}

fn required<'a>(p: &'a Option<PathBuf>, key: &str) -> CliResult<&'a Path> {
    p.as_deref()
        .ok_or_else(|| CliError::Config(format!("missing data.{key}")))
}

/// Concatenation of the per-`k` traces under a single header line.
fn traces(outcome: &TrainingOutcome) -> String {
    let mut s = String::new();
    for (i, r) in outcome.reports.iter().enumerate() {
        let t = report::trace_table(r.k, &r.trace);
        let skip = if i == 0 { 0 } else { 1 };
        for line in t.lines().skip(skip) {
            s.push_str(line);
            s.push('\n');
        }
    }
    s
}

fn train(config: &RunConfig, out: &mut Artifacts, summary: &mut Map<String, Value>) -> CliResult<()> {
    let d = &config.data;
    let schema = read_schema(required(&d.schema, "schema")?)?;
    let train_records = read_records(required(&d.train, "train")?, &schema)?;
    if let Some(row) = train_records.iter().position(|r| r.target == Some(false)) {
        return Err(CliError::Config(format!(
            "training row {} is labeled non-target; the training file holds targets only",
            row + 1
        )));
    }
    let raw: Vec<Pattern> = train_records.into_iter().map(|r| r.pattern).collect();
    let stats = match &d.stats {
        Some(p) => read_stats(p)?,
        None => NormalizationStats::fit(&schema, &raw)?,
    };
    let train = stats.apply_all(&raw)?;
    let validation = read_labeled(required(&d.validation, "validation")?, &schema, &stats)?;
    let problem = Problem::new(&schema, &stats, &train, &validation, config.extent_strategy)?;
    let ga = config.ga_config();
    let training = match &d.test {
        Some(p) => {
            let test = read_labeled(p, &schema, &stats)?;
            let run = train_and_test(&ga, &problem, &test)?;
            out.write_with_header("report.tsv", &report::k_table(&run.rows, run.training.k()))?;
            let row = run.selected_row();
            summary.insert("test_auc".into(), json!(row.test.auc));
            summary.insert("test_accuracy".into(), json!(row.test.metrics.accuracy));
            run.training
        }
        None => train_occ(&ga, &problem)?,
    };
    out.write_with_header("training.tsv", &report::training_table(&training))?;
    out.write_with_header("trace.tsv", &traces(&training))?;
    let selected = training.selected_report();
    summary.insert("k".into(), json!(selected.k));
    summary.insert("validation_accuracy".into(), json!(selected.validation_accuracy));
    summary.insert("validation_fuzzy_entropy".into(), json!(selected.validation_fuzzy_entropy));
    let model = out.write("model.json", &model_to_json(training.ensemble(), &out.provenance))?;
    summary.insert("model".into(), json!(model.display().to_string()));
    Ok(())
}

fn load(config: &RunConfig) -> CliResult<Ensemble> {
    let (ensemble, _) = load_model(required(&config.data.model, "model")?)?;
    Ok(ensemble)
}

fn classify(config: &RunConfig, out: &mut Artifacts, summary: &mut Map<String, Value>) -> CliResult<()> {
    let ensemble = load(config)?;
    let m = ensemble.selected_model();
    let records = read_labeled(required(&config.data.input, "input")?, &m.schema, &m.stats)?;
    let decisions = records
        .iter()
        .map(|r| ensemble.classify(&r.pattern))
        .collect::<Result<Vec<_>, _>>()?;
    out.write_with_header("decisions.tsv", &report::decisions_table(&decisions))?;
    summary.insert("patterns".into(), json!(decisions.len()));
    summary.insert("targets".into(), json!(decisions.iter().filter(|d| d.target).count()));
    Ok(())
}

fn evaluate(config: &RunConfig, out: &mut Artifacts, summary: &mut Map<String, Value>) -> CliResult<()> {
    let ensemble = load(config)?;
    let m = ensemble.selected_model();
    let test = read_labeled(required(&config.data.test, "test")?, &m.schema, &m.stats)?;
    let e = evaluate_ensemble(&ensemble, &test)?;
    out.write_with_header("metrics.tsv", &report::metrics_table(&e))?;
    summary.insert("fpr".into(), json!(e.metrics.fpr));
    summary.insert("recall".into(), json!(e.metrics.recall));
    summary.insert("accuracy".into(), json!(e.metrics.accuracy));
    summary.insert("auc".into(), json!(e.auc));
    summary.insert("fuzzy_entropy".into(), json!(e.fuzzy_entropy));
    Ok(())
}

fn gaussian_spec(config: &RunConfig, spread: f64) -> SyntheticSpec {
    let s = &config.synth;
    let mut spec = SyntheticSpec::three_gaussians(spread, config.root_seed());
    spec.exclusion_radius = s.exclusion_radius;
    spec.validation_nontargets = s.validation_nontargets;
    spec.test_nontargets = (spec.train_targets as f64 / s.ratio).round() as usize;
    spec
}

fn synth(config: &RunConfig, out: &mut Artifacts, summary: &mut Map<String, Value>) -> CliResult<()> {
    let (schema, train, validation, test) = match config.synth.kind {
        SynthKind::Gaussian => {
            let splits = generate_gaussian_clusters(&gaussian_spec(config, config.synth.spread))?;
            (FeatureSchema::quantitative(2)?, splits.train, splits.validation, splits.test)
        }
        SynthKind::Surrogate => {
            let mut spec = SurrogateSpec::with_ratio(config.synth.ratio, config.root_seed())?;
            spec.validation_nontargets = config.synth.validation_nontargets;
            let data = generate_fault_surrogate(&spec)?;
            (data.schema, data.train, data.validation, data.test)
        }
    };
    // Generated patterns are already normalized.
    let stats = NormalizationStats::identity(&schema);
    let train: Vec<Record> = train.into_iter().map(Record::target).collect();
    let mut files = Map::new();
    for (name, body, header) in [
        ("schema.json", schema.to_json(), false),
        ("stats.json", stats.to_json(), false),
        ("train.jsonl", format_records(&train), true),
        ("validation.jsonl", format_records(&validation), true),
        ("test.jsonl", format_records(&test), true),
    ] {
        let body = if body.ends_with('\n') { body } else { body + "\n" };
        let text = if header { provenance_header(&out.provenance) + &body } else { body };
        out.write(name, &text)?;
        files.insert(name.into(), json!(hetocc_core::classifier::sha256_hex(text.as_bytes())));
    }
    let p = &out.provenance;
    let manifest = json!({
        "format": REPORT_FORMAT,
        "generator": p.generator,
        "config_hash": p.config_hash,
        "seed": p.seed,
        "files": files,
    });
    out.write("manifest.json", &(serde_json::to_string_pretty(&manifest).expect("json") + "\n"))?;
    summary.insert("train".into(), json!(train.len()));
    summary.insert("validation".into(), json!(validation.len()));
    summary.insert("test".into(), json!(test.len()));
    Ok(())
}

fn experiment(
    kind: ExperimentKind,
    config: &RunConfig,
    out: &mut Artifacts,
    summary: &mut Map<String, Value>,
) -> CliResult<()> {
    let ga = config.ga_config();
    let strategy = config.extent_strategy;
    match kind {
        ExperimentKind::Gaussian => {
            let spec = gaussian_spec(config, config.synth.spread);
            let run = run_gaussian_experiment(&spec, &ga, strategy)?;
            out.write_with_header("report.tsv", &report::k_table(&run.rows, run.training.k()))?;
            let splits = generate_gaussian_clusters(&spec)?;
            let patterns: Vec<Pattern> = splits.test.iter().map(|r| r.pattern.clone()).collect();
            let labels: Vec<Option<bool>> = splits.test.iter().map(|r| r.target).collect();
            let coords = embed_patterns(run.training.ensemble().selected_model(), &patterns)?;
            out.write_with_header("coordinates.tsv", &report::coordinates_table(&coords, &labels))?;
            let row = run.selected_row();
            summary.insert("k".into(), json!(row.k));
            summary.insert("test_accuracy".into(), json!(row.test.metrics.accuracy));
            summary.insert("test_auc".into(), json!(row.test.auc));
            summary.insert("validation_fuzzy_entropy".into(), json!(row.validation_fuzzy_entropy));
        }
        ExperimentKind::ImplicitFpr => {
            let [lo, hi] = config.experiment.spread_range;
            let design = ImplicitFprDesign {
                ratios: config.experiment.ratios.clone(),
                spread_range: (lo, hi),
                base: gaussian_spec(config, lo),
            };
            let outcome = run_implicit_fpr_experiment(&design, &ga, strategy)?;
            out.write_with_header("report.tsv", &report::ratio_table(&outcome))?;
            summary.insert("correlation".into(), json!(outcome.correlation));
        }
        ExperimentKind::Uci => {
            let outcomes = config
                .uci_datasets()?
                .into_iter()
                .map(|d| run_uci_experiment(d, &config.experiment.seeds, &ga, strategy))
                .collect::<Result<Vec<_>, _>>()?;
            out.write_with_header("report.tsv", &report::uci_table(&outcomes))?;
            let aucs: Map<String, Value> = outcomes
                .iter()
                .map(|o| (o.dataset.name().to_string(), json!(o.mean_auc)))
                .collect();
            summary.insert("mean_auc".into(), Value::Object(aucs));
        }
    }
    Ok(())
}

/// Executes `mode` and returns the summary object printed as the last line.
pub fn run(mode: Mode, config: &RunConfig) -> CliResult<Value> {
    let provenance = Provenance::new(config.hash(mode), config.root_seed());
    let mut summary = Map::new();
    summary.insert("status".into(), json!("ok"));
    summary.insert("mode".into(), json!(mode.name()));
    summary.insert("config_hash".into(), json!(provenance.config_hash));
    summary.insert("seed".into(), json!(provenance.seed));
    summary.insert("model_format".into(), json!(MODEL_FORMAT));
    let mut out = Artifacts::create(&config.output, provenance)?;
    match mode {
        Mode::Train => train(config, &mut out, &mut summary)?,
        Mode::Classify => classify(config, &mut out, &mut summary)?,
        Mode::Evaluate => evaluate(config, &mut out, &mut summary)?,
        Mode::Synth => synth(config, &mut out, &mut summary)?,
        Mode::Experiment(kind) => experiment(kind, config, &mut out, &mut summary)?,
    }
    summary.insert("artifacts".into(), json!(out.written));
    Ok(Value::Object(summary))
}

/// Summary object for a failed run.
pub fn error_summary(mode: Option<Mode>, err: &CliError) -> Value {
    json!({
        "status": "error",
        "mode": mode.map(Mode::name),
        "exit_code": err.exit_code(),
        "error": err.to_string(),
    })
}
