//! Tab-separated report tables.

use std::fmt::Write as _;

use super::experiments::{ImplicitFprOutcome, KRow, TestEvaluation, UciOutcome};
use crate::classifier::{Decision, Provenance};
use crate::optimizer::{TrainingOutcome, TrainingTrace};

/// Format tag written in every report header.
pub const REPORT_FORMAT: &str = "hetocc-report/1";

fn num(x: f64) -> String {
    format!("{x:.6}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_else(|| "NA".into())
}

/// `#` comment lines naming the generator, configuration hash, seed and
/// report format.
pub fn provenance_header(p: &Provenance) -> String {
    format!(
        "# generator\t{}\n# config_hash\t{}\n# seed\t{}\n# format\t{REPORT_FORMAT}\n",
        p.generator, p.config_hash, p.seed
    )
}

/// Validation summary of every trained `k`.
pub fn training_table(outcome: &TrainingOutcome) -> String {
    let mut s = String::from("k\tselected\tgenerations\tbest_fitness\tval_accuracy\tval_fe\treplicate\n");
    for (i, r) in outcome.reports.iter().enumerate() {
        writeln!(
            s,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}",
            r.k,
            u8::from(i == outcome.selected),
            r.trace.generations(),
            num(r.best_fitness),
            num(r.validation_accuracy),
            num(r.validation_fuzzy_entropy),
            r.selected_replicate
        )
        .expect("write to string");
    }
    s
}

/// Per-generation best fitness, weight entropy of the best genome and mean
/// fitness.
pub fn trace_table(k: usize, trace: &TrainingTrace) -> String {
    let mut s = String::from("k\tgeneration\tbest_fitness\tweight_entropy\tmean_fitness\n");
    for g in 0..trace.generations() {
        writeln!(
            s,
            "{k}\t{g}\t{}\t{}\t{}",
            num(trace.best_fitness[g]),
            num(trace.best_weight_entropy[g]),
            num(trace.mean_fitness[g])
        )
        .expect("write to string");
    }
    s
}

/// `metric\tvalue` lines for one test evaluation.
pub fn metrics_table(e: &TestEvaluation) -> String {
    let c = &e.counts;
    let m = &e.metrics;
    let mut s = String::from("metric\tvalue\n");
    for (name, v) in [("TP", c.tp), ("FP", c.fp), ("TN", c.tn), ("FN", c.fn_)] {
        writeln!(s, "{name}\t{v}").expect("write to string");
    }
    for (name, v) in [
        ("FPR", m.fpr),
        ("R", m.recall),
        ("P", m.precision),
        ("A", m.accuracy),
        ("FE", e.fuzzy_entropy),
    ] {
        writeln!(s, "{name}\t{}", num(v)).expect("write to string");
    }
    writeln!(s, "AUC\t{}", opt(e.auc)).expect("write to string");
    for (i, a) in e.replicate_accuracy.iter().enumerate() {
        writeln!(s, "A_replicate_{i}\t{}", num(*a)).expect("write to string");
    }
    s
}

/// One line per classified pattern.
pub fn decisions_table(decisions: &[Decision]) -> String {
    let mut s = String::from("row\ttarget\tmembership\tcluster\tdissimilarity\n");
    for (i, d) in decisions.iter().enumerate() {
        writeln!(
            s,
            "{}\t{}\t{}\t{}\t{}",
            i + 1,
            u8::from(d.target),
            num(d.membership),
            d.cluster,
            num(d.dissimilarity)
        )
        .expect("write to string");
    }
    s
}

/// One line per `k`: validation results, then test FPR, recall, precision,
/// accuracy, AUC, fuzzy entropy, and the fitness/weight-entropy MI.
pub fn k_table(rows: &[KRow], selected_k: usize) -> String {
    let mut s = String::from(
        "k\tselected\tgenerations\tbest_fitness\tval_accuracy\tval_fe\tFPR\tR\tP\tA\tAUC\tFE\tMI\n",
    );
    for r in rows {
        let m = &r.test.metrics;
        writeln!(
            s,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            r.k,
            u8::from(r.k == selected_k),
            r.generations,
            num(r.best_fitness),
            num(r.validation_accuracy),
            num(r.validation_fuzzy_entropy),
            num(m.fpr),
            num(m.recall),
            num(m.precision),
            num(m.accuracy),
            opt(r.test.auc),
            num(r.test.fuzzy_entropy),
            opt(r.mutual_information),
        )
        .expect("write to string");
    }
    s
}

pub fn ratio_table(outcome: &ImplicitFprOutcome) -> String {
    let mut s = String::from("ratio\tspread\tk\tFPR\tA\tAUC\n");
    for p in &outcome.points {
        writeln!(
            s,
            "{}\t{}\t{}\t{}\t{}\t{}",
            num(p.ratio),
            num(p.spread),
            p.k,
            num(p.fpr),
            num(p.accuracy),
            opt(p.auc)
        )
        .expect("write to string");
    }
    writeln!(s, "# correlation\t{}", num(outcome.correlation)).expect("write to string");
    s
}

pub fn uci_table(outcomes: &[UciOutcome]) -> String {
    let mut s = String::from("dataset\truns\tmean_AUC\tstd_AUC\tks\n");
    for o in outcomes {
        let ks: Vec<String> = o.ks.iter().map(|k| k.to_string()).collect();
        writeln!(
            s,
            "{}\t{}\t{}\t{}\t{}",
            o.dataset.name(),
            o.aucs.len(),
            num(o.mean_auc),
            num(o.std_auc),
            ks.join(",")
        )
        .expect("write to string");
    }
    s
}

/// `x\ty` lines, one per point.
pub fn coordinates_table(points: &[[f64; 2]], labels: &[Option<bool>]) -> String {
    let mut s = String::from("x\ty\ttarget\n");
    for (p, l) in points.iter().zip(labels) {
        let label = match l {
            Some(true) => "1",
            Some(false) => "0",
            None => "NA",
        };
        writeln!(s, "{}\t{}\t{label}", num(p[0]), num(p[1])).expect("write to string");
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluation::experiments::RatioPoint;

    #[test]
    fn ratio_table_layout() {
        let out = ImplicitFprOutcome {
            points: vec![RatioPoint {
                ratio: 0.1,
                spread: 0.03,
                k: 3,
                fpr: 0.1,
                accuracy: 0.9,
                auc: None,
            }],
            correlation: 0.95,
        };
        let t = ratio_table(&out);
        let lines: Vec<&str> = t.lines().collect();
        assert_eq!(lines[1], "0.100000\t0.030000\t3\t0.100000\t0.900000\tNA");
        assert_eq!(lines[2], "# correlation\t0.950000");
        assert_eq!(coordinates_table(&[[1.0, -2.0]], &[None]), "x\ty\ttarget\n1.000000\t-2.000000\tNA\n");
    }

    #[test]
    fn header_and_decisions_layout() {
        let p = Provenance {
            generator: "hetocc 0.1.0".into(),
            config_hash: "ab".into(),
            seed: 7,
        };
        let h = provenance_header(&p);
        assert_eq!(
            h,
            "# generator\thetocc 0.1.0\n# config_hash\tab\n# seed\t7\n# format\thetocc-report/1\n"
        );
        let d = Decision {
            target: true,
            membership: 0.75,
            cluster: 2,
            dissimilarity: 0.125,
        };
        assert_eq!(decisions_table(&[d]).lines().nth(1), Some("1\t1\t0.750000\t2\t0.125000"));
    }
}
