use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Confusion counts with the target class as positive.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    pub fn_: usize,
}

impl ConfusionCounts {
    /// Counts from `(predicted, actual)` pairs.
    pub fn tally(pairs: impl IntoIterator<Item = (bool, bool)>) -> Self {
        let mut c = ConfusionCounts::default();
        for (predicted, actual) in pairs {
            match (predicted, actual) {
                (true, true) => c.tp += 1,
                (true, false) => c.fp += 1,
                (false, false) => c.tn += 1,
                (false, true) => c.fn_ += 1,
            }
        }
        c
    }

    pub fn total(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }
}

/// Rates derived from a confusion matrix. A rate whose denominator is zero is
/// reported as 0 and listed in `undefined`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfusionMetrics {
    pub fpr: f64,
    pub recall: f64,
    pub precision: f64,
    pub accuracy: f64,
    pub undefined: Vec<String>,
}

pub fn confusion_metrics(c: &ConfusionCounts) -> Result<ConfusionMetrics> {
    if c.total() == 0 {
        return Err(Error::InvalidArgument("confusion matrix is empty".into()));
    }
    let mut undefined = Vec::new();
    let mut ratio = |num: usize, den: usize, name: &str| {
        if den == 0 {
            undefined.push(name.to_string());
            0.0
        } else {
            num as f64 / den as f64
        }
    };
    let fpr = ratio(c.fp, c.fp + c.tn, "fpr");
    let recall = ratio(c.tp, c.tp + c.fn_, "recall");
    let precision = ratio(c.tp, c.tp + c.fp, "precision");
    Ok(ConfusionMetrics {
        fpr,
        recall,
        precision,
        accuracy: (c.tp + c.tn) as f64 / c.total() as f64,
        undefined,
    })
}

/// ROC points from thresholding scores at every distinct value, and the
/// area under the curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocCurve {
    /// `(fpr, tpr)` from `(0, 0)` to `(1, 1)`.
    pub points: Vec<(f64, f64)>,
    pub auc: f64,
}

/// Area under the ROC curve by the Mann-Whitney statistic with midranks;
/// positives are `true` labels and higher scores mean "more target".
pub fn roc_auc(scores: &[(f64, bool)]) -> Result<RocCurve> {
    let pos = scores.iter().filter(|s| s.1).count();
    let neg = scores.len() - pos;
    if pos == 0 || neg == 0 {
        return Err(Error::InvalidArgument(
            "ROC needs at least one positive and one negative".into(),
        ));
    }
    if let Some((s, _)) = scores.iter().find(|s| s.0.is_nan()) {
        return Err(Error::Domain(format!("score {s} is not a number")));
    }
    let mut sorted: Vec<(f64, bool)> = scores.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));

    // midranks (1-based) over tie groups
    let mut rank_sum_pos = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i;
        while j + 1 < sorted.len() && sorted[j + 1].0 == sorted[i].0 {
            j += 1;
        }
        let midrank = (i + j + 2) as f64 / 2.0;
        rank_sum_pos += midrank * sorted[i..=j].iter().filter(|s| s.1).count() as f64;
        i = j + 1;
    }
    let (p, n) = (pos as f64, neg as f64);
    let auc = (rank_sum_pos - p * (p + 1.0) / 2.0) / (p * n);

    // descending thresholds
    let mut points = vec![(0.0, 0.0)];
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut k = sorted.len();
    while k > 0 {
        let threshold = sorted[k - 1].0;
        while k > 0 && sorted[k - 1].0 == threshold {
            if sorted[k - 1].1 {
                tp += 1;
            } else {
                fp += 1;
            }
            k -= 1;
        }
        points.push((fp as f64 / n, tp as f64 / p));
    }
    Ok(RocCurve { points, auc })
}
