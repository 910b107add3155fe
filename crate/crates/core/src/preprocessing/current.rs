//! Backbone electric current feature.

use super::normalize::affine_normalize;

/// Sampling period of the current measurements.
pub const SAMPLE_MINUTES: f64 = 10.0;
const HALF_WINDOW_MINUTES: f64 = 12.0 * 60.0;

/// Absolute difference between the mean current of the first and the second
/// 12-hour half of a 24-hour window sampled every `interval_minutes`.
///
/// Returns `None` (not applicable) when either half has no sample.
pub fn backbone_current_feature(samples: &[f64], interval_minutes: f64) -> Option<f64> {
    let split = samples
        .iter()
        .enumerate()
        .position(|(i, _)| i as f64 * interval_minutes >= HALF_WINDOW_MINUTES)
        .unwrap_or(samples.len());
    let (w1, w2) = samples.split_at(split);
    if w1.is_empty() || w2.is_empty() {
        return None;
    }
    let mean = |w: &[f64]| w.iter().sum::<f64>() / w.len() as f64;
    Some((mean(w1) - mean(w2)).abs())
}

/// Affine-normalizes a column of backbone statistics against its own range,
/// keeping missing entries missing.
pub fn normalize_backbone_column(column: &[Option<f64>]) -> Vec<Option<f64>> {
    let present = column.iter().flatten();
    let min = present.clone().cloned().fold(f64::INFINITY, f64::min);
    let max = present.cloned().fold(f64::NEG_INFINITY, f64::max);
    column
        .iter()
        .map(|v| v.map(|x| affine_normalize(x, min, max).expect("range of present values")))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let flat = vec![7.0; 144];
        assert_eq!(backbone_current_feature(&flat, SAMPLE_MINUTES), Some(0.0));

        let mut step = vec![10.0; 72];
        step.extend(vec![20.0; 72]);
        assert_eq!(backbone_current_feature(&step, SAMPLE_MINUTES), Some(10.0));

        let col = normalize_backbone_column(&[Some(0.0), Some(10.0), Some(5.0), None]);
        assert_eq!(col, vec![Some(0.0), Some(1.0), Some(0.5), None]);
    }

    #[test]
    fn empty_half_is_missing() {
        assert_eq!(backbone_current_feature(&[1.0, 2.0], SAMPLE_MINUTES), None);
        assert_eq!(backbone_current_feature(&[], SAMPLE_MINUTES), None);
    }
}
