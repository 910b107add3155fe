//! Per-feature dissimilarity kernels.

use crate::error::{Error, Result};

/// Simple matching distance between two categorical projections: the
/// fraction of attributes whose labels differ.
pub fn simple_matching<S: AsRef<str>>(x: &[S], y: &[S]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::Schema(format!(
            "categorical projections have {} and {} attributes",
            x.len(),
            y.len()
        )));
    }
    if x.is_empty() {
        return Err(Error::Schema("categorical projection is empty".into()));
    }
    let mismatches = x.iter().zip(y).filter(|(a, b)| a.as_ref() != b.as_ref()).count();
    Ok(mismatches as f64 / x.len() as f64)
}

/// Wrap-around difference on `{0, .., period}`: `min(|x - y|, period - |x - y|)`.
pub fn circular_diff(x: u32, y: u32, period: u32) -> Result<f64> {
    if x > period || y > period {
        return Err(Error::Domain(format!(
            "circular values {x}, {y} outside [0, {period}]"
        )));
    }
    let diff = x.abs_diff(y);
    Ok(diff.min(period - diff) as f64)
}

/// Largest value [`circular_diff`] can take for `period`.
pub fn circular_diff_max(period: u32) -> u32 {
    period / 2
}

/// Dissimilarity between special quantitative values, `None` being "not
/// applicable". One missing side is maximally dissimilar, two are identical.
pub fn special_diff(x: Option<f64>, y: Option<f64>) -> Result<f64> {
    for v in [x, y].into_iter().flatten() {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::Domain(format!(
                "special quantitative value {v} is not normalized"
            )));
        }
    }
    Ok(match (x, y) {
        (Some(a), Some(b)) => (a - b).abs(),
        (None, None) => 0.0,
        _ => 1.0,
    })
}

/// Dynamic time warping with local cost `|x_i - y_j|` and the symmetric
/// match/insert/delete step pattern, no window.
///
/// Two empty sequences are at distance 0. When exactly one side is empty no
/// warping path exists and the result is `+inf`; [`TsNormalizer`] maps it to 1.
///
/// [`TsNormalizer`]: super::TsNormalizer
pub fn dtw(x: &[f64], y: &[f64]) -> f64 {
    match (x.is_empty(), y.is_empty()) {
        (true, true) => return 0.0,
        (true, false) | (false, true) => return f64::INFINITY,
        _ => {}
    }
    // Keep the shorter sequence along the row to bound memory.
    let (outer, inner) = if x.len() >= y.len() { (x, y) } else { (y, x) };
    let n = inner.len();
    let mut prev = vec![f64::INFINITY; n + 1];
    let mut curr = vec![f64::INFINITY; n + 1];
    prev[0] = 0.0;
    for &a in outer {
        curr[0] = f64::INFINITY;
        for j in 1..=n {
            let cost = (a - inner[j - 1]).abs();
            curr[j] = cost + prev[j - 1].min(prev[j]).min(curr[j - 1]);
        }
        std::mem::swap(&mut prev, &mut curr);
    }
    prev[n]
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Enumerates every monotone warping path recursively.
    fn dtw_brute(x: &[f64], y: &[f64]) -> f64 {
        fn go(x: &[f64], y: &[f64], i: usize, j: usize) -> f64 {
            let cost = (x[i] - y[j]).abs();
            if i + 1 == x.len() && j + 1 == y.len() {
                return cost;
            }
            let mut best = f64::INFINITY;
            if i + 1 < x.len() && j + 1 < y.len() {
                best = best.min(go(x, y, i + 1, j + 1));
            }
            if i + 1 < x.len() {
                best = best.min(go(x, y, i + 1, j));
            }
            if j + 1 < y.len() {
                best = best.min(go(x, y, i, j + 1));
            }
            cost + best
        }
        go(x, y, 0, 0)
    }

    #[test]
    fn simple_matching_examples() {
        assert_eq!(simple_matching(&["CU"], &["CU"]).unwrap(), 0.0);
        assert_eq!(simple_matching(&["CU"], &["AL"]).unwrap(), 1.0);
        assert_eq!(simple_matching(&["CU", "aerial"], &["AL", "aerial"]).unwrap(), 0.5);
        assert!(simple_matching(&["CU"], &["CU", "x"]).is_err());
    }

    #[test]
    fn circular_examples() {
        assert_eq!(circular_diff(10, 10, 1439).unwrap(), 0.0);
        assert_eq!(circular_diff(0, 1430, 1439).unwrap(), 9.0);
        assert_eq!(circular_diff(100, 200, 364).unwrap(), 100.0);
        assert!(circular_diff(0, 1440, 1439).is_err());
        // Day period as written: the two ends coincide.
        assert_eq!(circular_diff(0, 364, 364).unwrap(), 0.0);
    }

    #[test]
    fn circular_bounded_by_half_period_exhaustive() {
        for a in 1..=50u32 {
            let mut seen_max = 0.0f64;
            for x in 0..=a {
                for y in 0..=a {
                    let d = circular_diff(x, y, a).unwrap();
                    assert!(d <= a as f64 / 2.0);
                    assert_eq!(d, circular_diff(y, x, a).unwrap());
                    seen_max = seen_max.max(d);
                }
            }
            assert_eq!(seen_max, circular_diff_max(a) as f64);
        }
    }

    #[test]
    fn special_examples() {
        assert_eq!(special_diff(None, None).unwrap(), 0.0);
        assert_eq!(special_diff(Some(0.3), None).unwrap(), 1.0);
        assert!((special_diff(Some(0.2), Some(0.5)).unwrap() - 0.3).abs() < 1e-15);
        assert!(special_diff(Some(1.2), Some(0.5)).is_err());
    }

    #[test]
    fn dtw_examples() {
        assert_eq!(dtw(&[5.0, 10.0, 20.0], &[5.0, 10.0, 20.0]), 0.0);
        assert_eq!(dtw(&[1.0], &[2.0]), 1.0);
        assert_eq!(dtw(&[1.0, 2.0, 3.0], &[1.0, 2.0, 2.0, 3.0]), 0.0);
        assert_eq!(dtw_brute(&[1.0, 2.0, 3.0], &[1.0, 2.0, 2.0, 3.0]), 0.0);
        assert_eq!(dtw(&[], &[]), 0.0);
        assert!(dtw(&[], &[3.0]).is_infinite());
    }

    #[test]
    fn dtw_matches_enumeration_small_cases() {
        // Exhaustive over all integer pairs of length <= 2 with values 0..=4.
        let mut seqs: Vec<Vec<f64>> = vec![];
        for a in 0..5 {
            seqs.push(vec![a as f64]);
            for b in 0..5 {
                seqs.push(vec![a as f64, b as f64]);
            }
        }
        for x in &seqs {
            for y in &seqs {
                assert_eq!(dtw(x, y), dtw_brute(x, y));
            }
        }
    }

    proptest! {
        #[test]
        fn dtw_agrees_with_brute_force(
            x in prop::collection::vec(0u8..10, 1..=5),
            y in prop::collection::vec(0u8..10, 1..=5),
        ) {
            let x: Vec<f64> = x.into_iter().map(f64::from).collect();
            let y: Vec<f64> = y.into_iter().map(f64::from).collect();
            prop_assert_eq!(dtw(&x, &y), dtw_brute(&x, &y));
            prop_assert_eq!(dtw(&x, &y), dtw(&y, &x));
            prop_assert_eq!(dtw(&x, &x), 0.0);
        }

        #[test]
        fn special_symmetric(x in prop::option::of(0.0..=1.0f64), y in prop::option::of(0.0..=1.0f64)) {
            let d = special_diff(x, y).unwrap();
            prop_assert!((0.0..=1.0).contains(&d));
            prop_assert_eq!(d, special_diff(y, x).unwrap());
            prop_assert_eq!(special_diff(x, x).unwrap(), 0.0);
        }
    }
}
