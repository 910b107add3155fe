use crate::error::{Error, Result};

/// Sigmoid membership `1 / (1 + exp((d - b) / a))`.
///
/// With `a = 0` the sigmoid collapses to its `a -> 0+` limit: 1 when `d <= b`,
/// 0 otherwise.
pub fn sigmoid_membership(d: f64, a: f64, b: f64) -> f64 {
    if a <= 0.0 {
        return if d <= b { 1.0 } else { 0.0 };
    }
    let z = (d - b) / a;
    if z >= 0.0 {
        let e = (-z).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + z.exp())
    }
}

/// Fuzzy entropy of the fuzzy set with the given membership degrees:
/// `card(M ∩ Mᶜ) / card(M ∪ Mᶜ)` with min/max connectives and sigma-count
/// cardinality.
pub fn fuzzy_entropy(memberships: &[f64]) -> Result<f64> {
    if memberships.is_empty() {
        return Err(Error::InvalidArgument("fuzzy entropy of an empty set".into()));
    }
    let (mut inter, mut union) = (0.0, 0.0);
    for &mu in memberships {
        if !(0.0..=1.0).contains(&mu) {
            return Err(Error::Domain(format!("membership {mu} outside [0, 1]")));
        }
        inter += mu.min(1.0 - mu);
        union += mu.max(1.0 - mu);
    }
    // union >= n / 2 > 0
    Ok(inter / union)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn membership_examples() {
        assert_eq!(sigmoid_membership(0.3, 0.1, 0.3), 0.5);
        let mu = sigmoid_membership(0.14, 0.1, 0.1 + 0.04 / 2.0);
        assert!((mu - 1.0 / (1.0 + 0.2f64.exp())).abs() < 1e-12);
        assert!((mu - 0.4502).abs() < 1e-4);
        assert!(sigmoid_membership(1e6, 0.1, 0.12) < 1e-300);
        assert_eq!(sigmoid_membership(0.05, 0.0, 0.05), 1.0);
        assert_eq!(sigmoid_membership(0.0501, 0.0, 0.05), 0.0);
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(fuzzy_entropy(&[0.0, 1.0, 1.0, 0.0]).unwrap(), 0.0);
        assert_eq!(fuzzy_entropy(&[0.5, 0.5]).unwrap(), 1.0);
        let fe = fuzzy_entropy(&[0.2, 0.8, 1.0]).unwrap();
        assert!((fe - 0.4 / 2.6).abs() < 1e-12);
        assert!((fe - 0.1538).abs() < 1e-4);
        assert!(fuzzy_entropy(&[]).is_err());
    }

    proptest! {
        #[test]
        fn membership_strictly_decreasing(a in 0.01..1.0f64, b in 0.0..1.0f64, d in 0.0..0.9f64, step in 0.001..0.1f64) {
            let (hi, lo) = (sigmoid_membership(d, a, b), sigmoid_membership(d + step, a, b));
            prop_assert!(hi >= lo);
            // strict away from f64 saturation
            if ((d - b) / a).abs() < 30.0 && ((d + step - b) / a).abs() < 30.0 {
                prop_assert!(hi > lo);
            }
        }

        #[test]
        fn entropy_bounds(mus in prop::collection::vec(0.0..=1.0f64, 1..50)) {
            let fe = fuzzy_entropy(&mus).unwrap();
            prop_assert!((0.0..=1.0).contains(&fe));
            let crisp = mus.iter().all(|&m| m == 0.0 || m == 1.0);
            prop_assert_eq!(fe == 0.0, crisp);
        }
    }
}
