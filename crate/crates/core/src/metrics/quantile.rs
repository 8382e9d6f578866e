use crate::{Error, Result};

/// Quantile of ascending `sorted` by linear interpolation between order
/// statistics at position `q (len − 1)`, on the extended real line: an
/// interpolation that touches `+∞` with positive weight is `+∞`.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    debug_assert!((0.0..=1.0).contains(&q));
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let frac = pos - lo as f64;
    let a = sorted[lo];
    if frac == 0.0 {
        return a;
    }
    let b = sorted[lo + 1];
    if a == b {
        return a;
    }
    if b.is_infinite() {
        return b;
    }
    a + frac * (b - a)
}

/// Quantile of unsorted `values`; NaN entries are rejected.
pub fn quantile(values: &[f64], q: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::InsufficientData("quantile of an empty sample".into()));
    }
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::InvalidParameter(format!(
            "quantile level must lie in [0, 1], got {q}"
        )));
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(Error::InvalidParameter("NaN in quantile sample".into()));
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    Ok(quantile_sorted(&v, q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn interpolates_between_order_statistics() {
        assert_eq!(quantile(&[4.0, 1.0, 3.0, 2.0], 0.5).unwrap(), 2.5);
        assert_eq!(quantile(&[1.0, 2.0, 3.0, 4.0], 0.25).unwrap(), 1.75);
        assert_eq!(quantile(&[5.0], 0.3).unwrap(), 5.0);
        assert_eq!(quantile(&[1.0, 9.0], 0.0).unwrap(), 1.0);
        assert_eq!(quantile(&[1.0, 9.0], 1.0).unwrap(), 9.0);
    }

    #[test]
    fn infinity_propagates_only_with_weight() {
        let inf = f64::INFINITY;
        assert_eq!(quantile(&[1.0, 2.0, inf], 0.5).unwrap(), 2.0);
        assert_eq!(quantile(&[1.0, 2.0, inf], 0.75).unwrap(), inf);
        assert_eq!(quantile(&[inf, inf], 0.5).unwrap(), inf);
        assert_eq!(quantile(&[1.0, inf, inf, inf], 0.5).unwrap(), inf);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(quantile(&[], 0.5).is_err());
        assert!(quantile(&[1.0], 1.5).is_err());
        assert!(quantile(&[f64::NAN], 0.5).is_err());
    }

    proptest! {
        #[test]
        fn odd_median_is_middle_order_statistic(mut v in prop::collection::vec(-1e6f64..1e6, 1..50)) {
            if v.len() % 2 == 0 { v.pop(); }
            prop_assume!(!v.is_empty());
            let m = quantile(&v, 0.5).unwrap();
            let mut s = v.clone();
            s.sort_by(f64::total_cmp);
            prop_assert_eq!(m, s[s.len() / 2]);
        }

        #[test]
        fn monotone_in_level(v in prop::collection::vec(-1e6f64..1e6, 1..50), a in 0.0f64..1.0, b in 0.0f64..1.0) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(quantile(&v, lo).unwrap() <= quantile(&v, hi).unwrap());
        }
    }
}
