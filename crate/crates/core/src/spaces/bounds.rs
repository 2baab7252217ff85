//! Closed-form envelopes for the Chebyshev constants of `l_p` spheres.

use serde::Serialize;

use crate::error::{Error, Result};

fn check(p: f64, n: usize) -> Result<()> {
    if !(p > 0.0) || !p.is_finite() {
        return Err(Error::Input(format!("exponent p must be finite and positive, got {p}")));
    }
    if n == 0 {
        return Err(Error::Input("n must be at least 1".into()));
    }
    Ok(())
}

/// `2^(1/p)`, the common limit of both envelopes.
pub fn lp_target(p: f64) -> f64 {
    2f64.powf(1.0 / p)
}

/// Lower envelope for `M_n` on the `l_p` sphere: the minimum over the
/// sphere of the average distance to `n` disjointly supported unit vectors
/// is at least this value.
///
/// `2^(1/p) (1 - n^(-1/p))` for `p >= 1` (at `p = 1` this is `2 (1 - 1/n)`),
/// and `2^(1/p) ((n - 1) / n)^(1/p)` for `p < 1`.
pub fn lp_lower_bound(p: f64, n: usize) -> Result<f64> {
    check(p, n)?;
    let nf = n as f64;
    Ok(if p == 1.0 {
        2.0 * (1.0 - 1.0 / nf)
    } else if p > 1.0 {
        lp_target(p) * (1.0 - nf.powf(-1.0 / p))
    } else {
        lp_target(p) * ((nf - 1.0) / nf).powf(1.0 / p)
    })
}

/// Default smoothing parameter `eta = n^(-1/(2p))`.
pub fn default_eta(p: f64, n: usize) -> f64 {
    (n as f64).powf(-1.0 / (2.0 * p))
}

/// Upper envelope for `M̄_n` on the `l_p` sphere, valid for any `eta > 0`:
///
/// * `p >= 1`: `(1/n) eta^(-p) (1 + 2^p)^(1/p) + 2^(1/p) (1 + eta)`;
/// * `p < 1`: `(1/n) 3^(1/p) eta^(-p) + 2^(1/p) (1 + eta^p)^(1/p)`.
pub fn lp_upper_bound(p: f64, n: usize, eta: Option<f64>) -> Result<f64> {
    check(p, n)?;
    let eta = eta.unwrap_or_else(|| default_eta(p, n));
    if !(eta > 0.0) || !eta.is_finite() {
        return Err(Error::Input(format!("eta must be positive, got {eta}")));
    }
    let nf = n as f64;
    Ok(if p >= 1.0 {
        (1.0 + 2f64.powf(p)).powf(1.0 / p) / (nf * eta.powf(p)) + lp_target(p) * (1.0 + eta)
    } else {
        3f64.powf(1.0 / p) / (nf * eta.powf(p)) + lp_target(p) * (1.0 + eta.powf(p)).powf(1.0 / p)
    })
}

/// Lower envelope `2 - 2/n` for `M_n` on the sphere of the `l_p` metric
/// `sum |x_i - y_i|^p` with `0 < p < 1`.
pub fn lp_metric_lower_bound(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::Input("n must be at least 1".into()));
    }
    Ok(2.0 - 2.0 / n as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LpBoundRow {
    pub n: usize,
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub eta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LpBoundTable {
    pub p: f64,
    pub target: f64,
    pub rows: Vec<LpBoundRow>,
}

/// Both envelopes at each `n`, with the default `eta`.
pub fn lp_bound_table(p: f64, ns: &[usize]) -> Result<LpBoundTable> {
    let rows = ns
        .iter()
        .map(|&n| {
            Ok(LpBoundRow {
                n,
                lower_bound: lp_lower_bound(p, n)?,
                upper_bound: lp_upper_bound(p, n, None)?,
                eta: default_eta(p, n),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LpBoundTable { p, target: lp_target(p), rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn formula_examples() {
        assert_abs_diff_eq!(lp_lower_bound(2.0, 4).unwrap(), 2f64.sqrt() / 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(lp_lower_bound(1.0, 10).unwrap(), 1.8, epsilon = 1e-15);
        assert_abs_diff_eq!(lp_lower_bound(0.5, 2).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(lp_upper_bound(1.0, 100, Some(0.1)).unwrap(), 2.5, epsilon = 1e-12);
        let u = lp_upper_bound(2.0, 10_000, None).unwrap();
        assert_abs_diff_eq!(default_eta(2.0, 10_000), 0.1, epsilon = 1e-15);
        assert!((u - 2f64.sqrt()).abs() < 0.25);
        assert_eq!(lp_metric_lower_bound(2).unwrap(), 1.0);
        assert_eq!(lp_metric_lower_bound(10).unwrap(), 1.8);
        assert!(lp_upper_bound(2.0, 5, Some(0.0)).is_err());
        assert!(lp_lower_bound(2.0, 0).is_err());
    }

    /// Distance of each envelope from the target at `n = 10^6`, evaluated
    /// independently of the functions under test.
    #[test]
    fn envelope_gaps_at_one_million() {
        let n = 1e6_f64;
        for (p, gap_hi, gap_lo) in [(0.5, 0.017, 0.0), (1.0, 0.005, 0.0), (2.0, 0.047, 0.0), (3.0, 0.128, 0.0126)] {
            let t = 2f64.powf(1.0 / p);
            let eta = n.powf(-1.0 / (2.0 * p));
            let hi = if p >= 1.0 {
                (1.0 + 2f64.powf(p)).powf(1.0 / p) / (n * eta.powf(p)) + t * (1.0 + eta)
            } else {
                3f64.powf(1.0 / p) / (n * eta.powf(p)) + t * (1.0 + eta.powf(p)).powf(1.0 / p)
            };
            let lo = if p >= 1.0 { t * (1.0 - n.powf(-1.0 / p)) } else { t * ((n - 1.0) / n).powf(1.0 / p) };
            let f_hi = lp_upper_bound(p, 1_000_000, None).unwrap();
            let f_lo = lp_lower_bound(p, 1_000_000).unwrap();
            assert_abs_diff_eq!(f_hi, hi, epsilon = 1e-12);
            assert_abs_diff_eq!(f_lo, lo, epsilon = 1e-12);
            assert!((f_hi - t - gap_hi).abs() < 1e-3, "p = {p}: upper gap {}", f_hi - t);
            assert!((t - f_lo - gap_lo).abs() < 1e-3 || gap_lo == 0.0, "p = {p}: lower gap {}", t - f_lo);
        }
    }

    proptest! {
        #[test]
        fn envelopes_sandwich_the_target(p in prop::sample::select(vec![0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 5.0]), n in 2usize..2_000_000) {
            let t = lp_target(p);
            prop_assert!(lp_lower_bound(p, n).unwrap() <= t);
            prop_assert!(lp_upper_bound(p, n, None).unwrap() >= t);
        }

        #[test]
        fn envelopes_tighten_with_n(p in prop::sample::select(vec![0.5, 1.0, 2.0, 3.0]), n in 2usize..100_000) {
            prop_assert!(lp_lower_bound(p, n + 1).unwrap() >= lp_lower_bound(p, n).unwrap());
            prop_assert!(lp_metric_lower_bound(n + 1).unwrap() >= lp_metric_lower_bound(n).unwrap());
        }
    }
}
