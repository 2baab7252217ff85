//! Approximating measures by rational and by equal-weight measures.

use serde::Serialize;

use super::potential_at;
use crate::error::{Error, Result};
use crate::measure::DiscreteMeasure;
use crate::space::FiniteKernelSpace;

/// Largest denominator tried by [`rationalize_measure`].
pub const DEFAULT_RATIONAL_BUDGET: u64 = 10_000_000;

/// Rational measure `(1/m) sum c_j delta_{a_j}` on the same support.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Rationalized {
    pub m: u64,
    pub atoms: Vec<usize>,
    pub counts: Vec<u64>,
}

impl Rationalized {
    pub fn measure(&self) -> Result<DiscreteMeasure> {
        let counts: Vec<usize> = self.counts.iter().map(|&c| c as usize).collect();
        DiscreteMeasure::from_counts(self.atoms.clone(), &counts)
    }

    /// Largest `|c_j / m - sigma_j| / sigma_j` against the source weights.
    pub fn max_relative_error(&self, sigma: &DiscreteMeasure) -> f64 {
        self.atoms
            .iter()
            .zip(&self.counts)
            .map(|(&a, &c)| {
                let s = sigma.weight_of(a);
                ((c as f64 / self.m as f64) - s).abs() / s
            })
            .fold(0.0, f64::max)
    }
}

/// Whether `c / m` lies in `[(1 - eps) s, (1 + eps) s]`, evaluated exactly as
/// a caller would check it.
#[inline]
fn sandwiched(c: u64, m: u64, s: f64, eps: f64) -> bool {
    let r = c as f64 / m as f64;
    (1.0 - eps) * s <= r && r <= (1.0 + eps) * s
}

/// Range of counts `c >= 1` with `c / m` inside the sandwich, if any.
fn count_range(m: u64, s: f64, eps: f64) -> Option<(u64, u64)> {
    let ratio = |c: u64| c as f64 / m as f64;
    let mut lo = ((1.0 - eps) * s * m as f64).ceil().max(1.0) as u64;
    while lo > 1 && sandwiched(lo - 1, m, s, eps) {
        lo -= 1;
    }
    while lo <= m && ratio(lo) < (1.0 - eps) * s {
        lo += 1;
    }
    let mut hi = ((1.0 + eps) * s * m as f64).floor().min(m as f64) as u64;
    while hi < m && sandwiched(hi + 1, m, s, eps) {
        hi += 1;
    }
    while hi > 0 && ratio(hi) > (1.0 + eps) * s {
        hi -= 1;
    }
    (lo <= hi && sandwiched(lo, m, s, eps) && sandwiched(hi, m, s, eps)).then_some((lo, hi))
}

/// Counts summing to `m` inside the per-atom ranges, closest to `sigma * m`.
fn counts_for(m: u64, weights: &[f64], eps: f64) -> Option<Vec<u64>> {
    let ranges: Vec<(u64, u64)> = weights.iter().map(|&s| count_range(m, s, eps)).collect::<Option<_>>()?;
    let lo_sum: u64 = ranges.iter().map(|r| r.0).sum();
    let hi_sum: u64 = ranges.iter().map(|r| r.1).sum();
    if m < lo_sum || m > hi_sum {
        return None;
    }
    let mf = m as f64;
    let mut counts: Vec<u64> =
        weights.iter().zip(&ranges).map(|(&s, &(lo, hi))| ((s * mf).round() as u64).clamp(lo, hi)).collect();
    let mut total: u64 = counts.iter().sum();
    // Move one unit at a time on the atom whose ratio is furthest off in the
    // direction of the correction.
    while total != m {
        let pick = if total < m {
            (0..counts.len()).filter(|&j| counts[j] < ranges[j].1).min_by(|&a, &b| {
                (counts[a] as f64 / mf / weights[a]).total_cmp(&(counts[b] as f64 / mf / weights[b]))
            })
        } else {
            (0..counts.len()).filter(|&j| counts[j] > ranges[j].0).max_by(|&a, &b| {
                (counts[a] as f64 / mf / weights[a]).total_cmp(&(counts[b] as f64 / mf / weights[b]))
            })
        }?;
        if total < m {
            counts[pick] += 1;
            total += 1;
        } else {
            counts[pick] -= 1;
            total -= 1;
        }
    }
    Some(counts)
}

/// Smallest `m` (up to `budget`) admitting counts `c_j >= 1` with
/// `sum c_j = m` and `(1 - eps) sigma_j <= c_j / m <= (1 + eps) sigma_j` on
/// every atom.
pub fn rationalize_measure(sigma: &DiscreteMeasure, eps: f64, budget: u64) -> Result<Rationalized> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::Input(format!("eps must be positive, got {eps}")));
    }
    let weights = sigma.weights();
    let start = sigma.len() as u64;
    for m in start..=budget {
        if let Some(counts) = counts_for(m, weights, eps) {
            debug_assert!(counts.iter().zip(weights).all(|(&c, &s)| sandwiched(c, m, s, eps)));
            return Ok(Rationalized { m, atoms: sigma.atoms().to_vec(), counts });
        }
    }
    Err(Error::SearchExhausted(format!(
        "no denominator up to {budget} puts every weight within relative error {eps}"
    )))
}

/// Equal-weight approximation of a measure's potential.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EqualWeightApprox {
    /// `(1/m) sum_j delta_{x_j}` with repetitions collapsed into weights.
    pub measure: DiscreteMeasure,
    /// The points `x_1, ..., x_m` with multiplicity.
    pub configuration: Vec<usize>,
    pub m: u64,
    pub counts: Vec<u64>,
    /// Recomputed `max_x |U^mu(x) - U^nu(x)|` over every point of the space.
    pub sup_error: f64,
}

/// Equal-weight measure whose potential is within `eps` of the potential of
/// `mu` at every point of the space.
///
/// The weights are rationalized with relative tolerance `eps / (2 sup k)`,
/// which bounds the potential error by `eps / 2`. The bound is then checked
/// by direct recomputation.
pub fn uniformize_measure(space: &FiniteKernelSpace, mu: &DiscreteMeasure, eps: f64) -> Result<EqualWeightApprox> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::Input(format!("eps must be positive, got {eps}")));
    }
    space.check_indices(mu.atoms())?;
    if mu.is_equal_weight() {
        let m = mu.len() as u64;
        return Ok(EqualWeightApprox {
            measure: mu.clone(),
            configuration: mu.atoms().to_vec(),
            m,
            counts: vec![1; mu.len()],
            sup_error: 0.0,
        });
    }
    let sup_k = space.sup_kernel();
    let rel = if sup_k > 0.0 { eps / (2.0 * sup_k) } else { 0.5 };
    let r = rationalize_measure(mu, rel, DEFAULT_RATIONAL_BUDGET)?;
    let nu = r.measure()?;
    let sup_error = (0..space.len())
        .map(|x| (potential_at(space, mu, x) - potential_at(space, &nu, x)).abs())
        .fold(0.0, f64::max);
    if sup_error > eps {
        return Err(Error::Inconsistent(format!(
            "equal-weight approximation misses by {sup_error}, more than {eps}"
        )));
    }
    let configuration = r.atoms.iter().zip(&r.counts).flat_map(|(&a, &c)| std::iter::repeat_n(a, c as usize)).collect();
    Ok(EqualWeightApprox { measure: nu, configuration, m: r.m, counts: r.counts, sup_error })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::NormSpec;
    use proptest::prelude::*;
    use std::collections::BTreeMap;

    fn two_weights(a: f64) -> DiscreteMeasure {
        DiscreteMeasure::new(vec![0, 1], vec![a, 1.0 - a]).unwrap()
    }

    /// Oracle: first `m` whose per-atom count intervals admit a sum of `m`,
    /// checking every count candidate directly.
    fn brute_smallest_m(w: &[f64], eps: f64, cap: u64) -> Option<u64> {
        (1..=cap).find(|&m| {
            let ranges: Vec<Vec<u64>> =
                w.iter().map(|&s| (1..=m).filter(|&c| sandwiched(c, m, s, eps)).collect()).collect();
            if ranges.iter().any(|r| r.is_empty()) {
                return false;
            }
            let lo: u64 = ranges.iter().map(|r| r[0]).sum();
            let hi: u64 = ranges.iter().map(|r| *r.last().unwrap()).sum();
            // Each range is a contiguous run of integers.
            ranges.iter().all(|r| r.windows(2).all(|p| p[1] == p[0] + 1)) && lo <= m && m <= hi
        })
    }

    #[test]
    fn rationalize_examples() {
        let r = rationalize_measure(&two_weights(0.3), 0.1, DEFAULT_RATIONAL_BUDGET).unwrap();
        assert_eq!((r.m, r.counts.clone()), (7, vec![2, 5]));
        // The round-denominator answer is feasible, just not the smallest.
        assert!(sandwiched(3, 10, 0.3, 0.1) && sandwiched(7, 10, 0.7, 0.1));

        let s = std::f64::consts::FRAC_1_SQRT_2;
        let r = rationalize_measure(&two_weights(s), 0.01, DEFAULT_RATIONAL_BUDGET).unwrap();
        assert_eq!((r.m, r.counts.clone()), (17, vec![12, 5]));
        assert!(sandwiched(71, 100, s, 0.01) && sandwiched(29, 100, 1.0 - s, 0.01));
        assert!(r.max_relative_error(&two_weights(s)) <= 0.01);

        let r = rationalize_measure(&DiscreteMeasure::dirac(4), 1e-6, 10).unwrap();
        assert_eq!((r.m, r.counts), (1, vec![1]));
    }

    #[test]
    fn rationalize_reports_exhausted_budget() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!(matches!(
            rationalize_measure(&two_weights(s), 1e-9, 50),
            Err(Error::SearchExhausted(_))
        ));
        assert!(rationalize_measure(&two_weights(0.5), 0.0, 50).is_err());
    }

    #[test]
    fn uniformize_examples() {
        let two = FiniteKernelSpace::from_kernel(vec![vec![0.0, 1.0], vec![1.0, 0.0]], BTreeMap::new()).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let u = uniformize_measure(&two, &two_weights(s), 0.02).unwrap();
        assert!(u.sup_error <= 0.0029 && u.sup_error <= 0.02);
        assert_eq!(u.configuration.len() as u64, u.m);

        let eq = DiscreteMeasure::uniform(vec![0, 1]).unwrap();
        let u = uniformize_measure(&two, &eq, 0.01).unwrap();
        assert_eq!(u.measure, eq);
        assert_eq!(u.sup_error, 0.0);

        let line = FiniteKernelSpace::from_points(
            vec![vec![0.0], vec![1.0], vec![2.0]],
            NormSpec::lp(1.0).unwrap(),
            BTreeMap::new(),
        )
        .unwrap();
        let w = std::f64::consts::FRAC_1_PI;
        let mu = DiscreteMeasure::new(vec![0, 2], vec![w, 1.0 - w]).unwrap();
        let u = uniformize_measure(&line, &mu, 0.01).unwrap();
        let direct = (0..3)
            .map(|x| (potential_at(&line, &mu, x) - potential_at(&line, &u.measure, x)).abs())
            .fold(0.0, f64::max);
        assert_eq!(direct, u.sup_error);
        assert!(u.sup_error <= 0.01);
    }

    proptest! {
        #[test]
        fn rationalize_is_minimal_and_sandwiched(
            raw in prop::collection::vec(0.05..1.0f64, 1..5),
            eps in prop::sample::select(vec![0.1, 0.05, 0.02]),
        ) {
            let atoms: Vec<usize> = (0..raw.len()).collect();
            let sigma = DiscreteMeasure::from_masses(atoms, raw).unwrap();
            let r = rationalize_measure(&sigma, eps, 100_000).unwrap();
            prop_assert_eq!(r.counts.iter().sum::<u64>(), r.m);
            for (&c, &s) in r.counts.iter().zip(sigma.weights()) {
                prop_assert!(c >= 1 && sandwiched(c, r.m, s, eps));
            }
            prop_assert_eq!(brute_smallest_m(sigma.weights(), eps, r.m), Some(r.m));
        }
    }
}
