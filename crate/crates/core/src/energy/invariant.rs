//! Measures with (nearly) constant potential on a finite set.

use serde::Serialize;

use super::{normalize_subset, potential_at};
use crate::error::{Error, Result};
use crate::lp::{LinearProgram, Relation};
use crate::measure::DiscreteMeasure;
use crate::space::FiniteKernelSpace;

/// Default tolerance on the oscillation of an invariant measure.
pub const DEFAULT_INVARIANT_TOL: f64 = 1e-9;

/// Constraints added per round of the row-generation loop.
const ROWS_PER_ROUND: usize = 64;

/// Outcome of a search for an `eps`-quasi-invariant measure.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuasiInvariant {
    pub measure: DiscreteMeasure,
    /// Recomputed `sup_S U - inf_S U`.
    pub gap: f64,
    pub min_potential: f64,
    pub max_potential: f64,
    /// True when `gap <= eps`.
    pub achieved: bool,
}

fn profile_extremes(space: &FiniteKernelSpace, mu: &DiscreteMeasure, set: &[usize]) -> (f64, f64, Vec<f64>) {
    let values: Vec<f64> = set.iter().map(|&x| potential_at(space, mu, x)).collect();
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (lo, hi, values)
}

/// Probability measure on `set` minimizing the oscillation of its potential
/// over `set`, together with the recomputed oscillation.
///
/// Solves `max a - b` subject to `a <= U^mu(x) <= b` for `x` in the set, over
/// the simplex. Constraints are generated lazily from the points that violate
/// the current bounds, so large sets only pay for the points that matter.
pub fn min_oscillation_measure(space: &FiniteKernelSpace, set: &[usize]) -> Result<QuasiInvariant> {
    let set = normalize_subset(space, set, "S")?;
    let n = set.len();
    let mut active: Vec<usize> = vec![0];
    let mut is_active = vec![false; n];
    is_active[0] = true;
    // Variables: weights over `set`, then a, then b.
    let (ia, ib) = (n, n + 1);
    let mut best: Option<QuasiInvariant> = None;

    loop {
        let mut obj = vec![0.0; n + 2];
        obj[ia] = 1.0;
        obj[ib] = -1.0;
        let mut lp = LinearProgram::maximize(obj);
        let mut simplex = vec![1.0; n + 2];
        simplex[ia] = 0.0;
        simplex[ib] = 0.0;
        lp.add_row(simplex, Relation::Eq, 1.0)?;
        for &r in &active {
            let row = space.row(set[r]);
            let mut c: Vec<f64> = set.iter().map(|&j| row[j]).collect();
            c.extend([0.0, -1.0]);
            lp.add_row(c.clone(), Relation::Le, 0.0)?;
            c[ib] = 0.0;
            c[ia] = -1.0;
            lp.add_row(c, Relation::Ge, 0.0)?;
        }
        let sol = lp.solve()?;
        let (lower, upper) = (sol.x[ia], sol.x[ib]);
        let measure = DiscreteMeasure::from_masses(set.clone(), sol.x[..n].to_vec())?;
        let (lo, hi, values) = profile_extremes(space, &measure, &set);
        let candidate = QuasiInvariant { measure, gap: hi - lo, min_potential: lo, max_potential: hi, achieved: true };
        if best.as_ref().is_none_or(|b| candidate.gap < b.gap) {
            best = Some(candidate);
        }

        let slack = 1e-12 * upper.abs().max(1.0);
        let mut violators: Vec<(f64, usize)> = (0..n)
            .filter(|&x| !is_active[x])
            .filter_map(|x| {
                let excess = (values[x] - upper).max(lower - values[x]);
                (excess > slack).then_some((excess, x))
            })
            .collect();
        if violators.is_empty() {
            break;
        }
        violators.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        for &(_, x) in violators.iter().take(ROWS_PER_ROUND) {
            is_active[x] = true;
            active.push(x);
        }
    }
    best.ok_or_else(|| Error::Inconsistent("oscillation search produced no measure".into()))
}

/// A measure on `set` whose potential is constant on `set` up to `tol`, or
/// `None` when the best achievable oscillation exceeds `tol`.
pub fn invariant_measure(space: &FiniteKernelSpace, set: &[usize], tol: f64) -> Result<Option<DiscreteMeasure>> {
    if !(tol >= 0.0) {
        return Err(Error::Input(format!("tolerance must be nonnegative, got {tol}")));
    }
    let best = min_oscillation_measure(space, set)?;
    Ok((best.gap <= tol).then_some(best.measure))
}

/// Measure with potential oscillation at most `eps` on `set`.
///
/// Returns the minimum-oscillation measure; `achieved` is false when even
/// that measure exceeds `eps`.
pub fn quasi_invariant_search(space: &FiniteKernelSpace, set: &[usize], eps: f64) -> Result<QuasiInvariant> {
    if !(eps > 0.0) {
        return Err(Error::Input(format!("eps must be positive, got {eps}")));
    }
    let mut best = min_oscillation_measure(space, set)?;
    best.achieved = best.gap <= eps;
    Ok(best)
}

/// Oscillation summary of a given measure, in the same shape as the search
/// result.
pub fn quasi_invariance_of(
    space: &FiniteKernelSpace,
    mu: &DiscreteMeasure,
    set: &[usize],
    eps: f64,
) -> Result<QuasiInvariant> {
    space.check_indices(mu.atoms())?;
    let set = normalize_subset(space, set, "S")?;
    let (lo, hi, _) = profile_extremes(space, mu, &set);
    Ok(QuasiInvariant { measure: mu.clone(), gap: hi - lo, min_potential: lo, max_potential: hi, achieved: hi - lo <= eps })
}
