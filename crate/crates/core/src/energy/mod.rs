//! Potentials of discrete measures, the matrix-game route to the average
//! interval, invariant measures and the measure approximation lemmas.

mod approx;
mod game;
mod invariant;

pub use approx::{rationalize_measure, uniformize_measure, EqualWeightApprox, Rationalized, DEFAULT_RATIONAL_BUDGET};
pub use game::{average_interval, game_value, GameOptions, GameSolution, SolveMethod};
pub use invariant::{
    invariant_measure, min_oscillation_measure, quasi_invariance_of, quasi_invariant_search, QuasiInvariant,
    DEFAULT_INVARIANT_TOL,
};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::measure::{DiscreteMeasure, Interval};
use crate::space::FiniteKernelSpace;

/// Values of `U^mu(x) = sum_j w_j k(x, a_j)` over an evaluation subset.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PotentialProfile {
    pub measure: DiscreteMeasure,
    pub points: Vec<usize>,
    pub values: Vec<f64>,
}

impl PotentialProfile {
    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

fn check_measure(space: &FiniteKernelSpace, mu: &DiscreteMeasure) -> Result<()> {
    space.check_indices(mu.atoms())
}

#[inline]
pub(crate) fn potential_at(space: &FiniteKernelSpace, mu: &DiscreteMeasure, x: usize) -> f64 {
    let row = space.row(x);
    mu.iter().map(|(a, w)| w * row[a]).sum()
}

/// Potential of `mu` at every point of `subset`.
pub fn potential(space: &FiniteKernelSpace, mu: &DiscreteMeasure, subset: &[usize]) -> Result<PotentialProfile> {
    check_measure(space, mu)?;
    space.check_indices(subset)?;
    let values = subset.iter().map(|&x| potential_at(space, mu, x)).collect();
    Ok(PotentialProfile { measure: mu.clone(), points: subset.to_vec(), values })
}

/// `A(mu, L) = [inf_L U^mu, sup_L U^mu]`.
pub fn average_set_of_measure(space: &FiniteKernelSpace, mu: &DiscreteMeasure, subset: &[usize]) -> Result<Interval> {
    if subset.is_empty() {
        return Err(Error::EmptySubset("L".into()));
    }
    let profile = potential(space, mu, subset)?;
    Ok(Interval::new(profile.min(), profile.max()))
}

/// Oscillation `sup_S U^mu - inf_S U^mu`.
pub fn oscillation(space: &FiniteKernelSpace, mu: &DiscreteMeasure, subset: &[usize]) -> Result<f64> {
    average_set_of_measure(space, mu, subset).map(|i| i.hi - i.lo)
}

/// Sorted, duplicate-free copy of a subset, rejecting empty or
/// out-of-range input.
pub(crate) fn normalize_subset(space: &FiniteKernelSpace, subset: &[usize], name: &str) -> Result<Vec<usize>> {
    space.check_indices(subset)?;
    let mut s = subset.to_vec();
    s.sort_unstable();
    s.dedup();
    if s.is_empty() {
        return Err(Error::EmptySubset(name.to_string()));
    }
    Ok(s)
}
