//! Finite-scale experiments on sphere samples.

use rayon::prelude::*;
use serde::Serialize;

use super::bounds::{lp_bound_table, lp_lower_bound, lp_upper_bound, LpBoundTable};
use super::sphere::{configuration_potential, sphere_grid, sphere_random, witness_configuration_with, SphereSample, DEFAULT_SEED};
use crate::energy::{game_value, GameOptions};
use crate::error::{Error, Result};
use crate::geometry::{covering_number_of_points, CoverMode};
use crate::space::NormSpec;

/// How the ambient dimension is chosen for a configuration of `n` points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "dim", rename_all = "snake_case")]
pub enum DimRule {
    /// `dim = n`.
    EqualToN,
    /// A fixed dimension, at least the largest `n`.
    Fixed(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LpMeasuredRow {
    pub n: usize,
    pub dim: usize,
    /// Closed-form lower envelope; it bounds the potential of the witness
    /// configuration from below at every sphere point.
    pub lower_bound: f64,
    /// Closed-form upper envelope; it bounds the same potential from above
    /// at every sphere point.
    pub upper_bound: f64,
    /// Smallest sampled potential. Only an upper bound on the infimum over
    /// the whole sphere.
    pub sample_min: f64,
    /// Largest sampled potential. Only a lower bound on the supremum over
    /// the whole sphere.
    pub sample_max: f64,
    /// `sample_max - sample_min`.
    pub sample_oscillation: f64,
    pub upper_holds: bool,
    pub lower_holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LpExperiment {
    pub table: LpBoundTable,
    pub sample_size: usize,
    pub seed: u64,
    pub rows: Vec<LpMeasuredRow>,
}

/// For each `n`, the equal-weight measure on `n` disjointly supported unit
/// vectors of `l_p^dim`, with its potential measured on a random sphere
/// sample and compared with both envelopes.
pub fn lp_experiment(p: f64, ns: &[usize], dims: DimRule, sample_size: usize, seed: u64) -> Result<LpExperiment> {
    let norm = NormSpec::lp(p)?;
    let table = lp_bound_table(p, ns)?;
    if let DimRule::Fixed(d) = dims {
        if let Some(&n) = ns.iter().find(|&&n| n > d) {
            return Err(Error::Input(format!("dimension {d} is smaller than n = {n}")));
        }
    }
    let rows = ns
        .par_iter()
        .map(|&n| {
            let dim = match dims {
                DimRule::EqualToN => n,
                DimRule::Fixed(d) => d,
            };
            let config = witness_configuration_with(&norm, n, dim)?;
            let sample = sphere_random(&norm, dim, sample_size, seed)?;
            let values: Vec<f64> = sample.points.iter().map(|x| configuration_potential(&norm, &config.points, x)).collect();
            let sample_min = values.iter().copied().fold(f64::INFINITY, f64::min);
            let sample_max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let lower_bound = lp_lower_bound(p, n)?;
            let upper_bound = lp_upper_bound(p, n, None)?;
            Ok(LpMeasuredRow {
                n,
                dim,
                lower_bound,
                upper_bound,
                sample_min,
                sample_max,
                sample_oscillation: sample_max - sample_min,
                upper_holds: sample_max <= upper_bound + 1e-9,
                lower_holds: sample_min >= lower_bound - 1e-9,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LpExperiment { table, sample_size, seed, rows })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub dim: usize,
    pub points: usize,
    pub scheme: String,
    pub value: f64,
    pub value_lo: f64,
    pub value_hi: f64,
    /// Largest distance from probe sphere points to the sample; the
    /// rendezvous number of the sample differs from that of the sphere by
    /// at most the true covering radius, which this estimates from below.
    pub fill_distance: f64,
    /// Deviation of the subspace norm from the ambient norm on the unit
    /// sphere. Coordinate subspaces of `l_p` are isometric, so this is 0.
    pub embedding_distortion: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubspaceConvergence {
    pub norm: NormSpec,
    pub rows: Vec<ConvergenceRow>,
    /// Set when a dimension could not be completed and later ones were
    /// skipped.
    pub truncated: bool,
}

/// Sample used by [`subspace_convergence`] for one dimension: `budget`
/// grid points in dimensions up to 3, a seeded random sample beyond.
pub fn sphere_discretization(norm: &NormSpec, dim: usize, budget: usize) -> Result<SphereSample> {
    if budget < 2 {
        return Err(Error::Input("the sample budget must be at least 2".into()));
    }
    match (dim, norm) {
        (1, _) => sphere_grid(norm, 1, 1.0),
        // Square boundary with `budget` points: 4 sides of 2/h steps.
        (2, NormSpec::SupNorm) => sphere_grid(norm, 2, 8.0 / budget as f64),
        (2, _) => sphere_grid(norm, 2, std::f64::consts::TAU / budget as f64),
        // Cube surface: about 24/h^2 points.
        (3, NormSpec::SupNorm) => sphere_grid(norm, 3, (24.0 / budget as f64).sqrt()),
        (3, _) => sphere_grid(norm, 3, (4.0 * std::f64::consts::PI / budget as f64).sqrt()),
        _ => sphere_random(norm, dim, budget, DEFAULT_SEED),
    }
}

const PROBES: usize = 2000;

fn fill_distance(sample: &SphereSample) -> Result<f64> {
    let probes = sphere_random(&sample.norm, sample.dim, PROBES, DEFAULT_SEED ^ 0x5EED)?;
    Ok(probes
        .points
        .par_iter()
        .map(|x| sample.points.iter().map(|y| sample.norm.eval_unchecked(x, y)).fold(f64::INFINITY, f64::min))
        .reduce(|| 0.0, f64::max))
}

/// Certified rendezvous numbers of sphere discretizations in increasing
/// dimension.
pub fn subspace_convergence(norm: &NormSpec, dims: &[usize], per_dim_budget: usize) -> Result<SubspaceConvergence> {
    if dims.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Input("dimensions must be strictly increasing".into()));
    }
    if dims.first() == Some(&0) {
        return Err(Error::Input("dimensions must be positive".into()));
    }
    let mut rows = Vec::new();
    let mut truncated = false;
    for &dim in dims {
        let sample = sphere_discretization(norm, dim, per_dim_budget)?;
        let space = sample.to_space()?;
        let all = space.all_indices();
        let game = game_value(&space, &all, &all, &GameOptions::default())?;
        let scheme = match sample.scheme {
            super::sphere::SphereScheme::Grid { .. } => "grid",
            super::sphere::SphereScheme::Random { .. } => "random",
            super::sphere::SphereScheme::Basis => "basis",
        };
        rows.push(ConvergenceRow {
            dim,
            points: sample.len(),
            scheme: scheme.to_string(),
            value: game.value(),
            value_lo: game.value_lo,
            value_hi: game.value_hi,
            fill_distance: if dim == 1 { 0.0 } else { fill_distance(&sample)? },
            embedding_distortion: 0.0,
            converged: game.converged,
        });
        if !game.converged {
            truncated = true;
            break;
        }
    }
    Ok(SubspaceConvergence { norm: *norm, rows, truncated })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntropyRow {
    pub dim: usize,
    pub points: usize,
    pub t: f64,
    /// Covering number of the sample by its own open `t`-balls.
    pub covering_number: Option<usize>,
    pub exact: bool,
    /// `M̄_n(sample) >= t` holds for every `n` below the covering number.
    pub implied_bound: f64,
    pub implied_for_n_below: Option<usize>,
}

/// Largest dimension accepted by [`entropy_growth_experiment`].
pub const MAX_SIGN_DIM: usize = 12;

/// All `2^d` sign vectors, which lie on the unit sphere of the sup norm.
pub fn sign_vectors(dim: usize) -> Vec<Vec<f64>> {
    (0..1usize << dim).map(|b| (0..dim).map(|k| if b >> k & 1 == 1 { 1.0 } else { -1.0 }).collect()).collect()
}

/// Covering numbers of the sign vectors of `l_inf^d` by open `t`-balls and
/// the lower bounds they imply for `M̄_n`.
pub fn entropy_growth_experiment(dims: &[usize], t: f64) -> Result<Vec<EntropyRow>> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::Input(format!("radius must be positive, got {t}")));
    }
    dims.par_iter()
        .map(|&dim| {
            if dim == 0 || dim > MAX_SIGN_DIM {
                return Err(Error::BudgetExceeded { required: 1u128 << dim.min(127), budget: 1u128 << MAX_SIGN_DIM });
            }
            let points = sign_vectors(dim);
            let cover = covering_number_of_points(&points, &NormSpec::SupNorm, t, CoverMode::Exact)?;
            Ok(EntropyRow {
                dim,
                points: points.len(),
                t,
                covering_number: cover.n,
                exact: cover.exact,
                implied_bound: t,
                implied_for_n_below: cover.n.filter(|_| cover.exact),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chebyshev::{cheb_n, EnumOptions};
    use crate::space::FiniteKernelSpace;

    #[test]
    fn witness_potential_stays_inside_the_envelopes() {
        for p in [0.5, 1.0, 2.0, 3.0] {
            let exp = lp_experiment(p, &[2, 4, 8, 16], DimRule::EqualToN, 500, DEFAULT_SEED).unwrap();
            for row in &exp.rows {
                assert!(row.upper_holds && row.lower_holds, "p = {p}: {row:?}");
            }
        }
        assert!(lp_experiment(2.0, &[4, 8], DimRule::Fixed(6), 10, 1).is_err());
    }

    #[test]
    fn one_dimensional_sphere() {
        let c = subspace_convergence(&NormSpec::lp(2.0).unwrap(), &[1], 100).unwrap();
        assert_eq!(c.rows[0].points, 2);
        assert_eq!(c.rows[0].value, 1.0);
        assert!(subspace_convergence(&NormSpec::lp(2.0).unwrap(), &[2, 2], 100).is_err());
    }

    #[test]
    fn sign_vector_covers() {
        let rows = entropy_growth_experiment(&[1, 2, 3, 8], 1.9).unwrap();
        for r in &rows {
            assert_eq!(r.covering_number, Some(1 << r.dim));
        }
        let rows = entropy_growth_experiment(&[3], 2.1).unwrap();
        assert_eq!(rows[0].covering_number, Some(1));
        assert!(entropy_growth_experiment(&[13], 1.9).is_err());
    }

    #[test]
    fn implied_bound_holds_on_the_cube_corners() {
        let space = FiniteKernelSpace::from_points(sign_vectors(3), NormSpec::SupNorm, Default::default()).unwrap();
        let all = space.all_indices();
        let r = cheb_n(&space, &all, &all, 7, &EnumOptions::default()).unwrap();
        assert!(r.m_bar_n >= 1.9);
    }
}
