//! Point sets on unit spheres of finite-dimensional `l_p` and sup-norm
//! spaces.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::space::{FiniteKernelSpace, NormSpec};

/// Default seed of the random scheme.
pub const DEFAULT_SEED: u64 = 0xC0FFEE;

/// Largest deviation of a sample point's gauge from one.
pub const NORMALIZATION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SphereScheme {
    /// Deterministic grid: `resolution` is the angular step on circles, the
    /// lattice step on the faces of sup-norm spheres, and the nominal
    /// spacing of a Fibonacci lattice on 3-d spheres.
    Grid { resolution: f64 },
    /// Standard normal vectors rescaled to unit gauge.
    Random { seed: u64, count: usize },
    /// Standard basis vectors.
    Basis,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SphereSample {
    pub norm: NormSpec,
    pub dim: usize,
    pub scheme: SphereScheme,
    pub points: Vec<Vec<f64>>,
}

impl SphereSample {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Kernel space on the sample with `H = L = ` all points.
    pub fn to_space(&self) -> Result<FiniteKernelSpace> {
        FiniteKernelSpace::from_points(self.points.clone(), self.norm, Default::default())
    }

    /// Largest `| ||x|| - 1 |` over the sample.
    pub fn max_normalization_error(&self) -> f64 {
        self.points.iter().map(|x| (self.norm.gauge(x).unwrap_or(f64::NAN) - 1.0).abs()).fold(0.0, f64::max)
    }
}

fn check_norm(norm: &NormSpec) -> Result<()> {
    if matches!(norm, NormSpec::ExplicitMatrix) {
        Err(Error::Unsupported("an explicit kernel has no unit sphere".into()))
    } else {
        Ok(())
    }
}

fn normalize(norm: &NormSpec, x: Vec<f64>) -> Option<Vec<f64>> {
    let g = norm.gauge(&x).ok()?;
    if !(g > 0.0) || !g.is_finite() {
        return None;
    }
    let mut y: Vec<f64> = x.iter().map(|v| v / g).collect();
    // One correction step absorbs the rounding of the first division.
    let g2 = norm.gauge(&y).ok()?;
    if g2 != 1.0 {
        y.iter_mut().for_each(|v| *v /= g2);
    }
    Some(y)
}

/// `count` points at equal angles `2 pi k / count`, rescaled to the unit
/// sphere of `norm` in the plane.
pub fn circle_points(norm: &NormSpec, count: usize) -> Result<Vec<Vec<f64>>> {
    check_norm(norm)?;
    if count == 0 {
        return Err(Error::Input("a circle needs at least one point".into()));
    }
    Ok((0..count)
        .map(|k| {
            let a = std::f64::consts::TAU * k as f64 / count as f64;
            normalize(norm, vec![a.cos(), a.sin()]).expect("unit vectors have positive gauge")
        })
        .collect())
}

/// Points of the lattice `h Z^d` on the boundary of `[-1, 1]^d`, which is the
/// unit sphere of the sup norm. Integral `1/h` puts every corner on the grid.
fn cube_surface(dim: usize, h: f64) -> Vec<Vec<f64>> {
    let steps = (2.0 / h).round().max(1.0) as i64;
    let mut out = Vec::new();
    let mut z = vec![0i64; dim];
    loop {
        if z.iter().any(|&k| k == 0 || k == steps) {
            out.push(z.iter().map(|&k| -1.0 + 2.0 * k as f64 / steps as f64).collect());
        }
        let mut k = 0;
        while k < dim {
            if z[k] < steps {
                z[k] += 1;
                break;
            }
            z[k] = 0;
            k += 1;
        }
        if k == dim {
            return out;
        }
    }
}

/// Fibonacci lattice of `count` points on the Euclidean sphere in 3-d.
fn fibonacci(count: usize) -> Vec<Vec<f64>> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|i| {
            let z = 1.0 - 2.0 * (i as f64 + 0.5) / count as f64;
            let r = (1.0 - z * z).sqrt();
            let a = golden * i as f64;
            vec![r * a.cos(), r * a.sin(), z]
        })
        .collect()
}

/// Deterministic grid on the unit sphere, for dimensions 1 to 3.
pub fn sphere_grid(norm: &NormSpec, dim: usize, resolution: f64) -> Result<SphereSample> {
    check_norm(norm)?;
    if !(resolution > 0.0) || !resolution.is_finite() {
        return Err(Error::Input(format!("grid resolution must be positive, got {resolution}")));
    }
    let points = match (dim, norm) {
        (1, _) => vec![vec![-1.0], vec![1.0]],
        (2 | 3, NormSpec::SupNorm) => cube_surface(dim, resolution),
        (2, _) => circle_points(norm, (std::f64::consts::TAU / resolution).round().max(3.0) as usize)?,
        (3, _) => {
            let count = (4.0 * std::f64::consts::PI / (resolution * resolution)).round().max(4.0) as usize;
            fibonacci(count).into_iter().map(|x| normalize(norm, x).expect("nonzero")).collect()
        }
        _ => return Err(Error::Unsupported(format!("sphere grids cover dimensions 1 to 3, got {dim}"))),
    };
    Ok(SphereSample { norm: *norm, dim, scheme: SphereScheme::Grid { resolution }, points })
}

/// `count` random points on the unit sphere: standard normal vectors drawn
/// from a seeded ChaCha stream and rescaled to unit gauge. No uniformity
/// under any surface measure is implied.
pub fn sphere_random(norm: &NormSpec, dim: usize, count: usize, seed: u64) -> Result<SphereSample> {
    check_norm(norm)?;
    if dim == 0 {
        return Err(Error::Input("dimension must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(count);
    while points.len() < count {
        let x: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect();
        if let Some(y) = normalize(norm, x) {
            points.push(y);
        }
    }
    Ok(SphereSample { norm: *norm, dim, scheme: SphereScheme::Random { seed, count }, points })
}

/// First `n` standard basis vectors of `R^dim` under the `l_p` kernel.
/// Their supports are pairwise disjoint, so every pairwise distance is
/// `2^(1/p)`.
pub fn witness_configuration(p: f64, n: usize, dim: usize) -> Result<SphereSample> {
    witness_configuration_with(&NormSpec::lp(p)?, n, dim)
}

/// [`witness_configuration`] under an arbitrary `l_p`-type kernel.
pub fn witness_configuration_with(norm: &NormSpec, n: usize, dim: usize) -> Result<SphereSample> {
    check_norm(norm)?;
    if n == 0 {
        return Err(Error::Input("the configuration needs at least one point".into()));
    }
    if dim < n {
        return Err(Error::Input(format!("dimension {dim} cannot hold {n} disjoint basis vectors")));
    }
    let points = (0..n)
        .map(|j| {
            let mut e = vec![0.0; dim];
            e[j] = 1.0;
            e
        })
        .collect();
    Ok(SphereSample { norm: *norm, dim, scheme: SphereScheme::Basis, points })
}

/// Potential of the equal-weight measure on `config` at an arbitrary point.
pub fn configuration_potential(norm: &NormSpec, config: &[Vec<f64>], x: &[f64]) -> f64 {
    config.iter().map(|e| norm.eval_unchecked(x, e)).sum::<f64>() / config.len() as f64
}
