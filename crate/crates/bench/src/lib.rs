//! Fixture builders shared by the benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rvz_core::spaces::sphere_grid;
use rvz_core::{DiscreteMeasure, FiniteKernelSpace, NormSpec};

/// Symmetric kernel with zero diagonal and entries uniform in `[0, 1)`.
pub fn random_kernel(size: usize, seed: u64) -> FiniteKernelSpace {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m = vec![vec![0.0; size]; size];
    for i in 0..size {
        for j in i + 1..size {
            let v: f64 = rng.random();
            m[i][j] = v;
            m[j][i] = v;
        }
    }
    FiniteKernelSpace::from_kernel(m, Default::default()).expect("valid kernel")
}

/// Uniform random points of the unit square under the given norm.
pub fn random_points(size: usize, norm: NormSpec, seed: u64) -> FiniteKernelSpace {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts = (0..size).map(|_| vec![rng.random::<f64>(), rng.random::<f64>()]).collect();
    FiniteKernelSpace::from_points(pts, norm, Default::default()).expect("valid points")
}

/// Regular `n`-gon on the Euclidean unit circle.
pub fn circle(n: usize) -> FiniteKernelSpace {
    sphere_grid(&NormSpec::LpNorm { p: 2.0 }, 2, std::f64::consts::TAU / n as f64)
        .and_then(|s| s.to_space())
        .expect("circle sample")
}

/// Regular polygon with `k` vertices inscribed in the unit circle.
pub fn regular_polygon(k: usize) -> Vec<Vec<f64>> {
    (0..k)
        .map(|i| {
            let a = std::f64::consts::TAU * i as f64 / k as f64;
            vec![a.cos(), a.sin()]
        })
        .collect()
}

/// Probability vector with `k` atoms and random positive weights.
pub fn random_measure(k: usize, seed: u64) -> DiscreteMeasure {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let masses = (0..k).map(|_| rng.random_range(0.05..1.0)).collect();
    DiscreteMeasure::from_masses((0..k).collect(), masses).expect("valid measure")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_have_the_requested_size() {
        assert_eq!(random_kernel(7, 1).len(), 7);
        assert_eq!(random_points(9, NormSpec::SupNorm, 1).len(), 9);
        assert_eq!(circle(36).len(), 36);
        assert_eq!(regular_polygon(5).len(), 5);
        assert_eq!(random_measure(4, 2).len(), 4);
    }
}
