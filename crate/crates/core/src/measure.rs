use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on the total mass of a [`DiscreteMeasure`].
pub const MASS_TOLERANCE: f64 = 1e-12;

/// Finitely supported probability measure on the points of a space.
///
/// Atoms are distinct point indices with strictly positive weights summing
/// to one. Zero weights are dropped at construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MeasureRepr")]
pub struct DiscreteMeasure {
    atoms: Vec<usize>,
    weights: Vec<f64>,
}

#[derive(Deserialize)]
struct MeasureRepr {
    atoms: Vec<usize>,
    weights: Vec<f64>,
}

impl TryFrom<MeasureRepr> for DiscreteMeasure {
    type Error = Error;

    fn try_from(r: MeasureRepr) -> Result<Self> {
        DiscreteMeasure::new(r.atoms, r.weights)
    }
}

impl DiscreteMeasure {
    pub fn new(atoms: Vec<usize>, weights: Vec<f64>) -> Result<Self> {
        if atoms.len() != weights.len() {
            return Err(Error::DimensionMismatch { expected: atoms.len(), found: weights.len() });
        }
        if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
            return Err(Error::Input(format!("measure weight {w} is not a nonnegative number")));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::Input(format!("measure weights sum to {total}, not 1")));
        }
        let (atoms, weights): (Vec<_>, Vec<_>) =
            atoms.into_iter().zip(weights).filter(|(_, w)| *w > 0.0).unzip();
        let mut sorted = atoms.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Input("measure atoms must be distinct".into()));
        }
        if atoms.is_empty() {
            return Err(Error::Input("measure has no atoms".into()));
        }
        Ok(DiscreteMeasure { atoms, weights })
    }

    /// Normalizes arbitrary nonnegative masses. Used when weights come out of
    /// a numerical solver and carry rounding noise.
    pub fn from_masses(atoms: Vec<usize>, masses: Vec<f64>) -> Result<Self> {
        if atoms.len() != masses.len() {
            return Err(Error::DimensionMismatch { expected: atoms.len(), found: masses.len() });
        }
        let clean: Vec<f64> = masses.iter().map(|&m| if m.is_finite() && m > 0.0 { m } else { 0.0 }).collect();
        let total: f64 = clean.iter().sum();
        if total <= 0.0 {
            return Err(Error::Input("measure has no positive mass".into()));
        }
        let mut weights: Vec<f64> = clean.iter().map(|m| m / total).collect();
        fix_rounding(&mut weights);
        DiscreteMeasure::new(atoms, weights)
    }

    pub fn dirac(atom: usize) -> Self {
        DiscreteMeasure { atoms: vec![atom], weights: vec![1.0] }
    }

    /// Equal weights on distinct atoms.
    pub fn uniform(atoms: Vec<usize>) -> Result<Self> {
        let n = atoms.len();
        DiscreteMeasure::from_masses(atoms, vec![1.0; n])
    }

    /// `(1/m) sum c_j delta_{a_j}` with `m = sum c_j`.
    pub fn from_counts(atoms: Vec<usize>, counts: &[usize]) -> Result<Self> {
        DiscreteMeasure::from_masses(atoms, counts.iter().map(|&c| c as f64).collect())
    }

    /// Average of the Dirac masses at the given points, repetitions allowed.
    pub fn from_configuration(config: &[usize]) -> Result<Self> {
        let mut atoms: Vec<usize> = config.to_vec();
        atoms.sort_unstable();
        atoms.dedup();
        let counts: Vec<usize> = atoms.iter().map(|a| config.iter().filter(|c| *c == a).count()).collect();
        DiscreteMeasure::from_counts(atoms, &counts)
    }

    pub fn atoms(&self) -> &[usize] {
        &self.atoms
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.atoms.iter().copied().zip(self.weights.iter().copied())
    }

    /// Weight of `atom`, zero when it is not in the support.
    pub fn weight_of(&self, atom: usize) -> f64 {
        self.atoms.iter().position(|&a| a == atom).map_or(0.0, |i| self.weights[i])
    }

    /// True when every atom carries the same weight.
    pub fn is_equal_weight(&self) -> bool {
        self.weights.windows(2).all(|w| w[0] == w[1])
    }

    /// Convex combination `alpha * self + (1 - alpha) * other`.
    pub fn mix(&self, other: &DiscreteMeasure, alpha: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::Input(format!("mixing weight {alpha} outside [0, 1]")));
        }
        let mut atoms: Vec<usize> = self.atoms.iter().chain(&other.atoms).copied().collect();
        atoms.sort_unstable();
        atoms.dedup();
        let masses = atoms
            .iter()
            .map(|&a| alpha * self.weight_of(a) + (1.0 - alpha) * other.weight_of(a))
            .collect();
        DiscreteMeasure::from_masses(atoms, masses)
    }
}

// Pushes the residual of a normalization onto the heaviest weight so the
// total lands within MASS_TOLERANCE.
fn fix_rounding(weights: &mut [f64]) {
    let total: f64 = weights.iter().sum();
    if let Some(i) = (0..weights.len()).max_by(|&a, &b| weights[a].total_cmp(&weights[b])) {
        weights[i] += 1.0 - total;
    }
}

/// Closed interval `[lo, hi]`; `lo > hi` encodes the empty interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub empty: bool,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi, empty: lo > hi }
    }

    pub fn point(v: f64) -> Self {
        Interval::new(v, v)
    }

    pub fn is_empty(&self) -> bool {
        self.empty
    }

    pub fn width(&self) -> f64 {
        if self.empty {
            0.0
        } else {
            self.hi - self.lo
        }
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, v: f64, tol: f64) -> bool {
        !self.empty && v >= self.lo - tol && v <= self.hi + tol
    }

    pub fn intersect(&self, other: &Interval) -> Interval {
        Interval::new(self.lo.max(other.lo), self.hi.min(other.hi))
    }
}

impl std::fmt::Display for Interval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.empty {
            write!(f, "empty")
        } else {
            write!(f, "[{}, {}]", self.lo, self.hi)
        }
    }
}
