//! Norm specifications, kernel evaluation and finite kernel spaces.
//!
//! A [`FiniteKernelSpace`] is the discrete stand-in for a set `X` carrying a
//! symmetric nonnegative kernel `k`. The kernel is stored as a dense `N x N`
//! matrix; every downstream computation (potentials, enumerations, games,
//! covers) is a scan over rows of that matrix.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How the kernel between two coordinate vectors is computed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "NormRepr", into = "NormRepr")]
pub enum NormSpec {
    /// `(sum |x_i - y_i|^p)^(1/p)` with `p >= 1`.
    LpNorm { p: f64 },
    /// Same formula with `0 < p < 1`; symmetric but not a metric.
    LpQuasiNorm { p: f64 },
    /// `sum |x_i - y_i|^p` with `0 < p < 1`; a genuine metric.
    LpMetric { p: f64 },
    /// `max |x_i - y_i|`.
    SupNorm,
    /// The kernel is given as a matrix; coordinates carry no meaning.
    ExplicitMatrix,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum NormRepr {
    Lp { p: f64 },
    LpMetric { p: f64 },
    Sup,
    Explicit,
}

impl TryFrom<NormRepr> for NormSpec {
    type Error = Error;

    fn try_from(repr: NormRepr) -> Result<Self> {
        match repr {
            NormRepr::Lp { p } => NormSpec::lp(p),
            NormRepr::LpMetric { p } => NormSpec::lp_metric(p),
            NormRepr::Sup => Ok(NormSpec::SupNorm),
            NormRepr::Explicit => Ok(NormSpec::ExplicitMatrix),
        }
    }
}

impl From<NormSpec> for NormRepr {
    fn from(spec: NormSpec) -> Self {
        match spec {
            NormSpec::LpNorm { p } | NormSpec::LpQuasiNorm { p } => NormRepr::Lp { p },
            NormSpec::LpMetric { p } => NormRepr::LpMetric { p },
            NormSpec::SupNorm => NormRepr::Sup,
            NormSpec::ExplicitMatrix => NormRepr::Explicit,
        }
    }
}

impl std::fmt::Display for NormSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            NormSpec::LpNorm { p } => write!(f, "lp({p})"),
            NormSpec::LpQuasiNorm { p } => write!(f, "lp_quasi({p})"),
            NormSpec::LpMetric { p } => write!(f, "lp_metric({p})"),
            NormSpec::SupNorm => write!(f, "sup"),
            NormSpec::ExplicitMatrix => write!(f, "explicit"),
        }
    }
}

/// Parses the [`Display`](std::fmt::Display) forms `lp(P)`, `lp_metric(P)`,
/// `sup` and `explicit`, plus the shorthands `lP` (as in `l2`), `inf` and
/// `linf`.
impl std::str::FromStr for NormSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        let exponent = |text: &str| {
            text.trim()
                .parse::<f64>()
                .map_err(|_| Error::Input(format!("cannot read exponent '{text}' in norm '{s}'")))
        };
        let inner = |prefix: &str| s.strip_prefix(prefix).and_then(|r| r.strip_prefix('(')).and_then(|r| r.strip_suffix(')'));
        match s.as_str() {
            "sup" | "inf" | "linf" | "max" => return Ok(NormSpec::SupNorm),
            "explicit" => return Ok(NormSpec::ExplicitMatrix),
            _ => {}
        }
        if let Some(p) = inner("lp_metric") {
            return NormSpec::lp_metric(exponent(p)?);
        }
        if let Some(p) = inner("lp_quasi").or_else(|| inner("lp")) {
            return NormSpec::lp(exponent(p)?);
        }
        if let Some(p) = s.strip_prefix('l').filter(|r| r.parse::<f64>().is_ok()) {
            return NormSpec::lp(exponent(p)?);
        }
        Err(Error::Input(format!(
            "unknown norm '{s}': expected lp(P), lP, lp_metric(P), sup or explicit"
        )))
    }
}

fn check_exponent(p: f64) -> Result<()> {
    if p.is_finite() && p > 0.0 {
        Ok(())
    } else {
        Err(Error::Input(format!("exponent p must be finite and positive, got {p}")))
    }
}

impl NormSpec {
    /// The `l_p` kernel `(sum |x_i - y_i|^p)^(1/p)`: a norm for `p >= 1`,
    /// a quasi-norm below that.
    pub fn lp(p: f64) -> Result<Self> {
        check_exponent(p)?;
        Ok(if p >= 1.0 {
            NormSpec::LpNorm { p }
        } else {
            NormSpec::LpQuasiNorm { p }
        })
    }

    pub fn lp_metric(p: f64) -> Result<Self> {
        check_exponent(p)?;
        if p >= 1.0 {
            return Err(Error::Input(format!(
                "lp_metric requires 0 < p < 1, got {p}"
            )));
        }
        Ok(NormSpec::LpMetric { p })
    }

    pub fn exponent(&self) -> Option<f64> {
        match *self {
            NormSpec::LpNorm { p } | NormSpec::LpQuasiNorm { p } | NormSpec::LpMetric { p } => {
                Some(p)
            }
            NormSpec::SupNorm | NormSpec::ExplicitMatrix => None,
        }
    }

    /// True when the kernel satisfies the triangle inequality.
    pub fn is_metric(&self) -> bool {
        matches!(
            self,
            NormSpec::LpNorm { .. } | NormSpec::LpMetric { .. } | NormSpec::SupNorm
        )
    }

    /// True for genuine norms (convex, positively homogeneous kernels).
    pub fn is_norm(&self) -> bool {
        matches!(self, NormSpec::LpNorm { .. } | NormSpec::SupNorm)
    }

    /// Kernel value `k(x, y)`.
    pub fn eval(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        if x.len() != y.len() {
            return Err(Error::DimensionMismatch { expected: x.len(), found: y.len() });
        }
        if matches!(self, NormSpec::ExplicitMatrix) {
            return Err(Error::Unsupported(
                "an explicit kernel cannot be evaluated on coordinates".into(),
            ));
        }
        Ok(self.eval_unchecked(x, y))
    }

    pub(crate) fn eval_unchecked(&self, x: &[f64], y: &[f64]) -> f64 {
        let diffs = x.iter().zip(y).map(|(a, b)| (a - b).abs());
        match *self {
            NormSpec::LpNorm { p } | NormSpec::LpQuasiNorm { p } => {
                if p == 1.0 {
                    diffs.sum()
                } else if p == 2.0 {
                    diffs.map(|d| d * d).sum::<f64>().sqrt()
                } else {
                    diffs.map(|d| d.powf(p)).sum::<f64>().powf(1.0 / p)
                }
            }
            NormSpec::LpMetric { p } => diffs.map(|d| d.powf(p)).sum(),
            NormSpec::SupNorm => diffs.fold(0.0, f64::max),
            NormSpec::ExplicitMatrix => f64::NAN,
        }
    }

    /// The positively homogeneous gauge whose unit sphere this kernel lives
    /// on. For `LpMetric` this is `(sum |x_i|^p)^(1/p)`, so that points with
    /// gauge one also satisfy `d(x, 0) = 1`.
    pub fn gauge(&self, x: &[f64]) -> Result<f64> {
        let abs = x.iter().map(|v| v.abs());
        match *self {
            NormSpec::LpNorm { p } | NormSpec::LpQuasiNorm { p } | NormSpec::LpMetric { p } => {
                Ok(abs.map(|d| d.powf(p)).sum::<f64>().powf(1.0 / p))
            }
            NormSpec::SupNorm => Ok(abs.fold(0.0, f64::max)),
            NormSpec::ExplicitMatrix => Err(Error::Unsupported(
                "an explicit kernel has no gauge".into(),
            )),
        }
    }

    /// A norming functional `g` of `z` (`g(z) = ||z||`, dual norm at most 1).
    /// Only defined for genuine norms.
    pub(crate) fn norming_functional(&self, z: &[f64]) -> Result<Vec<f64>> {
        let mut g = vec![0.0; z.len()];
        match *self {
            NormSpec::LpNorm { p } if p == 1.0 => {
                for (gi, zi) in g.iter_mut().zip(z) {
                    if *zi != 0.0 {
                        *gi = zi.signum();
                    }
                }
            }
            NormSpec::LpNorm { p } => {
                let norm = self.eval_unchecked(z, &vec![0.0; z.len()]);
                if norm > 0.0 {
                    for (gi, zi) in g.iter_mut().zip(z) {
                        *gi = zi.signum() * (zi.abs() / norm).powf(p - 1.0);
                    }
                }
            }
            NormSpec::SupNorm => {
                let (k, v) = z
                    .iter()
                    .enumerate()
                    .fold((0, 0.0_f64), |acc, (i, v)| if v.abs() > acc.1 { (i, v.abs()) } else { acc });
                if v > 0.0 {
                    g[k] = z[k].signum();
                }
            }
            _ => {
                return Err(Error::Unsupported(format!(
                    "norming functionals need a norm, got {self}"
                )))
            }
        }
        Ok(g)
    }
}

/// Kernel value `k(x, y)` under `spec`.
pub fn eval_kernel(spec: &NormSpec, x: &[f64], y: &[f64]) -> Result<f64> {
    spec.eval(x, y)
}

/// Name of the subset every space carries for the "configuration" side.
pub const SUBSET_H: &str = "H";
/// Name of the subset every space carries for the "evaluation" side.
pub const SUBSET_L: &str = "L";

/// Finite set of points with a dense symmetric nonnegative kernel and
/// named index subsets (at least `H` and `L`).
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteKernelSpace {
    points: Vec<Vec<f64>>,
    norm: NormSpec,
    n: usize,
    kernel: Vec<f64>,
    subsets: BTreeMap<String, Vec<usize>>,
}

impl FiniteKernelSpace {
    /// Builds the kernel from coordinates. Only the upper triangle is
    /// evaluated; the lower triangle is a bitwise mirror.
    pub fn from_points(
        points: Vec<Vec<f64>>,
        norm: NormSpec,
        subsets: BTreeMap<String, Vec<usize>>,
    ) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Input("point list is empty".into()));
        }
        if matches!(norm, NormSpec::ExplicitMatrix) {
            return Err(Error::Unsupported(
                "points need a coordinate norm, not an explicit kernel".into(),
            ));
        }
        let dim = points[0].len();
        for p in &points {
            if p.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: p.len() });
            }
            if p.iter().any(|v| !v.is_finite()) {
                return Err(Error::Input("point coordinates must be finite".into()));
            }
        }
        let n = points.len();
        let upper: Vec<Vec<f64>> = (0..n)
            .into_par_iter()
            .map(|i| {
                (i + 1..n)
                    .map(|j| norm.eval_unchecked(&points[i], &points[j]))
                    .collect()
            })
            .collect();
        let mut kernel = vec![0.0; n * n];
        for (i, row) in upper.into_iter().enumerate() {
            for (off, v) in row.into_iter().enumerate() {
                let j = i + 1 + off;
                kernel[i * n + j] = v;
                kernel[j * n + i] = v;
            }
        }
        Self::assemble(points, norm, n, kernel, subsets)
    }

    /// Wraps an explicit kernel matrix. The matrix must be square, finite,
    /// nonnegative and exactly symmetric.
    pub fn from_kernel(matrix: Vec<Vec<f64>>, subsets: BTreeMap<String, Vec<usize>>) -> Result<Self> {
        let n = matrix.len();
        if n == 0 {
            return Err(Error::Input("kernel matrix is empty".into()));
        }
        let mut kernel = Vec::with_capacity(n * n);
        for row in &matrix {
            if row.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: row.len() });
            }
            for &v in row {
                if !v.is_finite() {
                    return Err(Error::Input("kernel entries must be finite".into()));
                }
                if v < 0.0 {
                    return Err(Error::Input(format!("kernel entry {v} is negative")));
                }
            }
            kernel.extend_from_slice(row);
        }
        for i in 0..n {
            for j in i + 1..n {
                if kernel[i * n + j] != kernel[j * n + i] {
                    return Err(Error::Input(format!(
                        "kernel is not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        Self::assemble(Vec::new(), NormSpec::ExplicitMatrix, n, kernel, subsets)
    }

    fn assemble(
        points: Vec<Vec<f64>>,
        norm: NormSpec,
        n: usize,
        kernel: Vec<f64>,
        mut subsets: BTreeMap<String, Vec<usize>>,
    ) -> Result<Self> {
        for (name, idx) in &subsets {
            if let Some(&bad) = idx.iter().find(|&&i| i >= n) {
                return Err(Error::Input(format!(
                    "subset `{name}` has index {bad}, space has {n} points"
                )));
            }
        }
        for name in [SUBSET_H, SUBSET_L] {
            subsets.entry(name.to_string()).or_insert_with(|| (0..n).collect());
        }
        Ok(FiniteKernelSpace { points, norm, n, kernel, subsets })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn norm(&self) -> NormSpec {
        self.norm
    }

    /// Coordinates, empty for explicit kernels.
    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    #[inline]
    pub fn k(&self, i: usize, j: usize) -> f64 {
        self.kernel[i * self.n + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.kernel[i * self.n..(i + 1) * self.n]
    }

    pub fn kernel_matrix(&self) -> Vec<Vec<f64>> {
        self.kernel.chunks(self.n).map(<[f64]>::to_vec).collect()
    }

    /// Largest kernel entry.
    pub fn sup_kernel(&self) -> f64 {
        self.kernel.iter().copied().fold(0.0, f64::max)
    }

    pub fn subsets(&self) -> &BTreeMap<String, Vec<usize>> {
        &self.subsets
    }

    pub fn subset(&self, name: &str) -> Result<&[usize]> {
        self.subsets
            .get(name)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::UnknownSubset(name.to_string()))
    }

    pub fn all_indices(&self) -> Vec<usize> {
        (0..self.n).collect()
    }

    /// Adds or replaces a named subset.
    pub fn with_subset(mut self, name: &str, indices: Vec<usize>) -> Result<Self> {
        self.check_indices(&indices)?;
        self.subsets.insert(name.to_string(), indices);
        Ok(self)
    }

    pub fn check_indices(&self, indices: &[usize]) -> Result<()> {
        match indices.iter().find(|&&i| i >= self.n) {
            Some(&index) => Err(Error::IndexOutOfRange { index, len: self.n }),
            None => Ok(()),
        }
    }

    /// Largest kernel value between two members of the named subset.
    pub fn diameter(&self, subset: &str) -> Result<f64> {
        let idx = self.subset(subset)?;
        if idx.is_empty() {
            return Err(Error::EmptySubset(subset.to_string()));
        }
        Ok(self.diameter_of(idx))
    }

    pub fn diameter_of(&self, idx: &[usize]) -> f64 {
        idx.iter()
            .flat_map(|&i| idx.iter().map(move |&j| (i, j)))
            .map(|(i, j)| self.k(i, j))
            .fold(0.0, f64::max)
    }

    /// Same space with every kernel entry multiplied by `lambda > 0`. The
    /// result is an explicit-kernel space.
    pub fn scaled(&self, lambda: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::Input(format!("scale must be positive, got {lambda}")));
        }
        let kernel = self.kernel.iter().map(|v| v * lambda).collect();
        Ok(FiniteKernelSpace {
            points: Vec::new(),
            norm: NormSpec::ExplicitMatrix,
            n: self.n,
            kernel,
            subsets: self.subsets.clone(),
        })
    }

    /// Relabels point `i` as `perm[i]`, carrying subsets along.
    pub fn relabeled(&self, perm: &[usize]) -> Result<Self> {
        let n = self.n;
        let mut seen = vec![false; n];
        if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::Input("relabeling must be a permutation".into()));
        }
        let mut kernel = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                kernel[perm[i] * n + perm[j]] = self.k(i, j);
            }
        }
        let mut points = vec![Vec::new(); self.points.len()];
        for (i, p) in self.points.iter().enumerate() {
            points[perm[i]] = p.clone();
        }
        let subsets = self
            .subsets
            .iter()
            .map(|(k, v)| (k.clone(), v.iter().map(|&i| perm[i]).collect()))
            .collect();
        Ok(FiniteKernelSpace { points, norm: self.norm, n, kernel, subsets })
    }

    /// Parses the JSON space document.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let file: SpaceFile =
            serde_json::from_str(text).map_err(|e| Error::Input(format!("space file: {e}")))?;
        file.into_space()
    }

    pub fn to_space_file(&self) -> SpaceFile {
        let explicit = matches!(self.norm, NormSpec::ExplicitMatrix);
        SpaceFile {
            points: (!explicit).then(|| self.points.clone()),
            kernel: explicit.then(|| self.kernel_matrix()),
            norm: self.norm,
            subsets: self.subsets.clone(),
        }
    }
}

/// On-disk form of a [`FiniteKernelSpace`]: exactly one of `points` or
/// `kernel`, a norm object and named subsets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel: Option<Vec<Vec<f64>>>,
    pub norm: NormSpec,
    #[serde(default)]
    pub subsets: BTreeMap<String, Vec<usize>>,
}

impl SpaceFile {
    pub fn into_space(self) -> Result<FiniteKernelSpace> {
        match (self.points, self.kernel) {
            (Some(_), Some(_)) => Err(Error::Input(
                "space file may not contain both `points` and `kernel`".into(),
            )),
            (None, None) => Err(Error::Input(
                "space file needs one of `points` or `kernel`".into(),
            )),
            (Some(points), None) => FiniteKernelSpace::from_points(points, self.norm, self.subsets),
            (None, Some(kernel)) => {
                if !matches!(self.norm, NormSpec::ExplicitMatrix) {
                    return Err(Error::Input(
                        "an explicit `kernel` requires norm type `explicit`".into(),
                    ));
                }
                FiniteKernelSpace::from_kernel(kernel, self.subsets)
            }
        }
    }
}

/// Shorthand for [`FiniteKernelSpace::from_points`].
pub fn build_space(
    points: Vec<Vec<f64>>,
    norm: NormSpec,
    subsets: BTreeMap<String, Vec<usize>>,
) -> Result<FiniteKernelSpace> {
    FiniteKernelSpace::from_points(points, norm, subsets)
}

/// Shorthand for [`FiniteKernelSpace::diameter`].
pub fn diameter(space: &FiniteKernelSpace, subset: &str) -> Result<f64> {
    space.diameter(subset)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn norm_names_round_trip() {
        for spec in [
            NormSpec::lp(2.0).unwrap(),
            NormSpec::lp(0.5).unwrap(),
            NormSpec::lp_metric(0.25).unwrap(),
            NormSpec::SupNorm,
            NormSpec::ExplicitMatrix,
        ] {
            assert_eq!(spec.to_string().parse::<NormSpec>().unwrap(), spec);
        }
        assert_eq!("l1".parse::<NormSpec>().unwrap(), NormSpec::LpNorm { p: 1.0 });
        assert_eq!("Inf".parse::<NormSpec>().unwrap(), NormSpec::SupNorm);
        assert!("lp_metric(2)".parse::<NormSpec>().is_err());
        assert!("euclid".parse::<NormSpec>().is_err());
        assert!("lp(x)".parse::<NormSpec>().is_err());
    }

    fn no_subsets() -> BTreeMap<String, Vec<usize>> {
        BTreeMap::new()
    }

    #[test]
    fn kernel_examples() {
        let l2 = NormSpec::lp(2.0).unwrap();
        assert_eq!(eval_kernel(&l2, &[0.0, 0.0], &[3.0, 4.0]).unwrap(), 5.0);
        let metric = NormSpec::lp_metric(0.5).unwrap();
        assert_eq!(metric.eval(&[0.0, 0.0], &[1.0, 1.0]).unwrap(), 2.0);
        let quasi = NormSpec::lp(0.5).unwrap();
        assert!(matches!(quasi, NormSpec::LpQuasiNorm { .. }));
        assert_eq!(quasi.eval(&[0.0, 0.0], &[1.0, 1.0]).unwrap(), 4.0);
        assert_eq!(NormSpec::SupNorm.eval(&[1.0, -2.0], &[0.5, 1.0]).unwrap(), 3.0);
    }

    #[test]
    fn kernel_errors() {
        let l2 = NormSpec::lp(2.0).unwrap();
        assert!(matches!(
            l2.eval(&[0.0], &[1.0, 2.0]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            NormSpec::ExplicitMatrix.eval(&[0.0], &[1.0]),
            Err(Error::Unsupported(_))
        ));
        assert!(NormSpec::lp(0.0).is_err());
        assert!(NormSpec::lp(f64::INFINITY).is_err());
        assert!(NormSpec::lp_metric(1.5).is_err());
    }

    #[test]
    fn build_examples() {
        let l2 = NormSpec::lp(2.0).unwrap();
        let two = build_space(vec![vec![0.0], vec![1.0]], l2, no_subsets()).unwrap();
        assert_eq!(two.kernel_matrix(), vec![vec![0.0, 1.0], vec![1.0, 0.0]]);
        assert_eq!(two.diameter("H").unwrap(), 1.0);

        let h = 3f64.sqrt() / 2.0;
        let tri = build_space(
            vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.5, h]],
            l2,
            no_subsets(),
        )
        .unwrap();
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    assert!((tri.k(i, j) - 1.0).abs() < 1e-15);
                }
            }
        }

        let l1 = NormSpec::lp(1.0).unwrap();
        let line = build_space(vec![vec![0.0], vec![1.0], vec![2.0]], l1, no_subsets()).unwrap();
        assert_eq!(
            line.kernel_matrix(),
            vec![vec![0.0, 1.0, 2.0], vec![1.0, 0.0, 1.0], vec![2.0, 1.0, 0.0]]
        );
        assert_eq!(line.diameter("L").unwrap(), 2.0);
        let line = line.with_subset("S", vec![1]).unwrap();
        assert_eq!(line.diameter("S").unwrap(), 0.0);
        assert!(matches!(line.diameter("nope"), Err(Error::UnknownSubset(_))));
    }

    #[test]
    fn build_errors() {
        let l2 = NormSpec::lp(2.0).unwrap();
        assert!(build_space(vec![], l2, no_subsets()).is_err());
        assert!(build_space(vec![vec![0.0], vec![1.0, 2.0]], l2, no_subsets()).is_err());
        let mut bad = BTreeMap::new();
        bad.insert("H".to_string(), vec![3]);
        assert!(build_space(vec![vec![0.0]], l2, bad).is_err());
        assert!(FiniteKernelSpace::from_kernel(vec![vec![0.0, 1.0], vec![2.0, 0.0]], no_subsets()).is_err());
        assert!(FiniteKernelSpace::from_kernel(vec![vec![0.0, -1.0], vec![-1.0, 0.0]], no_subsets()).is_err());
        assert!(FiniteKernelSpace::from_kernel(
            vec![vec![0.0, f64::INFINITY], vec![f64::INFINITY, 0.0]],
            no_subsets()
        )
        .is_err());
    }

    #[test]
    fn json_space_file() {
        let s = FiniteKernelSpace::from_json_str(
            r#"{"points": [[0,0],[3,4]], "norm": {"type":"lp","p":2}, "subsets": {"H":[0,1],"L":[1]}}"#,
        )
        .unwrap();
        assert_eq!(s.k(0, 1), 5.0);
        assert_eq!(s.subset("L").unwrap(), &[1]);

        let e = FiniteKernelSpace::from_json_str(
            r#"{"kernel": [[0,2],[2,0]], "norm": {"type":"explicit"}}"#,
        )
        .unwrap();
        assert_eq!(e.subset("H").unwrap(), &[0, 1]);
        assert_eq!(e.norm(), NormSpec::ExplicitMatrix);

        let both = r#"{"points": [[0]], "kernel": [[0]], "norm": {"type":"sup"}}"#;
        assert!(FiniteKernelSpace::from_json_str(both).is_err());
        let neither = r#"{"norm": {"type":"sup"}}"#;
        assert!(FiniteKernelSpace::from_json_str(neither).is_err());
        let q = FiniteKernelSpace::from_json_str(
            r#"{"points": [[0,0],[1,1]], "norm": {"type":"lp","p":0.5}}"#,
        )
        .unwrap();
        assert_eq!(q.k(0, 1), 4.0);
        let round = serde_json::to_string(&q.to_space_file()).unwrap();
        assert_eq!(FiniteKernelSpace::from_json_str(&round).unwrap(), q);
    }

    #[test]
    fn quasi_norm_breaks_triangle_inequality() {
        let quasi = NormSpec::lp(0.5).unwrap();
        let (x, y, z) = ([0.0, 0.0], [1.0, 0.0], [1.0, 1.0]);
        let direct = quasi.eval(&x, &z).unwrap();
        let detour = quasi.eval(&x, &y).unwrap() + quasi.eval(&y, &z).unwrap();
        assert!(direct > detour + 1.0, "{direct} vs {detour}");
    }

    #[test]
    fn relabeling_preserves_kernel() {
        let l2 = NormSpec::lp(2.0).unwrap();
        let s = build_space(vec![vec![0.0], vec![1.0], vec![3.0]], l2, no_subsets()).unwrap();
        let r = s.relabeled(&[2, 0, 1]).unwrap();
        assert_eq!(r.k(2, 1), s.k(0, 2));
        assert!(s.relabeled(&[0, 0, 1]).is_err());
    }

    fn coords(dim: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-5.0..5.0f64, dim)
    }

    fn metric_norm() -> impl Strategy<Value = NormSpec> {
        prop_oneof![
            (1.0..6.0f64).prop_map(|p| NormSpec::lp(p).unwrap()),
            Just(NormSpec::SupNorm),
            (0.05..0.95f64).prop_map(|p| NormSpec::lp_metric(p).unwrap()),
        ]
    }

    proptest! {
        #[test]
        fn triangle_inequality(norm in metric_norm(), x in coords(3), y in coords(3), z in coords(3)) {
            let xz = norm.eval(&x, &z).unwrap();
            let xy = norm.eval(&x, &y).unwrap();
            let yz = norm.eval(&y, &z).unwrap();
            prop_assert!(xz <= xy + yz + 1e-12);
        }

        #[test]
        fn built_kernels_are_bitwise_symmetric(norm in metric_norm(), pts in prop::collection::vec(coords(2), 1..12)) {
            let s = build_space(pts, norm, BTreeMap::new()).unwrap();
            for i in 0..s.len() {
                prop_assert_eq!(s.k(i, i), 0.0);
                for j in 0..s.len() {
                    prop_assert_eq!(s.k(i, j).to_bits(), s.k(j, i).to_bits());
                }
            }
        }
    }
}
