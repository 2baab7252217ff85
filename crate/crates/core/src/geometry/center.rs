//! Smallest ball containing a polytope, with its centre constrained to the
//! polytope.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lp::{LinearProgram, Relation};
use crate::space::NormSpec;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BallSpec {
    pub center: Vec<f64>,
    pub radius: f64,
    pub norm: NormSpec,
}

impl BallSpec {
    pub fn new(center: Vec<f64>, radius: f64, norm: NormSpec) -> Result<Self> {
        if !(radius >= 0.0) || !radius.is_finite() {
            return Err(Error::Input(format!("ball radius must be nonnegative, got {radius}")));
        }
        Ok(BallSpec { center, radius, norm })
    }

    /// Closed-ball membership with an absolute slack.
    pub fn contains(&self, x: &[f64], slack: f64) -> Result<bool> {
        Ok(self.norm.eval(&self.center, x)? <= self.radius + slack)
    }
}

/// Centre and radius with a certified bracket on the optimal radius.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CenterResult {
    /// Ball around the best centre found; its radius is that centre's
    /// farthest-vertex distance, an upper bound on the optimum.
    pub ball: BallSpec,
    /// Certified lower bound on the optimal radius.
    pub lower_bound: f64,
    /// Barycentric coordinates of the centre with respect to the vertices.
    pub weights: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

impl CenterResult {
    pub fn gap(&self) -> f64 {
        self.ball.radius - self.lower_bound
    }
}

const MAX_ITERATIONS: usize = 3000;

fn farthest(norm: &NormSpec, c: &[f64], vertices: &[Vec<f64>]) -> f64 {
    vertices.iter().map(|v| norm.eval_unchecked(c, v)).fold(0.0, f64::max)
}

fn combine(vertices: &[Vec<f64>], weights: &[f64]) -> Vec<f64> {
    let mut c = vec![0.0; vertices[0].len()];
    for (v, &w) in vertices.iter().zip(weights) {
        for (ci, vi) in c.iter_mut().zip(v) {
            *ci += w * vi;
        }
    }
    c
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Solves the cutting-plane model `max s` subject to `sum w <= 1` and
/// `a_k . w + s <= b_k` for every cut, over `w, s >= 0`, and returns the
/// optimal `s` with the weights `w`.
///
/// The model has few variables and many cuts, so it is solved through its
/// dual (one row per variable, one column per cut) and `w` is read off the
/// dual multipliers.
fn solve_cut_model(cuts: &[(Vec<f64>, f64)], vars: usize) -> Result<(f64, Vec<f64>)> {
    // Dual variables: mu for the weight-sum row, then one lambda per cut.
    let mut obj = vec![-1.0];
    obj.extend(cuts.iter().map(|(_, b)| -b));
    let mut lp = LinearProgram::maximize(obj);
    for j in 0..vars {
        let mut row = vec![1.0];
        row.extend(cuts.iter().map(|(a, _)| a[j]));
        lp.add_row(row, Relation::Ge, 0.0)?;
    }
    let mut row = vec![0.0];
    row.extend(std::iter::repeat_n(1.0, cuts.len()));
    lp.add_row(row, Relation::Ge, 1.0)?;
    let sol = lp.solve()?;
    let weights = sol.duals[..vars].iter().map(|y| (-y).max(0.0)).collect();
    Ok((-sol.objective, weights))
}

/// Minimizes `f(c) = max_i ||c - v_i||` over the convex hull of `vertices`.
///
/// The hull is parametrized by barycentric weights and `f` is minimized by
/// Kelley's cutting-plane method: each evaluation at a centre `c_k` yields,
/// for every vertex, a norming functional `g` of `c_k - v_i` and the affine
/// minorant `c -> g(c - v_i)` of `||c - v_i||`. The linear program over the
/// accumulated cuts gives a lower bound on the optimum and the next centre.
/// The half-diameter bound is folded into the lower bound.
pub fn chebyshev_center(vertices: &[Vec<f64>], norm: &NormSpec, tol: f64) -> Result<CenterResult> {
    if !norm.is_norm() {
        return Err(Error::Unsupported(format!("centres need a norm, got {norm}")));
    }
    if !(tol > 0.0) {
        return Err(Error::Input(format!("tolerance must be positive, got {tol}")));
    }
    let Some(first) = vertices.first() else {
        return Err(Error::Input("at least one vertex is required".into()));
    };
    let dim = first.len();
    if dim == 0 {
        return Err(Error::Input("vertices must have at least one coordinate".into()));
    }
    if let Some(v) = vertices.iter().find(|v| v.len() != dim) {
        return Err(Error::DimensionMismatch { expected: dim, found: v.len() });
    }
    if vertices.iter().flatten().any(|x| !x.is_finite()) {
        return Err(Error::Input("vertex coordinates must be finite".into()));
    }

    let m = vertices.len();
    let mut half_diam = 0.0_f64;
    for i in 0..m {
        for j in i + 1..m {
            half_diam = half_diam.max(0.5 * norm.eval_unchecked(&vertices[i], &vertices[j]));
        }
    }
    let centroid = vec![1.0 / m as f64; m];
    if m == 1 {
        let ball = BallSpec { center: first.clone(), radius: 0.0, norm: *norm };
        return Ok(CenterResult { ball, lower_bound: 0.0, weights: vec![1.0], iterations: 0, converged: true });
    }

    // Variables: w_1..w_{m-1} (w_0 eliminated) and s = ceiling - t.
    let ceiling = 2.0 * half_diam + 1.0;
    let edges: Vec<Vec<f64>> =
        vertices[1..].iter().map(|v| v.iter().zip(first).map(|(a, b)| a - b).collect()).collect();
    let mut cuts: Vec<(Vec<f64>, f64)> = Vec::new();
    let add_cuts = |cuts: &mut Vec<(Vec<f64>, f64)>, c: &[f64], dists: &[f64], band: f64| -> Result<()> {
        let top = dists.iter().copied().fold(0.0, f64::max);
        for (v, &d) in vertices.iter().zip(dists) {
            if d < top - band {
                continue;
            }
            let diff: Vec<f64> = c.iter().zip(v).map(|(a, b)| a - b).collect();
            let g = norm.norming_functional(&diff)?;
            let coeffs: Vec<f64> = edges.iter().map(|e| dot(&g, e)).collect();
            let offset = dot(&g, &v.iter().zip(first).map(|(a, b)| a - b).collect::<Vec<_>>());
            cuts.push((coeffs, ceiling + offset));
        }
        Ok(())
    };

    let mut best_w = centroid.clone();
    let mut best_c = combine(vertices, &best_w);
    let mut upper = farthest(norm, &best_c, vertices);
    let mut lower = half_diam;
    let dists: Vec<f64> = vertices.iter().map(|v| norm.eval_unchecked(&best_c, v)).collect();
    add_cuts(&mut cuts, &best_c, &dists, f64::INFINITY)?;

    let mut iterations = 0;
    while upper - lower > tol && iterations < MAX_ITERATIONS {
        iterations += 1;
        let (s_star, tail) = solve_cut_model(&cuts, m - 1)?;
        lower = lower.max(ceiling - s_star);
        let mut w = Vec::with_capacity(m);
        w.push((1.0 - tail.iter().sum::<f64>()).max(0.0));
        w.extend(tail.iter().map(|x| x.max(0.0)));
        let total: f64 = w.iter().sum();
        w.iter_mut().for_each(|x| *x /= total);
        let c = combine(vertices, &w);
        let dists: Vec<f64> = vertices.iter().map(|v| norm.eval_unchecked(&c, v)).collect();
        let f = dists.iter().copied().fold(0.0, f64::max);
        if f < upper {
            upper = f;
            best_c = c.clone();
            best_w = w;
        }
        if upper - lower <= tol {
            break;
        }
        let before = cuts.len();
        add_cuts(&mut cuts, &c, &dists, (upper - lower).max(tol))?;
        if cuts.len() == before {
            break;
        }
    }
    Ok(CenterResult {
        ball: BallSpec { center: best_c, radius: upper, norm: *norm },
        lower_bound: lower.min(upper),
        weights: best_w,
        iterations,
        converged: upper - lower <= tol,
    })
}
