//! Rendezvous number of a filled polytope grid against its Chebyshev radius.

use serde::Serialize;

use super::center::chebyshev_center;
use crate::energy::{game_value, GameOptions};
use crate::error::{Error, Result};
use crate::measure::Interval;
use crate::space::{FiniteKernelSpace, NormSpec};

/// Largest grid accepted by [`szekeres_check`].
pub const DEFAULT_GRID_BUDGET: usize = 6000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SzekeresReport {
    /// Chebyshev radius (certified upper end of its bracket).
    pub rho: f64,
    pub rho_lower: f64,
    pub center: Vec<f64>,
    /// Rendezvous number of the grid.
    pub r: f64,
    pub r_bracket: Interval,
    pub discrepancy: f64,
    pub resolution: f64,
    pub grid_points: usize,
    /// Distance from the centre to the nearest grid point. The grid value
    /// cannot exceed `rho` by more than this.
    pub center_to_grid: f64,
}

/// Halfspaces `a . x <= b` whose intersection is the hull of the points.
/// Supports dimensions 1 to 3 and requires a full-dimensional hull.
pub fn hull_halfspaces(vertices: &[Vec<f64>]) -> Result<Vec<(Vec<f64>, f64)>> {
    let Some(first) = vertices.first() else {
        return Err(Error::Input("at least one vertex is required".into()));
    };
    let dim = first.len();
    if let Some(v) = vertices.iter().find(|v| v.len() != dim) {
        return Err(Error::DimensionMismatch { expected: dim, found: v.len() });
    }
    let scale = vertices.iter().flatten().fold(1.0_f64, |a, x| a.max(x.abs()));
    let sub = |a: &[f64], b: &[f64]| -> Vec<f64> { a.iter().zip(b).map(|(x, y)| x - y).collect() };
    let dot = |a: &[f64], b: &[f64]| -> f64 { a.iter().zip(b).map(|(x, y)| x * y).sum() };
    let mut out: Vec<(Vec<f64>, f64)> = Vec::new();
    let mut push_if_facet = |normal: Vec<f64>, anchor: &[f64]| {
        let len = dot(&normal, &normal).sqrt();
        if len <= 1e-12 * scale.powi(dim as i32 - 1) {
            return;
        }
        let normal: Vec<f64> = normal.iter().map(|x| x / len).collect();
        let b = dot(&normal, anchor);
        let eps = 1e-12 * scale;
        let below = vertices.iter().all(|v| dot(&normal, v) <= b + eps);
        let above = vertices.iter().all(|v| dot(&normal, v) >= b - eps);
        if below && !above {
            out.push((normal, b));
        } else if above && !below {
            out.push((normal.iter().map(|x| -x).collect(), -b));
        }
    };
    match dim {
        1 => {
            let lo = vertices.iter().map(|v| v[0]).fold(f64::INFINITY, f64::min);
            let hi = vertices.iter().map(|v| v[0]).fold(f64::NEG_INFINITY, f64::max);
            if hi > lo {
                out.push((vec![-1.0], -lo));
                out.push((vec![1.0], hi));
            }
        }
        2 => {
            for (i, a) in vertices.iter().enumerate() {
                for b in &vertices[i + 1..] {
                    let e = sub(b, a);
                    push_if_facet(vec![-e[1], e[0]], a);
                }
            }
        }
        3 => {
            for (i, a) in vertices.iter().enumerate() {
                for (j, b) in vertices.iter().enumerate().skip(i + 1) {
                    for c in &vertices[j + 1..] {
                        let (u, v) = (sub(b, a), sub(c, a));
                        let n = vec![u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]];
                        push_if_facet(n, a);
                    }
                }
            }
        }
        _ => return Err(Error::Unsupported(format!("hull grids support dimensions 1 to 3, got {dim}"))),
    }
    if out.len() <= dim {
        return Err(Error::Input("the vertices do not span a full-dimensional hull".into()));
    }
    Ok(out)
}

/// Points of the lattice `h Z^d` inside the hull, followed by any vertex
/// that is not itself a lattice point. Lattices for `h` and `h / 2` are
/// nested.
pub fn hull_grid(vertices: &[Vec<f64>], h: f64, budget: usize) -> Result<Vec<Vec<f64>>> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::Input(format!("grid resolution must be positive, got {h}")));
    }
    let faces = hull_halfspaces(vertices)?;
    let dim = vertices[0].len();
    let lo: Vec<i64> = (0..dim)
        .map(|k| (vertices.iter().map(|v| v[k]).fold(f64::INFINITY, f64::min) / h - 1e-9).ceil() as i64)
        .collect();
    let hi: Vec<i64> = (0..dim)
        .map(|k| (vertices.iter().map(|v| v[k]).fold(f64::NEG_INFINITY, f64::max) / h + 1e-9).floor() as i64)
        .collect();
    let boxed: u128 = lo.iter().zip(&hi).map(|(a, b)| (b - a + 1).max(0) as u128).product();
    if boxed > 100 * budget as u128 {
        return Err(Error::BudgetExceeded { required: boxed, budget: budget as u128 });
    }
    let scale = vertices.iter().flatten().fold(1.0_f64, |a, x| a.max(x.abs()));
    let slack = 1e-12 * scale;
    let mut grid = Vec::new();
    let mut z = lo.clone();
    'outer: loop {
        let p: Vec<f64> = z.iter().map(|&zi| zi as f64 * h).collect();
        if faces.iter().all(|(a, b)| a.iter().zip(&p).map(|(x, y)| x * y).sum::<f64>() <= b + slack) {
            grid.push(p);
        }
        for k in 0..dim {
            if z[k] < hi[k] {
                z[k] += 1;
                continue 'outer;
            }
            z[k] = lo[k];
        }
        break;
    }
    for v in vertices {
        let on_grid = grid.iter().any(|g| g.iter().zip(v).all(|(a, b)| (a - b).abs() <= slack));
        let repeated = grid.iter().any(|g| g == v);
        if !on_grid && !repeated {
            grid.push(v.clone());
        }
    }
    if grid.len() > budget {
        return Err(Error::BudgetExceeded { required: grid.len() as u128, budget: budget as u128 });
    }
    Ok(grid)
}

/// Compares the Chebyshev radius of the hull with the rendezvous number of
/// a filled grid of step `resolution`.
pub fn szekeres_check(vertices: &[Vec<f64>], norm: &NormSpec, resolution: f64, tol: f64) -> Result<SzekeresReport> {
    szekeres_check_with_budget(vertices, norm, resolution, tol, DEFAULT_GRID_BUDGET)
}

pub fn szekeres_check_with_budget(
    vertices: &[Vec<f64>],
    norm: &NormSpec,
    resolution: f64,
    tol: f64,
    budget: usize,
) -> Result<SzekeresReport> {
    let centre = chebyshev_center(vertices, norm, tol)?;
    let grid = hull_grid(vertices, resolution, budget)?;
    let center_to_grid = grid.iter().map(|g| norm.eval_unchecked(g, &centre.ball.center)).fold(f64::INFINITY, f64::min);
    let n = grid.len();
    let space = FiniteKernelSpace::from_points(grid, *norm, Default::default())?;
    let all: Vec<usize> = (0..n).collect();
    let game = game_value(&space, &all, &all, &GameOptions::with_tol(tol))?;
    if !game.converged {
        return Err(Error::IterationLimit(n));
    }
    let r = game.value();
    Ok(SzekeresReport {
        rho: centre.ball.radius,
        rho_lower: centre.lower_bound,
        center: centre.ball.center,
        r,
        r_bracket: Interval::new(game.value_lo, game.value_hi),
        discrepancy: (r - centre.ball.radius).abs(),
        resolution,
        grid_points: n,
        center_to_grid,
    })
}
