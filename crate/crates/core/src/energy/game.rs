//! Quasi-uniform energies as values of finite zero-sum games.
//!
//! On a finite space, `q̲(H, L) = max_{mu on H} min_{x in L} U^mu(x)` is the
//! value of the game with payoff `k(x, h)` where the column player picks
//! `h in H` to maximize and the row player picks `x in L` to minimize, and
//! `q(H, L)` is the value of the transposed game. Every reported number is
//! recomputed from a witness measure, so the bracket is valid regardless of
//! rounding inside the solver.
//!
//! Small games go through one dense linear program. It is solved by the
//! simplex method; larger programs get a limited pivot budget and, when it
//! runs out, move to an interior-point solver (the simplex method stalls on
//! the highly degenerate games produced by symmetric samples such as regular
//! polygons). Larger games use a
//! strategy-generation loop: the linear program is solved on growing subsets
//! of rows and columns, best responses over the full strategy sets are added,
//! and the loop stops once the certified bracket closes.

use serde::Serialize;

use super::{normalize_subset, potential_at};
use crate::error::{Error, Result};
use crate::lp::{LinearProgram, Relation, SimplexOptions};
use crate::measure::{DiscreteMeasure, Interval};
use crate::space::FiniteKernelSpace;

/// Restricted games with more strategies than this on the smaller side get a
/// limited simplex pivot budget before the interior-point fallback.
const SIMPLEX_LIMIT: usize = 150;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GameOptions {
    /// Target width of the certified bracket.
    pub tol: f64,
    /// Games with at most this many strategies per side are solved as one
    /// linear program.
    pub dense_limit: usize,
    /// Maximum size of the restricted strategy sets in the generation loop.
    pub max_support: usize,
    pub max_rounds: usize,
    /// Best responses added per side and round.
    pub batch: usize,
}

impl Default for GameOptions {
    fn default() -> Self {
        GameOptions { tol: 1e-9, dense_limit: 1000, max_support: 1200, max_rounds: 400, batch: 12 }
    }
}

impl GameOptions {
    pub fn with_tol(tol: f64) -> Self {
        GameOptions { tol, ..Default::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveMethod {
    Dense,
    StrategyGeneration,
}

/// Certified solution of the pair of games behind `A(H, L)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GameSolution {
    /// `min_{x in L} U^{mu*}(x)`, a certified lower bound on `q̲(H, L)`.
    pub value_lo: f64,
    /// `max_{x in L} U^{nu*}(x)`, a certified upper bound on `q(H, L)`.
    pub value_hi: f64,
    /// Maximin witness on `H`.
    pub mu_star: DiscreteMeasure,
    /// Minimax witness on `H`.
    pub nu_star: DiscreteMeasure,
    pub gap: f64,
    /// Certified bracket on `q̲(H, L)`; the upper end comes from the
    /// opponent's mixed strategy on `L`.
    pub lower_endpoint: Interval,
    /// Certified bracket on `q(H, L)`.
    pub upper_endpoint: Interval,
    /// True when `H` and `L` are the same set, so both games coincide.
    pub diagonal: bool,
    pub converged: bool,
    pub method: SolveMethod,
}

impl GameSolution {
    /// Midpoint of the certified bracket; for a diagonal solution this is the
    /// rendezvous number of the finite space.
    pub fn value(&self) -> f64 {
        0.5 * (self.value_lo + self.value_hi)
    }
}

/// Payoff `A[r][c] = k(rows[r], cols[c])`; the column player maximizes.
struct MatrixGame<'a> {
    space: &'a FiniteKernelSpace,
    rows: &'a [usize],
    cols: &'a [usize],
}

struct MixedPair {
    /// Minimizer's strategy over `rows`.
    row_weights: Vec<f64>,
    /// Maximizer's strategy over `cols`.
    col_weights: Vec<f64>,
    converged: bool,
    method: SolveMethod,
}

/// Solves `max sum y` subject to `sum_r a(r, c) y_r <= 1` for every column
/// and `y >= 0` with an interior-point method. Returns `y` and the
/// (nonnegative) multipliers of the column constraints.
fn interior_point_game(rows: usize, cols: usize, a: impl Fn(usize, usize) -> f64) -> Result<(Vec<f64>, Vec<f64>)> {
    use clarabel::algebra::CscMatrix;
    use clarabel::solver::{DefaultSettingsBuilder, DefaultSolver, IPSolver, NonnegativeConeT, SolverStatus};

    let mut colptr = Vec::with_capacity(rows + 1);
    let mut rowval = Vec::with_capacity(rows * (cols + 1));
    let mut nzval = Vec::with_capacity(rows * (cols + 1));
    colptr.push(0);
    for r in 0..rows {
        for c in 0..cols {
            rowval.push(c);
            nzval.push(a(r, c));
        }
        rowval.push(cols + r);
        nzval.push(-1.0);
        colptr.push(rowval.len());
    }
    let constraints = CscMatrix::new(cols + rows, rows, colptr, rowval, nzval);
    let rhs: Vec<f64> = (0..cols + rows).map(|i| if i < cols { 1.0 } else { 0.0 }).collect();
    let settings = DefaultSettingsBuilder::default()
        .verbose(false)
        .tol_gap_abs(1e-12)
        .tol_gap_rel(1e-12)
        .tol_feas(1e-12)
        .build()
        .map_err(|e| Error::Numerical(format!("interior-point settings: {e:?}")))?;
    let mut solver = DefaultSolver::new(
        &CscMatrix::zeros((rows, rows)),
        &vec![-1.0; rows],
        &constraints,
        &rhs,
        &[NonnegativeConeT(cols + rows)],
        settings,
    )
    .map_err(|e| Error::Numerical(format!("interior-point setup: {e}")))?;
    solver.solve();
    match solver.solution.status {
        SolverStatus::Solved | SolverStatus::AlmostSolved => {}
        other => return Err(Error::Numerical(format!("interior-point solver stopped with status {other:?}"))),
    }
    let y = solver.solution.x.iter().map(|v| v.max(0.0)).collect();
    let duals = solver.solution.z[..cols].iter().map(|v| v.max(0.0)).collect();
    Ok((y, duals))
}

impl MatrixGame<'_> {
    #[inline]
    fn entry(&self, r: usize, c: usize) -> f64 {
        self.space.k(self.rows[r], self.cols[c])
    }

    /// Solves the game restricted to `rsub x csub` as one linear program and
    /// returns the two strategies on those subsets.
    fn solve_restricted(&self, rsub: &[usize], csub: &[usize]) -> Result<(Vec<f64>, Vec<f64>)> {
        let mut top = 0.0_f64;
        for &r in rsub {
            for &c in csub {
                top = top.max(self.entry(r, c));
            }
        }
        let scale = if top > 0.0 { top } else { 1.0 };
        // Entries mapped into [1, 2] so the shifted value is positive.
        let shifted = |r: usize, c: usize| self.entry(r, c) / scale + 1.0;
        let simplex = || -> Result<(Vec<f64>, Vec<f64>)> {
            let mut lp = LinearProgram::maximize(vec![1.0; rsub.len()]);
            for &c in csub {
                lp.add_row(rsub.iter().map(|&r| shifted(r, c)).collect(), Relation::Le, 1.0)?;
            }
            let mut simplex_opts = SimplexOptions::default();
            if rsub.len().min(csub.len()) > SIMPLEX_LIMIT {
                simplex_opts.max_pivots = Some(3 * (rsub.len() + csub.len()));
            }
            let sol = lp.solve_with(&simplex_opts)?;
            Ok((sol.x, sol.duals.iter().map(|d| d.max(0.0)).collect()))
        };
        simplex().or_else(|_| interior_point_game(rsub.len(), csub.len(), |i, j| shifted(rsub[i], csub[j])))
    }

    fn solve(&self, opts: &GameOptions) -> Result<MixedPair> {
        let (nr, nc) = (self.rows.len(), self.cols.len());
        if nr <= opts.dense_limit && nc <= opts.dense_limit {
            let all_r: Vec<usize> = (0..nr).collect();
            let all_c: Vec<usize> = (0..nc).collect();
            let (row_weights, col_weights) = self.solve_restricted(&all_r, &all_c)?;
            return Ok(MixedPair { row_weights, col_weights, converged: true, method: SolveMethod::Dense });
        }
        self.generate(opts)
    }

    fn generate(&self, opts: &GameOptions) -> Result<MixedPair> {
        let (nr, nc) = (self.rows.len(), self.cols.len());
        let mut rsub = vec![0usize];
        let first_col = (0..nc).max_by(|&a, &b| self.entry(0, a).total_cmp(&self.entry(0, b))).unwrap_or(0);
        let mut csub = vec![first_col];
        let mut in_r = vec![false; nr];
        let mut in_c = vec![false; nc];
        in_r[0] = true;
        in_c[first_col] = true;

        let mut best_lo = (f64::NEG_INFINITY, vec![0.0; nc]);
        let mut best_hi = (f64::INFINITY, vec![0.0; nr]);
        let mut converged = false;

        for _ in 0..opts.max_rounds {
            let (y, u) = self.solve_restricted(&rsub, &csub)?;
            let (ys, us): (f64, f64) = (y.iter().sum(), u.iter().sum());
            if ys <= 0.0 || us <= 0.0 {
                return Err(Error::Inconsistent("restricted game returned a zero strategy".into()));
            }
            let mut col_w = vec![0.0; nc];
            for (&c, w) in csub.iter().zip(&u) {
                col_w[c] = w / us;
            }
            let mut row_w = vec![0.0; nr];
            for (&r, w) in rsub.iter().zip(&y) {
                row_w[r] = w / ys;
            }

            // Payoff of every row against the column mixture, and of every
            // column against the row mixture. The kernel is symmetric, so
            // column `c` of the payoff is a slice of row `cols[c]`.
            let mut row_pay = vec![0.0; nr];
            for (c, &w) in col_w.iter().enumerate() {
                if w > 0.0 {
                    let krow = self.space.row(self.cols[c]);
                    for (p, &r) in row_pay.iter_mut().zip(self.rows) {
                        *p += w * krow[r];
                    }
                }
            }
            let mut col_pay = vec![0.0; nc];
            for (r, &w) in row_w.iter().enumerate() {
                if w > 0.0 {
                    let krow = self.space.row(self.rows[r]);
                    for (p, &c) in col_pay.iter_mut().zip(self.cols) {
                        *p += w * krow[c];
                    }
                }
            }
            let lo = row_pay.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = col_pay.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if lo > best_lo.0 {
                best_lo = (lo, col_w);
            }
            if hi < best_hi.0 {
                best_hi = (hi, row_w);
            }
            if best_hi.0 - best_lo.0 <= opts.tol {
                converged = true;
                break;
            }

            let restricted_value = 0.5 * (lo.max(best_lo.0) + hi.min(best_hi.0));
            let mut new_rows: Vec<usize> = (0..nr).filter(|&r| !in_r[r] && row_pay[r] < restricted_value).collect();
            new_rows.sort_by(|&a, &b| row_pay[a].total_cmp(&row_pay[b]).then(a.cmp(&b)));
            new_rows.truncate(opts.batch);
            let mut new_cols: Vec<usize> = (0..nc).filter(|&c| !in_c[c] && col_pay[c] > restricted_value).collect();
            new_cols.sort_by(|&a, &b| col_pay[b].total_cmp(&col_pay[a]).then(a.cmp(&b)));
            new_cols.truncate(opts.batch);
            if new_rows.is_empty() && new_cols.is_empty() {
                break;
            }
            if rsub.len() + new_rows.len() > opts.max_support || csub.len() + new_cols.len() > opts.max_support {
                break;
            }
            for r in new_rows {
                in_r[r] = true;
                rsub.push(r);
            }
            for c in new_cols {
                in_c[c] = true;
                csub.push(c);
            }
        }
        Ok(MixedPair {
            row_weights: best_hi.1,
            col_weights: best_lo.1,
            converged,
            method: SolveMethod::StrategyGeneration,
        })
    }
}

fn measure_on(indices: &[usize], weights: &[f64]) -> Result<DiscreteMeasure> {
    let (atoms, masses): (Vec<usize>, Vec<f64>) =
        indices.iter().zip(weights).filter(|(_, w)| **w > 0.0).map(|(&i, &w)| (i, w)).unzip();
    DiscreteMeasure::from_masses(atoms, masses)
}

fn extremes(space: &FiniteKernelSpace, mu: &DiscreteMeasure, set: &[usize]) -> (f64, f64) {
    set.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
        let u = potential_at(space, mu, x);
        (lo.min(u), hi.max(u))
    })
}

/// Solves for `q̲(H, L)` and `q(H, L)` with certified witnesses.
///
/// For `H = L` the two values coincide and `gap <= tol` is expected; the
/// common value is the rendezvous number of the finite set. A solver that
/// runs out of budget still returns a valid, wider bracket with
/// `converged = false`.
pub fn game_value(space: &FiniteKernelSpace, h: &[usize], l: &[usize], opts: &GameOptions) -> Result<GameSolution> {
    if !(opts.tol > 0.0) {
        return Err(Error::Input(format!("tolerance must be positive, got {}", opts.tol)));
    }
    let h = normalize_subset(space, h, "H")?;
    let l = normalize_subset(space, l, "L")?;

    let lower_game = MatrixGame { space, rows: &l, cols: &h };
    let lower = lower_game.solve(opts)?;
    let mu_star = measure_on(&h, &lower.col_weights)?;
    let lambda = measure_on(&l, &lower.row_weights)?;
    let (value_lo, _) = extremes(space, &mu_star, &l);
    let (_, lo_cap) = extremes(space, &lambda, &h);
    let lower_endpoint = Interval::new(value_lo, lo_cap);

    if h == l {
        // Symmetric payoff: the minimizer's mixture on L is a measure on H
        // whose sup over L bounds q from above.
        let (_, value_hi) = extremes(space, &lambda, &l);
        let gap = value_hi - value_lo;
        return Ok(GameSolution {
            value_lo,
            value_hi,
            mu_star,
            nu_star: lambda,
            gap,
            lower_endpoint,
            upper_endpoint: lower_endpoint,
            diagonal: true,
            converged: lower.converged && gap <= opts.tol,
            method: lower.method,
        });
    }

    let upper_game = MatrixGame { space, rows: &h, cols: &l };
    let upper = upper_game.solve(opts)?;
    let nu_star = measure_on(&h, &upper.row_weights)?;
    let kappa = measure_on(&l, &upper.col_weights)?;
    let (_, value_hi) = extremes(space, &nu_star, &l);
    let (hi_floor, _) = extremes(space, &kappa, &h);
    let upper_endpoint = Interval::new(hi_floor, value_hi);
    let converged = lower.converged
        && upper.converged
        && lower_endpoint.width() <= opts.tol
        && upper_endpoint.width() <= opts.tol;
    Ok(GameSolution {
        value_lo,
        value_hi,
        mu_star,
        nu_star,
        gap: value_hi - value_lo,
        lower_endpoint,
        upper_endpoint,
        diagonal: false,
        converged,
        method: if lower.method == SolveMethod::Dense && upper.method == SolveMethod::Dense {
            SolveMethod::Dense
        } else {
            SolveMethod::StrategyGeneration
        },
    })
}

/// `A(H, L) = [q̲(H, L), q(H, L)]` from the certified game solution.
pub fn average_interval(space: &FiniteKernelSpace, h: &[usize], l: &[usize], opts: &GameOptions) -> Result<Interval> {
    game_value(space, h, l, opts).map(|s| Interval::new(s.value_lo, s.value_hi))
}
