//! Dense-tableau two-phase simplex method.
//!
//! Solves `maximize c'x` subject to rows `a'x (<=|>=|=) b` and `x >= 0`.
//! The problems handled here are small and dense (matrix games up to about a
//! thousand strategies, cutting-plane models with a few thousand cuts), so a
//! full tableau with Dantzig pricing is adequate. Pricing falls back to
//! Bland's rule after a run of degenerate pivots, which rules out cycling.
//! The tableau is periodically rebuilt from the original rows and the current
//! basis so rounding error does not accumulate over long pivot sequences.

use rayon::prelude::*;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
struct Row {
    coeffs: Vec<f64>,
    relation: Relation,
    rhs: f64,
}

/// A linear program in maximization form over nonnegative variables.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    objective: Vec<f64>,
    rows: Vec<Row>,
}

#[derive(Debug, Clone, Copy)]
pub struct SimplexOptions {
    /// Reduced costs above `-cost_tol` count as optimal.
    pub cost_tol: f64,
    /// Smallest admissible pivot element.
    pub pivot_tol: f64,
    /// Phase-one residual tolerated as feasible (scaled by the largest rhs).
    pub feasibility_tol: f64,
    /// Degenerate pivots in a row before switching to Bland's rule.
    pub bland_after: usize,
    /// Pivot budget; `None` scales with the tableau size.
    pub max_pivots: Option<usize>,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        SimplexOptions {
            cost_tol: 1e-11,
            pivot_tol: 1e-11,
            feasibility_tol: 1e-9,
            bland_after: 50,
            max_pivots: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    /// One multiplier per row, signed so that `objective = sum duals_i * b_i`.
    pub duals: Vec<f64>,
    pub pivots: usize,
}

impl LinearProgram {
    pub fn maximize(objective: Vec<f64>) -> Self {
        LinearProgram { objective, rows: Vec::new() }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn add_row(&mut self, coeffs: Vec<f64>, relation: Relation, rhs: f64) -> Result<()> {
        if coeffs.len() != self.objective.len() {
            return Err(Error::DimensionMismatch { expected: self.objective.len(), found: coeffs.len() });
        }
        if !rhs.is_finite() || coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::Input("linear program coefficients must be finite".into()));
        }
        self.rows.push(Row { coeffs, relation, rhs });
        Ok(())
    }

    pub fn solve(&self) -> Result<LpSolution> {
        self.solve_with(&SimplexOptions::default())
    }

    pub fn solve_with(&self, opts: &SimplexOptions) -> Result<LpSolution> {
        Tableau::build(self).run(self, opts)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Aux {
    Slack(usize),
    Surplus(usize),
    None,
}

struct Tableau {
    m: usize,
    n: usize,
    /// Columns: structural, then aux (slack/surplus), then artificial, then rhs.
    width: usize,
    first_art: usize,
    data: Vec<f64>,
    basis: Vec<usize>,
    aux: Vec<Aux>,
    art: Vec<Option<usize>>,
    flipped: Vec<bool>,
    /// Constraint rows as first built, used to rebuild the tableau.
    original: Vec<f64>,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Self {
        let m = lp.rows.len();
        let n = lp.objective.len();
        let mut flipped = vec![false; m];
        let mut rels = Vec::with_capacity(m);
        for (i, row) in lp.rows.iter().enumerate() {
            let mut rel = row.relation;
            if row.rhs < 0.0 {
                flipped[i] = true;
                rel = match rel {
                    Relation::Le => Relation::Ge,
                    Relation::Ge => Relation::Le,
                    Relation::Eq => Relation::Eq,
                };
            }
            rels.push(rel);
        }
        let n_aux = rels.iter().filter(|r| **r != Relation::Eq).count();
        let n_art = rels.iter().filter(|r| **r != Relation::Le).count();
        let first_art = n + n_aux;
        let width = first_art + n_art + 1;
        let mut data = vec![0.0; (m + 1) * width];
        let mut basis = vec![0; m];
        let mut aux = vec![Aux::None; m];
        let mut art = vec![None; m];
        let (mut next_aux, mut next_art) = (n, first_art);
        for (i, row) in lp.rows.iter().enumerate() {
            let sign = if flipped[i] { -1.0 } else { 1.0 };
            let r = &mut data[i * width..(i + 1) * width];
            for (dst, c) in r.iter_mut().zip(&row.coeffs) {
                *dst = sign * c;
            }
            r[width - 1] = sign * row.rhs;
            match rels[i] {
                Relation::Le => {
                    r[next_aux] = 1.0;
                    aux[i] = Aux::Slack(next_aux);
                    basis[i] = next_aux;
                    next_aux += 1;
                }
                Relation::Ge => {
                    r[next_aux] = -1.0;
                    aux[i] = Aux::Surplus(next_aux);
                    next_aux += 1;
                    r[next_art] = 1.0;
                    art[i] = Some(next_art);
                    basis[i] = next_art;
                    next_art += 1;
                }
                Relation::Eq => {
                    r[next_art] = 1.0;
                    art[i] = Some(next_art);
                    basis[i] = next_art;
                    next_art += 1;
                }
            }
        }
        let original = data[..m * width].to_vec();
        Tableau { m, n, width, first_art, data, basis, aux, art, flipped, original }
    }

    fn rhs(&self, i: usize) -> f64 {
        self.data[i * self.width + self.width - 1]
    }

    fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.width + j]
    }

    fn obj_row(&self) -> &[f64] {
        &self.data[self.m * self.width..]
    }

    /// Sets the objective row to the reduced costs of `cost` (indexed by column).
    fn price(&mut self, cost: &[f64]) {
        let w = self.width;
        let m = self.m;
        let mut obj = vec![0.0; w];
        for (j, c) in cost.iter().enumerate() {
            obj[j] = -c;
        }
        for i in 0..m {
            let cb = cost.get(self.basis[i]).copied().unwrap_or(0.0);
            if cb != 0.0 {
                for (o, v) in obj.iter_mut().zip(&self.data[i * w..(i + 1) * w]) {
                    *o += cb * v;
                }
            }
        }
        self.data[m * w..].copy_from_slice(&obj);
    }

    /// Recomputes the constraint rows as `B^-1` times the original rows for
    /// the current basis `B`, then reprices with `cost`. Leaves the tableau
    /// untouched if the basis matrix is numerically singular.
    fn refresh(&mut self, cost: &[f64]) {
        let (m, w) = (self.m, self.width);
        let mut bmat: Vec<f64> = (0..m).flat_map(|i| self.basis.iter().map(move |&b| (i, b))).map(|(i, b)| self.original[i * w + b]).collect();
        let mut rows = self.original.clone();
        for k in 0..m {
            let piv_row = (k..m).max_by(|&a, &b| bmat[a * m + k].abs().total_cmp(&bmat[b * m + k].abs())).unwrap();
            let piv = bmat[piv_row * m + k];
            if piv.abs() < 1e-13 {
                return;
            }
            if piv_row != k {
                for j in 0..m {
                    bmat.swap(k * m + j, piv_row * m + j);
                }
                for j in 0..w {
                    rows.swap(k * w + j, piv_row * w + j);
                }
            }
            let bk: Vec<f64> = bmat[k * m..(k + 1) * m].iter().map(|v| v / piv).collect();
            let rk: Vec<f64> = rows[k * w..(k + 1) * w].iter().map(|v| v / piv).collect();
            let eliminate = |(i, (brow, rrow)): (usize, (&mut [f64], &mut [f64]))| {
                if i == k {
                    brow.copy_from_slice(&bk);
                    rrow.copy_from_slice(&rk);
                    return;
                }
                let f = brow[k];
                if f != 0.0 {
                    for (x, p) in brow.iter_mut().zip(&bk) {
                        *x -= f * p;
                    }
                    for (x, p) in rrow.iter_mut().zip(&rk) {
                        *x -= f * p;
                    }
                }
            };
            if m * w > 1 << 16 {
                bmat.par_chunks_mut(m).zip(rows.par_chunks_mut(w)).enumerate().for_each(eliminate);
            } else {
                bmat.chunks_mut(m).zip(rows.chunks_mut(w)).enumerate().for_each(eliminate);
            }
        }
        for (i, &b) in self.basis.iter().enumerate() {
            let row = &mut rows[i * w..(i + 1) * w];
            for (j, v) in row.iter_mut().enumerate() {
                if j != b && v.abs() < 1e-15 {
                    *v = 0.0;
                }
            }
            row[b] = 1.0;
        }
        self.data[..m * w].copy_from_slice(&rows);
        self.price(cost);
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let w = self.width;
        let piv = self.data[r * w + c];
        let mut prow = self.data[r * w..(r + 1) * w].to_vec();
        for v in prow.iter_mut() {
            *v /= piv;
        }
        prow[c] = 1.0;
        let update = |(i, row): (usize, &mut [f64])| {
            if i == r {
                row.copy_from_slice(&prow);
                return;
            }
            let f = row[c];
            if f != 0.0 {
                for (x, p) in row.iter_mut().zip(&prow) {
                    *x -= f * p;
                }
                row[c] = 0.0;
            }
        };
        if self.data.len() > 1 << 16 {
            self.data.par_chunks_mut(w).enumerate().for_each(update);
        } else {
            self.data.chunks_mut(w).enumerate().for_each(update);
        }
        self.basis[r] = c;
    }

    /// Runs simplex iterations on the current objective row. Columns at or
    /// beyond `col_limit` never enter.
    fn iterate(&mut self, cost: &[f64], col_limit: usize, opts: &SimplexOptions, pivots: &mut usize, budget: usize) -> Result<()> {
        let mut degenerate_run = 0usize;
        let refresh_every = (2 * self.m).max(200);
        let mut since_refresh = 0usize;
        let mut refreshed_at_optimum = false;
        let mut run_pivots = 0usize;
        loop {
            let bland = degenerate_run >= opts.bland_after;
            let obj = self.obj_row();
            let entering = if bland {
                (0..col_limit).find(|&j| obj[j] < -opts.cost_tol)
            } else {
                let mut best: Option<(usize, f64)> = None;
                for (j, &d) in obj[..col_limit].iter().enumerate() {
                    if d < -opts.cost_tol && best.is_none_or(|(_, b)| d < b) {
                        best = Some((j, d));
                    }
                }
                best.map(|(j, _)| j)
            };
            let Some(c) = entering else {
                // After a long pivot sequence, confirm optimality on a
                // freshly rebuilt tableau.
                if since_refresh == 0 || refreshed_at_optimum || run_pivots < 200 {
                    return Ok(());
                }
                self.refresh(cost);
                since_refresh = 0;
                refreshed_at_optimum = true;
                continue;
            };

            let mut leave: Option<(usize, f64, f64)> = None;
            for i in 0..self.m {
                let a = self.at(i, c);
                if a <= opts.pivot_tol {
                    continue;
                }
                let ratio = self.rhs(i).max(0.0) / a;
                leave = match leave {
                    None => Some((i, ratio, a)),
                    Some((li, lr, la)) => {
                        let tie = (ratio - lr).abs() <= 1e-12 * (1.0 + lr.abs());
                        let better = if tie {
                            if bland {
                                self.basis[i] < self.basis[li]
                            } else {
                                a > la
                            }
                        } else {
                            ratio < lr
                        };
                        if better { Some((i, ratio, a)) } else { Some((li, lr, la)) }
                    }
                };
            }
            let Some((r, ratio, _)) = leave else { return Err(Error::Unbounded) };
            if ratio <= 1e-14 {
                degenerate_run += 1;
            } else {
                degenerate_run = 0;
            }
            self.pivot(r, c);
            *pivots += 1;
            since_refresh += 1;
            run_pivots += 1;
            if since_refresh >= refresh_every {
                self.refresh(cost);
                since_refresh = 0;
            }
            if *pivots > budget {
                return Err(Error::IterationLimit(*pivots));
            }
        }
    }

    fn run(mut self, lp: &LinearProgram, opts: &SimplexOptions) -> Result<LpSolution> {
        let budget = opts.max_pivots.unwrap_or(20 * (self.m + self.width) + 1000);
        let mut pivots = 0usize;
        let n_total = self.width - 1;

        if self.first_art < n_total {
            let mut cost = vec![0.0; n_total];
            for c in cost.iter_mut().skip(self.first_art) {
                *c = -1.0;
            }
            self.price(&cost);
            self.iterate(&cost, n_total, opts, &mut pivots, budget)?;
            let scale = (0..self.m).map(|i| self.rhs(i).abs()).fold(1.0, f64::max);
            let residual = -self.obj_row()[self.width - 1];
            if residual > opts.feasibility_tol * scale {
                return Err(Error::Infeasible);
            }
            // Drive remaining artificials out of the basis where possible.
            for i in 0..self.m {
                if self.basis[i] >= self.first_art {
                    let col = (0..self.first_art)
                        .filter(|&j| self.at(i, j).abs() > 1e-9)
                        .max_by(|&a, &b| self.at(i, a).abs().total_cmp(&self.at(i, b).abs()));
                    if let Some(j) = col {
                        self.pivot(i, j);
                        pivots += 1;
                    }
                }
            }
        }

        let mut cost = vec![0.0; n_total];
        cost[..self.n].copy_from_slice(&lp.objective);
        self.price(&cost);
        self.iterate(&cost, self.first_art, opts, &mut pivots, budget)?;

        let mut x = vec![0.0; self.n];
        for i in 0..self.m {
            if self.basis[i] < self.n {
                x[self.basis[i]] = self.rhs(i).max(0.0);
            }
        }
        let objective = lp.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
        let obj = self.obj_row();
        let duals = (0..self.m)
            .map(|i| {
                let y = match (self.aux[i], self.art[i]) {
                    (Aux::Slack(j), _) => obj[j],
                    (Aux::Surplus(j), _) => -obj[j],
                    (Aux::None, Some(j)) => obj[j],
                    (Aux::None, None) => 0.0,
                };
                if self.flipped[i] { -y } else { y }
            })
            .collect();
        Ok(LpSolution { x, objective, duals, pivots })
    }
}
