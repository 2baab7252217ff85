//! Each command is split into `prepare` (read and validate inputs, which
//! fixes the digest) and `execute` (the computation itself), so cached
//! results can be looked up before any work is done.

use std::fs;
use std::path::Path;

use rvz_core::geometry::{covering_number_with_budget, szekeres_check};
use rvz_core::spaces::{lp_experiment, named_constant, named_constants, subspace_convergence, ConstantValue, DimRule};
use rvz_core::{
    cheb_n, chebyshev_center, entropy_lower_bound, game_value, rendezvous_set_n, CoverMode, EnumOptions,
    FiniteKernelSpace, GameOptions, NormSpec, SUBSET_H, SUBSET_L,
};
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::{Command, ModeArg, SubsetArgs};
use crate::report::Status;

/// A failure that ends the run before a report can be produced.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        CliError { code: 2, message: message.into() }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

pub struct Prepared {
    /// Parameters echoed in the report.
    pub params: Value,
    /// Parameters that enter the digest (file paths replaced by contents).
    pub digest_params: Value,
    pub inputs: Value,
    job: Job,
}

pub struct Outcome {
    pub status: Status,
    pub results: Value,
    pub certificates: Value,
}

enum Job {
    Value { space: FiniteKernelSpace, h: Vec<usize>, l: Vec<usize>, tol: f64 },
    Cheb { space: FiniteKernelSpace, h: Vec<usize>, l: Vec<usize>, n: usize, budget: u128 },
    Center { vertices: Vec<Vec<f64>>, norm: NormSpec, tol: f64, grid: Option<f64> },
    Cover { space: FiniteKernelSpace, h: Vec<usize>, l: Vec<usize>, t: f64, mode: CoverMode, budget: u64 },
    Lp { p: f64, ns: Vec<usize>, dims: DimRule, samples: usize, seed: u64 },
    Converge { norm: NormSpec, dims: Vec<usize>, budget: usize },
    Constants { ps: Vec<f64> },
}

fn core_input(e: rvz_core::Error) -> CliError {
    CliError::input(e.to_string())
}

fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))
}

fn load_space(path: &Path) -> Result<FiniteKernelSpace, CliError> {
    FiniteKernelSpace::from_json_str(&read_text(path)?)
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

/// Accepts `[[x, y], ...]` or `{"vertices": [[x, y], ...]}`.
fn load_vertices(path: &Path) -> Result<Vec<Vec<f64>>, CliError> {
    let text = read_text(path)?;
    let doc: Value = serde_json::from_str(&text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    let list = match &doc {
        Value::Object(map) => map.get("vertices").cloned().unwrap_or(Value::Null),
        other => other.clone(),
    };
    serde_json::from_value(list)
        .map_err(|e| CliError::input(format!("{}: expected a list of coordinate lists ({e})", path.display())))
}

fn parse_norm(text: &str) -> Result<NormSpec, CliError> {
    text.parse().map_err(core_input)
}

/// Resolves a subset flag: the named subset, else the conventional subset
/// when the file defines it, else every point.
fn resolve(space: &FiniteKernelSpace, given: Option<&str>, conventional: &str) -> Result<(String, Vec<usize>), CliError> {
    match given {
        Some(name) => Ok((name.to_string(), space.subset(name).map_err(core_input)?.to_vec())),
        None if space.subsets().contains_key(conventional) => {
            Ok((conventional.to_string(), space.subset(conventional).map_err(core_input)?.to_vec()))
        }
        None => Ok(("*".to_string(), space.all_indices())),
    }
}

fn resolve_pair(space: &FiniteKernelSpace, s: &SubsetArgs) -> Result<(String, Vec<usize>, String, Vec<usize>), CliError> {
    let (hn, h) = resolve(space, s.h.as_deref(), SUBSET_H)?;
    let (ln, l) = resolve(space, s.l.as_deref(), SUBSET_L)?;
    Ok((hn, h, ln, l))
}

fn positive(name: &str, v: f64) -> Result<(), CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(CliError::input(format!("--{name} must be positive and finite, got {v}")))
    }
}

/// Strips the path entries from an echoed parameter object.
fn without(params: &Value, keys: &[&str]) -> Value {
    let mut p = params.clone();
    if let Value::Object(map) = &mut p {
        for k in keys {
            map.remove(*k);
        }
    }
    p
}

pub fn prepare(cmd: &Command) -> Result<Prepared, CliError> {
    let (params, digest_params, inputs, job) = match cmd {
        Command::Value(a) => {
            positive("tol", a.tol)?;
            let space = load_space(&a.space)?;
            let (hn, h, ln, l) = resolve_pair(&space, &a.subsets)?;
            let params = json!({ "space": a.space, "H": hn, "L": ln, "tol": a.tol });
            let inputs = json!({ "space": space.to_space_file() });
            (params.clone(), without(&params, &["space"]), inputs, Job::Value { space, h, l, tol: a.tol })
        }
        Command::Cheb(a) => {
            if a.n == 0 {
                return Err(CliError::input("--n must be at least 1"));
            }
            let space = load_space(&a.space)?;
            let (hn, h, ln, l) = resolve_pair(&space, &a.subsets)?;
            let params = json!({ "space": a.space, "n": a.n, "H": hn, "L": ln, "budget": a.budget.to_string() });
            let inputs = json!({ "space": space.to_space_file() });
            (params.clone(), without(&params, &["space"]), inputs, Job::Cheb { space, h, l, n: a.n, budget: a.budget })
        }
        Command::Center(a) => {
            positive("tol", a.tol)?;
            let norm = parse_norm(&a.norm)?;
            if !norm.is_norm() {
                return Err(CliError::input(format!("centres need a norm (lp with p >= 1 or sup), got {norm}")));
            }
            if a.check_szekeres {
                positive("grid", a.grid)?;
            }
            let vertices = load_vertices(&a.vertices)?;
            let params = json!({
                "vertices": a.vertices, "norm": norm.to_string(), "tol": a.tol,
                "check_szekeres": a.check_szekeres, "grid": a.check_szekeres.then_some(a.grid),
            });
            let inputs = json!({ "vertices": vertices });
            let grid = a.check_szekeres.then_some(a.grid);
            (params.clone(), without(&params, &["vertices"]), inputs, Job::Center { vertices, norm, tol: a.tol, grid })
        }
        Command::Cover(a) => {
            positive("t", a.t)?;
            let space = load_space(&a.space)?;
            let (hn, h, ln, l) = resolve_pair(&space, &a.subsets)?;
            let mode = match a.mode {
                ModeArg::Exact => CoverMode::Exact,
                ModeArg::Greedy => CoverMode::Greedy,
            };
            let mode_name = match a.mode {
                ModeArg::Exact => "exact",
                ModeArg::Greedy => "greedy",
            };
            let params = json!({ "space": a.space, "t": a.t, "mode": mode_name, "H": hn, "L": ln, "budget": a.budget });
            let inputs = json!({ "space": space.to_space_file() });
            let job = Job::Cover { space, h, l, t: a.t, mode, budget: a.budget };
            (params.clone(), without(&params, &["space"]), inputs, job)
        }
        Command::Lp(a) => {
            positive("p", a.p)?;
            if a.n_list.is_empty() || a.n_list.contains(&0) {
                return Err(CliError::input("--n-list needs positive sizes"));
            }
            let dims = match a.dims.trim() {
                "n" => DimRule::EqualToN,
                d => DimRule::Fixed(
                    d.parse().map_err(|_| CliError::input(format!("--dims must be 'n' or a dimension, got '{d}'")))?,
                ),
            };
            let params = json!({ "p": a.p, "n_list": a.n_list, "dims": a.dims.trim(), "samples": a.samples, "seed": a.seed });
            let job = Job::Lp { p: a.p, ns: a.n_list.clone(), dims, samples: a.samples, seed: a.seed };
            (params.clone(), params, Value::Null, job)
        }
        Command::Converge(a) => {
            let norm = parse_norm(&a.norm)?;
            let params = json!({ "norm": norm.to_string(), "dims": a.dims, "budget": a.budget });
            (params.clone(), params, Value::Null, Job::Converge { norm, dims: a.dims.clone(), budget: a.budget })
        }
        Command::Constants(a) => {
            for &p in &a.p {
                positive("p", p)?;
            }
            let params = json!({ "p": a.p });
            (params.clone(), params, Value::Null, Job::Constants { ps: a.p.clone() })
        }
    };
    Ok(Prepared { params, digest_params, inputs, job })
}

/// Turns a core error raised during the computation into either a report
/// outcome (budget, non-convergence) or an input error.
fn failed(e: rvz_core::Error, extra: Value) -> Result<Outcome, CliError> {
    use rvz_core::Error as E;
    let status = match e {
        E::BudgetExceeded { .. } | E::SearchExhausted(_) => Status::BudgetExceeded,
        E::Infeasible | E::Unbounded | E::IterationLimit(_) | E::Numerical(_) | E::Inconsistent(_) => {
            Status::NotConverged
        }
        _ => return Err(core_input(e)),
    };
    let mut results = json!({ "error": e.to_string() });
    if let (Value::Object(r), Value::Object(x)) = (&mut results, extra) {
        r.extend(x);
    }
    Ok(Outcome { status, results, certificates: json!({}) })
}

fn table<T: Serialize>(columns: &[&str], rows: &[T]) -> (Value, Value) {
    (json!(columns), serde_json::to_value(rows).expect("rows serialize"))
}

#[derive(Serialize)]
struct EntropyBoundRow {
    n: usize,
    m_bar_n_at_least: f64,
    provenance: &'static str,
}

#[derive(Serialize)]
struct LpRow {
    n: usize,
    dim: usize,
    eta: f64,
    lower_bound: f64,
    upper_bound: f64,
    bounds_provenance: &'static str,
    sample_min: f64,
    sample_max: f64,
    sample_provenance: &'static str,
    lower_holds: bool,
    upper_holds: bool,
}

#[derive(Serialize)]
struct ConvergeRow {
    dim: usize,
    points: usize,
    scheme: String,
    value: f64,
    value_lo: f64,
    value_hi: f64,
    converged: bool,
    fill_distance: f64,
    embedding_distortion: f64,
    provenance: &'static str,
}

#[derive(Serialize)]
struct ConstantRow {
    key: String,
    quantity: String,
    kind: &'static str,
    value: Option<f64>,
    lo: Option<f64>,
    hi: Option<f64>,
    reproduced_by: String,
}

fn constant_row(key: &str, quantity: &str, value: ConstantValue, reproduced_by: &str) -> ConstantRow {
    let (kind, value, lo, hi) = match value {
        ConstantValue::Scalar { value } => ("scalar", Some(value), None, None),
        ConstantValue::Interval { lo, hi } => ("interval", None, Some(lo), Some(hi)),
        ConstantValue::PowerOfTwo => ("power_of_two", None, None, None),
    };
    ConstantRow { key: key.into(), quantity: quantity.into(), kind, value, lo, hi, reproduced_by: reproduced_by.into() }
}

pub fn execute(prepared: Prepared) -> Result<Outcome, CliError> {
    match prepared.job {
        Job::Value { space, h, l, tol } => {
            let g = match game_value(&space, &h, &l, &GameOptions::with_tol(tol)) {
                Ok(g) => g,
                Err(e) => return failed(e, json!({})),
            };
            let mut results = json!({
                "average_interval": { "lo": g.value_lo, "hi": g.value_hi },
                "lower_endpoint": g.lower_endpoint,
                "upper_endpoint": g.upper_endpoint,
                "diagonal": g.diagonal,
                "exact": g.diagonal && g.converged,
            });
            if g.diagonal {
                results["rendezvous_number"] = json!({
                    "value": g.value(),
                    "bracket": { "lo": g.value_lo, "hi": g.value_hi },
                    "gap": g.gap,
                });
            }
            let certificates = json!({
                "mu_star": g.mu_star,
                "nu_star": g.nu_star,
                "gap": g.gap,
                "converged": g.converged,
                "method": g.method,
            });
            let status = if g.converged { Status::Ok } else { Status::NotConverged };
            Ok(Outcome { status, results, certificates })
        }
        Job::Cheb { space, h, l, n, budget } => {
            let opts = EnumOptions { budget, parallel: true };
            let extra = json!({ "n": n, "budget": budget.to_string(), "multisets": rvz_core::multiset_count(h.len(), n).to_string() });
            let r = match cheb_n(&space, &h, &l, n, &opts) {
                Ok(r) => r,
                Err(e) => return failed(e, extra),
            };
            let set = match rendezvous_set_n(&space, &h, &l, n, &opts) {
                Ok(s) => s,
                Err(e) => return failed(e, extra),
            };
            let results = json!({
                "n": n,
                "m_n": r.m_n,
                "m_bar_n": r.m_bar_n,
                "rendezvous_set": set,
                "multisets": extra["multisets"],
            });
            let certificates = json!({ "argmax_config": r.argmax_config, "argmin_config": r.argmin_config });
            Ok(Outcome { status: Status::Ok, results, certificates })
        }
        Job::Center { vertices, norm, tol, grid } => {
            let c = match chebyshev_center(&vertices, &norm, tol) {
                Ok(c) => c,
                Err(e) => return failed(e, json!({})),
            };
            let mut results = json!({
                "center": c.ball.center,
                "radius": c.ball.radius,
                "radius_bracket": { "lo": c.lower_bound, "hi": c.ball.radius },
                "converged": c.converged,
            });
            if let Some(res) = grid {
                match szekeres_check(&vertices, &norm, res, tol) {
                    Ok(s) => results["szekeres"] = serde_json::to_value(&s).expect("report serializes"),
                    Err(e) => return failed(e, results),
                }
            }
            let certificates = json!({ "ball": c.ball, "weights": c.weights, "iterations": c.iterations, "lower_bound": c.lower_bound });
            let status = if c.converged { Status::Ok } else { Status::NotConverged };
            Ok(Outcome { status, results, certificates })
        }
        Job::Cover { space, h, l, t, mode, budget } => {
            let cover = match covering_number_with_budget(&space, &h, &l, t, mode, budget) {
                Ok(c) => c,
                Err(e) => return failed(e, json!({ "t": t })),
            };
            let mut rows = Vec::new();
            for n in 1..=5 {
                match entropy_lower_bound(&space, &h, &l, n) {
                    Ok(b) => rows.push(EntropyBoundRow { n, m_bar_n_at_least: b, provenance: "covering number" }),
                    Err(e) => return failed(e, json!({ "t": t })),
                }
            }
            let (columns, rows) = table(&["n", "m_bar_n_at_least", "provenance"], &rows);
            let results = json!({
                "t": t,
                "covering_number": cover.n,
                "exact": cover.exact,
                "fell_back": cover.fell_back,
                "implies_m_bar_n_at_least_t_for_n_below": cover.n.filter(|_| cover.exact),
                "columns": columns,
                "rows": rows,
            });
            let certificates = json!({ "centers": cover.centers, "nodes": cover.nodes });
            let status = if cover.fell_back { Status::BudgetExceeded } else { Status::Ok };
            Ok(Outcome { status, results, certificates })
        }
        Job::Lp { p, ns, dims, samples, seed } => {
            let exp = match lp_experiment(p, &ns, dims, samples, seed) {
                Ok(x) => x,
                Err(e) => return failed(e, json!({})),
            };
            let rows: Vec<LpRow> = exp
                .rows
                .iter()
                .zip(&exp.table.rows)
                .map(|(m, b)| LpRow {
                    n: m.n,
                    dim: m.dim,
                    eta: b.eta,
                    lower_bound: m.lower_bound,
                    upper_bound: m.upper_bound,
                    bounds_provenance: "formula",
                    sample_min: m.sample_min,
                    sample_max: m.sample_max,
                    sample_provenance: "measured",
                    lower_holds: m.lower_holds,
                    upper_holds: m.upper_holds,
                })
                .collect();
            let (columns, rows_v) = table(
                &[
                    "n",
                    "dim",
                    "eta",
                    "lower_bound",
                    "upper_bound",
                    "bounds_provenance",
                    "sample_min",
                    "sample_max",
                    "sample_provenance",
                    "lower_holds",
                    "upper_holds",
                ],
                &rows,
            );
            let results = json!({ "p": p, "target": exp.table.target, "columns": columns, "rows": rows_v });
            let certificates = json!({
                "witness": "equal weights on n disjointly supported unit vectors",
                "sample_size": samples,
                "seed": seed,
                "all_samples_within_envelopes": rows.iter().all(|r| r.lower_holds && r.upper_holds),
            });
            Ok(Outcome { status: Status::Ok, results, certificates })
        }
        Job::Converge { norm, dims, budget } => {
            let conv = match subspace_convergence(&norm, &dims, budget) {
                Ok(c) => c,
                Err(e) => return failed(e, json!({})),
            };
            let rows: Vec<ConvergeRow> = conv
                .rows
                .iter()
                .map(|r| ConvergeRow {
                    dim: r.dim,
                    points: r.points,
                    scheme: r.scheme.clone(),
                    value: r.value,
                    value_lo: r.value_lo,
                    value_hi: r.value_hi,
                    converged: r.converged,
                    fill_distance: r.fill_distance,
                    embedding_distortion: r.embedding_distortion,
                    provenance: "certified game bracket; fill distance measured",
                })
                .collect();
            let (columns, rows_v) = table(
                &[
                    "dim",
                    "points",
                    "scheme",
                    "value",
                    "value_lo",
                    "value_hi",
                    "converged",
                    "fill_distance",
                    "embedding_distortion",
                    "provenance",
                ],
                &rows,
            );
            let results = json!({ "norm": norm.to_string(), "truncated": conv.truncated, "columns": columns, "rows": rows_v });
            let certificates = json!({ "brackets": rows.iter().map(|r| json!({ "dim": r.dim, "lo": r.value_lo, "hi": r.value_hi })).collect::<Vec<_>>() });
            let status = if conv.truncated { Status::NotConverged } else { Status::Ok };
            Ok(Outcome { status, results, certificates })
        }
        Job::Constants { ps } => {
            let mut rows: Vec<ConstantRow> =
                named_constants().iter().map(|c| constant_row(c.key, c.quantity, c.value, c.reproduced_by)).collect();
            for p in ps {
                let value = named_constant("lp", Some(p)).map_err(core_input)?;
                rows.push(constant_row(&format!("lp(p={p})"), "2^(1/p) evaluated", value, "lp envelope experiment"));
            }
            let (columns, rows) = table(&["key", "quantity", "kind", "value", "lo", "hi", "reproduced_by"], &rows);
            let results = json!({ "columns": columns, "rows": rows });
            Ok(Outcome { status: Status::Ok, results, certificates: json!({ "source": "stored reference values" }) })
        }
    }
}
