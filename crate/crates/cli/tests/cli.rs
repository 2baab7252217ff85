use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

struct Sandbox {
    dir: TempDir,
}

impl Sandbox {
    fn new() -> Self {
        Sandbox { dir: tempfile::tempdir().unwrap() }
    }

    fn file(&self, name: &str, contents: &str) -> PathBuf {
        let path = self.dir.path().join(name);
        std::fs::write(&path, contents).unwrap();
        path
    }

    fn cache_dir(&self) -> PathBuf {
        self.dir.path().join("cache")
    }

    fn run(&self, args: &[&str]) -> Output {
        Command::new(env!("CARGO_BIN_EXE_rvz"))
            .args(args)
            .current_dir(self.dir.path())
            .env("RVZ_CACHE_DIR", self.cache_dir())
            .output()
            .unwrap()
    }

    fn report(&self, args: &[&str]) -> (i32, Value) {
        let out = self.run(args);
        let code = out.status.code().unwrap();
        let report = serde_json::from_slice(&out.stdout)
            .unwrap_or_else(|e| panic!("no JSON report ({e}); stderr: {}", String::from_utf8_lossy(&out.stderr)));
        (code, report)
    }
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

const TWO_POINT: &str = r#"{"kernel": [[0, 1], [1, 0]], "norm": {"type": "explicit"}}"#;

fn triangle() -> String {
    let h = 3f64.sqrt() / 2.0;
    format!(r#"{{"points": [[0, 0], [1, 0], [0.5, {h}]], "norm": {{"type": "lp", "p": 2}}}}"#)
}

fn num(v: &Value) -> f64 {
    v.as_f64().unwrap_or_else(|| panic!("not a number: {v}"))
}

#[test]
fn two_point_value_is_one_half() {
    let s = Sandbox::new();
    let f = s.file("two.json", TWO_POINT);
    let (code, r) = s.report(&["value", p(&f), "--no-cache"]);
    assert_eq!(code, 0);
    assert_eq!(r["status"], "ok");
    assert!((num(&r["results"]["rendezvous_number"]["value"]) - 0.5).abs() < 1e-12);
    assert_eq!(r["results"]["exact"], true);
    assert!(r["certificates"]["mu_star"]["atoms"].is_array());
    assert_eq!(r["input_digest"].as_str().unwrap().len(), 64);
    assert!(r["tool_version"].as_str().unwrap().starts_with("rvz "));
}

#[test]
fn triangle_value_matches_uniform_measure() {
    let s = Sandbox::new();
    let f = s.file("tri.json", &triangle());
    let (code, r) = s.report(&["value", p(&f), "--no-cache"]);
    assert_eq!(code, 0);
    let v = num(&r["results"]["rendezvous_number"]["value"]);
    assert!((v - 2.0 / 3.0).abs() <= 1e-9, "{v}");
    let lo = num(&r["results"]["rendezvous_number"]["bracket"]["lo"]);
    let hi = num(&r["results"]["rendezvous_number"]["bracket"]["hi"]);
    assert!(lo <= v && v <= hi && hi - lo <= 1e-9);
}

#[test]
fn different_subsets_give_a_bracket_not_a_number() {
    let s = Sandbox::new();
    let f = s.file(
        "hl.json",
        r#"{"points": [[0], [1], [3]], "norm": {"type": "lp", "p": 1}, "subsets": {"H": [0, 1], "L": [0, 1, 2]}}"#,
    );
    let (code, r) = s.report(&["value", p(&f), "--no-cache"]);
    assert_eq!(code, 0);
    assert_eq!(r["results"]["exact"], false);
    assert!(r["results"].get("rendezvous_number").is_none());
    let lo = num(&r["results"]["average_interval"]["lo"]);
    let hi = num(&r["results"]["average_interval"]["hi"]);
    assert!(lo <= hi + 1e-12);
    assert_eq!(r["command"]["params"]["H"], "H");
}

#[test]
fn reports_are_byte_identical_and_cache_replays_them() {
    let s = Sandbox::new();
    let f = s.file("tri.json", &triangle());
    let fresh = s.run(&["value", p(&f), "--no-timings", "--no-cache"]);
    assert!(!s.cache_dir().exists());
    let first = s.run(&["value", p(&f), "--no-timings"]);
    assert_eq!(std::fs::read_dir(s.cache_dir()).unwrap().count(), 1);
    let replay = s.run(&["value", p(&f), "--no-timings"]);
    assert_eq!(fresh.stdout, first.stdout);
    assert_eq!(first.stdout, replay.stdout);

    let timed: Value = serde_json::from_slice(&s.run(&["value", p(&f)]).stdout).unwrap();
    assert_eq!(timed["timings"]["cache_hit"], true);

    // Deleting the cache is harmless.
    std::fs::remove_dir_all(s.cache_dir()).unwrap();
    assert_eq!(s.run(&["value", p(&f), "--no-timings"]).stdout, fresh.stdout);
}

#[test]
fn digest_depends_on_content_not_path() {
    let s = Sandbox::new();
    let a = s.file("a.json", &triangle());
    let b = s.file("b.json", &triangle());
    let c = s.file("c.json", TWO_POINT);
    let (_, ra) = s.report(&["value", p(&a), "--no-cache"]);
    let (_, rb) = s.report(&["value", p(&b), "--no-cache"]);
    let (_, rc) = s.report(&["value", p(&c), "--no-cache"]);
    assert_eq!(ra["input_digest"], rb["input_digest"]);
    assert_ne!(ra["input_digest"], rc["input_digest"]);
    let (_, rtol) = s.report(&["value", p(&a), "--no-cache", "--tol", "1e-6"]);
    assert_ne!(ra["input_digest"], rtol["input_digest"]);
}

#[test]
fn thread_count_does_not_change_results() {
    let s = Sandbox::new();
    let f = s.file("tri.json", &triangle());
    let one = s.run(&["cheb", p(&f), "--n", "6", "--threads", "1", "--no-timings", "--no-cache"]);
    let four = s.run(&["cheb", p(&f), "--n", "6", "--threads", "4", "--no-timings", "--no-cache"]);
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, four.stdout);
}

#[test]
fn cheb_reports_constants_and_witnesses() {
    let s = Sandbox::new();
    let f = s.file("two.json", TWO_POINT);
    let (code, r) = s.report(&["cheb", p(&f), "--n", "2", "--no-cache"]);
    assert_eq!(code, 0);
    assert!((num(&r["results"]["m_n"]) - 0.5).abs() < 1e-12);
    assert!((num(&r["results"]["m_bar_n"]) - 0.5).abs() < 1e-12);
    assert_eq!(r["certificates"]["argmax_config"], serde_json::json!([0, 1]));
}

#[test]
fn cheb_budget_exits_four_with_partial_report() {
    let s = Sandbox::new();
    let f = s.file("two.json", TWO_POINT);
    let (code, r) = s.report(&["cheb", p(&f), "--n", "40", "--budget", "5", "--no-cache"]);
    assert_eq!(code, 4);
    assert_eq!(r["status"], "budget_exceeded");
    assert!(r["results"]["error"].as_str().unwrap().contains("budget"));
    assert_eq!(r["results"]["multisets"], "41");
}

#[test]
fn center_examples() {
    let s = Sandbox::new();
    let sq = s.file("sq.json", "[[0,0],[1,0],[1,1],[0,1]]");
    let (code, r) = s.report(&["center", p(&sq), "--no-cache"]);
    assert_eq!(code, 0);
    let c = &r["results"]["center"];
    assert!((num(&c[0]) - 0.5).abs() < 1e-6 && (num(&c[1]) - 0.5).abs() < 1e-6);
    assert!((num(&r["results"]["radius"]) - 0.5f64.sqrt()).abs() < 1e-9);

    let seg = s.file("seg.json", r#"{"vertices": [[0, 0, 0], [2, 4, -2]]}"#);
    let (_, r) = s.report(&["center", p(&seg), "--norm", "sup", "--no-cache"]);
    let c: Vec<f64> = r["results"]["center"].as_array().unwrap().iter().map(num).collect();
    assert!((c[0] - 1.0).abs() < 1e-6 && (c[1] - 2.0).abs() < 1e-6 && (c[2] + 1.0).abs() < 1e-6);
}

#[test]
fn triangle_szekeres_discrepancy_within_grid_bound() {
    let s = Sandbox::new();
    let tri = s.file("tri.json", "[[0,0],[1,0],[0.3,0.8]]");
    let (code, r) = s.report(&["center", p(&tri), "--check-szekeres", "--grid", "0.05", "--no-cache"]);
    assert_eq!(code, 0);
    let sz = &r["results"]["szekeres"];
    assert!(num(&sz["discrepancy"]) <= num(&sz["center_to_grid"]) + 1e-9);
    assert!(num(&sz["discrepancy"]) <= 0.05);
}

#[test]
fn center_rejects_non_norms() {
    let s = Sandbox::new();
    let sq = s.file("sq.json", "[[0,0],[1,0]]");
    let out = s.run(&["center", p(&sq), "--norm", "lp(0.5)"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("norm"));
}

#[test]
fn malformed_inputs_exit_two() {
    let s = Sandbox::new();
    let bad = s.file("bad.json", r#"{"points": [[0], [1]]}"#);
    assert_eq!(s.run(&["value", p(&bad)]).status.code(), Some(2));
    let missing = s.dir.path().join("missing.json");
    assert_eq!(s.run(&["value", p(&missing)]).status.code(), Some(2));
    let two = s.file("two.json", TWO_POINT);
    assert_eq!(s.run(&["value", p(&two), "--H", "nope"]).status.code(), Some(2));
    assert_eq!(s.run(&["cover", p(&two), "--t", "-1"]).status.code(), Some(2));
    assert_eq!(s.run(&["lp", "--p", "2", "--dims", "wide"]).status.code(), Some(2));
}

#[test]
fn cover_reports_centres_and_entropy_rows() {
    let s = Sandbox::new();
    let f = s.file("line.json", r#"{"points": [[0], [1], [2], [3]], "norm": {"type": "lp", "p": 1}}"#);
    let (code, r) = s.report(&["cover", p(&f), "--t", "1.5", "--no-cache"]);
    assert_eq!(code, 0);
    assert_eq!(r["results"]["covering_number"], 2);
    assert_eq!(r["results"]["exact"], true);
    assert_eq!(r["certificates"]["centers"].as_array().unwrap().len(), 2);
    assert_eq!(r["results"]["rows"].as_array().unwrap().len(), 5);

    let (code, r) = s.report(&["cover", p(&f), "--t", "1.5", "--mode", "greedy", "--no-cache"]);
    assert_eq!(code, 0);
    assert_eq!(r["results"]["exact"], false);
}

#[test]
fn lp_table_brackets_square_root_of_two() {
    let s = Sandbox::new();
    let csv = s.dir.path().join("lp.csv");
    let (code, r) = s.report(&["lp", "--p", "2", "--n-list", "2,4,8,16", "--samples", "300", "--csv", p(&csv), "--no-cache"]);
    assert_eq!(code, 0);
    let rows = r["results"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 4);
    let mut prev = 0.0;
    for row in rows {
        let (lo, hi) = (num(&row["lower_bound"]), num(&row["upper_bound"]));
        assert!(lo <= 2f64.sqrt() && 2f64.sqrt() <= hi);
        assert!(lo >= prev);
        prev = lo;
        assert_eq!(row["bounds_provenance"], "formula");
        assert_eq!(row["sample_provenance"], "measured");
        assert_eq!(row["upper_holds"], true);
    }
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("n,dim,eta,lower_bound,upper_bound"));
    assert_eq!(text.lines().count(), 5);
}

#[test]
fn converge_sup_square_is_three_halves() {
    let s = Sandbox::new();
    let (code, r) = s.report(&["converge", "--norm", "sup", "--dims", "2", "--budget", "400", "--no-cache"]);
    assert_eq!(code, 0);
    let row = &r["results"]["rows"][0];
    assert!((num(&row["value"]) - 1.5).abs() <= 0.02);
    assert!(num(&row["value_lo"]) <= num(&row["value_hi"]));
}

#[test]
fn constants_table_and_pretty_output() {
    let s = Sandbox::new();
    let (code, r) = s.report(&["constants", "--p", "2", "--no-cache"]);
    assert_eq!(code, 0);
    let rows = r["results"]["rows"].as_array().unwrap();
    let get = |key: &str| rows.iter().find(|row| row["key"] == key).unwrap().clone();
    assert_eq!(num(&get("hilbert")["value"]), 2f64.sqrt());
    assert_eq!(num(&get("sigma_real")["value"]), 1.5);
    assert_eq!(num(&get("lp(p=2)")["value"]), 2f64.sqrt());
    assert_eq!(num(&get("c0_real")["hi"]), 1.5);

    let out = s.run(&["constants", "--pretty", "--no-cache"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("sigma_complex") && text.contains("reproduced_by"));
    assert!(serde_json::from_str::<Value>(&text).is_err());
}

#[test]
fn out_flag_writes_the_report_to_a_file() {
    let s = Sandbox::new();
    let f = s.file("two.json", TWO_POINT);
    let out_path = s.dir.path().join("report.json");
    let out = s.run(&["value", p(&f), "--out", p(&out_path), "--no-cache"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(r["command"]["name"], "value");
}

#[test]
fn csv_needs_a_table() {
    let s = Sandbox::new();
    let f = s.file("two.json", TWO_POINT);
    let csv = s.dir.path().join("x.csv");
    assert_eq!(s.run(&["value", p(&f), "--csv", p(&csv), "--no-cache"]).status.code(), Some(2));
}
