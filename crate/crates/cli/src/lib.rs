//! Library side of the `rvz` command-line tool: argument definitions, the
//! run report, the result cache and the command implementations.
//!
//! Exit codes: 0 success, 2 input error, 3 non-convergence (report still
//! written), 4 budget exceeded (partial report written).

pub mod args;
pub mod cache;
pub mod commands;
pub mod render;
pub mod report;

use std::fs;
use std::io::Write;
use std::time::Instant;

use args::Cli;
use cache::Cache;
use commands::CliError;
use report::{input_digest, CommandEcho, RunReport, Timings, TOOL_VERSION};

/// Runs one parsed invocation and returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    match run_inner(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("rvz: {e}");
            e.code
        }
    }
}

fn run_inner(cli: &Cli) -> Result<i32, CliError> {
    let start = Instant::now();
    let g = &cli.global;
    if let Some(n) = g.threads {
        if n == 0 {
            return Err(CliError::input("--threads must be at least 1"));
        }
        // Fails only if a pool already exists (e.g. repeated calls in one
        // process), in which case that pool is used.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let name = cli.command.name();
    let prepared = commands::prepare(&cli.command)?;
    let digest = input_digest(name, &prepared.digest_params, &prepared.inputs);
    let cache = (!g.no_cache).then(Cache::from_env);

    let (mut report, cache_hit) = match cache.as_ref().and_then(|c| c.load(name, &digest)) {
        Some(r) => (r, true),
        None => {
            let params = prepared.params.clone();
            let outcome = commands::execute(prepared)?;
            let report = RunReport {
                command: CommandEcho { name: name.to_string(), params },
                input_digest: digest,
                status: outcome.status,
                results: outcome.results,
                certificates: outcome.certificates,
                timings: None,
                tool_version: TOOL_VERSION.to_string(),
            };
            if let (Some(c), report::Status::Ok) = (&cache, report.status) {
                c.store(&report);
            }
            (report, false)
        }
    };
    if !g.no_timings {
        report.timings = Some(Timings { total_ms: start.elapsed().as_secs_f64() * 1e3, cache_hit });
    }

    let json = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    match &g.out {
        Some(path) => {
            fs::write(path, &json).map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display())))?
        }
        None if !g.pretty => {
            let _ = std::io::stdout().write_all(json.as_bytes());
        }
        None => {}
    }
    if g.pretty {
        print!("{}", render::pretty(&report));
    }
    if let Some(path) = &g.csv {
        render::write_csv(&report, path)?;
    }
    Ok(report.status.exit_code())
}
