//! `persist-lab` command-line tool.
//!
//! Exit codes: 0 success, 1 usage error, 2 numerical failure.

mod args;
mod commands;
mod report;

use std::ffi::OsString;
use std::process::ExitCode;

use clap::Parser;
use serde_json::{json, Map, Value};

use args::{Cli, Command, Opts};
use commands::Failure;

fn parameters(opts: &Opts) -> Map<String, Value> {
    let mut m = Map::new();
    let mut put = |k: &str, v: Value| {
        m.insert(k.to_string(), v);
    };
    put("theta", json!(opts.theta));
    put("family", json!(format!("{:?}", opts.family).to_lowercase()));
    put("rho", json!(opts.rho));
    put("a", json!(opts.a));
    put("b", json!(opts.b));
    put("sigma", json!(opts.sigma));
    put("lo", json!(opts.lo));
    put("hi", json!(opts.hi));
    put("order", json!(opts.order));
    put("n", json!(opts.n));
    put("paths", json!(opts.paths));
    put("block_size", json!(opts.block_size));
    put("x0", json!(opts.x0));
    put("horizon", json!(opts.horizon));
    put("tol", json!(opts.tol));
    put("depth", json!(opts.depth));
    put("grid", json!(opts.grid));
    put("zmax", json!(opts.zmax));
    put("rule", json!(format!("{:?}", opts.rule).to_lowercase()));
    put("mass", json!(opts.mass));
    put("source", json!(opts.source.map(|s| format!("{s:?}").to_lowercase())));
    put("slack", json!(opts.slack));
    put("start", json!(opts.start));
    m
}

fn run(argv: Vec<OsString>) -> u8 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let opts = &cli.opts;
    let result = match &cli.command {
        Command::Exact => commands::exact(opts),
        Command::Mc => commands::mc(opts),
        Command::Quad => commands::quad(opts),
        Command::Spectral => commands::spectral_cmd(opts),
        Command::Weights => commands::weights(opts),
        Command::Dvd => commands::dvd(opts),
        Command::Verify { identity } => commands::verify(opts, *identity),
        Command::Shape => commands::shape(opts),
        Command::Experiment(which) => commands::experiment(opts, *which),
    };
    let report = match result {
        Ok(r) => r,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            return 1;
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("numerical failure: {msg}");
            return 2;
        }
    };
    let seed = matches!(cli.command, Command::Mc).then_some(opts.seed);
    let manifest = report::manifest(&report, parameters(opts), seed);
    if let Err(e) = report::emit(&report, opts.format, opts.plot_data, opts.out.as_deref(), manifest) {
        eprintln!("error: cannot write output: {e}");
        return 1;
    }
    eprintln!("{}", report.summary);
    if let Some(v) = &report.violation {
        eprintln!("numerical failure: invariant violated: {v}");
        return 2;
    }
    0
}

fn main() -> ExitCode {
    ExitCode::from(run(std::env::args_os().collect()))
}
