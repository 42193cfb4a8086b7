//! `pmodulus`: p-modulus of graph families from the command line.
//!
//! Every report is a JSON object with the merged run configuration, tool
//! and library versions, the seed and timings; `--csv` writes the tabular
//! part instead. Exit codes: 0 success, 1 a check failed, 2 bad input or
//! configuration, 3 no convergence, 4 a size guard was hit, 5 a Monte Carlo
//! bound failed.

mod commands;
mod config;

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use log::{debug, info};
use pmodulus::Error;
use serde_json::json;

use config::{Exponent, RunConfig};

pub mod exit {
    pub const OK: i32 = 0;
    pub const CHECK_FAILED: i32 = 1;
    pub const BAD_INPUT: i32 = 2;
    pub const NOT_CONVERGED: i32 = 3;
    pub const GUARD_EXCEEDED: i32 = 4;
    pub const STOCHASTIC_FAILED: i32 = 5;
}

#[derive(Parser)]
#[command(name = "pmodulus", version, about = "p-modulus of families of objects on weighted graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve Mod_p(Γ) and report ρ*, η* and the optimal pmf.
    Solve(Flags),
    /// Check the blocking-duality product, or its p = 1 / p = ∞ form.
    Duality(Flags),
    /// List the vertices of the admissible set, i.e. the blocker.
    Blocker(Flags),
    /// All-pairs δ_p, Mod_p^-1 or inverse min-cut metric.
    Metric(Flags),
    /// Gradient check ∂Mod/∂σ(e) = ρ*(e)^p and a monotonicity sweep.
    Sensitivity(Flags),
    /// Monte Carlo bounds for exponential random weights.
    Random(Flags),
    /// Run the acceptance suite.
    Verify(Flags),
}

#[derive(Args, Default)]
struct Flags {
    /// JSON run configuration; flags given on the command line override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Graph file (edge list, or JSON).
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Graph format: edge-list or json. Inferred from the extension by default.
    #[arg(long)]
    format: Option<String>,
    /// Treat edges as directed.
    #[arg(long)]
    directed: bool,
    /// connect:a,b | cut:a,b | tree | explicit:PATH
    #[arg(long)]
    family: Option<String>,
    /// Exponent p ≥ 1, or inf.
    #[arg(long)]
    p: Option<Exponent>,
    /// Relative duality gap at which the solver stops.
    #[arg(long)]
    eps_rel: Option<f64>,
    /// Write the report here instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Write tabular CSV instead of JSON.
    #[arg(long)]
    csv: bool,
    /// Random seed (default 0).
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
    /// Monte Carlo trials.
    #[arg(long)]
    trials: Option<usize>,
    /// Exponential rate θ for every edge (mean 1/θ).
    #[arg(long)]
    rate: Option<f64>,
    /// Per-edge rates, as KEY=θ,KEY=θ.
    #[arg(long)]
    rates: Option<String>,
    /// Metric: delta-p, mod-inverse or min-cut.
    #[arg(long)]
    kind: Option<String>,
    /// Edge to sweep (id, u-v or u-v#id).
    #[arg(long)]
    edge: Option<String>,
    /// Comma-separated σ(e) values for the sweep.
    #[arg(long)]
    grid: Option<String>,
    /// Finite-difference step relative to σ(e).
    #[arg(long)]
    h_rel: Option<f64>,
}

impl Flags {
    fn merge(self, subcommand: &str) -> Result<RunConfig, Error> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        cfg.subcommand = Some(subcommand.to_string());
        macro_rules! take {
            ($($field:ident),*) => {$(
                if self.$field.is_some() {
                    cfg.$field = self.$field;
                }
            )*};
        }
        take!(graph, format, family, p, output, jobs, trials, rate, kind, edge, h_rel);
        cfg.directed |= self.directed;
        cfg.csv |= self.csv;
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(eps) = self.eps_rel {
            let base = cfg.solver.take().unwrap_or_else(|| default_solver(subcommand));
            cfg.solver = Some(base.with_eps_rel(eps));
        }
        if let Some(rates) = &self.rates {
            cfg.rates = Some(parse_rates(rates)?);
        }
        if let Some(grid) = &self.grid {
            cfg.grid = Some(parse_list(grid)?);
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn default_solver(subcommand: &str) -> pmodulus::SolverOptions {
    if subcommand == "sensitivity" {
        pmodulus::sensitivity::sensitivity_options()
    } else {
        pmodulus::SolverOptions::default()
    }
}

fn parse_list(s: &str) -> Result<Vec<f64>, Error> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| Error::InvalidInput(format!("bad number `{t}`: {e}"))))
        .collect()
}

fn parse_rates(s: &str) -> Result<BTreeMap<String, f64>, Error> {
    s.split(',')
        .map(|pair| {
            let (k, v) = pair
                .rsplit_once('=')
                .ok_or_else(|| Error::InvalidInput(format!("rate `{pair}` is not KEY=VALUE")))?;
            let v = v.trim().parse::<f64>().map_err(|e| Error::InvalidInput(format!("bad rate `{v}`: {e}")))?;
            Ok((k.trim().to_string(), v))
        })
        .collect()
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::GuardExceeded(_) => exit::GUARD_EXCEEDED,
        Error::NotConverged(_) | Error::Numerical(_) => exit::NOT_CONVERGED,
        _ => exit::BAD_INPUT,
    }
}

fn fail(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(exit_code(e) as u8)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let start = Instant::now();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { exit::BAD_INPUT } else { exit::OK };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let (name, flags) = match cli.command {
        Command::Solve(f) => ("solve", f),
        Command::Duality(f) => ("duality", f),
        Command::Blocker(f) => ("blocker", f),
        Command::Metric(f) => ("metric", f),
        Command::Sensitivity(f) => ("sensitivity", f),
        Command::Random(f) => ("random", f),
        Command::Verify(f) => ("verify", f),
    };
    let mut cfg = match flags.merge(name) {
        Ok(cfg) => cfg,
        Err(e) => return fail(&e),
    };
    if let Some(jobs) = cfg.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            return fail(&Error::InvalidInput(format!("cannot start {jobs} workers: {e}")));
        }
    }
    info!("{name}: seed {}", cfg.seed);

    let compute = Instant::now();
    let outcome = match commands::run(&mut cfg) {
        Ok(o) => o,
        Err(e) => return fail(&e),
    };
    let compute_ms = compute.elapsed().as_secs_f64() * 1e3 - outcome.load_ms;
    debug!("{name} finished in {compute_ms:.1} ms");

    let body = if cfg.csv {
        outcome.csv
    } else {
        let report = json!({
            "tool": "pmodulus",
            "version": env!("CARGO_PKG_VERSION"),
            "library_version": pmodulus::VERSION,
            "command": name,
            "seed": cfg.seed,
            "config": cfg,
            "timings_ms": {
                "load": outcome.load_ms,
                "compute": compute_ms,
                "total": start.elapsed().as_secs_f64() * 1e3,
            },
            "result": outcome.result,
        });
        match serde_json::to_string_pretty(&report) {
            Ok(s) => s + "\n",
            Err(e) => return fail(&e.into()),
        }
    };
    let summary = format!("{}\nseed {}, exit {}", outcome.summary, cfg.seed, outcome.code);
    match &cfg.output {
        Some(path) => {
            if let Err(e) = std::fs::write(path, body) {
                return fail(&Error::InvalidInput(format!("cannot write {}: {e}", path.display())));
            }
            println!("{summary}");
        }
        None => {
            let mut out = std::io::stdout().lock();
            let _ = out.write_all(body.as_bytes());
            let _ = out.flush();
            eprintln!("{summary}");
        }
    }
    ExitCode::from(outcome.code as u8)
}
