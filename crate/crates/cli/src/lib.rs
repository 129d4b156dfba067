//! Scenario runner: reads a TOML scenario, runs one verification suite and
//! writes a deterministic JSON report plus CSV tables.
//!
//! Exit codes: 0 when every criterion passes, 1 when any criterion fails (or
//! the pipeline hits a numerical error), 2 for invalid configuration or
//! invocation.

// `!(x > 0.0)` is deliberate: it rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cache;
pub mod config;
pub mod report;
pub mod suites;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use sha2::{Digest, Sha256};

use crate::cache::{DiskCache, CACHE_ENV};
use crate::config::{Format, Scenario};
use crate::report::{emit_report, Timings};
use crate::suites::{run_suite, Context, RunError, SuiteKind};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "folner", version, about = "Run index-density verification scenarios")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Analytic vs topological vs kernel-count index density on a torus.
    VerifyTorus(RunArgs),
    /// Følner convergence of the analytic density on a plane window.
    VerifyPlane(RunArgs),
    /// Calibrated odd pairing and winding vs Toeplitz indices on a circle.
    VerifyToeplitz(RunArgs),
    /// Cyclicity, cocycle and periodicity identities on random modules.
    CocycleSuite(RunArgs),
    /// Colored covers, partitions of unity and greedy coloring.
    CoverSuite(RunArgs),
    /// Patchwise symbol assembly, symbol estimates and ellipticity.
    UpdoSuite(RunArgs),
}

#[derive(Clone, Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory; defaults to `output.dir` or `out/<name>`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Overrides the scenario seed.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Spectral cache directory.
    #[arg(long, env = CACHE_ENV)]
    pub cache: Option<PathBuf>,
}

impl Command {
    pub fn split(&self) -> (SuiteKind, &RunArgs) {
        match self {
            Command::VerifyTorus(a) => (SuiteKind::VerifyTorus, a),
            Command::VerifyPlane(a) => (SuiteKind::VerifyPlane, a),
            Command::VerifyToeplitz(a) => (SuiteKind::VerifyToeplitz, a),
            Command::CocycleSuite(a) => (SuiteKind::CocycleSuite, a),
            Command::CoverSuite(a) => (SuiteKind::CoverSuite, a),
            Command::UpdoSuite(a) => (SuiteKind::UpdoSuite, a),
        }
    }
}

fn sha256_hex(text: &str) -> String {
    Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

/// Runs one command and returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    let (kind, args) = cli.command.split();
    let (scenario, text) = match Scenario::load(&args.config) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: invalid config: {e}");
            return EXIT_CONFIG;
        }
    };
    let cache = match &args.cache {
        Some(dir) => match DiskCache::new(dir) {
            Ok(c) => Some(c),
            Err(e) => {
                eprintln!("error: --cache: cannot use {}: {e}", dir.display());
                return EXIT_CONFIG;
            }
        },
        None => None,
    };
    let ctx = Context {
        scenario: &scenario,
        seed: args.seed.unwrap_or(scenario.seed),
        config_sha256: sha256_hex(&text),
        cache: cache.as_ref(),
    };
    let mut timings = Timings::default();
    let report = match run_suite(kind, &ctx, &mut timings) {
        Ok(r) => r,
        Err(e @ RunError::Config(_)) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
        Err(e) => {
            eprintln!("error: {} failed: {e}", kind.name());
            return EXIT_FAIL;
        }
    };
    let out = args
        .out
        .clone()
        .or_else(|| scenario.output.dir.clone())
        .unwrap_or_else(|| PathBuf::from("out").join(&scenario.name));
    let format = args.format.or(scenario.output.format).unwrap_or_default();
    if let Err(e) = emit_report(&report, &timings, &out, format) {
        eprintln!("error: --out: cannot write to {}: {e}", out.display());
        return EXIT_CONFIG;
    }
    for c in &report.criteria {
        let value = c.value.map_or_else(|| "n/a".to_string(), |v| format!("{v:.3e}"));
        let cmp = match c.comparison {
            report::Comparison::AtMost => "<=",
            report::Comparison::Below => "<",
        };
        println!("{} {}: {value} {cmp} {:e}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.tolerance);
    }
    println!("{} {}: {} → {}", kind.name(), scenario.name, if report.passed { "passed" } else { "FAILED" }, out.display());
    if report.passed {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}
