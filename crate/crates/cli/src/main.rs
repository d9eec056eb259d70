//! `qconvex` command-line runner.
//!
//! Exit status: 0 when every selected suite passes, 1 when any fails, 2 on usage or
//! configuration errors.

use std::path::PathBuf;
use std::process::ExitCode;

use chrono::{DateTime, Utc};
use clap::{Args, Parser, Subcommand};
use qconvex::report::{ReportDocument, RunManifest};
use qconvex::{registry, run_suite, ConvexityReport, SampleConfig};

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(name = "qconvex", version, about = "Randomized checks of matrix convexity and entropy inequalities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run suites and report the worst deficit of each.
    Verify(VerifyArgs),
    /// Print the registered suites.
    ListSuites,
}

#[derive(Args)]
#[command(group(clap::ArgGroup::new("selection").required(true).args(["suite", "all"])))]
struct VerifyArgs {
    /// Suite to run; repeat for several.
    #[arg(long, value_name = "NAME")]
    suite: Vec<String>,

    /// Run every suite except calibration ones.
    #[arg(long)]
    all: bool,

    /// Also run the calibration suites, which are expected to fail.
    #[arg(long)]
    include_calibration: bool,

    /// Factor dimensions, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "2,2,2")]
    dims: Vec<usize>,

    #[arg(long, default_value_t = 200)]
    samples: usize,

    /// Master seed; per-sample generators are derived from it.
    #[arg(long, env = "QCONVEX_SEED", default_value_t = 0)]
    seed: u64,

    /// Deficits below -TOL fail.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,

    /// Write the JSON report here.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

fn selected_suites(args: &VerifyArgs) -> Vec<String> {
    let mut names: Vec<String> = if args.all {
        registry()
            .iter()
            .filter(|s| !s.calibration)
            .map(|s| s.name.to_string())
            .collect()
    } else {
        args.suite.clone()
    };
    if args.include_calibration {
        for s in registry().iter().filter(|s| s.calibration) {
            if !names.iter().any(|n| n == s.name) {
                names.push(s.name.to_string());
            }
        }
    }
    names
}

/// `SOURCE_DATE_EPOCH` pins the manifest timestamp for reproducible documents.
fn started_at() -> Result<DateTime<Utc>, String> {
    match std::env::var("SOURCE_DATE_EPOCH") {
        Ok(v) => {
            let secs: i64 = v
                .trim()
                .parse()
                .map_err(|_| format!("SOURCE_DATE_EPOCH is not an integer: {v}"))?;
            DateTime::from_timestamp(secs, 0).ok_or_else(|| format!("SOURCE_DATE_EPOCH out of range: {v}"))
        }
        Err(_) => Ok(Utc::now()),
    }
}

fn verify(args: VerifyArgs) -> Result<bool, String> {
    let config = SampleConfig {
        master_seed: args.seed,
        dims: args.dims.clone(),
        samples: args.samples,
        tol: args.tol,
        ..SampleConfig::default()
    };
    config.validate().map_err(|e| e.to_string())?;
    let names = selected_suites(&args);
    let manifest = RunManifest::new(names.clone(), config.clone(), started_at()?).map_err(|e| e.to_string())?;

    let mut reports: Vec<ConvexityReport> = Vec::with_capacity(names.len());
    for name in &names {
        let report = run_suite(name, &config).map_err(|e| e.to_string())?;
        println!(
            "{:<4} {:<22} worst_deficit={:+.3e} sample={} {}",
            if report.pass { "PASS" } else { "FAIL" },
            report.suite_name,
            report.worst_deficit,
            report.worst_sample_index,
            report.notes
        );
        reports.push(report);
    }
    let failed = reports.iter().filter(|r| !r.pass).count();
    println!("{} suites, {} passed, {} failed", reports.len(), reports.len() - failed, failed);

    if let Some(path) = &args.out {
        let json = ReportDocument::new(manifest, &reports).to_json().map_err(|e| e.to_string())?;
        std::fs::write(path, json).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    }
    Ok(failed == 0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    match cli.command {
        Command::ListSuites => {
            for s in registry() {
                let tag = if s.calibration { " [calibration]" } else { "" };
                println!("{:<22} {}{}", s.name, s.description, tag);
            }
            ExitCode::SUCCESS
        }
        Command::Verify(args) => match verify(args) {
            Ok(true) => ExitCode::SUCCESS,
            Ok(false) => ExitCode::from(EXIT_FAIL),
            Err(msg) => {
                eprintln!("error: {msg}");
                ExitCode::from(EXIT_USAGE)
            }
        },
    }
}
