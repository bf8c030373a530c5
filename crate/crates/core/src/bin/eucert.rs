use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use entropic_uncertainty::certifier::Theorem;
use entropic_uncertainty::harness::{self, FuzzConfig, ReportFormat, RunReport};
use entropic_uncertainty::{tolerances, Error};

/// Certify entropic uncertainty relations with quantum side information.
#[derive(Parser)]
#[command(name = "eucert", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the theorems requested by a scenario file.
    Verify {
        scenario: PathBuf,
        #[arg(long, default_value = "human", value_parser = parse_format)]
        output: ReportFormat,
        /// Overrides the scenario tolerance.
        #[arg(long)]
        tolerance: Option<f64>,
        /// Record wall time in the report (makes output non-reproducible).
        #[arg(long)]
        timing: bool,
    },
    /// Seeded random campaign.
    Fuzz {
        #[arg(long)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Factor dimension range, e.g. `2..4` (inclusive) or `3`.
        #[arg(long, default_value = "2..4", value_parser = parse_range)]
        dims: (usize, usize),
        /// Outcome count range for Kraus measurements.
        #[arg(long, default_value = "2..5", value_parser = parse_range)]
        outcomes: (usize, usize),
        /// Comma-separated theorem names.
        #[arg(long, default_value = "two_space", value_delimiter = ',', value_parser = parse_theorem)]
        theorems: Vec<Theorem>,
        #[arg(long, default_value = "human", value_parser = parse_format)]
        output: ReportFormat,
        #[arg(long, default_value_t = tolerances::THEOREM)]
        tolerance: f64,
        /// Regularization for proof replays; `0` disables it.
        #[arg(long, default_value_t = tolerances::REGULARIZATION_DELTA)]
        regularization_delta: f64,
        #[arg(long)]
        timing: bool,
    },
    /// Run the built-in analytic equality cases.
    Selftest {
        #[arg(long, default_value = "human", value_parser = parse_format)]
        output: ReportFormat,
    },
}

fn parse_format(s: &str) -> Result<ReportFormat, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_theorem(s: &str) -> Result<Theorem, String> {
    Theorem::from_name(s.trim()).ok_or_else(|| format!("unknown theorem `{s}`"))
}

fn parse_range(s: &str) -> Result<(usize, usize), String> {
    let num = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("`{t}`: {e}"));
    let (lo, hi) = match s.split_once("..") {
        Some((lo, hi)) => (num(lo)?, num(hi.trim_start_matches('='))?),
        None => {
            let v = num(s)?;
            (v, v)
        }
    };
    if lo == 0 || lo > hi {
        return Err(format!("empty or invalid range `{s}`"));
    }
    Ok((lo, hi))
}

fn finish(mut report: RunReport, format: ReportFormat, started: Option<Instant>) -> ExitCode {
    if let Some(t) = started {
        report.aggregate.wall_time_seconds = Some(t.elapsed().as_secs_f64());
    }
    print!("{}", harness::render(&report, format));
    if report.all_pass() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn input_error(e: impl std::fmt::Display) -> ExitCode {
    eprintln!("eucert: {e}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = Instant::now();
    match cli.command {
        Command::Verify {
            scenario,
            output,
            tolerance,
            timing,
        } => {
            let text = match std::fs::read_to_string(&scenario) {
                Ok(t) => t,
                Err(e) => return input_error(format!("{}: {e}", scenario.display())),
            };
            let mut spec = match harness::parse_scenario(&text) {
                Ok(s) => s,
                Err(e) => return input_error(format!("{}: {e}", scenario.display())),
            };
            if let Some(t) = tolerance {
                spec.tolerance = t;
            }
            match harness::run_scenario(&spec) {
                Ok(r) => finish(r, output, timing.then_some(started)),
                Err(e) => input_error(e),
            }
        }
        Command::Fuzz {
            trials,
            seed,
            dims,
            outcomes,
            theorems,
            output,
            tolerance,
            regularization_delta,
            timing,
        } => {
            let config = FuzzConfig {
                trials,
                seed,
                dims,
                outcomes,
                theorems,
                tolerance,
                regularization_delta: (regularization_delta > 0.0).then_some(regularization_delta),
                ..Default::default()
            };
            match harness::fuzz(&config) {
                Ok(r) => finish(r, output, timing.then_some(started)),
                Err(e) => input_error(e),
            }
        }
        Command::Selftest { output } => finish(harness::selftest(), output, None),
    }
}
