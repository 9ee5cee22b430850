//! Command-line experiment runner.
//!
//! Subcommands: `run` (execute a config), `sweep-dt` (largest-feasible step
//! search), `spectrum` (exact-oracle eigenvalue export), `fit-scaling`
//! (inverse-dt vs log-gap fit over a CSV of points). Exit code 0 on success;
//! on failure a machine-readable error JSON goes to stderr.

use clap::{Parser, Subcommand};
use serde_json::json;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use adiabatic_covar::harness::{
    dt_linesearch, export_spectrum, fit_inverse_dt_vs_loggap, run_experiment, ExperimentConfig,
};

#[derive(Parser)]
#[command(name = "adcovar", version, about = "Adiabatic covariance root finding experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every (seed, delta_t) combination of a JSON experiment config.
    Run {
        /// Path to the experiment config (JSON).
        config: PathBuf,
    },
    /// Search the largest step size meeting a final-error target.
    SweepDt {
        config: PathBuf,
        /// Accept the largest dt whose final |energy - target eigenvalue|
        /// is at most this.
        #[arg(long, default_value_t = 0.0015)]
        target_error: f64,
        /// Descending candidate step sizes, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        candidates: Vec<f64>,
    },
    /// Export instantaneous eigenvalues over the schedule grid per seed.
    Spectrum {
        config: PathBuf,
    },
    /// Fit (dt)^-1 = a ln(g_min) + b over a CSV with g_min,dt columns.
    FitScaling {
        /// CSV file: header then one `g_min,dt` row per point.
        csv: PathBuf,
    },
}

fn load_config(path: &PathBuf) -> adiabatic_covar::Result<ExperimentConfig> {
    let text = fs::read_to_string(path)?;
    ExperimentConfig::from_json(&text)
}

fn parse_points(text: &str) -> Result<Vec<(f64, f64)>, String> {
    let mut points = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || (idx == 0 && line.chars().any(|c| c.is_alphabetic())) {
            continue;
        }
        let mut cells = line.split(',');
        let g: f64 = cells
            .next()
            .ok_or_else(|| format!("line {}: missing g_min", idx + 1))?
            .trim()
            .parse()
            .map_err(|e| format!("line {}: {e}", idx + 1))?;
        let dt: f64 = cells
            .next()
            .ok_or_else(|| format!("line {}: missing dt", idx + 1))?
            .trim()
            .parse()
            .map_err(|e| format!("line {}: {e}", idx + 1))?;
        points.push((g, dt));
    }
    Ok(points)
}

fn execute(command: Command) -> Result<serde_json::Value, serde_json::Value> {
    let fail = |kind: &str, message: String| json!({ "error": kind, "message": message });
    match command {
        Command::Run { config } => {
            let config = load_config(&config).map_err(|e| fail("config", e.to_string()))?;
            let report = run_experiment(&config).map_err(|e| fail("run", e.to_string()))?;
            if report.any_failed() {
                let failures: Vec<_> = report
                    .runs
                    .iter()
                    .filter(|r| r.error.is_some())
                    .map(|r| json!({ "seed": r.seed, "delta_t": r.delta_t, "error": r.error }))
                    .collect();
                return Err(json!({
                    "error": "partial_failure",
                    "message": "some runs failed; see metadata.json",
                    "failures": failures,
                }));
            }
            Ok(json!({
                "runs": report.runs.len(),
                "wall_time_ms": report.wall_time_ms,
                "shot_budget_advisory": report.shot_budget_advisory,
                "output_dir": config.output_dir,
            }))
        }
        Command::SweepDt {
            config,
            target_error,
            candidates,
        } => {
            let config = load_config(&config).map_err(|e| fail("config", e.to_string()))?;
            let report = dt_linesearch(&config, target_error, &candidates)
                .map_err(|e| fail("sweep", e.to_string()))?;
            Ok(serde_json::to_value(&report).expect("report serializes"))
        }
        Command::Spectrum { config } => {
            let config = load_config(&config).map_err(|e| fail("config", e.to_string()))?;
            let out = export_spectrum(&config).map_err(|e| fail("spectrum", e.to_string()))?;
            let entries: Vec<_> = out
                .iter()
                .map(|(seed, gap, file)| json!({ "seed": seed, "gap": gap, "csv": file }))
                .collect();
            Ok(json!({ "spectra": entries }))
        }
        Command::FitScaling { csv } => {
            let text = fs::read_to_string(&csv).map_err(|e| fail("io", e.to_string()))?;
            let points = parse_points(&text).map_err(|m| fail("parse", m))?;
            let fit = fit_inverse_dt_vs_loggap(&points).map_err(|e| fail("fit", e.to_string()))?;
            Ok(serde_json::to_value(fit).expect("fit serializes"))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(value) => {
            println!("{}", serde_json::to_string_pretty(&value).expect("json"));
            ExitCode::SUCCESS
        }
        Err(value) => {
            eprintln!("{}", serde_json::to_string(&value).expect("json"));
            ExitCode::FAILURE
        }
    }
}
