//! Configuration-driven experiment runner: seeded instances, trajectory
//! CSV/JSON outputs, gap metadata, step-size linesearch and scaling fits.

mod config;
mod linesearch;

pub use config::{
    CircuitConfig, ExperimentConfig, ModelConfig, OuterConfig, ScheduleConfig, VqeBaselineConfig,
};
pub use linesearch::{dt_linesearch, fit_inverse_dt_vs_loggap, LinesearchReport, ScalingFit, SeedLinesearch};

use rayon::prelude::*;
use serde::Serialize;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::baselines::{adiabatic_vqe_run, vqe_trajectory, VqeConfig};
use crate::covar::{enumerate_local_strings_with, shot_budget};
use crate::error::{Error, Result};
use crate::morph::{adiabatic_covar_run, AdiabaticOptions, Method, MorphSchedule, Trajectory};
use crate::oracle::{gap_and_epsilon, spectrum_scan, GapReport};

/// Environment variable that reroots relative output directories.
pub const OUTPUT_ROOT_ENV: &str = "ADCOVAR_OUTPUT_ROOT";

/// Resolve the configured output directory against the env override.
pub fn resolve_output_dir(config: &ExperimentConfig) -> PathBuf {
    match std::env::var_os(OUTPUT_ROOT_ENV) {
        Some(root) if config.output_dir.is_relative() => {
            Path::new(&root).join(&config.output_dir)
        }
        _ => config.output_dir.clone(),
    }
}

/// One (seed, delta_t, method) output cell.
#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub seed: u64,
    pub delta_t: f64,
    pub level: usize,
    pub method: String,
    pub csv: Option<String>,
    pub trajectory_json: Option<String>,
    pub final_energy: Option<f64>,
    pub final_f_norm: Option<f64>,
    pub final_delta_e: Option<f64>,
    pub final_level_index: Option<usize>,
    pub total_inner_iterations: Option<usize>,
    /// Per-run failure; sibling runs continue.
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SeedMetadata {
    pub seed: u64,
    /// Minimum gap of the schedule path (oracle runs only).
    pub g_min: Option<f64>,
    pub gap: Option<GapReport>,
}

/// Metadata written once per experiment.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub config: serde_json::Value,
    /// Advisory shadow budget ceil(nu ln(N_c) / eps^2) for the configured
    /// tolerance.
    pub shot_budget_advisory: u64,
    pub num_parameters: usize,
    pub pool_size: usize,
    pub seeds: Vec<SeedMetadata>,
    pub runs: Vec<RunSummary>,
    pub wall_time_ms: u128,
}

impl ExperimentReport {
    pub fn any_failed(&self) -> bool {
        self.runs.iter().any(|r| r.error.is_some())
    }
}

fn dt_token(dt: f64) -> String {
    format!("{dt}").replace('.', "p")
}

fn write_trajectory(
    dir: &Path,
    stem: &str,
    trajectory: &Trajectory,
) -> Result<(String, String)> {
    let csv_name = format!("{stem}.csv");
    let json_name = format!("{stem}.json");
    fs::write(dir.join(&csv_name), trajectory.to_csv())?;
    fs::write(
        dir.join(&json_name),
        serde_json::to_string(trajectory).expect("trajectory serializes"),
    )?;
    Ok((csv_name, json_name))
}

fn summarize(
    seed: u64,
    delta_t: f64,
    level: usize,
    method: Method,
    result: std::result::Result<(Trajectory, String, String), Error>,
) -> RunSummary {
    match result {
        Ok((trajectory, csv, json)) => {
            let last = trajectory.final_record();
            RunSummary {
                seed,
                delta_t,
                level,
                method: method.as_str().to_string(),
                csv: Some(csv),
                trajectory_json: Some(json),
                final_energy: Some(last.energy),
                final_f_norm: Some(last.f_norm),
                final_delta_e: last.delta_e,
                final_level_index: last.level_index,
                total_inner_iterations: Some(
                    trajectory.records.iter().map(|r| r.covar_iters).sum(),
                ),
                error: None,
            }
        }
        Err(e) => RunSummary {
            seed,
            delta_t,
            level,
            method: method.as_str().to_string(),
            csv: None,
            trajectory_json: None,
            final_energy: None,
            final_f_norm: None,
            final_delta_e: None,
            final_level_index: None,
            total_inner_iterations: None,
            error: Some(e.to_string()),
        },
    }
}

/// Execute every (seed, delta_t) combination of the configured experiment:
/// one trajectory CSV + JSON per combination and per method, plus a metadata
/// file. Identical config + seeds reproduce byte-identical CSV outputs.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let started = Instant::now();
    let out_dir = resolve_output_dir(config);
    fs::create_dir_all(&out_dir)?;

    let delta_ts = config.resolve_delta_ts()?;
    let options = AdiabaticOptions {
        final_max_iterations: config.outer.final_max_iterations,
        final_covariance_norm_tol: config.outer.final_covariance_norm_tol,
        parameter_jitter_std: config.outer.parameter_jitter_std,
        vqe_head_start: config.outer.vqe_head_start,
        vqe_head_start_rate: config.outer.vqe_head_start_rate,
        track_oracle: config.oracle,
    };

    let mut cells: Vec<(u64, f64)> = Vec::new();
    for &seed in &config.seeds {
        for &dt in &delta_ts {
            cells.push((seed, dt));
        }
    }

    let runs: Vec<Vec<RunSummary>> = cells
        .par_iter()
        .map(|&(seed, dt)| run_cell(config, &options, &out_dir, seed, dt))
        .collect();

    // gap metadata once per seed (path independent of dt)
    let seeds: Vec<SeedMetadata> = config
        .seeds
        .par_iter()
        .map(|&seed| {
            let gap = if config.oracle {
                config
                    .instantiate(seed, delta_ts[0])
                    .and_then(|(_, schedule, _)| gap_and_epsilon(&schedule, config.gap_grid_points))
                    .ok()
            } else {
                None
            };
            SeedMetadata {
                seed,
                g_min: gap.as_ref().map(|g| g.g_min),
                gap,
            }
        })
        .collect();

    let nu = 2 * config.model.num_qubits() * config.circuit.num_layers;
    let full_pool = enumerate_local_strings_with(
        config.model.num_qubits(),
        config.lm.locality,
        config.lm.pool_support,
    )?
    .len();
    let pool_size = match config.lm.pool_size {
        Some(s) => s,
        None => (4 * nu).min(full_pool),
    };
    let report = ExperimentReport {
        config: serde_json::to_value(config)?,
        shot_budget_advisory: shot_budget(nu, pool_size, config.lm.covariance_norm_tol),
        num_parameters: nu,
        pool_size,
        seeds,
        runs: runs.into_iter().flatten().collect(),
        wall_time_ms: started.elapsed().as_millis(),
    };
    fs::write(
        out_dir.join("metadata.json"),
        serde_json::to_string_pretty(&report)?,
    )?;
    Ok(report)
}

fn run_cell(
    config: &ExperimentConfig,
    options: &AdiabaticOptions,
    out_dir: &Path,
    seed: u64,
    dt: f64,
) -> Vec<RunSummary> {
    let level = config.level;
    let token = dt_token(dt);
    let mut summaries = Vec::new();

    let covar_result = (|| {
        let (_, schedule, circuit) = config.instantiate(seed, dt)?;
        let lm = config.lm_for_seed(seed);
        let trajectory = adiabatic_covar_run(&schedule, &circuit, level, &lm, options)
            .map_err(Error::from)?;
        let stem = format!("traj_covar_seed{seed}_dt{token}_level{level}");
        let (csv, json) = write_trajectory(out_dir, &stem, &trajectory)?;
        Ok((trajectory, csv, json))
    })();
    summaries.push(summarize(seed, dt, level, Method::Covar, covar_result));

    if let Some(baseline) = &config.vqe_baseline {
        let vqe_config = VqeConfig {
            learning_rate: baseline.learning_rate,
            max_iterations: baseline.iterations_per_step,
            gradient_tol: baseline.gradient_tol,
            init_jitter_std: 0.0,
            rng_seed: config.lm_for_seed(seed).rng_seed,
        };
        let adiabatic_result = (|| {
            let (_, schedule, circuit) = config.instantiate(seed, dt)?;
            let trajectory = adiabatic_vqe_run(
                &schedule,
                &circuit,
                level,
                &vqe_config,
                baseline.iterations_per_step,
                options,
            )
            .map_err(Error::from)?;
            let stem = format!("traj_adiabatic_vqe_seed{seed}_dt{token}_level{level}");
            let (csv, json) = write_trajectory(out_dir, &stem, &trajectory)?;
            Ok((trajectory, csv, json))
        })();
        summaries.push(summarize(seed, dt, level, Method::AdiabaticVqe, adiabatic_result));

        let conventional_result = (|| {
            let (_, schedule, circuit) = config.instantiate(seed, dt)?;
            let chunks = schedule.time_grid().len();
            let jittered = VqeConfig {
                init_jitter_std: baseline.init_jitter_std,
                ..vqe_config.clone()
            };
            let trajectory = vqe_trajectory(
                &schedule,
                &circuit,
                level,
                &jittered,
                baseline.iterations_per_step,
                chunks,
                config.oracle,
            )?;
            let stem = format!("traj_vqe_seed{seed}_dt{token}_level{level}");
            let (csv, json) = write_trajectory(out_dir, &stem, &trajectory)?;
            Ok((trajectory, csv, json))
        })();
        summaries.push(summarize(seed, dt, level, Method::Vqe, conventional_result));
    }
    summaries
}

/// Instantaneous eigenvalue columns over the schedule grid, one CSV per seed
/// (the dashed-line data of the energy plots), plus the gap report.
pub fn export_spectrum(config: &ExperimentConfig) -> Result<Vec<(u64, GapReport, String)>> {
    config.validate()?;
    let out_dir = resolve_output_dir(config);
    fs::create_dir_all(&out_dir)?;
    let dt = config.resolve_delta_ts()?[0];
    config
        .seeds
        .iter()
        .map(|&seed| {
            let (_, schedule, _) = config.instantiate(seed, dt)?;
            let rows = spectrum_scan(&schedule, config.gap_grid_points)?;
            let dim = rows[0].1.len();
            let mut csv = String::from("s");
            for k in 0..dim {
                csv.push_str(&format!(",E_{k}"));
            }
            csv.push('\n');
            for (s, energies) in &rows {
                csv.push_str(&s.to_string());
                for e in energies {
                    csv.push_str(&format!(",{e}"));
                }
                csv.push('\n');
            }
            let name = format!("spectrum_seed{seed}.csv");
            fs::write(out_dir.join(&name), csv)?;
            let gap = gap_and_epsilon(&schedule, config.gap_grid_points)?;
            Ok((seed, gap, name))
        })
        .collect()
}

/// Re-derive a trajectory row's energy from its stored parameters; spot
/// checks that persisted runs stay consistent with the simulator.
pub fn rederive_energy(
    schedule: &MorphSchedule,
    circuit: &crate::ansatz::AnsatzCircuit,
    trajectory: &Trajectory,
    record_index: usize,
) -> Result<f64> {
    let record = &trajectory.records[record_index];
    let run_circuit = circuit.clone().with_initial_bits(trajectory.initial_bits);
    let state = run_circuit.prepare(&record.theta)?;
    Ok(schedule.hamiltonian_at(record.t)?.expectation(&state)?.re)
}
