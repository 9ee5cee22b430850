//! Largest-feasible step-size search and the inverse-dt vs log-gap fit.

use serde::Serialize;

use super::config::ExperimentConfig;
use super::resolve_output_dir;
use crate::error::{Error, Result};
use crate::morph::{adiabatic_covar_run, AdiabaticOptions};
use crate::oracle::{diagonalize, gap_and_epsilon};
use std::fs;

/// One attempted candidate.
#[derive(Debug, Clone, Serialize)]
pub struct Attempt {
    pub delta_t: f64,
    /// |final energy - targeted eigenvalue|.
    pub final_error: f64,
    pub accepted: bool,
    pub csv: Option<String>,
}

/// Linesearch outcome for one seed.
#[derive(Debug, Clone, Serialize)]
pub struct SeedLinesearch {
    pub seed: u64,
    pub g_min: f64,
    pub accepted_delta_t: Option<f64>,
    pub best_error: f64,
    pub attempts: Vec<Attempt>,
}

/// Outcome across the config's seeds.
#[derive(Debug, Clone, Serialize)]
pub struct LinesearchReport {
    pub target_error: f64,
    pub per_seed: Vec<SeedLinesearch>,
}

impl LinesearchReport {
    /// (g_min, accepted dt) pairs of the seeds that accepted a candidate.
    pub fn accepted_points(&self) -> Vec<(f64, f64)> {
        self.per_seed
            .iter()
            .filter_map(|s| s.accepted_delta_t.map(|dt| (s.g_min, dt)))
            .collect()
    }

    pub fn all_accepted(&self) -> bool {
        self.per_seed.iter().all(|s| s.accepted_delta_t.is_some())
    }
}

/// Run the full adiabatic pipeline per candidate step size, largest first,
/// and accept the first whose final energy error against the targeted
/// eigenvalue is within `target_error`. Results (including every attempted
/// trajectory) are written under the config's output directory.
///
/// All seeds in the config are searched independently; a seed that exhausts
/// the candidates is reported with its best achieved error. The call itself
/// errors only when every seed exhausts.
pub fn dt_linesearch(
    config: &ExperimentConfig,
    target_error: f64,
    candidates: &[f64],
) -> Result<LinesearchReport> {
    config.validate()?;
    if target_error <= 0.0 {
        return Err(Error::InvalidConfig {
            field: "target_error".into(),
            reason: "must be positive".into(),
        });
    }
    if candidates.is_empty() {
        return Err(Error::InvalidConfig {
            field: "candidates".into(),
            reason: "need at least one candidate step size".into(),
        });
    }
    if candidates.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidConfig {
            field: "candidates".into(),
            reason: "must be strictly descending".into(),
        });
    }
    if candidates.iter().any(|dt| !(*dt > 0.0 && *dt <= 1.0)) {
        return Err(Error::InvalidConfig {
            field: "candidates".into(),
            reason: "step sizes must lie in (0, 1]".into(),
        });
    }
    let out_dir = resolve_output_dir(config);
    fs::create_dir_all(&out_dir)?;

    let options = AdiabaticOptions {
        final_max_iterations: config.outer.final_max_iterations,
        final_covariance_norm_tol: config.outer.final_covariance_norm_tol,
        parameter_jitter_std: config.outer.parameter_jitter_std,
        vqe_head_start: config.outer.vqe_head_start,
        vqe_head_start_rate: config.outer.vqe_head_start_rate,
        track_oracle: false,
    };

    let per_seed: Vec<SeedLinesearch> = config
        .seeds
        .iter()
        .map(|&seed| search_one_seed(config, &options, &out_dir, seed, target_error, candidates))
        .collect::<Result<Vec<_>>>()?;

    let report = LinesearchReport {
        target_error,
        per_seed,
    };
    fs::write(
        out_dir.join("linesearch.json"),
        serde_json::to_string_pretty(&report)?,
    )?;
    if report.per_seed.iter().all(|s| s.accepted_delta_t.is_none()) {
        let best = report
            .per_seed
            .iter()
            .min_by(|a, b| a.best_error.partial_cmp(&b.best_error).unwrap())
            .expect("at least one seed");
        return Err(Error::LinesearchExhausted {
            best_dt: best.attempts.last().map(|a| a.delta_t).unwrap_or(0.0),
            best_error: best.best_error,
        });
    }
    Ok(report)
}

fn search_one_seed(
    config: &ExperimentConfig,
    options: &AdiabaticOptions,
    out_dir: &std::path::Path,
    seed: u64,
    target_error: f64,
    candidates: &[f64],
) -> Result<SeedLinesearch> {
    // targeted eigenvalue and path gap from the oracle (dt-independent)
    let (_, schedule, _) = config.instantiate(seed, candidates[0])?;
    let target_spectrum = diagonalize(&schedule.target()?, false)?;
    let num_states = target_spectrum.eigenvalues().len();
    if config.level >= num_states {
        return Err(Error::LevelOutOfRange {
            level: config.level,
            num_states,
        });
    }
    let target_energy = target_spectrum.eigenvalues()[config.level];
    let g_min = gap_and_epsilon(&schedule, config.gap_grid_points)?.g_min;

    let mut attempts = Vec::new();
    let mut best_error = f64::INFINITY;
    let mut accepted = None;
    for &dt in candidates {
        let (_, schedule, circuit) = config.instantiate(seed, dt)?;
        let lm = config.lm_for_seed(seed);
        let trajectory = adiabatic_covar_run(&schedule, &circuit, config.level, &lm, options)
            .map_err(Error::from)?;
        let final_error = (trajectory.final_energy() - target_energy).abs();
        best_error = best_error.min(final_error);
        let token = format!("{dt}").replace('.', "p");
        let stem = format!("sweep_covar_seed{seed}_dt{token}_level{}", config.level);
        fs::write(out_dir.join(format!("{stem}.csv")), trajectory.to_csv())?;
        let ok = final_error <= target_error;
        attempts.push(Attempt {
            delta_t: dt,
            final_error,
            accepted: ok,
            csv: Some(format!("{stem}.csv")),
        });
        if ok {
            accepted = Some(dt);
            break;
        }
    }
    Ok(SeedLinesearch {
        seed,
        g_min,
        accepted_delta_t: accepted,
        best_error,
        attempts,
    })
}

/// Ordinary least squares of 1/dt against ln(g_min).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ScalingFit {
    pub slope: f64,
    pub intercept: f64,
    pub rms_residual: f64,
}

/// Fit (dt)^-1 = a ln(g_min) + b over (g_min, dt) points.
pub fn fit_inverse_dt_vs_loggap(points: &[(f64, f64)]) -> Result<ScalingFit> {
    if points.len() < 2 {
        return Err(Error::FitUnderdetermined(points.len()));
    }
    if points.iter().any(|(g, dt)| *g <= 0.0 || *dt <= 0.0) {
        return Err(Error::InvalidConfig {
            field: "points".into(),
            reason: "g_min and dt must be positive".into(),
        });
    }
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|(g, _)| g.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|(_, dt)| 1.0 / dt).collect();
    let mean_x = xs.iter().sum::<f64>() / n;
    let mean_y = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mean_x) * (x - mean_x)).sum();
    if sxx < 1e-300 {
        return Err(Error::FitUnderdetermined(points.len()));
    }
    let sxy: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - mean_x) * (y - mean_y))
        .sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let r = y - (slope * x + intercept);
            r * r
        })
        .sum();
    Ok(ScalingFit {
        slope,
        intercept,
        rms_residual: (ss_res / n).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::path::Path;
    use tempfile::tempdir;

    #[test]
    fn exact_line_is_recovered() {
        // 1/dt = 2 ln(g) + 3 (gaps chosen so every dt stays positive)
        let gs: [f64; 4] = [0.3, 0.5, 0.9, 1.4];
        let points: Vec<(f64, f64)> = gs
            .iter()
            .map(|&g| (g, 1.0 / (2.0 * g.ln() + 3.0)))
            .collect();
        let fit = fit_inverse_dt_vs_loggap(&points).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-10);
        assert!((fit.intercept - 3.0).abs() < 1e-10);
        assert!(fit.rms_residual < 1e-10);
    }

    #[test]
    fn two_points_interpolate_exactly() {
        let points = [(0.3, 0.1), (0.8, 0.05)];
        let fit = fit_inverse_dt_vs_loggap(&points).unwrap();
        assert!(fit.rms_residual < 1e-12);
    }

    #[test]
    fn degenerate_inputs_rejected() {
        assert!(fit_inverse_dt_vs_loggap(&[(0.5, 0.1)]).is_err());
        assert!(fit_inverse_dt_vs_loggap(&[(0.5, 0.1), (-0.1, 0.2)]).is_err());
        // identical gaps give no spread in x
        assert!(fit_inverse_dt_vs_loggap(&[(0.5, 0.1), (0.5, 0.2)]).is_err());
    }

    #[test]
    fn noisy_line_slope_within_three_sigma() {
        use rand::Rng;
        use rand::SeedableRng;
        // Monte-Carlo regression check over seeded replicates
        let truth = (1.7, 4.0);
        let gs: Vec<f64> = (1..=12).map(|i| 0.1 * i as f64).collect();
        let sigma = 0.01;
        let mut worst_z: f64 = 0.0;
        for seed in 0..20u64 {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let points: Vec<(f64, f64)> = gs
                .iter()
                .map(|&g| {
                    let y = truth.0 * g.ln() + truth.1
                        + sigma * (rng.gen::<f64>() + rng.gen::<f64>() + rng.gen::<f64>() - 1.5) * 2.0;
                    (g, 1.0 / y)
                })
                .collect();
            let fit = fit_inverse_dt_vs_loggap(&points).unwrap();
            let xs: Vec<f64> = gs.iter().map(|g| g.ln()).collect();
            let mean_x = xs.iter().sum::<f64>() / xs.len() as f64;
            let sxx: f64 = xs.iter().map(|x| (x - mean_x) * (x - mean_x)).sum();
            let se_slope = sigma / sxx.sqrt();
            let z = (fit.slope - truth.0).abs() / se_slope;
            worst_z = worst_z.max(z);
        }
        assert!(worst_z < 3.0, "worst slope z-score {worst_z}");
    }

    fn search_config(dir: &Path) -> ExperimentConfig {
        let text = format!(
            r#"{{
            "model": {{"preset": "maxcut", "num_qubits": 3}},
            "circuit": {{"num_layers": 3}},
            "schedule": {{"delta_t": 0.5}},
            "lm": {{"max_iterations": 25, "covariance_norm_tol": 0.0005}},
            "gap_grid_points": 31,
            "seeds": [2],
            "output_dir": {:?}
        }}"#,
            dir.to_str().unwrap()
        );
        ExperimentConfig::from_json(&text).unwrap()
    }

    #[test]
    fn single_successful_candidate_is_returned() {
        let dir = tempdir().unwrap();
        let config = search_config(dir.path());
        let report = dt_linesearch(&config, 1e-3, &[0.2]).unwrap();
        assert_eq!(report.per_seed[0].accepted_delta_t, Some(0.2));
        assert_eq!(report.per_seed[0].attempts.len(), 1);
        assert!(dir.path().join("linesearch.json").exists());
    }

    #[test]
    fn accepted_candidate_reproduces_on_rerun() {
        let dir = tempdir().unwrap();
        let config = search_config(dir.path());
        let report = dt_linesearch(&config, 1e-3, &[0.5, 0.25, 0.2, 0.125, 0.1]).unwrap();
        let accepted = report.per_seed[0].accepted_delta_t.expect("accepts some dt");
        let rerun = dt_linesearch(&config, 1e-3, &[accepted]).unwrap();
        assert_eq!(rerun.per_seed[0].accepted_delta_t, Some(accepted));
    }

    #[test]
    fn exhaustion_carries_best_error() {
        let dir = tempdir().unwrap();
        let mut config = search_config(dir.path());
        config.lm.max_iterations = 1; // starve the solver
        match dt_linesearch(&config, 1e-9, &[1.0, 0.5]) {
            Err(Error::LinesearchExhausted { best_error, .. }) => {
                assert!(best_error.is_finite());
                assert!(best_error > 1e-9);
            }
            other => panic!("expected exhaustion, got {other:?}"),
        }
    }

    #[test]
    fn unsorted_candidates_rejected() {
        let dir = tempdir().unwrap();
        let config = search_config(dir.path());
        assert!(dt_linesearch(&config, 0.1, &[0.1, 0.5]).is_err());
    }
}
