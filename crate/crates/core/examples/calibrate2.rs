use adiabatic_covar::harness::{dt_linesearch, fit_inverse_dt_vs_loggap, ExperimentConfig};
use std::time::Instant;

fn main() {
    let out = std::env::temp_dir().join("adcovar_ls_cal");
    std::fs::create_dir_all(&out).unwrap();
    let scales = [1.0f64, 0.8, 0.6, 0.45, 0.3];
    let candidates = [0.5, 0.4, 0.3, 0.25, 0.2, 0.15, 0.125, 0.1, 0.08, 0.0625, 0.05, 0.04, 0.03, 0.025, 0.02];
    let mut points = Vec::new();
    let started = Instant::now();
    for (idx, scale) in scales.iter().enumerate() {
        let seed = 36u64; let _ = idx;
        let text = format!(
            r#"{{
            "model": {{"preset": "spin_ring", "num_qubits": 5, "onsite_scale": {scale}, "seed": {seed}}},
            "circuit": {{"num_layers": 12, "entangler": "all", "style": "real_amplitudes"}},
            "schedule": {{"delta_t": 0.1}},
            "lm": {{"max_iterations": 50, "covariance_norm_tol": 0.002}},
            "outer": {{"final_max_iterations": 300, "final_covariance_norm_tol": 1e-5,
                       "parameter_jitter_std": 0.02, "vqe_head_start": 10}},
            "seeds": [{seed}],
            "output_dir": {:?}
        }}"#,
            out.join(format!("scale{idx}")).to_str().unwrap()
        );
        let config = ExperimentConfig::from_json(&text).unwrap();
        match dt_linesearch(&config, 0.0015, &candidates) {
            Ok(report) => {
                let entry = &report.per_seed[0];
                println!("scale {scale}: g_min={:.3} accepted={:?} attempts={:?} [{:.0?}]",
                    entry.g_min, entry.accepted_delta_t,
                    entry.attempts.iter().map(|a| (a.delta_t, (a.final_error * 1e4).round() / 1e4)).collect::<Vec<_>>(),
                    started.elapsed());
                if let Some(dt) = entry.accepted_delta_t {
                    points.push((entry.g_min, dt));
                }
            }
            Err(e) => println!("scale {scale}: EXHAUSTED {e}"),
        }
    }
    if points.len() >= 2 {
        let fit = fit_inverse_dt_vs_loggap(&points).unwrap();
        println!("fit: slope={:.3} intercept={:.3} residual={:.3}", fit.slope, fit.intercept, fit.rms_residual);
    }
    println!("total [{:.0?}]", started.elapsed());
}
