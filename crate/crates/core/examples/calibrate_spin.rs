use adiabatic_covar::covar::LMConfig;
use adiabatic_covar::harness::ExperimentConfig;
use adiabatic_covar::morph::{adiabatic_covar_run, AdiabaticOptions};
use adiabatic_covar::oracle;
use std::time::Instant;

fn run_one(config: &ExperimentConfig, seed: u64, shots: Option<u64>) -> (f64, f64, usize) {
    let (h, schedule, circuit) = config.instantiate(seed, 0.05).unwrap();
    let lm = LMConfig {
        max_iterations: 50,
        covariance_norm_tol: 2e-3,
        rng_seed: seed,
        shots,
        ..LMConfig::default()
    };
    let options = AdiabaticOptions {
        parameter_jitter_std: 0.02,
        final_max_iterations: Some(400),
        final_covariance_norm_tol: Some(1e-5),
        ..AdiabaticOptions::default()
    };
    let trajectory = adiabatic_covar_run(&schedule, &circuit, 0, &lm, &options).unwrap();
    let state = circuit.clone().with_initial_bits(trajectory.initial_bits)
        .prepare(&trajectory.final_record().theta).unwrap();
    let variance = oracle::energy_variance(&h, &state).unwrap();
    let spectrum = oracle::diagonalize(&h, false).unwrap();
    let de = spectrum.nearest_distance(trajectory.final_energy());
    let level = spectrum.level_index(trajectory.final_energy());
    (variance, de, level)
}

fn main() {
    let text = r#"{
        "model": {"preset": "spin_ring", "num_qubits": 7},
        "circuit": {"num_layers": 16, "entangler": "all", "style": "real_amplitudes"},
        "schedule": {"delta_t": 0.05},
        "seeds": [0],
        "output_dir": "unused"
    }"#;
    let config = ExperimentConfig::from_json(text).unwrap();
    let started = Instant::now();
    let mut degradations = Vec::new();
    let mut noisy_des = Vec::new();
    for seed in 1..=10u64 {
        let (var0, de0, lvl0) = run_one(&config, seed, None);
        let (var1, de1, lvl1) = run_one(&config, seed, Some(1_000_000));
        degradations.push(de1 - de0);
        noisy_des.push(de1);
        println!("seed {seed}: noiseless var={var0:.1e} dE={de0:.2e} L{lvl0} | noisy var={var1:.1e} dE={de1:.2e} L{lvl1} | degradation={:.2e}", de1 - de0);
    }
    let median = |mut v: Vec<f64>| -> f64 {
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        0.5 * (v[4] + v[5])
    };
    println!("median degradation = {:.2e}", median(degradations));
    println!("median noisy dE = {:.2e}", median(noisy_des));
    println!("[{:.0?}]", started.elapsed());
}
