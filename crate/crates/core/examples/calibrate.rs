use adiabatic_covar::covar::{LMConfig, PoolSupport};
use adiabatic_covar::harness::ExperimentConfig;
use adiabatic_covar::morph::{adiabatic_covar_run, AdiabaticOptions};
use adiabatic_covar::oracle;
use std::time::Instant;

fn main() {
    let text = r#"{
        "model": {"preset": "maxcut"},
        "circuit": {"num_layers": 10, "entangler": "all"},
        "schedule": {"delta_t": 0.15},
        "seeds": [0],
        "output_dir": "unused"
    }"#;
    let config = ExperimentConfig::from_json(text).unwrap();
    let started_all = Instant::now();
    let mut pass = 0;
    for seed in 1..=10u64 {
        let (h, schedule, circuit) = config.instantiate(seed, 0.15).unwrap();
        let lm = LMConfig {
            pool_support: PoolSupport::AllPairs,
            max_iterations: 50,
            covariance_norm_tol: 7e-4,
            rng_seed: seed,
            ..LMConfig::default()
        };
        let options = AdiabaticOptions {
            parameter_jitter_std: 0.02,
            final_max_iterations: Some(100),
            final_covariance_norm_tol: Some(1e-5),
            vqe_head_start: 15,
            ..AdiabaticOptions::default()
        };
        let trajectory = adiabatic_covar_run(&schedule, &circuit, 0, &lm, &options).unwrap();
        let mut worst = 0.0f64;
        for r in &trajectory.records {
            let h_t = schedule.hamiltonian_at(r.t).unwrap();
            let de = (r.energy - oracle::diagonalize(&h_t, false).unwrap().eigenvalues()[0]).abs();
            worst = worst.max(de);
        }
        let target = oracle::diagonalize(&h, false).unwrap().eigenvalues()[0];
        let final_de = (trajectory.final_energy() - target).abs();
        let ok = worst <= 2.5e-3 && final_de <= 5e-4;
        if ok { pass += 1; }
        println!("seed {seed}: worst={worst:.1e} final={final_de:.1e} {}",
            if ok { "PASS" } else { "fail" });
    }
    println!("passes: {pass}/10 [{:.0?}]", started_all.elapsed());
}
