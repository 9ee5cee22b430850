use adiabatic_covar::harness::ExperimentConfig;
use adiabatic_covar::oracle;

fn main() {
    let scales = [1.0f64, 0.8, 0.65, 0.5, 0.4];
    for seed in 31..=42u64 {
        let mut gaps = Vec::new();
        for scale in scales {
            let text = format!(
                r#"{{
                "model": {{"preset": "spin_ring", "num_qubits": 5, "onsite_scale": {scale}, "seed": {seed}}},
                "circuit": {{"num_layers": 12}},
                "schedule": {{"delta_t": 0.1}},
                "seeds": [{seed}],
                "output_dir": "unused"
            }}"#);
            let config = ExperimentConfig::from_json(&text).unwrap();
            let (_, schedule, _) = config.instantiate(seed, 0.1).unwrap();
            gaps.push(oracle::gap_and_epsilon(&schedule, 101).unwrap().g_min);
        }
        let line: Vec<String> = gaps.iter().map(|g| format!("{g:.3}")).collect();
        println!("seed {seed}: {line:?}");
    }
}
