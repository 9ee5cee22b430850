//! Release gate: every test here checks one published behaviour of the
//! solver at its stated tolerance and prints a PASS line with the measured
//! numbers. Desk-scale reproductions run seeded instances, so results are
//! deterministic per machine-independent streams.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use adiabatic_covar::ansatz::{AnsatzCircuit, Entangler};
use adiabatic_covar::covar::{
    assemble_covariances, assemble_system, covariance, covar_solve, enumerate_local_strings,
    sample_operator_pool_seeded, LMConfig, PoolSupport,
};
use adiabatic_covar::harness::{dt_linesearch, fit_inverse_dt_vs_loggap, ExperimentConfig};
use adiabatic_covar::models::{build_schwinger, SchwingerSpec};
use adiabatic_covar::morph::{adiabatic_covar_run, diagonal_energy, AdiabaticOptions};
use adiabatic_covar::oracle;
use adiabatic_covar::pauli::{Pauli, PauliString, PauliSum};
use adiabatic_covar::statevector::StateVector;

// ---------------------------------------------------------------- helpers

fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Independent dense oracle: 2x2 letter matrices combined with nalgebra's
/// kronecker product, qubit 0 as the least significant bit.
fn dense_letter(p: Pauli) -> DMatrix<Complex64> {
    let z = c64(0.0, 0.0);
    match p {
        Pauli::I => DMatrix::from_row_slice(2, 2, &[c64(1., 0.), z, z, c64(1., 0.)]),
        Pauli::X => DMatrix::from_row_slice(2, 2, &[z, c64(1., 0.), c64(1., 0.), z]),
        Pauli::Y => DMatrix::from_row_slice(2, 2, &[z, c64(0., -1.), c64(0., 1.), z]),
        Pauli::Z => DMatrix::from_row_slice(2, 2, &[c64(1., 0.), z, z, c64(-1., 0.)]),
    }
}

fn dense_string(p: &PauliString) -> DMatrix<Complex64> {
    let mut m = DMatrix::identity(1, 1);
    for q in (0..p.num_qubits()).rev() {
        m = m.kronecker(&dense_letter(p.letter(q)));
    }
    m
}

fn dense_sum(h: &PauliSum) -> DMatrix<Complex64> {
    let dim = 1usize << h.num_qubits();
    let mut m = DMatrix::from_element(dim, dim, c64(0.0, 0.0));
    for t in h.terms() {
        m += dense_string(&t.string) * t.coefficient;
    }
    m
}

/// Seeded random ring Hamiltonian: onsite Z fields plus isotropic
/// nearest-neighbor coupling (all terms inside the neighbor pool support).
fn ring_hamiltonian(n: usize, coupling: f64, seed: u64) -> PauliSum {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut terms = Vec::new();
    for q in 0..n {
        terms.push((rng.gen_range(-1.0..=1.0), PauliString::single(n, q, Pauli::Z)));
    }
    for i in 0..n {
        let j = (i + 1) % n;
        for letter in [Pauli::X, Pauli::Y, Pauli::Z] {
            let (_, s) = PauliString::single(n, i, letter)
                .multiply(&PauliString::single(n, j, letter))
                .unwrap();
            terms.push((coupling, s));
        }
    }
    PauliSum::hermitian(n, terms).unwrap()
}

/// Seeded diagonal Hamiltonian with ring-supported ZZ terms.
fn ring_diagonal(n: usize, seed: u64) -> PauliSum {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut terms = Vec::new();
    for q in 0..n {
        terms.push((rng.gen_range(-1.0..=1.0), PauliString::single(n, q, Pauli::Z)));
    }
    for i in 0..n {
        let j = (i + 1) % n;
        let (_, zz) = PauliString::single(n, i, Pauli::Z)
            .multiply(&PauliString::single(n, j, Pauli::Z))
            .unwrap();
        terms.push((rng.gen_range(-1.0..=1.0), zz));
    }
    PauliSum::hermitian(n, terms).unwrap()
}

fn random_haar_state(n: usize, seed: u64) -> StateVector {
    StateVector::random_haar(n, seed)
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mid = v.len() / 2;
    if v.len() % 2 == 0 {
        0.5 * (v[mid - 1] + v[mid])
    } else {
        v[mid]
    }
}

// ------------------------------------------------- 1: eigenstate <-> roots

#[test]
fn eigenstate_root_equivalence() {
    // forward: every eigenvector of 20 seeded Hamiltonians zeroes every pool
    // covariance
    let mut checked_vectors = 0usize;
    let mut worst_forward: f64 = 0.0;
    for (idx, seed) in (0..10u64).enumerate() {
        let n = if idx % 2 == 0 { 3 } else { 4 };
        for h in [ring_diagonal(n, seed), ring_hamiltonian(n, 0.2 + 0.02 * idx as f64, seed)] {
            let pool = enumerate_local_strings(n, 2).unwrap();
            let spectrum = oracle::diagonalize(&h, true).unwrap();
            for vector in spectrum.eigenvectors().unwrap() {
                for op in &pool {
                    let value = covariance(op, &h, vector).unwrap().norm();
                    worst_forward = worst_forward.max(value);
                }
                checked_vectors += 1;
            }
        }
    }
    assert!(
        worst_forward < 1e-10,
        "max |covariance| at an exact eigenvector: {worst_forward:e}"
    );

    // converse: solver outputs that reach the 1e-8 norm tolerance with the
    // full neighbor pool certify eigenstates by energy variance
    let instances: [(usize, usize, f64, u64); 8] = [
        (3, 4, 0.30, 5),
        (3, 4, 0.20, 6),
        (3, 4, 0.25, 10),
        (4, 6, 0.20, 8),
        (4, 8, 0.30, 9),
        (4, 6, 0.25, 11),
        (4, 6, 0.30, 12),
        (3, 4, 0.35, 13),
    ];
    let mut converged = 0usize;
    let mut worst_variance: f64 = 0.0;
    for (n, layers, coupling, seed) in instances {
        let h = ring_hamiltonian(n, coupling, seed);
        let diagonal = PauliSum::hermitian(
            n,
            h.terms()
                .iter()
                .filter(|t| t.string.x_mask() == 0 && t.string.weight() == 1)
                .map(|t| (t.coefficient.re, t.string))
                .collect(),
        )
        .unwrap();
        let bits = (0..(1u64 << n))
            .min_by(|&a, &b| {
                diagonal_energy(&diagonal, a)
                    .partial_cmp(&diagonal_energy(&diagonal, b))
                    .unwrap()
            })
            .unwrap();
        let circuit =
            AnsatzCircuit::hardware_efficient(n, layers, Entangler::Ring).with_initial_bits(bits);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let kick = Normal::new(0.0, 0.02).unwrap();
        let theta0: Vec<f64> = (0..circuit.num_parameters())
            .map(|_| kick.sample(&mut rng))
            .collect();
        let full = enumerate_local_strings(n, 2).unwrap().len();
        let config = LMConfig {
            pool_size: Some(full),
            max_iterations: 300,
            covariance_norm_tol: 1e-8,
            rng_seed: seed,
            ..LMConfig::default()
        };
        let result = covar_solve(&h, &circuit, &theta0, &config).unwrap();
        if result.final_norm() <= 1e-8 {
            converged += 1;
            let state = circuit.prepare(&result.theta).unwrap();
            let variance = oracle::energy_variance(&h, &state).unwrap();
            worst_variance = worst_variance.max(variance);
            assert!(
                variance <= 1e-6,
                "converged run (seed {seed}) has variance {variance:e}"
            );
        }
    }
    assert!(converged >= 6, "only {converged}/8 solves reached the 1e-8 norm");
    println!(
        "ACCEPTANCE eigenstate_root_equivalence: PASS \
         ({checked_vectors} eigenvectors, max forward covariance {worst_forward:.1e}; \
         {converged}/8 converse solves, max variance {worst_variance:.1e})"
    );
}

// ------------------------------------- 2: derivatives vs finite differences

#[test]
fn jacobian_matches_finite_differences() {
    let step = 1e-5;
    let mut cases = 0usize;
    let mut worst: f64 = 0.0;

    // parameter-shift derivatives of single-string expectations
    for n in 2..=5usize {
        for instance in 0..4u64 {
            let circuit = AnsatzCircuit::hardware_efficient(n, 2, Entangler::Ring);
            let nu = circuit.num_parameters();
            let mut rng = ChaCha8Rng::seed_from_u64(100 * n as u64 + instance);
            let theta: Vec<f64> = (0..nu).map(|_| rng.gen_range(-1.5..1.5)).collect();
            let mask = (1u64 << n) - 1;
            let p = PauliString::from_masks(
                rng.gen::<u64>() & mask,
                rng.gen::<u64>() & mask,
                n,
            );
            for _ in 0..4 {
                let l = rng.gen_range(0..nu);
                let exact = circuit.param_shift_derivative(&theta, l, &p).unwrap();
                let mut tp = theta.clone();
                tp[l] += step;
                let mut tm = theta.clone();
                tm[l] -= step;
                let ep = p.expectation(&circuit.prepare(&tp).unwrap()).unwrap().re;
                let em = p.expectation(&circuit.prepare(&tm).unwrap()).unwrap().re;
                let fd = (ep - em) / (2.0 * step);
                worst = worst.max((exact - fd).abs());
                cases += 1;
            }
        }
    }

    // assembled Jacobian entries
    for seed in 0..6u64 {
        let n = 3;
        let h = ring_hamiltonian(n, 0.4, seed);
        let circuit = AnsatzCircuit::hardware_efficient(n, 2, Entangler::Ring);
        let nu = circuit.num_parameters();
        let mut rng = ChaCha8Rng::seed_from_u64(7000 + seed);
        let theta: Vec<f64> = (0..nu).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let pool = sample_operator_pool_seeded(n, 2, 10, seed).unwrap();
        let system = assemble_system(&pool, &h, &circuit, &theta).unwrap();
        for _ in 0..8 {
            let l = rng.gen_range(0..nu);
            let k = rng.gen_range(0..pool.len());
            let mut tp = theta.clone();
            tp[l] += step;
            let mut tm = theta.clone();
            tm[l] -= step;
            let fp = assemble_covariances(&pool, &h, &circuit, &tp).unwrap();
            let fm = assemble_covariances(&pool, &h, &circuit, &tm).unwrap();
            let fd = (fp[k] - fm[k]) / (2.0 * step);
            worst = worst.max((system.jacobian[(k, l)] - fd).norm());
            cases += 1;
        }
    }
    assert!(cases >= 100, "only {cases} cases checked");
    assert!(worst < 1e-6, "worst derivative mismatch {worst:e}");
    println!(
        "ACCEPTANCE jacobian_matches_finite_differences: PASS ({cases} cases, worst {worst:.1e})"
    );
}

// --------------------------------------------- 3: matrix-free vs dense kron

#[test]
fn matrix_free_matches_dense_oracles() {
    let mut worst_expectation: f64 = 0.0;
    let mut worst_product: f64 = 0.0;
    let mut worst_spectrum: f64 = 0.0;

    for n in 1..=5usize {
        // expectations on random states
        for seed in 0..4u64 {
            let h = if n >= 3 {
                ring_hamiltonian(n, 0.7, seed)
            } else {
                ring_diagonal(n.max(2), seed)
            };
            let n_eff = h.num_qubits();
            let state = random_haar_state(n_eff, 50 + seed);
            let fast = h.expectation(&state).unwrap();
            let dense = dense_sum(&h);
            let amps = nalgebra::DVector::from_column_slice(state.amplitudes());
            let slow = amps.dotc(&(&dense * &amps));
            worst_expectation = worst_expectation.max((fast - slow).norm());
        }
    }

    // products against dense multiplication
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for n in 1..=3usize {
        let mask = (1u64 << n) - 1;
        for _ in 0..30 {
            let p = PauliString::from_masks(rng.gen::<u64>() & mask, rng.gen::<u64>() & mask, n);
            let q = PauliString::from_masks(rng.gen::<u64>() & mask, rng.gen::<u64>() & mask, n);
            let (phase, r) = p.multiply(&q).unwrap();
            let lhs = dense_string(&p) * dense_string(&q);
            let rhs = dense_string(&r) * phase;
            worst_product = worst_product.max((lhs - rhs).norm());
        }
    }

    // spectra against an eigensolve of the independently built dense matrix
    for n in 2..=5usize {
        let h = if n >= 3 {
            ring_hamiltonian(n, 1.0, n as u64)
        } else {
            ring_diagonal(n, n as u64)
        };
        let spectrum = oracle::diagonalize(&h, false).unwrap();
        let dense = dense_sum(&h);
        let eig = dense.symmetric_eigen();
        let mut reference: Vec<f64> = eig.eigenvalues.iter().cloned().collect();
        reference.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (got, want) in spectrum.eigenvalues().iter().zip(&reference) {
            worst_spectrum = worst_spectrum.max((got - want).abs());
        }
    }

    assert!(worst_expectation < 1e-10);
    assert!(worst_product < 1e-12);
    assert!(worst_spectrum < 1e-10);
    println!(
        "ACCEPTANCE matrix_free_matches_dense_oracles: PASS \
         (expectation {worst_expectation:.1e}, product {worst_product:.1e}, \
         spectrum {worst_spectrum:.1e})"
    );
}

// ------------------------------------------------- 4: morphing identities

#[test]
fn morphing_identities_hold() {
    // mixing endpoints reproduce the inputs term for term
    let (sch_h, sch_schedule) = build_schwinger(&SchwingerSpec::preset(), 0.15).unwrap();
    assert_eq!(sch_schedule.hamiltonian_at(1.0).unwrap(), sch_h);
    let mixer = sch_schedule.hamiltonian_at(0.0).unwrap();
    assert_eq!(mixer.num_terms(), 5);
    for t in mixer.terms() {
        assert_eq!(t.string.weight(), 1);
        assert_eq!(t.string.z_mask(), 0);
        assert!((t.coefficient.re - 1.0).abs() < 1e-15);
    }

    // perturbative midpoint scales every coupling coefficient exactly by t
    let text = r#"{
        "model": {"preset": "spin_ring", "num_qubits": 5, "coupling": 0.8, "seed": 3},
        "circuit": {"num_layers": 2},
        "schedule": {"delta_t": 0.25},
        "seeds": [3],
        "output_dir": "unused"
    }"#;
    let config = ExperimentConfig::from_json(text).unwrap();
    let (h_full, schedule, circuit) = config.instantiate(3, 0.25).unwrap();
    let h0 = schedule.hamiltonian_at(0.0).unwrap();
    let mid = schedule.hamiltonian_at(0.5).unwrap();
    for t in h_full.terms() {
        let mid_coeff = mid.coefficient_of(&t.string).re;
        let base = h0.coefficient_of(&t.string).re;
        if t.string.weight() == 2 {
            assert!((mid_coeff - 0.5 * 0.8).abs() < 1e-15, "coupling at t=0.5");
        } else {
            assert!((mid_coeff - base).abs() < 1e-15, "onsite unchanged");
        }
    }

    // handoff between steps is bitwise for both inner solvers
    let lm = LMConfig {
        max_iterations: 15,
        rng_seed: 3,
        ..LMConfig::default()
    };
    let options = AdiabaticOptions::default();
    let trajectory = adiabatic_covar_run(&schedule, &circuit, 0, &lm, &options).unwrap();
    assert_eq!(trajectory.records.len(), 5);
    for pair in trajectory.records.windows(2) {
        assert_eq!(pair[1].theta_start, pair[0].theta, "handoff must be bitwise");
    }
    let vqe_config = adiabatic_covar::baselines::VqeConfig {
        learning_rate: 0.05,
        ..Default::default()
    };
    let vqe_trajectory = adiabatic_covar::baselines::adiabatic_vqe_run(
        &schedule, &circuit, 0, &vqe_config, 10, &options,
    )
    .unwrap();
    for pair in vqe_trajectory.records.windows(2) {
        assert_eq!(pair[1].theta_start, pair[0].theta);
    }
    println!(
        "ACCEPTANCE morphing_identities_hold: PASS \
         (endpoints exact, midpoint scaling exact, handoff bitwise over {} + {} steps)",
        trajectory.records.len(),
        vqe_trajectory.records.len()
    );
}

// ------------------------------------- 5: max-cut ground-state reproduction

#[test]
fn maxcut_tracks_instantaneous_ground() {
    let text = r#"{
        "model": {"preset": "maxcut"},
        "circuit": {"num_layers": 10, "entangler": "all"},
        "schedule": {"delta_t": 0.15},
        "seeds": [0],
        "output_dir": "unused"
    }"#;
    let config = ExperimentConfig::from_json(text).unwrap();
    let mut passes = 0usize;
    let mut lines = Vec::new();
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
        let mut worst_step: f64 = 0.0;
        for r in &trajectory.records {
            let h_t = schedule.hamiltonian_at(r.t).unwrap();
            let ground = oracle::diagonalize(&h_t, false).unwrap().eigenvalues()[0];
            worst_step = worst_step.max((r.energy - ground).abs());
        }
        // brute-force ground energy over all bitstrings (diagonal target)
        let (brute, _) = adiabatic_covar::models::diagonal_ground_energy(&h).unwrap();
        let final_de = (trajectory.final_energy() - brute).abs();
        let ok = worst_step <= 2.5e-3 && final_de <= 5e-4;
        if ok {
            passes += 1;
        }
        lines.push(format!(
            "seed {seed}: per-step {worst_step:.2e}, final {final_de:.2e} {}",
            if ok { "ok" } else { "miss" }
        ));
    }
    for line in &lines {
        println!("  {line}");
    }
    assert!(passes >= 8, "only {passes}/10 seeds within tolerance");
    println!("ACCEPTANCE maxcut_tracks_instantaneous_ground: PASS ({passes}/10 seeds)");
}

// ------------------------------------ 6: spin ring eigenstate convergence

fn spin_ring_final(seed: u64, shots: Option<u64>) -> (f64, f64, usize) {
    let text = r#"{
        "model": {"preset": "spin_ring", "num_qubits": 7},
        "circuit": {"num_layers": 16, "entangler": "all", "style": "real_amplitudes"},
        "schedule": {"delta_t": 0.05},
        "seeds": [0],
        "output_dir": "unused"
    }"#;
    let config = ExperimentConfig::from_json(text).unwrap();
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
    let state = circuit
        .clone()
        .with_initial_bits(trajectory.initial_bits)
        .prepare(&trajectory.final_record().theta)
        .unwrap();
    let variance = oracle::energy_variance(&h, &state).unwrap();
    let spectrum = oracle::diagonalize(&h, false).unwrap();
    let de = spectrum.nearest_distance(trajectory.final_energy());
    let level = spectrum.level_index(trajectory.final_energy());
    (variance, de, level)
}

#[test]
fn spin_ring_converges_to_eigenstate() {
    let mut passes = 0usize;
    for seed in 1..=10u64 {
        let (variance, de, level) = spin_ring_final(seed, None);
        let ok = variance <= 1e-3 && de <= 1e-2;
        if ok {
            passes += 1;
        }
        println!(
            "  seed {seed}: variance {variance:.2e}, nearest dE {de:.2e}, level {level} {}",
            if ok { "ok" } else { "miss" }
        );
    }
    assert!(passes >= 8, "only {passes}/10 seeds within tolerance");
    println!("ACCEPTANCE spin_ring_converges_to_eigenstate: PASS ({passes}/10 seeds)");
}

// --------------------------------------------------- 7: shot-noise impact

#[test]
fn shot_noise_robustness() {
    let mut degradations = Vec::new();
    let mut noisy = Vec::new();
    for seed in 1..=10u64 {
        let (_, de_clean, _) = spin_ring_final(seed, None);
        let (_, de_noisy, _) = spin_ring_final(seed, Some(1_000_000));
        println!("  seed {seed}: noiseless dE {de_clean:.2e}, noisy dE {de_noisy:.2e}");
        degradations.push(de_noisy - de_clean);
        noisy.push(de_noisy);
    }
    let median_degradation = median(degradations);
    let median_noisy = median(noisy);
    assert!(
        median_degradation <= 5e-3,
        "median degradation {median_degradation:e}"
    );
    // the noise floor sits near N_s^{-1/2} = 1e-3
    assert!(median_noisy <= 5e-3, "median noisy dE {median_noisy:e}");
    println!(
        "ACCEPTANCE shot_noise_robustness: PASS \
         (median degradation {median_degradation:.2e}, median noisy dE {median_noisy:.2e})"
    );
}

// ---------------------------------------- 8: step-size search and scaling

#[test]
fn dt_linesearch_and_scaling_fit() {
    let out = tempfile::tempdir().unwrap();
    // one base instance, gap rescaled through the onsite fields; the
    // schedule's minimum gap shrinks monotonically with the scale
    let scales = [1.0f64, 0.8, 0.6, 0.45, 0.3];
    let candidates = [
        0.5, 0.4, 0.3, 0.25, 0.2, 0.15, 0.125, 0.1, 0.08, 0.0625, 0.05, 0.04, 0.03, 0.025, 0.02,
    ];
    let mut points = Vec::new();
    for (idx, scale) in scales.iter().enumerate() {
        let text = format!(
            r#"{{
            "model": {{"preset": "spin_ring", "num_qubits": 5, "onsite_scale": {scale}, "seed": 36}},
            "circuit": {{"num_layers": 12, "entangler": "all", "style": "real_amplitudes"}},
            "schedule": {{"delta_t": 0.1}},
            "lm": {{"max_iterations": 50, "covariance_norm_tol": 0.002}},
            "outer": {{"final_max_iterations": 300, "final_covariance_norm_tol": 1e-5,
                       "parameter_jitter_std": 0.02, "vqe_head_start": 10}},
            "seeds": [36],
            "output_dir": {:?}
        }}"#,
            out.path().join(format!("scale{idx}")).to_str().unwrap()
        );
        let config = ExperimentConfig::from_json(&text).unwrap();
        let report = dt_linesearch(&config, 0.0015, &candidates).unwrap();
        let entry = &report.per_seed[0];
        let accepted = entry
            .accepted_delta_t
            .unwrap_or_else(|| panic!("scale {scale} accepted no candidate"));
        // self-consistency: rerunning the accepted step size reproduces it
        let rerun = dt_linesearch(&config, 0.0015, &[accepted]).unwrap();
        assert_eq!(rerun.per_seed[0].accepted_delta_t, Some(accepted));
        println!(
            "  scale {scale}: g_min {:.3}, accepted dt {accepted}",
            entry.g_min
        );
        points.push((entry.g_min, accepted));
    }
    // the logarithmic-scaling relation itself is reported, not asserted
    let fit = fit_inverse_dt_vs_loggap(&points).unwrap();
    assert!(fit.rms_residual.is_finite());
    println!(
        "ACCEPTANCE dt_linesearch_and_scaling_fit: PASS \
         (5/5 accepted; fit slope {:.3}, intercept {:.3}, rms residual {:.3})",
        fit.slope, fit.intercept, fit.rms_residual
    );
}

// ------------------------------------------- 9: Schwinger construction

#[test]
fn schwinger_matches_direct_summation() {
    for n in 2..=5usize {
        for theta_angle in [0.0f64, 0.7] {
            let spec = SchwingerSpec {
                num_sites: n,
                coupling: 1.0,
                hopping: 0.1,
                mass: 0.1,
                theta_angle,
            };
            let (h, schedule) = build_schwinger(&spec, 0.15).unwrap();

            // independent oracle: dense matrices of the three displayed sums
            let dim = 1usize << n;
            let mut dense = DMatrix::from_element(dim, dim, c64(0.0, 0.0));
            let zs: Vec<DMatrix<Complex64>> = (0..n)
                .map(|q| dense_string(&PauliString::single(n, q, Pauli::Z)))
                .collect();
            let xs: Vec<DMatrix<Complex64>> = (0..n)
                .map(|q| dense_string(&PauliString::single(n, q, Pauli::X)))
                .collect();
            let ys: Vec<DMatrix<Complex64>> = (0..n)
                .map(|q| dense_string(&PauliString::single(n, q, Pauli::Y)))
                .collect();
            let (j, w, m) = (1.0, 0.1, 0.1);
            // sum over upper limits, pairs k <= l with the identity k = l
            // shifts dropped
            for upper in 2..=n.saturating_sub(1) {
                for k in 1..=upper {
                    for l in k..=upper {
                        if k != l {
                            dense += (&zs[k - 1] * &zs[l - 1]) * c64(0.5 * j, 0.0);
                        }
                    }
                }
            }
            for site in 1..=(n - 1) {
                let alternating = if site % 2 == 0 { 1.0 } else { -1.0 };
                let coeff = 0.5 * j * (w - alternating * 0.5 * m * theta_angle.sin());
                dense += (&xs[site - 1] * &xs[site]) * c64(coeff, 0.0);
                dense += (&ys[site - 1] * &ys[site]) * c64(coeff, 0.0);
            }
            for site in 1..=n {
                let sign = if site % 2 == 0 { 1.0 } else { -1.0 };
                dense += &zs[site - 1] * c64(0.5 * m * theta_angle.cos() * sign, 0.0);
            }
            for site in 1..=(n - 1) {
                if site % 2 == 1 {
                    for l in 1..=site {
                        dense += &zs[l - 1] * c64(-0.5 * j, 0.0);
                    }
                }
            }

            // term-for-term: project the dense oracle onto each string
            for t in h.terms() {
                let projector = dense_string(&t.string);
                let overlap: Complex64 = projector
                    .iter()
                    .zip(dense.iter())
                    .map(|(p, d)| p.conj() * d)
                    .sum();
                let reference = overlap / dim as f64;
                assert!(
                    (t.coefficient - reference).norm() < 1e-12,
                    "term {} of N={n}, theta={theta_angle}",
                    t.string
                );
            }
            // and no extra weight-1/weight-2 structure hides in the oracle:
            // the full matrices agree
            assert!((dense_sum(&h) - &dense).norm() < 1e-12);

            // the mixing schedule starts from the uniform X mixer exactly
            let mixer = schedule.hamiltonian_at(0.0).unwrap();
            let expected = PauliSum::hermitian(
                n,
                (0..n).map(|q| (1.0, PauliString::single(n, q, Pauli::X))).collect(),
            )
            .unwrap();
            assert_eq!(mixer, expected);
        }
    }
    println!(
        "ACCEPTANCE schwinger_matches_direct_summation: PASS \
         (N = 2..5, theta in {{0, 0.7}}, term-for-term and full-matrix agreement)"
    );
}
