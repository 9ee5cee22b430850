//! Gradient-descent VQE, the VQD deflation cost, and adiabatic VQE (the
//! covariance solver swapped for energy minimisation) for comparison runs.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ansatz::AnsatzCircuit;
use crate::error::{Error, Result};
use crate::morph::{
    init_eigenstate_params, morph_run, AdiabaticOptions, Method, MorphResult, MorphSchedule,
    StepOutcome, Trajectory, TrajectoryRecord,
};
use crate::oracle;
use crate::pauli::PauliSum;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VqeConfig {
    pub learning_rate: f64,
    pub max_iterations: usize,
    /// Stop when the gradient sup-norm drops below this.
    pub gradient_tol: f64,
    /// Gaussian jitter applied to the initial parameters (0 disables).
    pub init_jitter_std: f64,
    pub rng_seed: u64,
}

impl Default for VqeConfig {
    fn default() -> Self {
        VqeConfig {
            learning_rate: 0.05,
            max_iterations: 100,
            gradient_tol: 1e-6,
            init_jitter_std: 0.0,
            rng_seed: 0,
        }
    }
}

impl VqeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.learning_rate <= 0.0 {
            return Err(Error::InvalidConfig {
                field: "learning_rate".into(),
                reason: "must be positive".into(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct VqeRun {
    pub theta: Vec<f64>,
    /// <H> at every iterate, including the final one.
    pub energy_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub final_gradient_norm: f64,
}

/// Parameter-shift gradient of <H>, parallel over parameters.
pub fn energy_gradient(h: &PauliSum, circuit: &AnsatzCircuit, theta: &[f64]) -> Result<Vec<f64>> {
    (0..theta.len())
        .into_par_iter()
        .map(|l| {
            let mut shifted = theta.to_vec();
            shifted[l] = theta[l] + std::f64::consts::FRAC_PI_2;
            let plus = h.expectation(&circuit.prepare(&shifted)?)?.re;
            shifted[l] = theta[l] - std::f64::consts::FRAC_PI_2;
            let minus = h.expectation(&circuit.prepare(&shifted)?)?.re;
            Ok(0.5 * (plus - minus))
        })
        .collect()
}

fn sup_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).fold(0.0, f64::max)
}

/// Plain gradient descent on <H> with parameter-shift gradients. Stops at the
/// iteration cap or when the gradient sup-norm falls below the tolerance.
pub fn vqe_minimize(
    h: &PauliSum,
    circuit: &AnsatzCircuit,
    theta0: &[f64],
    config: &VqeConfig,
) -> Result<VqeRun> {
    config.validate()?;
    if theta0.len() != circuit.num_parameters() {
        return Err(Error::ParameterCount {
            expected: circuit.num_parameters(),
            got: theta0.len(),
        });
    }
    let mut theta = theta0.to_vec();
    if config.init_jitter_std > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
        let normal = Normal::new(0.0, config.init_jitter_std).expect("valid std");
        for v in &mut theta {
            *v += normal.sample(&mut rng);
        }
    }
    let mut energy_trace = Vec::with_capacity(config.max_iterations + 1);
    let mut iterations = 0;
    let gradient_norm = loop {
        let energy = h.expectation(&circuit.prepare(&theta)?)?.re;
        if !energy.is_finite() {
            return Err(Error::Divergence { last_theta: theta });
        }
        energy_trace.push(energy);
        let gradient = energy_gradient(h, circuit, &theta)?;
        let norm = sup_norm(&gradient);
        if norm <= config.gradient_tol || iterations >= config.max_iterations {
            break norm;
        }
        for (t, g) in theta.iter_mut().zip(&gradient) {
            *t -= config.learning_rate * g;
        }
        iterations += 1;
    };
    Ok(VqeRun {
        converged: gradient_norm <= config.gradient_tol,
        final_gradient_norm: gradient_norm,
        theta,
        energy_trace,
        iterations,
    })
}

/// Deflation cost <H> + sum_i beta_i |<psi(theta_k)|psi(theta_i)>|^2.
pub fn vqd_cost(
    h: &PauliSum,
    circuit: &AnsatzCircuit,
    theta_k: &[f64],
    prior_thetas: &[Vec<f64>],
    betas: &[f64],
) -> Result<f64> {
    if prior_thetas.len() != betas.len() {
        return Err(Error::DimensionMismatch {
            expected: prior_thetas.len(),
            got: betas.len(),
            context: "deflation weights",
        });
    }
    let state = circuit.prepare(theta_k)?;
    let mut cost = h.expectation(&state)?.re;
    for (prior, beta) in prior_thetas.iter().zip(betas) {
        let prior_state = circuit.prepare(prior)?;
        cost += beta * state.fidelity(&prior_state)?;
    }
    Ok(cost)
}

/// Gradient descent on the deflation cost via parameter-shift (valid for the
/// overlap penalties too: they are expectations of projectors).
pub fn vqd_minimize(
    h: &PauliSum,
    circuit: &AnsatzCircuit,
    theta0: &[f64],
    prior_thetas: &[Vec<f64>],
    betas: &[f64],
    config: &VqeConfig,
) -> Result<VqeRun> {
    config.validate()?;
    let mut theta = theta0.to_vec();
    let mut energy_trace = Vec::new();
    let mut iterations = 0;
    let gradient_norm = loop {
        let cost = vqd_cost(h, circuit, &theta, prior_thetas, betas)?;
        if !cost.is_finite() {
            return Err(Error::Divergence { last_theta: theta });
        }
        energy_trace.push(cost);
        let gradient: Vec<f64> = (0..theta.len())
            .into_par_iter()
            .map(|l| {
                let mut shifted = theta.clone();
                shifted[l] = theta[l] + std::f64::consts::FRAC_PI_2;
                let plus = vqd_cost(h, circuit, &shifted, prior_thetas, betas)?;
                shifted[l] = theta[l] - std::f64::consts::FRAC_PI_2;
                let minus = vqd_cost(h, circuit, &shifted, prior_thetas, betas)?;
                Ok(0.5 * (plus - minus))
            })
            .collect::<Result<Vec<f64>>>()?;
        let norm = sup_norm(&gradient);
        if norm <= config.gradient_tol || iterations >= config.max_iterations {
            break norm;
        }
        for (t, g) in theta.iter_mut().zip(&gradient) {
            *t -= config.learning_rate * g;
        }
        iterations += 1;
    };
    Ok(VqeRun {
        converged: gradient_norm <= config.gradient_tol,
        final_gradient_norm: gradient_norm,
        theta,
        energy_trace,
        iterations,
    })
}

/// The adiabatic outer loop with VQE as the inner solver; emits the same
/// trajectory schema as the covariance runs (f_norm holds the gradient
/// sup-norm).
pub fn adiabatic_vqe_run(
    schedule: &MorphSchedule,
    circuit: &AnsatzCircuit,
    level: usize,
    config: &VqeConfig,
    iterations_per_step: usize,
    options: &AdiabaticOptions,
) -> MorphResult {
    let base = VqeConfig {
        init_jitter_std: 0.0, // jitter is the outer loop's concern
        ..config.clone()
    };
    morph_run(
        schedule,
        circuit,
        level,
        options,
        Method::AdiabaticVqe,
        config.rng_seed,
        |h, run_circuit, theta, _rng| {
            Ok(sup_norm(&energy_gradient(h, run_circuit, theta)?))
        },
        move |h, run_circuit, theta0, is_final, _rng| {
            let mut step = base.clone();
            step.max_iterations = if is_final {
                options.final_max_iterations.unwrap_or(iterations_per_step)
            } else {
                iterations_per_step
            };
            let run = vqe_minimize(h, run_circuit, theta0, &step)?;
            Ok(StepOutcome {
                residual: run.final_gradient_norm,
                iterations: run.iterations,
                theta: run.theta,
            })
        },
    )
}

/// Conventional VQE on the target Hamiltonian H(1), chunked so its trajectory
/// rows align with the adiabatic arms (t is always 1). Initialisation matches
/// the adiabatic runs' level-init plus the configured jitter.
pub fn vqe_trajectory(
    schedule: &MorphSchedule,
    circuit: &AnsatzCircuit,
    level: usize,
    config: &VqeConfig,
    iterations_per_chunk: usize,
    num_chunks: usize,
    track_oracle: bool,
) -> Result<Trajectory> {
    let h = schedule.target()?;
    let (theta0, bits) = init_eigenstate_params(schedule, circuit, level)?;
    let run_circuit = circuit.clone().with_initial_bits(bits);
    let mut theta = theta0;
    if config.init_jitter_std > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
        let normal = Normal::new(0.0, config.init_jitter_std).expect("valid std");
        for v in &mut theta {
            *v += normal.sample(&mut rng);
        }
    }
    let spectrum = if track_oracle {
        Some(oracle::diagonalize(&h, false)?)
    } else {
        None
    };
    let chunk_config = VqeConfig {
        init_jitter_std: 0.0,
        max_iterations: iterations_per_chunk,
        ..config.clone()
    };
    let mut trajectory = Trajectory {
        method: Method::Vqe,
        level,
        num_qubits: circuit.num_qubits(),
        num_parameters: circuit.num_parameters(),
        initial_bits: bits,
        records: Vec::new(),
    };
    for step_index in 0..num_chunks {
        let theta_start = theta.clone();
        let (iters, residual) = if step_index == 0 {
            (0, sup_norm(&energy_gradient(&h, &run_circuit, &theta)?))
        } else {
            let run = vqe_minimize(&h, &run_circuit, &theta, &chunk_config)?;
            theta = run.theta;
            (run.iterations, run.final_gradient_norm)
        };
        let energy = h.expectation(&run_circuit.prepare(&theta)?)?.re;
        let (delta_e, level_index) = match &spectrum {
            Some(s) => {
                let idx = s.level_index(energy);
                (Some((s.eigenvalues()[idx] - energy).abs()), Some(idx))
            }
            None => (None, None),
        };
        trajectory.records.push(TrajectoryRecord {
            t: 1.0,
            step_index,
            covar_iters: iters,
            energy,
            f_norm: residual,
            delta_e,
            level_index,
            theta_start,
            theta: theta.clone(),
        });
    }
    Ok(trajectory)
}
