//! Covariance root finding: operator pools, covariance vector and Jacobian
//! assembly, shot-noise injection and the damped least-squares inner solver.
//!
//! A state is an eigenstate of H exactly when the covariances
//! <O_k, H> = <O_k H> - <O_k><H> vanish for every pool operator, so the
//! solver drives the stacked real/imaginary parts of the covariance vector to
//! zero with Levenberg-Marquardt steps, resampling the pool each iteration.

use nalgebra::{Cholesky, DMatrix, DVector};
use num_complex::Complex64;
use rand::seq::index::sample as index_sample;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ansatz::AnsatzCircuit;
use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliString, PauliSum};
use crate::statevector::StateVector;

/// Pool of non-identity local Pauli strings.
#[derive(Debug, Clone)]
pub struct OperatorPool {
    operators: Vec<PauliString>,
    locality: usize,
    seed: Option<u64>,
}

impl OperatorPool {
    pub fn operators(&self) -> &[PauliString] {
        &self.operators
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    pub fn locality(&self) -> usize {
        self.locality
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// Pool from an explicit operator list (deduplicated, identity rejected).
    pub fn from_operators(operators: Vec<PauliString>, locality: usize) -> Result<Self> {
        let mut seen = operators.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != operators.len() {
            return Err(Error::InvalidModel("duplicate pool operators".into()));
        }
        if operators.iter().any(|p| p.is_identity()) {
            return Err(Error::InvalidModel(
                "identity excluded from pools: its covariances vanish identically".into(),
            ));
        }
        Ok(OperatorPool {
            operators,
            locality,
            seed: None,
        })
    }
}

/// Which qubit pairs carry the weight-2 pool strings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PoolSupport {
    /// Nearest-neighbor ring pairs (i, i+1 mod N).
    #[default]
    NeighborRing,
    /// Every unordered pair; needed when the Hamiltonian couples beyond the
    /// ring (complete-graph cut weights, long-range Schwinger ZZ terms), so
    /// that joint roots still certify eigenstates.
    AllPairs,
}

/// All non-identity strings of weight <= locality supported on single qubits
/// (weight 1) or nearest-neighbor ring pairs (weight 2), in a fixed order.
pub fn enumerate_local_strings(num_qubits: usize, locality: usize) -> Result<Vec<PauliString>> {
    enumerate_local_strings_with(num_qubits, locality, PoolSupport::NeighborRing)
}

/// As [`enumerate_local_strings`] with an explicit pair-support pattern.
pub fn enumerate_local_strings_with(
    num_qubits: usize,
    locality: usize,
    support: PoolSupport,
) -> Result<Vec<PauliString>> {
    if locality == 0 || locality > 2 {
        return Err(Error::InvalidModel(format!(
            "pool locality must be 1 or 2, got {locality}"
        )));
    }
    let letters = [Pauli::X, Pauli::Y, Pauli::Z];
    let mut out = Vec::new();
    for q in 0..num_qubits {
        for &a in &letters {
            out.push(PauliString::single(num_qubits, q, a));
        }
    }
    if locality == 2 {
        let edges = match support {
            PoolSupport::NeighborRing => ring_edges(num_qubits),
            PoolSupport::AllPairs => all_pairs(num_qubits),
        };
        for (i, j) in edges {
            for &a in &letters {
                for &b in &letters {
                    let (phase, s) = PauliString::single(num_qubits, i, a)
                        .multiply(&PauliString::single(num_qubits, j, b))
                        .expect("equal lengths");
                    debug_assert_eq!(phase, Complex64::new(1.0, 0.0));
                    out.push(s);
                }
            }
        }
    }
    Ok(out)
}

fn ring_edges(num_qubits: usize) -> Vec<(usize, usize)> {
    match num_qubits {
        0 | 1 => Vec::new(),
        2 => vec![(0, 1)],
        n => (0..n).map(|i| (i, (i + 1) % n)).collect(),
    }
}

fn all_pairs(num_qubits: usize) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for i in 0..num_qubits {
        for j in (i + 1)..num_qubits {
            edges.push((i, j));
        }
    }
    edges
}

/// Uniform sample without replacement from the enumerable local strings.
/// Deterministic for a fixed RNG state.
pub fn sample_operator_pool<R: Rng>(
    num_qubits: usize,
    locality: usize,
    pool_size: usize,
    rng: &mut R,
) -> Result<OperatorPool> {
    sample_operator_pool_with(num_qubits, locality, PoolSupport::NeighborRing, pool_size, rng)
}

/// As [`sample_operator_pool`] with an explicit pair-support pattern.
pub fn sample_operator_pool_with<R: Rng>(
    num_qubits: usize,
    locality: usize,
    support: PoolSupport,
    pool_size: usize,
    rng: &mut R,
) -> Result<OperatorPool> {
    let all = enumerate_local_strings_with(num_qubits, locality, support)?;
    if pool_size > all.len() {
        return Err(Error::PoolTooLarge {
            requested: pool_size,
            available: all.len(),
        });
    }
    let idx = index_sample(rng, all.len(), pool_size);
    let operators = idx.into_iter().map(|i| all[i]).collect();
    Ok(OperatorPool {
        operators,
        locality,
        seed: None,
    })
}

/// Seeded convenience wrapper around [`sample_operator_pool`].
pub fn sample_operator_pool_seeded(
    num_qubits: usize,
    locality: usize,
    pool_size: usize,
    seed: u64,
) -> Result<OperatorPool> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pool = sample_operator_pool(num_qubits, locality, pool_size, &mut rng)?;
    pool.seed = Some(seed);
    Ok(pool)
}

/// Covariance <o, h>_s = <s|oH|s> - <s|o|s><s|H|s>, with the operator product
/// o·H expanded into a complex-weighted Pauli sum via the string algebra.
pub fn covariance(o: &PauliString, h: &PauliSum, s: &StateVector) -> Result<Complex64> {
    let product = h.left_multiply(o)?;
    let oh = product.expectation(s)?;
    let o_mean = o.expectation(s)?;
    let h_mean = h.expectation(s)?;
    Ok(oh - o_mean * h_mean)
}

/// Covariance vector and Jacobian at a parameter point.
#[derive(Debug, Clone)]
pub struct CovarianceSystem {
    /// f_k = <O_k, H> at theta; length = pool size.
    pub f: Vec<Complex64>,
    /// [J]_{kl} = d f_k / d theta_l, assembled from parameter-shift
    /// derivatives of the three expectation factors.
    pub jacobian: DMatrix<Complex64>,
    /// Parameter point of the assembly.
    pub theta: Vec<f64>,
}

impl CovarianceSystem {
    /// RMS-normalized 2-norm ||f||_2 / sqrt(N_c); pool-size independent, so a
    /// fixed tolerance is comparable across pool sizes.
    pub fn rms_norm(&self) -> f64 {
        if self.f.is_empty() {
            return 0.0;
        }
        let sq: f64 = self.f.iter().map(|c| c.norm_sqr()).sum();
        (sq / self.f.len() as f64).sqrt()
    }

    pub fn inf_norm(&self) -> f64 {
        self.f.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

/// <psi|P|psi> and <psi|P phi> in a single fused amplitude pass, where `phi`
/// is H|psi> precomputed once per state. The second value equals the
/// expectation of the expanded product sum P·H by operator associativity.
fn pair_expectations(
    p: &PauliString,
    psi: &[Complex64],
    phi: &[Complex64],
) -> (Complex64, Complex64) {
    let x = p.x_mask();
    let z = p.z_mask();
    let y_count = (x & z).count_ones() % 4;
    let i_pow = match y_count {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    };
    let mut mean = Complex64::new(0.0, 0.0);
    let mut product = Complex64::new(0.0, 0.0);
    for j in 0..psi.len() {
        let src = j ^ x as usize;
        let sign = 1.0 - 2.0 * (((src as u64 & z).count_ones() & 1) as f64);
        // (P psi)[j] = i_pow * sign(src) * psi[src]
        let p_amp = i_pow * sign * psi[src];
        mean += psi[j].conj() * p_amp;
        product += p_amp.conj() * phi[j];
    }
    (mean, product)
}

/// Per-state quantities: energy, pool means <O_k>, product means <O_k H>.
fn state_quantities(
    pool: &OperatorPool,
    h: &PauliSum,
    state: &StateVector,
) -> Result<(f64, Vec<f64>, Vec<Complex64>)> {
    let phi = h.apply(state)?;
    let psi = state.amplitudes();
    let energy = state.inner(&phi)?.re;
    let mut means = Vec::with_capacity(pool.len());
    let mut products = Vec::with_capacity(pool.len());
    for op in pool.operators() {
        let (mean, product) = pair_expectations(op, psi, phi.amplitudes());
        means.push(mean.re);
        products.push(product);
    }
    Ok((energy, means, products))
}

/// Covariance vector only (no Jacobian), for termination checks.
pub fn assemble_covariances(
    pool: &OperatorPool,
    h: &PauliSum,
    circuit: &AnsatzCircuit,
    theta: &[f64],
) -> Result<Vec<Complex64>> {
    let state = circuit.prepare(theta)?;
    let (energy, means, products) = state_quantities(pool, h, &state)?;
    Ok(products
        .iter()
        .zip(&means)
        .map(|(okh, ok)| okh - ok * energy)
        .collect())
}

/// Assemble f and J at `theta`. Jacobian columns are parameter-shift
/// derivatives d<O_k H> - (d<O_k>)<H> - <O_k>(d<H>), evaluated in parallel
/// over parameters; the result is deterministic.
pub fn assemble_system(
    pool: &OperatorPool,
    h: &PauliSum,
    circuit: &AnsatzCircuit,
    theta: &[f64],
) -> Result<CovarianceSystem> {
    if pool.is_empty() {
        return Err(Error::InvalidModel("operator pool is empty".into()));
    }
    let nu = circuit.num_parameters();
    if theta.len() != nu {
        return Err(Error::ParameterCount {
            expected: nu,
            got: theta.len(),
        });
    }
    let n_c = pool.len();
    let base_state = circuit.prepare(theta)?;
    let (base_energy, base_means, base_products) = state_quantities(pool, h, &base_state)?;
    let f: Vec<Complex64> = base_products
        .iter()
        .zip(&base_means)
        .map(|(okh, ok)| okh - ok * base_energy)
        .collect();

    let columns: Vec<Vec<Complex64>> = (0..nu)
        .into_par_iter()
        .map(|l| -> Result<Vec<Complex64>> {
            let mut shifted = theta.to_vec();
            shifted[l] = theta[l] + std::f64::consts::FRAC_PI_2;
            let plus = circuit.prepare(&shifted)?;
            let (e_plus, means_plus, products_plus) = state_quantities(pool, h, &plus)?;
            shifted[l] = theta[l] - std::f64::consts::FRAC_PI_2;
            let minus = circuit.prepare(&shifted)?;
            let (e_minus, means_minus, products_minus) = state_quantities(pool, h, &minus)?;
            let d_energy = 0.5 * (e_plus - e_minus);
            let mut col = Vec::with_capacity(n_c);
            for k in 0..n_c {
                let d_product = 0.5 * (products_plus[k] - products_minus[k]);
                let d_mean = 0.5 * (means_plus[k] - means_minus[k]);
                col.push(d_product - d_mean * base_energy - base_means[k] * d_energy);
            }
            Ok(col)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut jacobian = DMatrix::from_element(n_c, nu, Complex64::new(0.0, 0.0));
    for (l, col) in columns.iter().enumerate() {
        for (k, v) in col.iter().enumerate() {
            jacobian[(k, l)] = *v;
        }
    }
    Ok(CovarianceSystem {
        f,
        jacobian,
        theta: theta.to_vec(),
    })
}

/// Damped least-squares update on the stacked real system:
/// theta - (J~^T J~ + lambda I)^-1 J~^T f~ with f~ = [Re f; Im f] and
/// J~ = [Re J; Im J].
pub fn lm_update(theta: &[f64], system: &CovarianceSystem, damping: f64) -> Result<Vec<f64>> {
    assert!(damping >= 0.0, "damping must be nonnegative");
    let n_c = system.f.len();
    let nu = theta.len();
    assert_eq!(system.jacobian.nrows(), n_c);
    assert_eq!(system.jacobian.ncols(), nu);

    let mut stacked_j = DMatrix::zeros(2 * n_c, nu);
    let mut stacked_f = DVector::zeros(2 * n_c);
    for k in 0..n_c {
        stacked_f[k] = system.f[k].re;
        stacked_f[n_c + k] = system.f[k].im;
        for l in 0..nu {
            stacked_j[(k, l)] = system.jacobian[(k, l)].re;
            stacked_j[(n_c + k, l)] = system.jacobian[(k, l)].im;
        }
    }
    let mut normal = stacked_j.tr_mul(&stacked_j);
    for d in 0..nu {
        normal[(d, d)] += damping;
    }
    let rhs = stacked_j.tr_mul(&stacked_f);
    let step = match Cholesky::new(normal.clone()) {
        Some(chol) => chol.solve(&rhs),
        None if damping == 0.0 => return Err(Error::IllConditioned),
        None => {
            let svd = normal.svd(true, true);
            svd.solve(&rhs, 1e-12).map_err(|_| Error::IllConditioned)?
        }
    };
    Ok(theta.iter().zip(step.iter()).map(|(t, s)| t - s).collect())
}

/// Add independent Gaussian noise of standard deviation shots^{-1/2} to the
/// real and imaginary parts of every covariance and Jacobian entry. Entries
/// are visited in a fixed order (f first, then J row-major) so results are
/// deterministic per seed.
pub fn inject_shot_noise<R: Rng>(
    system: &CovarianceSystem,
    shots: u64,
    rng: &mut R,
) -> CovarianceSystem {
    assert!(shots >= 1);
    let std = 1.0 / (shots as f64).sqrt();
    let normal = Normal::new(0.0, std).expect("valid std");
    let mut noisy = system.clone();
    for value in &mut noisy.f {
        value.re += normal.sample(rng);
        value.im += normal.sample(rng);
    }
    for k in 0..noisy.jacobian.nrows() {
        for l in 0..noisy.jacobian.ncols() {
            let v = &mut noisy.jacobian[(k, l)];
            v.re += normal.sample(rng);
            v.im += normal.sample(rng);
        }
    }
    noisy
}

/// Advisory shot budget ceil(nu * ln(N_c) / eps^2) for estimating the system
/// to accuracy eps with classical shadows; reported in experiment metadata.
pub fn shot_budget(nu: usize, n_c: usize, eps: f64) -> u64 {
    assert!(nu > 0 && n_c > 0 && eps > 0.0);
    (nu as f64 * (n_c as f64).ln() / (eps * eps)).ceil() as u64
}

/// Inner-solver configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LMConfig {
    /// Levenberg-Marquardt damping lambda >= 0. With `adaptive_damping` this
    /// is the starting value; otherwise it is held fixed.
    pub damping: f64,
    /// Marquardt accept/reject schedule: grow lambda until a step reduces
    /// ||f|| on the current pool, shrink it after accepted steps. Fully
    /// deterministic. A fixed small lambda overshoots from near-product
    /// warm starts and a fixed large one crawls, so this is on by default.
    pub adaptive_damping: bool,
    /// Operators drawn per iteration; default min(4 nu, full local pool).
    pub pool_size: Option<usize>,
    /// Maximum Pauli weight of pool operators (1 or 2).
    pub locality: usize,
    /// Qubit pairs carrying the weight-2 strings.
    pub pool_support: PoolSupport,
    /// CoVaR iteration cap K per solve.
    pub max_iterations: usize,
    /// Termination threshold on ||f||_2 / sqrt(N_c).
    pub covariance_norm_tol: f64,
    /// Redraw the pool every iteration (stochastic LM).
    pub resample_pool: bool,
    /// Seed of the pool/noise stream.
    pub rng_seed: u64,
    /// Simulated measurement shots; None disables noise injection.
    pub shots: Option<u64>,
}

impl Default for LMConfig {
    fn default() -> Self {
        LMConfig {
            damping: 1e-3,
            adaptive_damping: true,
            pool_size: None,
            locality: 2,
            pool_support: PoolSupport::NeighborRing,
            max_iterations: 50,
            covariance_norm_tol: 2e-3,
            resample_pool: true,
            rng_seed: 0,
            shots: None,
        }
    }
}

impl LMConfig {
    pub fn validate(&self) -> Result<()> {
        if self.damping < 0.0 {
            return Err(Error::InvalidConfig {
                field: "damping".into(),
                reason: "must be nonnegative".into(),
            });
        }
        if self.max_iterations < 1 {
            return Err(Error::InvalidConfig {
                field: "max_iterations".into(),
                reason: "must be at least 1".into(),
            });
        }
        if self.covariance_norm_tol <= 0.0 {
            return Err(Error::InvalidConfig {
                field: "covariance_norm_tol".into(),
                reason: "must be positive".into(),
            });
        }
        if let Some(shots) = self.shots {
            if shots == 0 {
                return Err(Error::InvalidConfig {
                    field: "shots".into(),
                    reason: "must be at least 1 when present".into(),
                });
            }
        }
        Ok(())
    }

    fn effective_pool_size(&self, num_qubits: usize, nu: usize) -> Result<usize> {
        let full =
            enumerate_local_strings_with(num_qubits, self.locality, self.pool_support)?.len();
        match self.pool_size {
            Some(requested) => {
                if requested > full {
                    Err(Error::PoolTooLarge {
                        requested,
                        available: full,
                    })
                } else {
                    Ok(requested)
                }
            }
            None => Ok((4 * nu).min(full)),
        }
    }
}

/// Output of [`covar_solve`].
#[derive(Debug, Clone)]
pub struct CovarSolve {
    /// Final parameters.
    pub theta: Vec<f64>,
    /// Number of LM updates performed.
    pub iterations: usize,
    /// ||f||_2 / sqrt(N_c) before each update, plus the exit value.
    pub norm_trace: Vec<f64>,
}

impl CovarSolve {
    pub fn final_norm(&self) -> f64 {
        *self.norm_trace.last().expect("trace never empty")
    }
}

/// Adaptive-damping schedule constants.
const LAMBDA_GROW: f64 = 4.0;
const LAMBDA_SHRINK: f64 = 3.0;
const LAMBDA_MIN: f64 = 1e-12;
const LAMBDA_MAX: f64 = 1e9;
const MAX_REJECTS: usize = 8;

/// Iterate stochastic LM from `theta0` until the covariance norm drops below
/// the tolerance or the iteration cap is reached. The pool is resampled every
/// iteration when configured; RNG draws (pool, then noise) occur in a
/// serialized stream so runs are reproducible per seed.
pub fn covar_solve(
    h: &PauliSum,
    circuit: &AnsatzCircuit,
    theta0: &[f64],
    config: &LMConfig,
) -> Result<CovarSolve> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    covar_solve_with_rng(h, circuit, theta0, config, &mut rng)
}

/// As [`covar_solve`] but drawing from a caller-owned stream, so an outer
/// loop can chain solves without reseeding collisions.
pub fn covar_solve_with_rng<R: Rng>(
    h: &PauliSum,
    circuit: &AnsatzCircuit,
    theta0: &[f64],
    config: &LMConfig,
    rng: &mut R,
) -> Result<CovarSolve> {
    config.validate()?;
    let nu = circuit.num_parameters();
    if theta0.len() != nu {
        return Err(Error::ParameterCount {
            expected: nu,
            got: theta0.len(),
        });
    }
    let pool_size = config.effective_pool_size(circuit.num_qubits(), nu)?;
    let noise_std = config.shots.map(|s| 1.0 / (s as f64).sqrt());
    let noisy_norm = |f: &mut Vec<Complex64>, rng: &mut R| -> f64 {
        if let Some(std) = noise_std {
            let normal = Normal::new(0.0, std).expect("valid std");
            for value in f.iter_mut() {
                value.re += normal.sample(rng);
                value.im += normal.sample(rng);
            }
        }
        let sq: f64 = f.iter().map(|c| c.norm_sqr()).sum();
        (sq / f.len() as f64).sqrt()
    };

    let mut theta = theta0.to_vec();
    let mut lambda = config.damping;
    let mut pool: Option<OperatorPool> = None;
    let mut trace = Vec::new();
    for iteration in 0..=config.max_iterations {
        if pool.is_none() || config.resample_pool {
            pool = Some(sample_operator_pool_with(
                circuit.num_qubits(),
                config.locality,
                config.pool_support,
                pool_size,
                rng,
            )?);
        }
        let pool_ref = pool.as_ref().expect("pool sampled above");
        let last_check = iteration == config.max_iterations;

        if last_check {
            // cap reached: report the exit norm without paying for a Jacobian
            let mut f = assemble_covariances(pool_ref, h, circuit, &theta)?;
            let norm = noisy_norm(&mut f, rng);
            trace.push(norm);
            return Ok(CovarSolve {
                theta,
                iterations: config.max_iterations,
                norm_trace: trace,
            });
        }

        let mut system = assemble_system(pool_ref, h, circuit, &theta)?;
        if let Some(shots) = config.shots {
            system = inject_shot_noise(&system, shots, rng);
        }
        let norm = system.rms_norm();
        trace.push(norm);
        if norm <= config.covariance_norm_tol {
            return Ok(CovarSolve {
                theta,
                iterations: iteration,
                norm_trace: trace,
            });
        }

        let updated = if config.adaptive_damping {
            // grow lambda until the step reduces ||f|| on this pool,
            // re-solving against the already-assembled system each time
            let mut accepted = None;
            let mut trial_lambda = lambda.max(LAMBDA_MIN);
            for _ in 0..=MAX_REJECTS {
                let candidate = lm_update(&theta, &system, trial_lambda)?;
                if candidate.iter().all(|v| v.is_finite()) {
                    let mut f = assemble_covariances(pool_ref, h, circuit, &candidate)?;
                    if noisy_norm(&mut f, rng) < norm {
                        accepted = Some(candidate);
                        break;
                    }
                }
                trial_lambda = (trial_lambda * LAMBDA_GROW).min(LAMBDA_MAX);
            }
            lambda = (trial_lambda / LAMBDA_SHRINK).clamp(LAMBDA_MIN, LAMBDA_MAX);
            match accepted {
                Some(candidate) => candidate,
                // no reduction at any damping: keep the point and let the
                // next pool draw change the objective
                None => theta.clone(),
            }
        } else {
            lm_update(&theta, &system, config.damping)?
        };
        if updated.iter().any(|v| !v.is_finite()) {
            return Err(Error::Divergence { last_theta: theta });
        }
        theta = updated;
    }
    unreachable!("loop returns at the iteration cap");
}
