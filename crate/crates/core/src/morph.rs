//! Discrete Hamiltonian morphing schedules and the outer adiabatic loop with
//! per-step parameter handoff.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::ansatz::{AnsatzCircuit, Gate};
use crate::covar::{
    assemble_covariances, covar_solve_with_rng, sample_operator_pool_with, LMConfig,
};
use crate::error::{Error, Result};
use crate::oracle::{self, MAX_DENSE_QUBITS};
use crate::pauli::PauliSum;

/// Grid values within this distance of 1 are snapped to exactly 1.
const GRID_SNAP: f64 = 1e-9;

/// Enumeration cap for analytic initial-state solves.
const MAX_INIT_QUBITS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MorphKind {
    /// H(t) = (1-t) H0 + t H1; endpoints reproduce H0 and H1 exactly.
    Mixing,
    /// H(t) = H0 + t H1; the target is H0 + H1.
    Perturbative,
}

/// Time-parameterised Hamiltonian with a discrete step grid.
#[derive(Debug, Clone)]
pub struct MorphSchedule {
    kind: MorphKind,
    h0: PauliSum,
    h1: PauliSum,
    delta_t: f64,
}

impl MorphSchedule {
    pub fn new(kind: MorphKind, h0: PauliSum, h1: PauliSum, delta_t: f64) -> Result<Self> {
        if h0.num_qubits() != h1.num_qubits() {
            return Err(Error::DimensionMismatch {
                expected: h0.num_qubits(),
                got: h1.num_qubits(),
                context: "morph endpoints",
            });
        }
        if !(delta_t > 0.0 && delta_t <= 1.0) {
            return Err(Error::InvalidConfig {
                field: "delta_t".into(),
                reason: format!("must lie in (0, 1], got {delta_t}"),
            });
        }
        Ok(MorphSchedule {
            kind,
            h0,
            h1,
            delta_t,
        })
    }

    pub fn kind(&self) -> MorphKind {
        self.kind
    }

    pub fn h0(&self) -> &PauliSum {
        &self.h0
    }

    pub fn h1(&self) -> &PauliSum {
        &self.h1
    }

    pub fn delta_t(&self) -> f64 {
        self.delta_t
    }

    pub fn num_qubits(&self) -> usize {
        self.h0.num_qubits()
    }

    /// Same schedule with a different step size.
    pub fn with_delta_t(&self, delta_t: f64) -> Result<Self> {
        MorphSchedule::new(self.kind, self.h0.clone(), self.h1.clone(), delta_t)
    }

    /// H(t), canonicalized.
    pub fn hamiltonian_at(&self, t: f64) -> Result<PauliSum> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::TimeOutOfRange { t });
        }
        match self.kind {
            MorphKind::Mixing => self.h0.scale(1.0 - t).add(&self.h1.scale(t)),
            MorphKind::Perturbative => self.h0.add(&self.h1.scale(t)),
        }
    }

    /// The target Hamiltonian H(1).
    pub fn target(&self) -> Result<PauliSum> {
        self.hamiltonian_at(1.0)
    }

    /// dH/ds of the linear path: h1 - h0 for mixing, h1 for perturbative.
    pub fn drive_term(&self) -> Result<PauliSum> {
        match self.kind {
            MorphKind::Mixing => self.h1.add(&self.h0.scale(-1.0)),
            MorphKind::Perturbative => Ok(self.h1.clone()),
        }
    }

    /// {0, dt, 2 dt, ...} capped so the final point is exactly 1; the last
    /// step is shortened when 1/dt is not integral.
    pub fn time_grid(&self) -> Vec<f64> {
        let mut grid = Vec::new();
        let mut j = 0u32;
        loop {
            let t = f64::from(j) * self.delta_t;
            if t >= 1.0 - GRID_SNAP {
                grid.push(1.0);
                break;
            }
            grid.push(t);
            j += 1;
        }
        grid
    }
}

/// Free-function form of [`MorphSchedule::hamiltonian_at`].
pub fn morph_hamiltonian(schedule: &MorphSchedule, t: f64) -> Result<PauliSum> {
    schedule.hamiltonian_at(t)
}

/// What the analytic initial solve recognized.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum InitialKind {
    Diagonal,
    UniformXMixer,
}

fn classify_initial(h0: &PauliSum) -> Result<InitialKind> {
    if h0.num_terms() == 0 {
        return Err(Error::NotAnalyticallySolvable(
            "initial Hamiltonian has no terms".into(),
        ));
    }
    if h0.is_diagonal() {
        return Ok(InitialKind::Diagonal);
    }
    let n = h0.num_qubits();
    if h0.num_terms() == n {
        let mut coeffs = Vec::new();
        let mut qubits_seen = 0u64;
        let mut all_single_x = true;
        for t in h0.terms() {
            let s = &t.string;
            if s.weight() == 1 && s.z_mask() == 0 {
                qubits_seen |= s.x_mask();
                coeffs.push(t.coefficient.re);
            } else {
                all_single_x = false;
                break;
            }
        }
        let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        let uniform = coeffs
            .windows(2)
            .all(|w| (w[0] - w[1]).abs() < 1e-12);
        if all_single_x && qubits_seen == full && uniform && coeffs[0] > 0.0 {
            return Ok(InitialKind::UniformXMixer);
        }
    }
    Err(Error::NotAnalyticallySolvable(
        "initial Hamiltonian is neither diagonal nor a uniform X mixer".into(),
    ))
}

/// Diagonal energy of basis state `bits` under a diagonal Pauli sum.
pub fn diagonal_energy(h: &PauliSum, bits: u64) -> f64 {
    h.terms()
        .iter()
        .map(|t| {
            let sign = 1.0 - 2.0 * (((bits & t.string.z_mask()).count_ones() & 1) as f64);
            t.coefficient.re * sign
        })
        .sum()
}

/// Basis patterns of a diagonal Hamiltonian sorted by (energy, pattern).
fn diagonal_levels(h: &PauliSum) -> Result<Vec<(f64, u64)>> {
    let n = h.num_qubits();
    if n > MAX_INIT_QUBITS {
        return Err(Error::CapacityExceeded {
            num_qubits: n,
            max: MAX_INIT_QUBITS,
        });
    }
    let mut levels: Vec<(f64, u64)> = (0..(1u64 << n))
        .map(|b| (diagonal_energy(h, b), b))
        .collect();
    levels.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(levels)
}

/// Basis patterns ordered by (popcount, value); the k-th entry indexes the
/// k-th eigenstate of a uniform X mixer when bit 1 maps to |+>.
fn mixer_levels(num_qubits: usize) -> Result<Vec<u64>> {
    if num_qubits > MAX_INIT_QUBITS {
        return Err(Error::CapacityExceeded {
            num_qubits,
            max: MAX_INIT_QUBITS,
        });
    }
    let mut patterns: Vec<u64> = (0..(1u64 << num_qubits)).collect();
    patterns.sort_by_key(|&b| (b.count_ones(), b));
    Ok(patterns)
}

/// Find the trailing rotation row: for each qubit, the last Ry gate that is
/// not followed by any entangler touching that qubit.
fn trailing_ry_slots(circuit: &AnsatzCircuit) -> Result<Vec<usize>> {
    let n = circuit.num_qubits();
    let mut slot: Vec<Option<usize>> = vec![None; n];
    for gate in circuit.gates() {
        match *gate {
            Gate::Ry { qubit, param } => slot[qubit] = Some(param),
            Gate::Cz { a, b } => {
                slot[a] = None;
                slot[b] = None;
            }
            Gate::Rz { .. } => {}
        }
    }
    slot.into_iter()
        .enumerate()
        .map(|(q, s)| {
            s.ok_or_else(|| {
                Error::NotAnalyticallySolvable(format!(
                    "circuit has no trailing Ry on qubit {q} for mixer initialization"
                ))
            })
        })
        .collect()
}

/// Parameters and basis input that prepare the `level`-th eigenstate of the
/// schedule's initial Hamiltonian exactly.
///
/// Diagonal H0: the basis pattern with the (level+1)-th smallest diagonal
/// energy, all angles zero. Uniform X mixer: a trailing row of Ry(-pi/2)
/// angles sends |b> to the ± product state with |+> where b has a 1, so
/// excited levels are bit-flip patterns in the ± basis.
pub fn init_eigenstate_params(
    schedule: &MorphSchedule,
    circuit: &AnsatzCircuit,
    level: usize,
) -> Result<(Vec<f64>, u64)> {
    let n = schedule.num_qubits();
    if circuit.num_qubits() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: circuit.num_qubits(),
            context: "circuit width",
        });
    }
    let num_states = 1usize << n;
    if level >= num_states {
        return Err(Error::LevelOutOfRange { level, num_states });
    }
    match classify_initial(schedule.h0())? {
        InitialKind::Diagonal => {
            let levels = diagonal_levels(schedule.h0())?;
            let bits = levels[level].1;
            Ok((vec![0.0; circuit.num_parameters()], bits))
        }
        InitialKind::UniformXMixer => {
            let patterns = mixer_levels(n)?;
            let bits = patterns[level];
            let mut theta = vec![0.0; circuit.num_parameters()];
            for slot in trailing_ry_slots(circuit)? {
                theta[slot] = -std::f64::consts::FRAC_PI_2;
            }
            Ok((theta, bits))
        }
    }
}

/// Which inner solver produced a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Covar,
    Vqe,
    AdiabaticVqe,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Covar => "covar",
            Method::Vqe => "vqe",
            Method::AdiabaticVqe => "adiabatic_vqe",
        }
    }
}

/// One grid point of a run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub t: f64,
    pub step_index: usize,
    /// Inner-solver iterations spent at this step.
    pub covar_iters: usize,
    /// <H(t)> in the prepared state.
    pub energy: f64,
    /// Solver residual at exit: covariance RMS norm (CoVaR) or gradient
    /// sup-norm (VQE).
    pub f_norm: f64,
    /// Distance to the nearest instantaneous eigenvalue (oracle on).
    pub delta_e: Option<f64>,
    /// Index of that eigenvalue (oracle on).
    pub level_index: Option<usize>,
    /// Parameters handed to the inner solver (after any jitter).
    pub theta_start: Vec<f64>,
    /// Parameters at solver exit; the next step starts from these bitwise.
    pub theta: Vec<f64>,
}

/// Recorded run over the whole time grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Trajectory {
    pub method: Method,
    pub level: usize,
    pub num_qubits: usize,
    pub num_parameters: usize,
    pub initial_bits: u64,
    pub records: Vec<TrajectoryRecord>,
}

impl Trajectory {
    pub fn final_record(&self) -> &TrajectoryRecord {
        self.records.last().expect("trajectory never empty")
    }

    pub fn final_energy(&self) -> f64 {
        self.final_record().energy
    }

    /// CSV with the mandatory header; oracle columns are empty when absent.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,step_index,covar_iters,energy,f_norm,delta_e,level_index,method\n");
        for r in &self.records {
            let delta_e = r.delta_e.map(|v| v.to_string()).unwrap_or_default();
            let level_index = r.level_index.map(|v| v.to_string()).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                r.t,
                r.step_index,
                r.covar_iters,
                r.energy,
                r.f_norm,
                delta_e,
                level_index,
                self.method.as_str()
            ));
        }
        out
    }
}

/// Outer-loop options beyond the inner-solver configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AdiabaticOptions {
    /// Larger CoVaR cap at t = 1 (None keeps the per-step cap).
    pub final_max_iterations: Option<usize>,
    /// Tighter covariance tolerance at t = 1 (None keeps the per-step one).
    /// Safe whenever the target eigenstate is exactly expressible there,
    /// e.g. diagonal Hamiltonians whose eigenstates are basis states.
    pub final_covariance_norm_tol: Option<f64>,
    /// Gaussian jitter added to the handed-off parameters at each step.
    pub parameter_jitter_std: f64,
    /// Plain energy-descent iterations run before each step's root solve;
    /// near avoided crossings this forces convergence to the low-lying
    /// branch instead of a nearby excited one. Only meaningful when the
    /// tracked level is the ground state.
    pub vqe_head_start: usize,
    /// Learning rate of the head-start descent.
    pub vqe_head_start_rate: f64,
    /// Record delta_e and level_index against the dense oracle.
    pub track_oracle: bool,
}

impl Default for AdiabaticOptions {
    fn default() -> Self {
        AdiabaticOptions {
            final_max_iterations: None,
            final_covariance_norm_tol: None,
            parameter_jitter_std: 0.0,
            vqe_head_start: 0,
            vqe_head_start_rate: 0.08,
            track_oracle: false,
        }
    }
}

/// Failure mid-run: the partial trajectory up to the failing step.
#[derive(Debug)]
pub struct MorphAbort {
    pub failing_t: f64,
    pub partial: Trajectory,
    pub source: Box<Error>,
}

impl std::fmt::Display for MorphAbort {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "adiabatic run aborted at t = {}: {}",
            self.failing_t, self.source
        )
    }
}

impl std::error::Error for MorphAbort {}

impl From<MorphAbort> for Error {
    fn from(abort: MorphAbort) -> Self {
        match *abort.source {
            Error::Divergence { .. } => Error::MorphDiverged { t: abort.failing_t },
            other => other,
        }
    }
}

pub type MorphResult = std::result::Result<Trajectory, MorphAbort>;

/// Inner-solver outcome for one grid point.
pub(crate) struct StepOutcome {
    pub theta: Vec<f64>,
    pub iterations: usize,
    pub residual: f64,
}

/// Generic outer loop: exact initialization at t = 0 with zero inner
/// iterations, then one inner solve per grid point, handing the final
/// parameters of each step to the next.
pub(crate) fn morph_run<S, R>(
    schedule: &MorphSchedule,
    circuit: &AnsatzCircuit,
    level: usize,
    options: &AdiabaticOptions,
    method: Method,
    rng_seed: u64,
    mut init_residual: R,
    mut solver: S,
) -> MorphResult
where
    S: FnMut(&PauliSum, &AnsatzCircuit, &[f64], bool, &mut ChaCha8Rng) -> Result<StepOutcome>,
    R: FnMut(&PauliSum, &AnsatzCircuit, &[f64], &mut ChaCha8Rng) -> Result<f64>,
{
    let fail = |t: f64, partial: Trajectory, e: Error| MorphAbort {
        failing_t: t,
        partial,
        source: Box::new(e),
    };

    let n = schedule.num_qubits();
    let mut trajectory = Trajectory {
        method,
        level,
        num_qubits: n,
        num_parameters: circuit.num_parameters(),
        initial_bits: 0,
        records: Vec::new(),
    };
    if options.track_oracle && n > MAX_DENSE_QUBITS {
        return Err(fail(
            0.0,
            trajectory,
            Error::CapacityExceeded {
                num_qubits: n,
                max: MAX_DENSE_QUBITS,
            },
        ));
    }

    let (theta0, bits) = match init_eigenstate_params(schedule, circuit, level) {
        Ok(v) => v,
        Err(e) => return Err(fail(0.0, trajectory, e)),
    };
    let run_circuit = circuit.clone().with_initial_bits(bits);
    trajectory.initial_bits = bits;

    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let grid = schedule.time_grid();
    let mut theta = theta0;

    for (step_index, &t) in grid.iter().enumerate() {
        let h_t = match schedule.hamiltonian_at(t) {
            Ok(h) => h,
            Err(e) => return Err(fail(t, trajectory, e)),
        };
        let outcome = if step_index == 0 {
            // exact initialization; diagnostic residual only
            let f_norm = match init_residual(&h_t, &run_circuit, &theta, &mut rng) {
                Ok(v) => v,
                Err(e) => return Err(fail(t, trajectory, e)),
            };
            StepOutcome {
                theta: theta.clone(),
                iterations: 0,
                residual: f_norm,
            }
        } else {
            if options.parameter_jitter_std > 0.0 {
                let normal =
                    Normal::new(0.0, options.parameter_jitter_std).expect("valid jitter std");
                for v in &mut theta {
                    *v += normal.sample(&mut rng);
                }
            }
            let is_final = step_index + 1 == grid.len();
            match solver(&h_t, &run_circuit, &theta, is_final, &mut rng) {
                Ok(outcome) => outcome,
                Err(e) => return Err(fail(t, trajectory, e)),
            }
        };
        let theta_start = std::mem::take(&mut theta);
        theta = outcome.theta;

        let state = match run_circuit.prepare(&theta) {
            Ok(s) => s,
            Err(e) => return Err(fail(t, trajectory, e)),
        };
        let energy = match h_t.expectation(&state) {
            Ok(e) => e.re,
            Err(e) => return Err(fail(t, trajectory, e)),
        };
        let (delta_e, level_index) = if options.track_oracle {
            match oracle::diagonalize(&h_t, false) {
                Ok(spectrum) => {
                    let idx = spectrum.level_index(energy);
                    (Some((spectrum.eigenvalues()[idx] - energy).abs()), Some(idx))
                }
                Err(e) => return Err(fail(t, trajectory, e)),
            }
        } else {
            (None, None)
        };
        trajectory.records.push(TrajectoryRecord {
            t,
            step_index,
            covar_iters: outcome.iterations,
            energy,
            f_norm: outcome.residual,
            delta_e,
            level_index,
            theta_start,
            theta: theta.clone(),
        });
    }
    Ok(trajectory)
}

/// Noiseless covariance norm of the exact initial state, on one pool draw
/// matching the solver's configuration.
pub(crate) fn init_f_norm(
    lm: &LMConfig,
    h: &PauliSum,
    circuit: &AnsatzCircuit,
    theta: &[f64],
    rng: &mut ChaCha8Rng,
) -> Result<f64> {
    let n = circuit.num_qubits();
    let full =
        crate::covar::enumerate_local_strings_with(n, lm.locality, lm.pool_support)?.len();
    let size = lm
        .pool_size
        .unwrap_or(4 * circuit.num_parameters())
        .min(full);
    let pool = sample_operator_pool_with(n, lm.locality, lm.pool_support, size, rng)?;
    let f = assemble_covariances(&pool, h, circuit, theta)?;
    let sq: f64 = f.iter().map(|v| v.norm_sqr()).sum();
    Ok((sq / f.len() as f64).sqrt())
}

/// Run the adiabatic CoVaR loop: for each grid point in order, solve the
/// covariance root problem on H(t) starting from the previous step's final
/// parameters. The iteration cap at t = 1 can be raised via the options.
pub fn adiabatic_covar_run(
    schedule: &MorphSchedule,
    circuit: &AnsatzCircuit,
    level: usize,
    lm: &LMConfig,
    options: &AdiabaticOptions,
) -> MorphResult {
    let base = lm.clone();
    let init_lm = lm.clone();
    morph_run(
        schedule,
        circuit,
        level,
        options,
        Method::Covar,
        lm.rng_seed,
        move |h, run_circuit, theta, rng| init_f_norm(&init_lm, h, run_circuit, theta, rng),
        move |h, run_circuit, theta0, is_final, rng| {
            let mut config = base.clone();
            if is_final {
                if let Some(k) = options.final_max_iterations {
                    config.max_iterations = k;
                }
                if let Some(tol) = options.final_covariance_norm_tol {
                    config.covariance_norm_tol = tol;
                }
            }
            let warm = if options.vqe_head_start > 0 {
                let head = crate::baselines::VqeConfig {
                    learning_rate: options.vqe_head_start_rate,
                    max_iterations: options.vqe_head_start,
                    gradient_tol: 1e-12,
                    init_jitter_std: 0.0,
                    rng_seed: 0,
                };
                crate::baselines::vqe_minimize(h, run_circuit, theta0, &head)?.theta
            } else {
                theta0.to_vec()
            };
            let solve = covar_solve_with_rng(h, run_circuit, &warm, &config, rng)?;
            Ok(StepOutcome {
                residual: solve.final_norm(),
                iterations: solve.iterations,
                theta: solve.theta,
            })
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ansatz::Entangler;
    use crate::pauli::{Pauli, PauliString};
    use crate::statevector::StateVector;

    fn zsum(n: usize, coeffs: &[(f64, &str)]) -> PauliSum {
        PauliSum::hermitian(
            n,
            coeffs
                .iter()
                .map(|(c, w)| (*c, PauliString::parse(w).unwrap()))
                .collect(),
        )
        .unwrap()
    }

    fn x_mixer(n: usize) -> PauliSum {
        PauliSum::hermitian(
            n,
            (0..n)
                .map(|q| (1.0, PauliString::single(n, q, Pauli::X)))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn mixing_endpoints_are_exact() {
        let h0 = x_mixer(3);
        let h1 = zsum(3, &[(0.5, "ZZI"), (-0.3, "IIZ")]);
        let schedule = MorphSchedule::new(MorphKind::Mixing, h0.clone(), h1.clone(), 0.25).unwrap();
        assert_eq!(schedule.hamiltonian_at(0.0).unwrap(), h0);
        assert_eq!(schedule.hamiltonian_at(1.0).unwrap(), h1);
    }

    #[test]
    fn perturbative_scales_coupling_linearly() {
        let h0 = zsum(2, &[(0.9, "ZI"), (-0.2, "IZ")]);
        let h1 = zsum(2, &[(0.7, "XX"), (0.7, "YY"), (0.7, "ZZ")]);
        let schedule =
            MorphSchedule::new(MorphKind::Perturbative, h0.clone(), h1.clone(), 0.1).unwrap();
        let mid = schedule.hamiltonian_at(0.5).unwrap();
        let xx = PauliString::parse("XX").unwrap();
        let zi = PauliString::parse("ZI").unwrap();
        assert!((mid.coefficient_of(&xx).re - 0.35).abs() < 1e-15);
        assert!((mid.coefficient_of(&zi).re - 0.9).abs() < 1e-15);
        assert_eq!(schedule.hamiltonian_at(1.0).unwrap(), h0.add(&h1).unwrap());
    }

    #[test]
    fn time_out_of_range_rejected() {
        let h = zsum(1, &[(1.0, "Z")]);
        let schedule = MorphSchedule::new(MorphKind::Mixing, h.clone(), h, 0.5).unwrap();
        assert!(schedule.hamiltonian_at(-0.1).is_err());
        assert!(schedule.hamiltonian_at(1.1).is_err());
    }

    #[test]
    fn grid_examples() {
        let h = zsum(1, &[(1.0, "Z")]);
        let quarter = MorphSchedule::new(MorphKind::Mixing, h.clone(), h.clone(), 0.25).unwrap();
        assert_eq!(quarter.time_grid(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);

        let awkward = MorphSchedule::new(MorphKind::Mixing, h.clone(), h.clone(), 0.15).unwrap();
        let grid = awkward.time_grid();
        assert_eq!(grid.len(), 8);
        assert_eq!(*grid.last().unwrap(), 1.0);
        assert!(grid.windows(2).all(|w| w[1] > w[0]));

        let tenth = MorphSchedule::new(MorphKind::Mixing, h.clone(), h, 0.1).unwrap();
        let grid = tenth.time_grid();
        assert_eq!(grid.len(), 11);
        assert_eq!(*grid.last().unwrap(), 1.0);
    }

    #[test]
    fn init_diagonal_example() {
        // h0 = 0.5 Z_0 - 0.2 Z_1: ground is qubit0 = 1, qubit1 = 0 at -0.7
        let h0 = zsum(2, &[(0.5, "ZI"), (-0.2, "IZ")]);
        let h1 = zsum(2, &[(0.1, "XX")]);
        let schedule = MorphSchedule::new(MorphKind::Perturbative, h0.clone(), h1, 0.5).unwrap();
        let circuit = AnsatzCircuit::hardware_efficient(2, 2, Entangler::Ring);
        let (theta, bits) = init_eigenstate_params(&schedule, &circuit, 0).unwrap();
        assert_eq!(bits, 0b01);
        assert!(theta.iter().all(|&v| v == 0.0));
        assert!((diagonal_energy(&h0, bits) + 0.7).abs() < 1e-14);

        // level 1 flips the qubit with the smallest |c| relative to ground
        let (_, bits1) = init_eigenstate_params(&schedule, &circuit, 1).unwrap();
        assert_eq!(bits1, 0b11); // flipping qubit 1 costs 0.4 < 1.0
    }

    #[test]
    fn init_diagonal_matches_dense_spectrum() {
        let h0 = zsum(
            3,
            &[(0.43, "ZII"), (-0.81, "IZI"), (0.12, "IIZ"), (0.3, "ZZI")],
        );
        let h1 = zsum(3, &[(0.1, "XXI")]);
        let schedule = MorphSchedule::new(MorphKind::Perturbative, h0.clone(), h1, 0.5).unwrap();
        let circuit = AnsatzCircuit::hardware_efficient(3, 2, Entangler::Ring);
        let spectrum = oracle::diagonalize(&h0, false).unwrap();
        for level in 0..5 {
            let (theta, bits) = init_eigenstate_params(&schedule, &circuit, level).unwrap();
            let state = circuit
                .clone()
                .with_initial_bits(bits)
                .prepare(&theta)
                .unwrap();
            let energy = h0.expectation(&state).unwrap().re;
            assert!(
                (energy - spectrum.eigenvalues()[level]).abs() < 1e-10,
                "level {level}: {energy} vs {}",
                spectrum.eigenvalues()[level]
            );
        }
    }

    #[test]
    fn init_mixer_ground_and_excited() {
        let n = 4;
        let h0 = x_mixer(n);
        let h1 = zsum(4, &[(0.3, "ZZII"), (0.2, "IIZZ")]);
        let schedule = MorphSchedule::new(MorphKind::Mixing, h0.clone(), h1, 0.25).unwrap();
        let circuit = AnsatzCircuit::hardware_efficient(n, 3, Entangler::Ring);

        let (theta, bits) = init_eigenstate_params(&schedule, &circuit, 0).unwrap();
        assert_eq!(bits, 0);
        let state = circuit.clone().with_initial_bits(bits).prepare(&theta).unwrap();
        let energy = h0.expectation(&state).unwrap().re;
        assert!((energy + n as f64).abs() < 1e-10, "ground energy {energy}");

        // first excited manifold: energy -N + 2
        let (theta1, bits1) = init_eigenstate_params(&schedule, &circuit, 1).unwrap();
        let state1 = circuit
            .clone()
            .with_initial_bits(bits1)
            .prepare(&theta1)
            .unwrap();
        let energy1 = h0.expectation(&state1).unwrap().re;
        assert!((energy1 + (n as f64 - 2.0)).abs() < 1e-10);
        // exact eigenstate certificate
        assert!(oracle::energy_variance(&h0, &state1).unwrap() < 1e-12);
    }

    #[test]
    fn init_unsupported_h0_rejected() {
        let h0 = zsum(2, &[(0.5, "XZ")]);
        let h1 = zsum(2, &[(1.0, "ZZ")]);
        let schedule = MorphSchedule::new(MorphKind::Mixing, h0, h1, 0.5).unwrap();
        let circuit = AnsatzCircuit::hardware_efficient(2, 1, Entangler::Ring);
        match init_eigenstate_params(&schedule, &circuit, 0) {
            Err(Error::NotAnalyticallySolvable(_)) => {}
            other => panic!("expected NotAnalyticallySolvable, got {other:?}"),
        }
    }

    #[test]
    fn single_qubit_mixing_reaches_ground_of_z() {
        // X -> Z mixing from |->: ground of Z is |1>
        let h0 = x_mixer(1);
        let h1 = zsum(1, &[(1.0, "Z")]);
        let schedule = MorphSchedule::new(MorphKind::Mixing, h0, h1, 0.1).unwrap();
        let circuit = AnsatzCircuit::hardware_efficient(1, 2, Entangler::Ring);
        let lm = LMConfig {
            locality: 1,
            pool_size: Some(3),
            max_iterations: 50,
            covariance_norm_tol: 1e-5,
            rng_seed: 3,
            ..LMConfig::default()
        };
        let options = AdiabaticOptions::default();
        let trajectory = adiabatic_covar_run(&schedule, &circuit, 0, &lm, &options).unwrap();
        assert_eq!(trajectory.records.len(), 11);
        let final_theta = &trajectory.final_record().theta;
        let state = circuit
            .clone()
            .with_initial_bits(trajectory.initial_bits)
            .prepare(final_theta)
            .unwrap();
        let fidelity = state.fidelity(&StateVector::basis(1, 1)).unwrap();
        assert!(fidelity > 1.0 - 1e-3, "fidelity {fidelity}");
    }

    #[test]
    fn handoff_is_bitwise_and_energies_consistent() {
        let h0 = zsum(2, &[(0.7, "ZI"), (-0.4, "IZ")]);
        let h1 = zsum(2, &[(0.3, "XX"), (0.3, "YY"), (0.3, "ZZ")]);
        let schedule = MorphSchedule::new(MorphKind::Perturbative, h0, h1, 0.25).unwrap();
        let circuit = AnsatzCircuit::hardware_efficient(2, 3, Entangler::Ring);
        let lm = LMConfig {
            max_iterations: 30,
            covariance_norm_tol: 1e-4,
            rng_seed: 8,
            ..LMConfig::default()
        };
        let options = AdiabaticOptions {
            track_oracle: true,
            ..AdiabaticOptions::default()
        };
        let trajectory = adiabatic_covar_run(&schedule, &circuit, 0, &lm, &options).unwrap();
        for pair in trajectory.records.windows(2) {
            assert_eq!(pair[1].theta_start, pair[0].theta, "handoff must be bitwise");
        }
        let run_circuit = circuit.clone().with_initial_bits(trajectory.initial_bits);
        for r in &trajectory.records {
            let state = run_circuit.prepare(&r.theta).unwrap();
            let h_t = schedule.hamiltonian_at(r.t).unwrap();
            let energy = h_t.expectation(&state).unwrap().re;
            assert!((energy - r.energy).abs() < 1e-10);
            assert!(r.delta_e.is_some() && r.level_index.is_some());
        }
    }

    #[test]
    fn constant_schedule_needs_no_iterations() {
        // h0 = h1 diagonal: every step starts converged, so the handoff keeps
        // the inner solver idle after exact initialization
        let h = zsum(2, &[(0.9, "ZI"), (0.4, "IZ")]);
        let schedule = MorphSchedule::new(MorphKind::Mixing, h.clone(), h, 0.25).unwrap();
        let circuit = AnsatzCircuit::hardware_efficient(2, 2, Entangler::Ring);
        let lm = LMConfig {
            rng_seed: 1,
            ..LMConfig::default()
        };
        let trajectory =
            adiabatic_covar_run(&schedule, &circuit, 0, &lm, &AdiabaticOptions::default()).unwrap();
        for r in &trajectory.records {
            assert_eq!(r.covar_iters, 0, "step {} should start converged", r.step_index);
        }
    }

    #[test]
    fn failing_step_aborts_with_partial_trajectory() {
        // an oversized pool request fails inside the first inner solve, after
        // the exact t = 0 record was written
        let h0 = zsum(1, &[(1.0, "Z")]);
        let h1 = zsum(1, &[(1.0, "X")]);
        let schedule = MorphSchedule::new(MorphKind::Mixing, h0, h1, 0.5).unwrap();
        let circuit = AnsatzCircuit::hardware_efficient(1, 1, Entangler::Ring);
        let lm = LMConfig {
            locality: 1,
            pool_size: Some(100),
            rng_seed: 0,
            ..LMConfig::default()
        };
        let abort = adiabatic_covar_run(&schedule, &circuit, 0, &lm, &AdiabaticOptions::default())
            .unwrap_err();
        assert_eq!(abort.failing_t, 0.5);
        assert_eq!(abort.partial.records.len(), 1);
        assert!(matches!(*abort.source, Error::PoolTooLarge { .. }));
    }
}
