//! Error types shared across the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Error, Debug)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got} ({context})")]
    DimensionMismatch {
        expected: usize,
        got: usize,
        context: &'static str,
    },

    #[error("parameter vector has length {got}, circuit expects {expected}")]
    ParameterCount { expected: usize, got: usize },

    #[error("parameter index {index} out of range for {count} parameters")]
    ParameterIndex { index: usize, count: usize },

    #[error("coefficient must be finite, got {value}")]
    NonFiniteCoefficient { value: String },

    #[error("Hamiltonian must be Hermitian: term {term} has imaginary coefficient {imag:e}")]
    NonHermitian { term: String, imag: f64 },

    #[error("requested pool of {requested} operators but only {available} are enumerable")]
    PoolTooLarge { requested: usize, available: usize },

    #[error("normal matrix is singular at damping 0; retry with damping > 0")]
    IllConditioned,

    #[error("parameters became non-finite after an update (last finite values retained)")]
    Divergence { last_theta: Vec<f64> },

    #[error("dense diagonalization supports at most {max} qubits, got {num_qubits}")]
    CapacityExceeded { num_qubits: usize, max: usize },

    #[error("initial Hamiltonian is not analytically solvable: {0}")]
    NotAnalyticallySolvable(String),

    #[error("morph time {t} outside [0, 1]")]
    TimeOutOfRange { t: f64 },

    #[error("level {level} out of range for {num_states} states")]
    LevelOutOfRange { level: usize, num_states: usize },

    #[error("invalid model specification: {0}")]
    InvalidModel(String),

    #[error("invalid configuration field `{field}`: {reason}")]
    InvalidConfig { field: String, reason: String },

    #[error("parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error("step size linesearch exhausted all candidates; best error {best_error:e} at dt {best_dt}")]
    LinesearchExhausted { best_dt: f64, best_error: f64 },

    #[error("fit requires at least 2 points with positive gap and dt, got {0}")]
    FitUnderdetermined(usize),

    #[error("adiabatic run diverged at t = {t}")]
    MorphDiverged { t: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
