//! Eigenstate preparation for spin-type Hamiltonians by combining discrete
//! adiabatic Hamiltonian morphing with covariance root finding.
//!
//! The solver drives a hardware-efficient variational circuit so that the
//! covariances of a pool of local Pauli operators with the Hamiltonian vanish
//! jointly, which certifies an eigenstate. An outer loop morphs a trivially
//! solvable Hamiltonian into the target in discrete steps, handing each
//! step's final parameters to the next, so the inner root search is always
//! warm started near an instantaneous eigenstate.
//!
//! # Layout
//!
//! - [`pauli`]: Pauli-string algebra, weighted sums, matrix-free application
//! - [`statevector`]: normalized 2^N-amplitude states
//! - [`ansatz`]: layered circuits and parameter-shift derivatives
//! - [`covar`]: operator pools, covariance systems, the stochastic LM solver
//! - [`shadows`]: randomized single-qubit-basis measurement estimation
//! - [`morph`]: morphing schedules, analytic initialization, the outer loop
//! - [`models`]: spin ring, lattice Schwinger and weighted max-cut builders
//! - [`oracle`]: dense diagonalization, gap scans, variance certificates
//! - [`baselines`]: VQE / VQD / adiabatic-VQE comparison arms
//! - [`harness`]: config-driven experiment runner with CSV/JSON outputs

pub mod ansatz;
pub mod baselines;
pub mod covar;
pub mod error;
pub mod harness;
pub mod models;
pub mod morph;
pub mod oracle;
pub mod pauli;
pub mod shadows;
pub mod statevector;

pub use error::{Error, Result};
