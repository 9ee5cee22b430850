//! Classical Pauli shadows: simulated random single-qubit-basis measurements
//! and the standard local inverse-channel estimator.
//!
//! This is the shot-level measurement model behind the covariance estimates;
//! the solver's default inner loop uses the Gaussian surrogate in
//! [`crate::covar::inject_shot_noise`] instead, matching how the numerics are
//! normally run.

use num_complex::Complex64;
use rand::Rng;

use crate::error::Result;
use crate::pauli::{Pauli, PauliString};
use crate::statevector::StateVector;

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Measurement basis drawn per qubit per shot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Basis {
    X,
    Y,
    Z,
}

/// Rotate `amps` in place so the chosen product basis becomes computational.
fn rotate_to_basis(amps: &mut [Complex64], qubit: usize, basis: Basis) {
    let bit = 1usize << qubit;
    match basis {
        Basis::Z => {}
        Basis::X => {
            // Hadamard
            for j in 0..amps.len() {
                if j & bit == 0 {
                    let a0 = amps[j];
                    let a1 = amps[j | bit];
                    amps[j] = (a0 + a1) * FRAC_1_SQRT_2;
                    amps[j | bit] = (a0 - a1) * FRAC_1_SQRT_2;
                }
            }
        }
        Basis::Y => {
            // S-dagger then Hadamard: maps |±i> to |0>, |1>
            for j in 0..amps.len() {
                if j & bit != 0 {
                    amps[j] *= Complex64::new(0.0, -1.0);
                }
            }
            rotate_to_basis(amps, qubit, Basis::X);
        }
    }
}

/// Simulate `shots` single-shot random-Pauli-basis measurements of `state`
/// and return the local-shadow estimate of each observable: a factor of
/// 3 x (±1 outcome) per non-identity letter whose basis matched, averaged
/// over shots. Unbiased; the identity observable is exactly 1.
pub fn shadow_estimate_expectations<R: Rng>(
    state: &StateVector,
    observables: &[PauliString],
    shots: u64,
    rng: &mut R,
) -> Result<Vec<f64>> {
    assert!(shots >= 1);
    state.require_normalized()?;
    let n = state.num_qubits();
    let mut sums = vec![0.0f64; observables.len()];
    let mut bases = vec![Basis::Z; n];
    let mut work: Vec<Complex64> = Vec::with_capacity(state.dim());

    for _ in 0..shots {
        for b in bases.iter_mut() {
            *b = match rng.gen_range(0..3u8) {
                0 => Basis::X,
                1 => Basis::Y,
                _ => Basis::Z,
            };
        }
        work.clear();
        work.extend_from_slice(state.amplitudes());
        for (q, &basis) in bases.iter().enumerate() {
            if basis != Basis::Z {
                rotate_to_basis(&mut work, q, basis);
            }
        }
        // sample an outcome bitstring from the rotated distribution
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        let mut outcome = (work.len() - 1) as u64;
        for (idx, amp) in work.iter().enumerate() {
            acc += amp.norm_sqr();
            if u < acc {
                outcome = idx as u64;
                break;
            }
        }

        for (o, obs) in observables.iter().enumerate() {
            let mut estimate = 1.0f64;
            for q in 0..n {
                let letter = obs.letter(q);
                if letter == Pauli::I {
                    continue;
                }
                let matched = matches!(
                    (letter, bases[q]),
                    (Pauli::X, Basis::X) | (Pauli::Y, Basis::Y) | (Pauli::Z, Basis::Z)
                );
                if !matched {
                    estimate = 0.0;
                    break;
                }
                let eigen = 1.0 - 2.0 * ((outcome >> q) & 1) as f64;
                estimate *= 3.0 * eigen;
            }
            sums[o] += estimate;
        }
    }
    Ok(sums.into_iter().map(|s| s / shots as f64).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_observable_is_exact() {
        let state = StateVector::random_haar(3, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let est = shadow_estimate_expectations(
            &state,
            &[PauliString::identity(3)],
            50,
            &mut rng,
        )
        .unwrap();
        assert_eq!(est[0], 1.0);
    }

    #[test]
    fn z_on_zero_state_within_tolerance() {
        let state = StateVector::zero_state(3);
        let shots = 100_000u64;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let z0 = PauliString::parse("ZII").unwrap();
        let est = shadow_estimate_expectations(&state, &[z0], shots, &mut rng).unwrap();
        let tol = 5.0 * (2.0 / shots as f64).sqrt();
        assert!((est[0] - 1.0).abs() < tol, "estimate {} vs 1", est[0]);
    }

    #[test]
    fn x_on_zero_state_within_tolerance() {
        let state = StateVector::zero_state(3);
        let shots = 100_000u64;
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let x0 = PauliString::parse("XII").unwrap();
        let est = shadow_estimate_expectations(&state, &[x0], shots, &mut rng).unwrap();
        let tol = 5.0 * (2.0 / shots as f64).sqrt();
        assert!(est[0].abs() < tol, "estimate {} vs 0", est[0]);
    }

    #[test]
    fn estimator_is_unbiased_on_entangled_state() {
        // GHZ-ish state; compare against exact expectations
        let inv = std::f64::consts::FRAC_1_SQRT_2;
        let mut amps = vec![Complex64::new(0.0, 0.0); 4];
        amps[0] = Complex64::new(inv, 0.0);
        amps[3] = Complex64::new(inv, 0.0);
        let state = StateVector::new(amps, 2).unwrap();
        let observables = vec![
            PauliString::parse("XX").unwrap(),
            PauliString::parse("ZZ").unwrap(),
            PauliString::parse("ZI").unwrap(),
        ];
        let shots = 60_000u64;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let est =
            shadow_estimate_expectations(&state, &observables, shots, &mut rng).unwrap();
        let exact = [1.0, 1.0, 0.0];
        for (i, (got, want)) in est.iter().zip(&exact).enumerate() {
            // weight-2 estimators have per-shot variance up to 9
            let tol = 5.0 * (9.0f64 / shots as f64).sqrt();
            assert!((got - want).abs() < tol, "obs {i}: {got} vs {want}");
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let state = StateVector::random_haar(2, 9);
        let obs = vec![PauliString::parse("XY").unwrap()];
        let mut rng1 = ChaCha8Rng::seed_from_u64(7);
        let mut rng2 = ChaCha8Rng::seed_from_u64(7);
        let a = shadow_estimate_expectations(&state, &obs, 500, &mut rng1).unwrap();
        let b = shadow_estimate_expectations(&state, &obs, 500, &mut rng2).unwrap();
        assert_eq!(a, b);
    }
}
