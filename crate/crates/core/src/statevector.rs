//! Normalized 2^N-amplitude state vectors.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

/// Norm tolerance for the normalization invariant.
pub const NORM_TOL: f64 = 1e-10;

/// Statevector memory cap; 2^24 amplitudes is 256 MiB.
pub const MAX_SIM_QUBITS: usize = 24;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
    num_qubits: usize,
}

impl StateVector {
    /// Computational basis state |bits>; bit q of `bits` is qubit q.
    pub fn basis(num_qubits: usize, bits: u64) -> Self {
        assert!(num_qubits <= MAX_SIM_QUBITS);
        let dim = 1usize << num_qubits;
        assert!((bits as usize) < dim, "basis index out of range");
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[bits as usize] = Complex64::new(1.0, 0.0);
        StateVector {
            amplitudes,
            num_qubits,
        }
    }

    /// |0...0>.
    pub fn zero_state(num_qubits: usize) -> Self {
        Self::basis(num_qubits, 0)
    }

    /// Wrap raw amplitudes without checking the norm. Callers that hand over
    /// non-normalized data must normalize before using expectation values.
    pub fn from_raw(amplitudes: Vec<Complex64>, num_qubits: usize) -> Self {
        debug_assert_eq!(amplitudes.len(), 1usize << num_qubits);
        StateVector {
            amplitudes,
            num_qubits,
        }
    }

    /// Validated constructor: length must be 2^N and the norm must be 1
    /// within 1e-10.
    pub fn new(amplitudes: Vec<Complex64>, num_qubits: usize) -> Result<Self> {
        if amplitudes.len() != 1usize << num_qubits {
            return Err(Error::DimensionMismatch {
                expected: 1usize << num_qubits,
                got: amplitudes.len(),
                context: "statevector length",
            });
        }
        let s = StateVector {
            amplitudes,
            num_qubits,
        };
        s.require_normalized()?;
        Ok(s)
    }

    /// Haar-ish random state: i.i.d. complex Gaussian amplitudes, normalized.
    pub fn random_haar(num_qubits: usize, seed: u64) -> Self {
        use rand::SeedableRng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dim = 1usize << num_qubits;
        let mut amplitudes = Vec::with_capacity(dim);
        for _ in 0..dim {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            amplitudes.push(Complex64::new(re, im));
        }
        let mut s = StateVector {
            amplitudes,
            num_qubits,
        };
        s.renormalize();
        s
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn require_normalized(&self) -> Result<()> {
        let norm = self.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::DimensionMismatch {
                expected: 1,
                got: 0,
                context: "statevector not normalized",
            });
        }
        Ok(())
    }

    pub(crate) fn renormalize(&mut self) {
        let norm = self.norm();
        if norm > 0.0 {
            for a in &mut self.amplitudes {
                *a /= norm;
            }
        }
    }

    /// <self|other>.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.num_qubits != other.num_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.num_qubits,
                got: other.num_qubits,
                context: "inner product",
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// |<self|other>|^2.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// Sample a basis index from |amplitude|^2 with the supplied RNG.
    pub fn sample_basis<R: Rng>(&self, rng: &mut R) -> u64 {
        let u: f64 = rng.gen::<f64>();
        let mut acc = 0.0;
        for (idx, a) in self.amplitudes.iter().enumerate() {
            acc += a.norm_sqr();
            if u < acc {
                return idx as u64;
            }
        }
        (self.amplitudes.len() - 1) as u64
    }
}
