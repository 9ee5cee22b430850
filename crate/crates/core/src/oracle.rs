//! Dense diagonalization for small systems: spectra, minimum gaps, transition
//! amplitudes, level indices and energy-variance eigenstate certificates.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::morph::MorphSchedule;
use crate::pauli::PauliSum;
use crate::statevector::StateVector;

/// Dense diagonalization cap: 2^14 x 2^14 is the largest tractable matrix.
pub const MAX_DENSE_QUBITS: usize = 14;

/// Gaps below this are treated as exact degeneracies.
const DEGENERACY_TOL: f64 = 1e-12;

/// Full spectrum of a Hermitian Pauli sum, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
    eigenvectors: Option<Vec<StateVector>>,
    num_qubits: usize,
}

impl Spectrum {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn ground_energy(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    /// Eigenvectors matching the ascending eigenvalue order; present only
    /// when requested at diagonalization time.
    pub fn eigenvectors(&self) -> Option<&[StateVector]> {
        self.eigenvectors.as_deref()
    }

    /// Index of the eigenvalue nearest to `energy`; ties break toward the
    /// lower index.
    pub fn level_index(&self, energy: f64) -> usize {
        level_index(energy, self)
    }

    /// Distance from `energy` to the nearest eigenvalue.
    pub fn nearest_distance(&self, energy: f64) -> f64 {
        (self.eigenvalues[self.level_index(energy)] - energy).abs()
    }
}

/// Minimum-gap scan report for a morphing schedule.
#[derive(Debug, Clone, serde::Serialize)]
pub struct GapReport {
    /// min over the grid of E_1(s) - E_0(s); 0 when degenerate on the grid.
    pub g_min: f64,
    /// Grid location of the minimum.
    pub s_at_min: f64,
    /// max over the grid of |<psi_1| dH/ds |psi_0>|.
    pub epsilon_transition: f64,
    /// Conventional adiabatic time bound epsilon / g_min^2 (infinite when
    /// degenerate).
    pub t_bound: f64,
}

/// Dense Hermitian matrix of a Pauli sum (qubit 0 = least significant bit).
pub fn dense_matrix(h: &PauliSum) -> Result<DMatrix<Complex64>> {
    let n = h.num_qubits();
    if n > MAX_DENSE_QUBITS {
        return Err(Error::CapacityExceeded {
            num_qubits: n,
            max: MAX_DENSE_QUBITS,
        });
    }
    let dim = 1usize << n;
    let mut m = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
    for t in h.terms() {
        let x = t.string.x_mask();
        let z = t.string.z_mask();
        let y_count = (x & z).count_ones() % 4;
        let i_pow = match y_count {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
        for col in 0..dim {
            let row = col ^ x as usize;
            let sign = 1.0 - 2.0 * (((col as u64 & z).count_ones() & 1) as f64);
            m[(row, col)] += t.coefficient * i_pow * sign;
        }
    }
    Ok(m)
}

/// Full real spectrum of a Hermitian Pauli sum; set `with_vectors` to also
/// return the matching orthonormal eigenvectors.
pub fn diagonalize(h: &PauliSum, with_vectors: bool) -> Result<Spectrum> {
    h.require_hermitian()?;
    let m = dense_matrix(h)?;
    let dim = m.nrows();
    let eig = m.symmetric_eigen();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let eigenvectors = if with_vectors {
        Some(
            order
                .iter()
                .map(|&i| {
                    let col: Vec<Complex64> = eig.eigenvectors.column(i).iter().cloned().collect();
                    StateVector::from_raw(col, h.num_qubits())
                })
                .collect(),
        )
    } else {
        None
    };
    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
        num_qubits: h.num_qubits(),
    })
}

/// Scan the schedule on a uniform grid, returning the minimum E1 - E0 gap,
/// its location, the maximum transition amplitude of dH/ds, and the
/// conventional adiabatic bound.
pub fn gap_and_epsilon(schedule: &MorphSchedule, grid_points: usize) -> Result<GapReport> {
    assert!(grid_points >= 2, "need at least 2 grid points");
    let drive = schedule.drive_term()?;
    let scans: Vec<(f64, f64, f64)> = (0..grid_points)
        .into_par_iter()
        .map(|i| -> Result<(f64, f64, f64)> {
            let s = i as f64 / (grid_points - 1) as f64;
            let h = schedule.hamiltonian_at(s)?;
            let spectrum = diagonalize(&h, true)?;
            let vectors = spectrum.eigenvectors().unwrap();
            let gap = spectrum.eigenvalues()[1] - spectrum.eigenvalues()[0];
            let driven = drive.apply(&vectors[0])?;
            let amp = vectors[1].inner(&driven)?.norm();
            Ok((s, gap, amp))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut g_min = f64::INFINITY;
    let mut s_at_min = 0.0;
    let mut epsilon_transition = 0.0f64;
    for (s, gap, amp) in scans {
        if gap < g_min {
            g_min = gap;
            s_at_min = s;
        }
        epsilon_transition = epsilon_transition.max(amp);
    }
    let (g_min, t_bound) = if g_min < DEGENERACY_TOL {
        (0.0, f64::INFINITY)
    } else {
        (g_min, epsilon_transition / (g_min * g_min))
    };
    Ok(GapReport {
        g_min,
        s_at_min,
        epsilon_transition,
        t_bound,
    })
}

/// Instantaneous eigenvalue index nearest to `energy`.
pub fn level_index(energy: f64, spectrum: &Spectrum) -> usize {
    assert!(!spectrum.eigenvalues.is_empty());
    let mut best = 0usize;
    let mut best_dist = f64::INFINITY;
    for (k, e) in spectrum.eigenvalues.iter().enumerate() {
        let dist = (e - energy).abs();
        if dist < best_dist {
            best_dist = dist;
            best = k;
        }
    }
    best
}

/// <H^2> - <H>^2, matrix-free, clipped at zero against rounding.
pub fn energy_variance(h: &PauliSum, s: &StateVector) -> Result<f64> {
    s.require_normalized()?;
    let hs = h.apply(s)?;
    let mean = s.inner(&hs)?.re;
    let second = hs.inner(&hs)?.re;
    Ok((second - mean * mean).max(0.0))
}

/// Eigenvalue columns over a uniform schedule grid, for spectrum export.
pub fn spectrum_scan(schedule: &MorphSchedule, grid_points: usize) -> Result<Vec<(f64, Vec<f64>)>> {
    assert!(grid_points >= 2);
    (0..grid_points)
        .into_par_iter()
        .map(|i| {
            let s = i as f64 / (grid_points - 1) as f64;
            let h = schedule.hamiltonian_at(s)?;
            let spectrum = diagonalize(&h, false)?;
            Ok((s, spectrum.eigenvalues().to_vec()))
        })
        .collect()
}

/// Per-eigenvalue energy expectation vector used by tests.
pub fn eigen_residual(h: &PauliSum, spectrum: &Spectrum) -> Result<f64> {
    let dense = dense_matrix(h)?;
    let vectors = spectrum
        .eigenvectors()
        .expect("residual check needs eigenvectors");
    let mut worst: f64 = 0.0;
    for (k, v) in vectors.iter().enumerate() {
        let amps = DVector::from_column_slice(v.amplitudes());
        let hv = &dense * &amps;
        let resid = (&hv - amps * Complex64::new(spectrum.eigenvalues()[k], 0.0)).norm();
        worst = worst.max(resid);
    }
    Ok(worst)
}
