//! The three Hamiltonian families with their morphing schedules: a random
//! field spin ring (perturbative), the lattice Schwinger model (mixing from a
//! uniform X mixer) and weighted max-cut (mixing from a uniform X mixer).

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::morph::{MorphKind, MorphSchedule};
use crate::pauli::{Pauli, PauliString, PauliSum};

fn uniform_x_mixer(num_qubits: usize) -> PauliSum {
    PauliSum::hermitian(
        num_qubits,
        (0..num_qubits)
            .map(|q| (1.0, PauliString::single(num_qubits, q, Pauli::X)))
            .collect(),
    )
    .expect("mixer is Hermitian")
}

fn two_site(num_qubits: usize, i: usize, j: usize, letter: Pauli) -> PauliString {
    let (phase, s) = PauliString::single(num_qubits, i, letter)
        .multiply(&PauliString::single(num_qubits, j, letter))
        .expect("equal lengths");
    debug_assert_eq!(phase.re, 1.0);
    s
}

fn zz(num_qubits: usize, i: usize, j: usize) -> PauliString {
    two_site(num_qubits, i, j, Pauli::Z)
}

/// Random field Heisenberg ring: onsite Z fields plus isotropic
/// nearest-neighbor coupling on a periodic ring.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpinRingSpec {
    pub num_qubits: usize,
    /// Coupling strength J of the sigma_i . sigma_{i+1} terms.
    pub coupling: f64,
    /// Onsite fields in [-1, 1]; sampled uniformly from the seed when absent.
    pub onsite: Option<Vec<f64>>,
    pub seed: u64,
}

impl SpinRingSpec {
    /// Paper-scale default instance: N = 10, J = 1.
    pub fn preset(seed: u64) -> Self {
        SpinRingSpec {
            num_qubits: 10,
            coupling: 1.0,
            onsite: None,
            seed,
        }
    }

    /// Resolve the onsite field vector (sampling if needed).
    pub fn resolve_onsite(&self) -> Result<Vec<f64>> {
        match &self.onsite {
            Some(c) => {
                if c.len() != self.num_qubits {
                    return Err(Error::InvalidModel(format!(
                        "onsite field has length {}, expected {}",
                        c.len(),
                        self.num_qubits
                    )));
                }
                if c.iter().any(|v| !(-1.0..=1.0).contains(v)) {
                    return Err(Error::InvalidModel(
                        "onsite fields must lie in [-1, 1]".into(),
                    ));
                }
                Ok(c.clone())
            }
            None => {
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                Ok((0..self.num_qubits)
                    .map(|_| rng.gen_range(-1.0..=1.0))
                    .collect())
            }
        }
    }
}

/// Build the spin ring Hamiltonian and its perturbative schedule
/// h0 = sum c_i Z_i, h1 = J sum sigma_i . sigma_{i+1}.
pub fn build_spin_ring(spec: &SpinRingSpec, delta_t: f64) -> Result<(PauliSum, MorphSchedule)> {
    let n = spec.num_qubits;
    if n < 3 {
        return Err(Error::InvalidModel(
            "spin ring needs at least 3 sites (N = 2 doubles the edge)".into(),
        ));
    }
    let onsite = spec.resolve_onsite()?;
    let h0 = PauliSum::hermitian(
        n,
        onsite
            .iter()
            .enumerate()
            .map(|(q, &c)| (c, PauliString::single(n, q, Pauli::Z)))
            .collect(),
    )?;
    let mut coupling_terms = Vec::with_capacity(3 * n);
    for i in 0..n {
        let j = (i + 1) % n;
        for letter in [Pauli::X, Pauli::Y, Pauli::Z] {
            coupling_terms.push((spec.coupling, two_site(n, i, j, letter)));
        }
    }
    let h1 = PauliSum::hermitian(n, coupling_terms)?;
    let full = h0.add(&h1)?;
    let schedule = MorphSchedule::new(MorphKind::Perturbative, h0, h1, delta_t)?;
    Ok((full, schedule))
}

/// Lattice Schwinger model mapped to spins (Gauss law + Jordan-Wigner).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SchwingerSpec {
    pub num_sites: usize,
    pub coupling: f64,
    pub hopping: f64,
    pub mass: f64,
    /// Topological angle in radians.
    pub theta_angle: f64,
}

impl SchwingerSpec {
    /// Default instance: J = 1.0, w = 0.1, m = 0.1, theta = 0 on 5 sites.
    pub fn preset() -> Self {
        SchwingerSpec {
            num_sites: 5,
            coupling: 1.0,
            hopping: 0.1,
            mass: 0.1,
            theta_angle: 0.0,
        }
    }
}

/// Build the Schwinger Hamiltonian H_ZZ + H_± + H_Z and its mixing schedule
/// from the uniform X mixer.
///
/// Sites are 1-based in the sums below and map to qubits 0..N-1. The H_ZZ
/// inner sum uses strict k < l: the k = l self-pairs are identity shifts with
/// no dynamical content and are dropped.
pub fn build_schwinger(spec: &SchwingerSpec, delta_t: f64) -> Result<(PauliSum, MorphSchedule)> {
    let n = spec.num_sites;
    if n < 2 {
        return Err(Error::InvalidModel("Schwinger model needs N >= 2".into()));
    }
    let j = spec.coupling;
    let w = spec.hopping;
    let m = spec.mass;
    let theta = spec.theta_angle;
    let mut terms: Vec<(f64, PauliString)> = Vec::new();

    // H_ZZ = (J/2) sum_{n=2}^{N-1} sum_{1 <= k < l <= n} Z_k Z_l
    for upper in 2..=n.saturating_sub(1) {
        for k in 1..=upper {
            for l in (k + 1)..=upper {
                terms.push((0.5 * j, zz(n, k - 1, l - 1)));
            }
        }
    }

    // H_± = (J/2) sum_{n=1}^{N-1} [w - (-1)^n (m/2) sin theta] (X_n X_{n+1} + Y_n Y_{n+1})
    for site in 1..=(n - 1) {
        let alternating = if site % 2 == 0 { 1.0 } else { -1.0 };
        let coeff = 0.5 * j * (w - alternating * 0.5 * m * theta.sin());
        terms.push((coeff, two_site(n, site - 1, site, Pauli::X)));
        terms.push((coeff, two_site(n, site - 1, site, Pauli::Y)));
    }

    // H_Z = (m cos theta / 2) sum_n (-1)^n Z_n - (J/2) sum_{n odd} sum_{l <= n} Z_l
    for site in 1..=n {
        let sign = if site % 2 == 0 { 1.0 } else { -1.0 };
        terms.push((0.5 * m * theta.cos() * sign, PauliString::single(n, site - 1, Pauli::Z)));
    }
    for site in 1..=(n - 1) {
        if site % 2 == 1 {
            for l in 1..=site {
                terms.push((-0.5 * j, PauliString::single(n, l - 1, Pauli::Z)));
            }
        }
    }

    let h = PauliSum::hermitian(n, terms)?;
    let schedule = MorphSchedule::new(MorphKind::Mixing, uniform_x_mixer(n), h.clone(), delta_t)?;
    Ok((h, schedule))
}

/// Weighted max-cut encoding: onsite and pairwise Z weights in [0, 1].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MaxCutSpec {
    pub num_qubits: usize,
    /// Onsite weights w_i; sampled uniformly from [0, 1] when absent.
    pub onsite: Option<Vec<f64>>,
    /// Upper-triangular pair weights w_ij in lexicographic edge order;
    /// sampled when absent.
    pub pair: Option<Vec<f64>>,
    /// Number of weighted edges: that many pairs are drawn uniformly without
    /// replacement and given uniform weights, the rest stay zero (None
    /// weights every edge independently).
    pub distinct_pair_weights: Option<usize>,
    pub seed: u64,
}

impl MaxCutSpec {
    /// Default instance: N = 8 with 14 distinct pair weights.
    pub fn preset(seed: u64) -> Self {
        MaxCutSpec {
            num_qubits: 8,
            onsite: None,
            pair: None,
            distinct_pair_weights: Some(14),
            seed,
        }
    }

    fn edge_count(&self) -> usize {
        self.num_qubits * (self.num_qubits - 1) / 2
    }

    /// Resolve (onsite, pair) weight vectors, sampling missing ones.
    pub fn resolve_weights(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let onsite = match &self.onsite {
            Some(w) => {
                if w.len() != self.num_qubits {
                    return Err(Error::InvalidModel(format!(
                        "onsite weights have length {}, expected {}",
                        w.len(),
                        self.num_qubits
                    )));
                }
                w.clone()
            }
            None => (0..self.num_qubits).map(|_| rng.gen_range(0.0..=1.0)).collect(),
        };
        let pair = match &self.pair {
            Some(w) => {
                if w.len() != self.edge_count() {
                    return Err(Error::InvalidModel(format!(
                        "pair weights have length {}, expected {}",
                        w.len(),
                        self.edge_count()
                    )));
                }
                w.clone()
            }
            None => match self.distinct_pair_weights {
                Some(edges) => {
                    let count = self.edge_count();
                    if edges > count {
                        return Err(Error::InvalidModel(format!(
                            "{edges} weighted edges requested but only {count} pairs exist"
                        )));
                    }
                    let mut pair = vec![0.0f64; count];
                    let chosen = rand::seq::index::sample(&mut rng, count, edges);
                    for idx in chosen {
                        pair[idx] = rng.gen_range(0.0..=1.0);
                    }
                    pair
                }
                None => (0..self.edge_count()).map(|_| rng.gen_range(0.0..=1.0)).collect(),
            },
        };
        for v in onsite.iter().chain(pair.iter()) {
            if !(0.0..=1.0).contains(v) {
                return Err(Error::InvalidModel(
                    "max-cut weights must lie in [0, 1]".into(),
                ));
            }
        }
        Ok((onsite, pair))
    }
}

/// Build the diagonal max-cut Hamiltonian and its mixing schedule from the
/// uniform X mixer.
pub fn build_maxcut(spec: &MaxCutSpec, delta_t: f64) -> Result<(PauliSum, MorphSchedule)> {
    let n = spec.num_qubits;
    if n < 2 {
        return Err(Error::InvalidModel("max-cut needs at least 2 qubits".into()));
    }
    let (onsite, pair) = spec.resolve_weights()?;
    let mut terms: Vec<(f64, PauliString)> = onsite
        .iter()
        .enumerate()
        .map(|(q, &w)| (w, PauliString::single(n, q, Pauli::Z)))
        .collect();
    let mut edge = 0usize;
    for i in 0..n {
        for jq in (i + 1)..n {
            terms.push((pair[edge], zz(n, i, jq)));
            edge += 1;
        }
    }
    let h = PauliSum::hermitian(n, terms)?;
    let schedule = MorphSchedule::new(MorphKind::Mixing, uniform_x_mixer(n), h.clone(), delta_t)?;
    Ok((h, schedule))
}

/// Brute-force ground energy of a diagonal Hamiltonian over all bitstrings.
pub fn diagonal_ground_energy(h: &PauliSum) -> Result<(f64, u64)> {
    if !h.is_diagonal() {
        return Err(Error::InvalidModel(
            "brute-force enumeration needs a diagonal Hamiltonian".into(),
        ));
    }
    let n = h.num_qubits();
    assert!(n <= 24, "enumeration over 2^{n} states is not tractable");
    let mut best = (f64::INFINITY, 0u64);
    for b in 0..(1u64 << n) {
        let e = crate::morph::diagonal_energy(h, b);
        if e < best.0 {
            best = (e, b);
        }
    }
    Ok(best)
}
