//! Hardware-efficient ansatz circuits and parameter-shift derivatives.
//!
//! A circuit is an ordered gate list; the standard layout stacks identical
//! layers of [entangler ring, Ry on every qubit, Rz on every qubit]. The
//! entanglers come first within each layer so that a final-layer rotation row
//! is never followed by a CZ: basis-state inputs pass through every entangler
//! with at most a global sign, which keeps theta = 0 an exact computational
//! basis preparation and lets eigenstates of a uniform X mixer be prepared
//! exactly by a single row of Ry(±pi/2) angles.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::PauliString;
use crate::statevector::StateVector;

/// Entangling pattern of the hardware-efficient layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Entangler {
    /// CZ between qubit i and i+1 mod N (open chain when N = 2).
    Ring,
    /// CZ between qubit i and i+1 for i < N-1.
    Chain,
    /// CZ on every unordered pair. Matches complete-coupling Hamiltonians;
    /// ring layers need ~N/2 extra depth to route the same correlations.
    All,
}

/// One gate in the circuit. Rotations reference a parameter slot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    Ry { qubit: usize, param: usize },
    Rz { qubit: usize, param: usize },
    Cz { a: usize, b: usize },
}

/// Gate content of the hardware-efficient layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnsatzStyle {
    /// Per layer: entangler, Ry on every qubit, Rz on every qubit.
    #[default]
    RyRz,
    /// Per layer: two [entangler, Ry row] sublayers. Same parameter count;
    /// all gates are real, which spends no parameters on phases when the
    /// target Hamiltonian is a real symmetric matrix (every model here is).
    RealAmplitudes,
}

/// Layered parameterised circuit mapping a parameter vector to a state.
#[derive(Debug, Clone, PartialEq)]
pub struct AnsatzCircuit {
    num_qubits: usize,
    num_layers: usize,
    gates: Vec<Gate>,
    num_parameters: usize,
    initial_bits: u64,
}

impl AnsatzCircuit {
    /// Standard layout: `num_layers` copies of [entangler, Ry row, Rz row].
    /// Parameter count is 2 * N * L; layer l uses slots [2Nl, 2N(l+1)).
    pub fn hardware_efficient(
        num_qubits: usize,
        num_layers: usize,
        entangler: Entangler,
    ) -> Self {
        Self::layered(num_qubits, num_layers, entangler, AnsatzStyle::RyRz)
    }

    /// Real-amplitude layout: `num_layers` copies of two [entangler, Ry row]
    /// sublayers. Parameter count is also 2 * N * L.
    pub fn real_amplitudes(
        num_qubits: usize,
        num_layers: usize,
        entangler: Entangler,
    ) -> Self {
        Self::layered(num_qubits, num_layers, entangler, AnsatzStyle::RealAmplitudes)
    }

    /// Layered constructor behind both styles.
    pub fn layered(
        num_qubits: usize,
        num_layers: usize,
        entangler: Entangler,
        style: AnsatzStyle,
    ) -> Self {
        assert!(num_qubits >= 1);
        assert!(num_layers >= 1);
        let edges = entangler_edges(num_qubits, entangler);
        let mut gates = Vec::new();
        for layer in 0..num_layers {
            let base = 2 * num_qubits * layer;
            match style {
                AnsatzStyle::RyRz => {
                    for &(a, b) in &edges {
                        gates.push(Gate::Cz { a, b });
                    }
                    for q in 0..num_qubits {
                        gates.push(Gate::Ry {
                            qubit: q,
                            param: base + q,
                        });
                    }
                    for q in 0..num_qubits {
                        gates.push(Gate::Rz {
                            qubit: q,
                            param: base + num_qubits + q,
                        });
                    }
                }
                AnsatzStyle::RealAmplitudes => {
                    for sublayer in 0..2 {
                        for &(a, b) in &edges {
                            gates.push(Gate::Cz { a, b });
                        }
                        for q in 0..num_qubits {
                            gates.push(Gate::Ry {
                                qubit: q,
                                param: base + sublayer * num_qubits + q,
                            });
                        }
                    }
                }
            }
        }
        AnsatzCircuit {
            num_qubits,
            num_layers,
            gates,
            num_parameters: 2 * num_qubits * num_layers,
            initial_bits: 0,
        }
    }

    /// Arbitrary gate list. Every parameter slot in [0, max+1) must be used
    /// exactly once.
    pub fn from_gates(num_qubits: usize, gates: Vec<Gate>) -> Result<Self> {
        let mut used: Vec<usize> = Vec::new();
        for g in &gates {
            match g {
                Gate::Ry { qubit, param } | Gate::Rz { qubit, param } => {
                    if *qubit >= num_qubits {
                        return Err(Error::DimensionMismatch {
                            expected: num_qubits,
                            got: *qubit,
                            context: "gate qubit index",
                        });
                    }
                    used.push(*param);
                }
                Gate::Cz { a, b } => {
                    if *a >= num_qubits || *b >= num_qubits || a == b {
                        return Err(Error::DimensionMismatch {
                            expected: num_qubits,
                            got: (*a).max(*b),
                            context: "entangler qubit pair",
                        });
                    }
                }
            }
        }
        let num_parameters = used.len();
        used.sort_unstable();
        for (expect, got) in used.iter().enumerate() {
            if expect != *got {
                return Err(Error::ParameterIndex {
                    index: *got,
                    count: num_parameters,
                });
            }
        }
        Ok(AnsatzCircuit {
            num_qubits,
            num_layers: 1,
            gates,
            num_parameters,
            initial_bits: 0,
        })
    }

    /// Same circuit applied to |bits> instead of |0...0>.
    pub fn with_initial_bits(mut self, bits: u64) -> Self {
        assert!((bits as usize) < (1usize << self.num_qubits));
        self.initial_bits = bits;
        self
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn num_layers(&self) -> usize {
        self.num_layers
    }

    pub fn num_parameters(&self) -> usize {
        self.num_parameters
    }

    pub fn initial_bits(&self) -> u64 {
        self.initial_bits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    /// U(theta)|initial_bits>. Deterministic; preserves the norm exactly up
    /// to rounding.
    pub fn prepare(&self, theta: &[f64]) -> Result<StateVector> {
        self.prepare_from_bits(theta, self.initial_bits)
    }

    /// U(theta)|bits> for an explicit basis input.
    pub fn prepare_from_bits(&self, theta: &[f64], bits: u64) -> Result<StateVector> {
        if theta.len() != self.num_parameters {
            return Err(Error::ParameterCount {
                expected: self.num_parameters,
                got: theta.len(),
            });
        }
        let mut state = StateVector::basis(self.num_qubits, bits);
        for gate in &self.gates {
            apply_gate(&mut state, gate, theta);
        }
        Ok(state)
    }

    /// d<p>/d theta_l via the parameter-shift rule
    /// (half the difference of expectations at theta_l ± pi/2).
    pub fn param_shift_derivative(
        &self,
        theta: &[f64],
        l: usize,
        p: &PauliString,
    ) -> Result<f64> {
        if l >= self.num_parameters {
            return Err(Error::ParameterIndex {
                index: l,
                count: self.num_parameters,
            });
        }
        let mut shifted = theta.to_vec();
        shifted[l] = theta[l] + std::f64::consts::FRAC_PI_2;
        let plus = p.expectation(&self.prepare(&shifted)?)?;
        shifted[l] = theta[l] - std::f64::consts::FRAC_PI_2;
        let minus = p.expectation(&self.prepare(&shifted)?)?;
        Ok(0.5 * (plus.re - minus.re))
    }
}

/// Edges of the entangling pattern, deduplicated and order-normalized.
pub fn entangler_edges(num_qubits: usize, entangler: Entangler) -> Vec<(usize, usize)> {
    match entangler {
        Entangler::Chain => (0..num_qubits.saturating_sub(1)).map(|i| (i, i + 1)).collect(),
        Entangler::Ring => {
            if num_qubits < 3 {
                // ring degenerates to a chain (a doubled edge otherwise)
                return entangler_edges(num_qubits, Entangler::Chain);
            }
            (0..num_qubits).map(|i| (i, (i + 1) % num_qubits)).collect()
        }
        Entangler::All => {
            let mut edges = Vec::new();
            for i in 0..num_qubits {
                for j in (i + 1)..num_qubits {
                    edges.push((i, j));
                }
            }
            edges
        }
    }
}

fn apply_gate(state: &mut StateVector, gate: &Gate, theta: &[f64]) {
    let n = state.num_qubits();
    let amps = state.amplitudes_mut();
    match *gate {
        Gate::Ry { qubit, param } => {
            let half = theta[param] * 0.5;
            let (s, c) = half.sin_cos();
            let bit = 1usize << qubit;
            for j in 0..amps.len() {
                if j & bit == 0 {
                    let a0 = amps[j];
                    let a1 = amps[j | bit];
                    amps[j] = c * a0 - s * a1;
                    amps[j | bit] = s * a0 + c * a1;
                }
            }
        }
        Gate::Rz { qubit, param } => {
            let half = theta[param] * 0.5;
            let phase0 = Complex64::from_polar(1.0, -half);
            let phase1 = Complex64::from_polar(1.0, half);
            let bit = 1usize << qubit;
            for (j, a) in amps.iter_mut().enumerate() {
                *a *= if j & bit == 0 { phase0 } else { phase1 };
            }
        }
        Gate::Cz { a, b } => {
            let mask = (1usize << a) | (1usize << b);
            for (j, amp) in amps.iter_mut().enumerate() {
                if j & mask == mask {
                    *amp = -*amp;
                }
            }
        }
    }
    let _ = n;
}
