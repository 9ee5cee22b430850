//! Experiment configuration: JSON in, fully resolved instances out. Every
//! randomized quantity traces to an explicit seed.

use serde::{Deserialize, Serialize};
use std::path::PathBuf;

use crate::ansatz::{AnsatzCircuit, AnsatzStyle, Entangler};
use crate::covar::LMConfig;
use crate::error::{Error, Result};
use crate::models::{build_maxcut, build_schwinger, build_spin_ring, MaxCutSpec, SchwingerSpec, SpinRingSpec};
use crate::morph::{MorphKind, MorphSchedule};
use crate::pauli::PauliSum;

/// Model selection with per-family overrides; missing fields fall back to the
/// named preset. The `seed` override pins the instance across run seeds.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelConfig {
    SpinRing {
        #[serde(default)]
        num_qubits: Option<usize>,
        #[serde(default)]
        coupling: Option<f64>,
        #[serde(default)]
        onsite: Option<Vec<f64>>,
        /// Rescales the onsite field vector in (0, 1]; shrinking the fields
        /// shrinks the schedule's minimum gap, which is the knob the step
        /// size study turns.
        #[serde(default)]
        onsite_scale: Option<f64>,
        #[serde(default)]
        seed: Option<u64>,
    },
    Schwinger {
        #[serde(default)]
        num_sites: Option<usize>,
        #[serde(default)]
        coupling: Option<f64>,
        #[serde(default)]
        hopping: Option<f64>,
        #[serde(default)]
        mass: Option<f64>,
        #[serde(default)]
        theta_angle: Option<f64>,
    },
    Maxcut {
        #[serde(default)]
        num_qubits: Option<usize>,
        #[serde(default)]
        onsite: Option<Vec<f64>>,
        #[serde(default)]
        pair: Option<Vec<f64>>,
        #[serde(default)]
        distinct_pair_weights: Option<usize>,
        #[serde(default)]
        seed: Option<u64>,
    },
}

impl ModelConfig {
    pub fn family(&self) -> &'static str {
        match self {
            ModelConfig::SpinRing { .. } => "spin_ring",
            ModelConfig::Schwinger { .. } => "schwinger",
            ModelConfig::Maxcut { .. } => "maxcut",
        }
    }

    pub fn num_qubits(&self) -> usize {
        match self {
            ModelConfig::SpinRing { num_qubits, .. } => num_qubits.unwrap_or(10),
            ModelConfig::Schwinger { num_sites, .. } => num_sites.unwrap_or(5),
            ModelConfig::Maxcut { num_qubits, .. } => num_qubits.unwrap_or(8),
        }
    }

    /// Natural morphing kind of the family.
    pub fn natural_kind(&self) -> MorphKind {
        match self {
            ModelConfig::SpinRing { .. } => MorphKind::Perturbative,
            _ => MorphKind::Mixing,
        }
    }

    /// Build the instance for one run seed.
    pub fn build(&self, run_seed: u64, delta_t: f64) -> Result<(PauliSum, MorphSchedule)> {
        match self {
            ModelConfig::SpinRing {
                num_qubits,
                coupling,
                onsite,
                onsite_scale,
                seed,
            } => {
                let mut spec = SpinRingSpec::preset(seed.unwrap_or(run_seed));
                if let Some(n) = num_qubits {
                    spec.num_qubits = *n;
                }
                if let Some(j) = coupling {
                    spec.coupling = *j;
                }
                spec.onsite = onsite.clone();
                if let Some(scale) = onsite_scale {
                    if !(*scale > 0.0 && *scale <= 1.0) {
                        return Err(Error::InvalidConfig {
                            field: "model.onsite_scale".into(),
                            reason: format!("must lie in (0, 1], got {scale}"),
                        });
                    }
                    let base = spec.resolve_onsite()?;
                    spec.onsite = Some(base.into_iter().map(|c| c * scale).collect());
                }
                build_spin_ring(&spec, delta_t)
            }
            ModelConfig::Schwinger {
                num_sites,
                coupling,
                hopping,
                mass,
                theta_angle,
            } => {
                let mut spec = SchwingerSpec::preset();
                if let Some(n) = num_sites {
                    spec.num_sites = *n;
                }
                if let Some(j) = coupling {
                    spec.coupling = *j;
                }
                if let Some(w) = hopping {
                    spec.hopping = *w;
                }
                if let Some(m) = mass {
                    spec.mass = *m;
                }
                if let Some(t) = theta_angle {
                    spec.theta_angle = *t;
                }
                build_schwinger(&spec, delta_t)
            }
            ModelConfig::Maxcut {
                num_qubits,
                onsite,
                pair,
                distinct_pair_weights,
                seed,
            } => {
                let mut spec = MaxCutSpec::preset(seed.unwrap_or(run_seed));
                if let Some(n) = num_qubits {
                    spec.num_qubits = *n;
                }
                spec.onsite = onsite.clone();
                spec.pair = pair.clone();
                match distinct_pair_weights {
                    // explicit values pass through (and may error)
                    Some(k) => spec.distinct_pair_weights = Some(*k),
                    // the preset's edge budget caps at the graph size
                    None => {
                        let edges = spec.num_qubits * (spec.num_qubits - 1) / 2;
                        spec.distinct_pair_weights =
                            spec.distinct_pair_weights.map(|k| k.min(edges));
                    }
                }
                build_maxcut(&spec, delta_t)
            }
        }
    }
}

/// Circuit descriptor: `{num_qubits, num_layers, entangler, style}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitConfig {
    /// Defaults to the model width when absent.
    #[serde(default)]
    pub num_qubits: Option<usize>,
    pub num_layers: usize,
    #[serde(default = "default_entangler")]
    pub entangler: Entangler,
    #[serde(default)]
    pub style: AnsatzStyle,
}

fn default_entangler() -> Entangler {
    Entangler::Ring
}

impl CircuitConfig {
    pub fn build(&self, model_qubits: usize) -> Result<AnsatzCircuit> {
        let n = self.num_qubits.unwrap_or(model_qubits);
        if n != model_qubits {
            return Err(Error::InvalidConfig {
                field: "circuit.num_qubits".into(),
                reason: format!("circuit width {n} differs from model width {model_qubits}"),
            });
        }
        if self.num_layers == 0 {
            return Err(Error::InvalidConfig {
                field: "circuit.num_layers".into(),
                reason: "must be at least 1".into(),
            });
        }
        Ok(AnsatzCircuit::layered(n, self.num_layers, self.entangler, self.style))
    }
}

/// Morph kind override plus one step size or a sweep list.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleConfig {
    /// Defaults to the model's natural kind. Spin rings may also run the
    /// mixing approach; mixer-based families reject `perturbative`.
    #[serde(default)]
    pub kind: Option<MorphKind>,
    #[serde(default)]
    pub delta_t: Option<f64>,
    #[serde(default)]
    pub delta_ts: Option<Vec<f64>>,
}

impl ScheduleConfig {
    pub fn resolve_delta_ts(&self) -> Result<Vec<f64>> {
        match (&self.delta_t, &self.delta_ts) {
            (Some(dt), None) => Ok(vec![*dt]),
            (None, Some(list)) if !list.is_empty() => Ok(list.clone()),
            (Some(_), Some(_)) => Err(Error::InvalidConfig {
                field: "schedule.delta_t".into(),
                reason: "give either delta_t or delta_ts, not both".into(),
            }),
            _ => Err(Error::InvalidConfig {
                field: "schedule.delta_t".into(),
                reason: "one of delta_t or delta_ts is required".into(),
            }),
        }
    }

    /// Apply a kind override to the naturally built schedule.
    pub fn apply_kind(
        &self,
        model: &ModelConfig,
        h: &PauliSum,
        natural: MorphSchedule,
    ) -> Result<MorphSchedule> {
        match self.kind {
            None => Ok(natural),
            Some(kind) if kind == natural.kind() => Ok(natural),
            Some(MorphKind::Mixing) => {
                // mixing toward the full target from the same trivial start
                MorphSchedule::new(
                    MorphKind::Mixing,
                    natural.h0().clone(),
                    h.clone(),
                    natural.delta_t(),
                )
            }
            Some(MorphKind::Perturbative) => Err(Error::InvalidConfig {
                field: "schedule.kind".into(),
                reason: format!(
                    "the {} family morphs from a mixer; the perturbative split does not apply",
                    model.family()
                ),
            }),
        }
    }
}

/// Outer-loop knobs shared by the runner.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OuterConfig {
    /// CoVaR cap at the final grid point (None keeps the per-step cap).
    pub final_max_iterations: Option<usize>,
    /// Covariance tolerance at the final grid point (None keeps the
    /// per-step one).
    pub final_covariance_norm_tol: Option<f64>,
    /// Gaussian jitter on the handed-off parameters at each step.
    pub parameter_jitter_std: f64,
    /// Energy-descent iterations before each step's root solve (ground
    /// tracking only).
    pub vqe_head_start: usize,
    /// Learning rate of the head-start descent.
    pub vqe_head_start_rate: f64,
}

impl Default for OuterConfig {
    fn default() -> Self {
        OuterConfig {
            final_max_iterations: None,
            final_covariance_norm_tol: None,
            parameter_jitter_std: 0.0,
            vqe_head_start: 0,
            vqe_head_start_rate: 0.08,
        }
    }
}

/// Conventional-VQE and adiabatic-VQE comparison arm.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VqeBaselineConfig {
    pub learning_rate: f64,
    pub gradient_tol: f64,
    /// VQE iterations per adiabatic step (and per conventional chunk).
    pub iterations_per_step: usize,
    /// Jitter for the conventional-VQE initial parameters.
    pub init_jitter_std: f64,
}

impl Default for VqeBaselineConfig {
    fn default() -> Self {
        VqeBaselineConfig {
            learning_rate: 0.05,
            gradient_tol: 1e-6,
            iterations_per_step: 50,
            init_jitter_std: 0.05,
        }
    }
}

/// Top-level experiment description; round-trips losslessly through JSON.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelConfig,
    pub circuit: CircuitConfig,
    pub schedule: ScheduleConfig,
    #[serde(default)]
    pub level: usize,
    #[serde(default)]
    pub lm: LMConfig,
    #[serde(default)]
    pub outer: OuterConfig,
    /// Track delta_e and level_index against the dense oracle and record the
    /// schedule's minimum gap in the metadata.
    #[serde(default)]
    pub oracle: bool,
    /// Grid for gap scans and spectrum exports.
    #[serde(default = "default_gap_grid")]
    pub gap_grid_points: usize,
    #[serde(default)]
    pub vqe_baseline: Option<VqeBaselineConfig>,
    /// One complete run per seed; the seed drives instance sampling (unless
    /// the model pins its own) and the solver stream.
    pub seeds: Vec<u64>,
    pub output_dir: PathBuf,
}

fn default_gap_grid() -> usize {
    201
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: ExperimentConfig = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        self.lm.validate()?;
        if self.seeds.is_empty() {
            return Err(Error::InvalidConfig {
                field: "seeds".into(),
                reason: "at least one seed is required".into(),
            });
        }
        if self.gap_grid_points < 2 {
            return Err(Error::InvalidConfig {
                field: "gap_grid_points".into(),
                reason: "need at least 2 grid points".into(),
            });
        }
        for dt in self.resolve_delta_ts()? {
            if !(dt > 0.0 && dt <= 1.0) {
                return Err(Error::InvalidConfig {
                    field: "schedule.delta_t".into(),
                    reason: format!("step sizes must lie in (0, 1], got {dt}"),
                });
            }
        }
        let n = self.model.num_qubits();
        let level_cap = 1usize << n.min(30);
        if self.level >= level_cap {
            return Err(Error::InvalidConfig {
                field: "level".into(),
                reason: format!("level {} out of range for {n} qubits", self.level),
            });
        }
        Ok(())
    }

    pub fn resolve_delta_ts(&self) -> Result<Vec<f64>> {
        self.schedule.resolve_delta_ts()
    }

    /// Instance + schedule + circuit for one (seed, dt) cell.
    pub fn instantiate(
        &self,
        seed: u64,
        delta_t: f64,
    ) -> Result<(PauliSum, MorphSchedule, AnsatzCircuit)> {
        let (h, natural) = self.model.build(seed, delta_t)?;
        let schedule = self.schedule.apply_kind(&self.model, &h, natural)?;
        let circuit = self.circuit.build(h.num_qubits())?;
        Ok((h, schedule, circuit))
    }

    /// Solver configuration for one run seed: the stream seed is the config
    /// seed offset by the run seed.
    pub fn lm_for_seed(&self, seed: u64) -> LMConfig {
        LMConfig {
            rng_seed: self.lm.rng_seed.wrapping_add(seed),
            ..self.lm.clone()
        }
    }
}
