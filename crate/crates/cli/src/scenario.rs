//! Scenario files: JSON description of one simulation.
//!
//! Node ids in `graph.edges` are 1-based. `initial_state` is either a flat
//! list of `3n` numbers or `{ "seed": u64, "sum_sq_norm_bound": b }`, in which
//! case agents are drawn from the seed and scaled so that `Σ‖x_i‖² = b`.
//! Bounds (`sum_sq_norm_bound`, `C`) accept a plain number or
//! `{ "pi_sq_fraction": f }` meaning `f·π²`.

use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};

use attitude_sync::controller::DEFAULT_DEADBAND;
use attitude_sync::initial::seeded_initial_state;
use attitude_sync::simulator::{ConfigError, DEFAULT_CONSENSUS_TOLERANCE, DEFAULT_DT};
use attitude_sync::{Graph, GraphError, NetworkStated, SignMode, SimConfigd, StateError};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A validation failure, tied to the field that caused it.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{field}: {message}")]
pub struct ScenarioError {
    pub field: String,
    pub message: String,
}

impl ScenarioError {
    fn new(field: impl Into<String>, message: impl fmt::Display) -> Self {
        ScenarioError {
            field: field.into(),
            message: message.to_string(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Bound {
    Value(f64),
    PiSq { pi_sq_fraction: f64 },
}

impl Bound {
    pub fn value(&self) -> f64 {
        match *self {
            Bound::Value(v) => v,
            Bound::PiSq { pi_sq_fraction } => pi_sq_fraction * PI * PI,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSpec {
    pub nodes: usize,
    pub edges: Vec<[usize; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InitialStateSpec {
    Explicit(Vec<f64>),
    Seeded { seed: u64, sum_sq_norm_bound: Bound },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeName {
    Exact,
    Deadband,
    Smooth,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    pub trajectory: Option<PathBuf>,
    pub report: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub graph: GraphSpec,
    pub initial_state: InitialStateSpec,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "default_t_max")]
    pub t_max: f64,
    #[serde(default = "default_mode")]
    pub mode: ModeName,
    #[serde(default)]
    pub epsilon: Option<f64>,
    #[serde(default = "default_tolerance")]
    pub consensus_tolerance: f64,
    #[serde(rename = "C", default = "default_bound")]
    pub c: Bound,
    #[serde(default = "default_stride")]
    pub record_stride: usize,
    #[serde(default)]
    pub outputs: Outputs,
}

fn default_dt() -> f64 {
    DEFAULT_DT
}
fn default_t_max() -> f64 {
    20.0
}
fn default_mode() -> ModeName {
    ModeName::Deadband
}
fn default_tolerance() -> f64 {
    DEFAULT_CONSENSUS_TOLERANCE
}
fn default_bound() -> Bound {
    Bound::PiSq { pi_sq_fraction: 1.0 }
}
fn default_stride() -> usize {
    1
}

/// A scenario that passed validation.
#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub file: ScenarioFile,
    pub config: SimConfigd,
    pub invariance_bound: f64,
}

impl ScenarioFile {
    pub fn parse(text: &str) -> Result<Self, ScenarioError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let field = if path == "." { "scenario".to_string() } else { path };
            ScenarioError::new(field, e.into_inner())
        })
    }

    pub fn sign_mode(&self) -> Result<SignMode<f64>, ScenarioError> {
        match (self.mode, self.epsilon) {
            (ModeName::Exact, None) => Ok(SignMode::Exact),
            (ModeName::Exact, Some(_)) => Err(ScenarioError::new("epsilon", "not used by mode `exact`")),
            (ModeName::Deadband, eps) => Ok(SignMode::Deadband(eps.unwrap_or(DEFAULT_DEADBAND))),
            (ModeName::Smooth, eps) => Ok(SignMode::Smooth(eps.unwrap_or(DEFAULT_DEADBAND))),
        }
    }

    pub fn build_graph(&self) -> Result<Graph, ScenarioError> {
        let edges: Vec<(usize, usize)> = self.graph.edges.iter().map(|&[a, b]| (a, b)).collect();
        Graph::from_one_based_edges(self.graph.nodes, &edges).map_err(|e| match e {
            GraphError::Empty => ScenarioError::new("graph.nodes", e),
            GraphError::NodeOutOfRange { edge, .. }
            | GraphError::SelfLoop { edge, .. }
            | GraphError::DuplicateEdge { edge, .. } => ScenarioError::new(format!("graph.edges[{edge}]"), e),
            GraphError::BadPermutation { .. } => ScenarioError::new("graph", e),
        })
    }

    pub fn build_initial_state(&self) -> Result<NetworkStated, ScenarioError> {
        let n = self.graph.nodes;
        match &self.initial_state {
            InitialStateSpec::Explicit(values) => {
                NetworkStated::from_flat(values).map_err(|e| ScenarioError::new("initial_state", e))
            }
            InitialStateSpec::Seeded {
                seed,
                sum_sq_norm_bound,
            } => {
                let b = sum_sq_norm_bound.value();
                if !(b.is_finite() && b >= 0.0) {
                    return Err(ScenarioError::new(
                        "initial_state.sum_sq_norm_bound",
                        format!("must be a non-negative number, got {b}"),
                    ));
                }
                Ok(seeded_initial_state(n, *seed, b))
            }
        }
    }

    pub fn validate(self) -> Result<Scenario, ScenarioError> {
        let graph = self.build_graph()?;
        let initial_state = self.build_initial_state()?;
        let mode = self.sign_mode()?;
        let c = self.c.value();
        if !(c.is_finite() && c > 0.0) {
            return Err(ScenarioError::new("C", format!("must be positive, got {c}")));
        }
        let config = SimConfigd {
            graph,
            initial_state,
            dt: self.dt,
            t_max: self.t_max,
            mode,
            consensus_tolerance: self.consensus_tolerance,
            record_stride: self.record_stride,
        };
        config.validate().map_err(config_error)?;
        Ok(Scenario {
            file: self,
            config,
            invariance_bound: c,
        })
    }
}

fn config_error(e: ConfigError) -> ScenarioError {
    let field = match &e {
        ConfigError::NonPositiveDt(_) | ConfigError::DtTooLarge(_) => "dt".to_string(),
        ConfigError::TMaxTooSmall { .. } => "t_max".to_string(),
        ConfigError::NegativeTolerance(_) => "consensus_tolerance".to_string(),
        ConfigError::ZeroStride => "record_stride".to_string(),
        ConfigError::AgentCount { .. } => "initial_state".to_string(),
        ConfigError::InitialState(StateError::Agent { agent, source }) => {
            // Agents are numbered from 1 in scenario files.
            return ScenarioError::new(format!("initial_state[agent {}]", agent + 1), source);
        }
        ConfigError::InitialState(_) => "initial_state".to_string(),
        ConfigError::Mode(_) => "epsilon".to_string(),
    };
    ScenarioError::new(field, e)
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Self, ScenarioError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ScenarioError::new("scenario", format!("cannot read {}: {e}", path.display())))?;
        ScenarioFile::parse(&text)?.validate()
    }

    /// Same scenario with the initial-state seed replaced; `None` when the
    /// initial state is explicit.
    pub fn with_seed(&self, seed: u64) -> Option<Result<Scenario, ScenarioError>> {
        match &self.file.initial_state {
            InitialStateSpec::Seeded { sum_sq_norm_bound, .. } => {
                let mut file = self.file.clone();
                file.initial_state = InitialStateSpec::Seeded {
                    seed,
                    sum_sq_norm_bound: *sum_sq_norm_bound,
                };
                Some(file.validate())
            }
            InitialStateSpec::Explicit(_) => None,
        }
    }
}
