//! Stacked agent states `x = [x₁ᵀ, …, xₙᵀ]ᵀ`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::Vec3;
use crate::scalar::Real;
use crate::so3::{AxisAngle, So3Error};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StateError {
    #[error("flat state has {0} components, expected a multiple of 3")]
    RaggedFlat(usize),
    #[error("state has {actual} agents, expected {expected}")]
    AgentCount { expected: usize, actual: usize },
    #[error("agent {agent}: {source}")]
    Agent {
        agent: usize,
        #[source]
        source: So3Error,
    },
}

/// Axis-angle vectors of all agents, in agent order.
///
/// The container itself only requires finite entries. Whether every agent
/// sits inside the π-ball is checked with [`NetworkState::check_chart`], since
/// a simulation has to be able to record the step on which the chart is left.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NetworkState<T> {
    agents: Vec<Vec3<T>>,
}

impl<T: Real> NetworkState<T> {
    pub fn new(agents: Vec<Vec3<T>>) -> Self {
        NetworkState { agents }
    }

    pub fn from_flat(values: &[T]) -> Result<Self, StateError> {
        if !values.len().is_multiple_of(3) {
            return Err(StateError::RaggedFlat(values.len()));
        }
        Ok(NetworkState {
            agents: values
                .chunks_exact(3)
                .map(|c| Vec3::new(c[0], c[1], c[2]))
                .collect(),
        })
    }

    /// Every agent at the same vector.
    pub fn consensus(n: usize, value: Vec3<T>) -> Self {
        NetworkState {
            agents: vec![value; n],
        }
    }

    pub fn zeros(n: usize) -> Self {
        Self::consensus(n, Vec3::zeros())
    }

    pub fn to_flat(&self) -> Vec<T> {
        self.agents.iter().flat_map(|v| v.0).collect()
    }

    pub fn len(&self) -> usize {
        self.agents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.agents.is_empty()
    }

    pub fn agents(&self) -> &[Vec3<T>] {
        &self.agents
    }

    pub fn agent(&self, i: usize) -> &Vec3<T> {
        &self.agents[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = &Vec3<T>> {
        self.agents.iter()
    }

    pub fn is_finite(&self) -> bool {
        self.agents.iter().all(Vec3::is_finite)
    }

    /// `max_i ‖x_i‖`
    pub fn max_norm(&self) -> T {
        self.agents
            .iter()
            .fold(T::zero(), |m, v| m.max(v.norm()))
    }

    /// `Σ_i ‖x_i‖²`
    pub fn sum_sq_norm(&self) -> T {
        self.agents.iter().map(Vec3::norm_squared).sum()
    }

    /// Validates every agent as an [`AxisAngle`].
    pub fn check_chart(&self) -> Result<Vec<AxisAngle<T>>, StateError> {
        self.agents
            .iter()
            .enumerate()
            .map(|(agent, v)| AxisAngle::new(*v).map_err(|source| StateError::Agent { agent, source }))
            .collect()
    }

    /// `self + h · direction`, agent by agent.
    pub fn step(&self, h: T, direction: &[Vec3<T>]) -> Self {
        debug_assert_eq!(direction.len(), self.agents.len());
        NetworkState {
            agents: self
                .agents
                .iter()
                .zip(direction)
                .map(|(x, d)| *x + d.scale(h))
                .collect(),
        }
    }

    /// Adds the same vector to every agent.
    pub fn translate(&self, offset: &Vec3<T>) -> Self {
        NetworkState {
            agents: self.agents.iter().map(|x| *x + *offset).collect(),
        }
    }

    pub fn scale(&self, s: T) -> Self {
        NetworkState {
            agents: self.agents.iter().map(|x| x.scale(s)).collect(),
        }
    }

    pub fn cast<U: Real>(&self) -> NetworkState<U> {
        NetworkState {
            agents: self.agents.iter().map(Vec3::cast).collect(),
        }
    }
}
