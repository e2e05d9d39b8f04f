//! Fixed-step integration of the closed loop and trajectory monitors.
//!
//! A run is one forward-Euler selection of the Filippov inclusion. Every
//! recorded sample carries the two Lyapunov channels
//! (`V₁ = ‖B̂ᵀx‖₁`, `V₂ = ½xᵀx`), the largest agent norm and the disagreement,
//! so that the invariance, monotonicity and finite-time claims can be checked
//! on the trajectory after the fact.

use serde::Serialize;
use thiserror::Error;

use crate::controller::{closed_loop_rhs, ControlError, SignMode};
use crate::graph::Graph;
use crate::network::{NetworkState, StateError};
use crate::scalar::Real;
use crate::so3::sinc_ratio_unchecked;

pub const DEFAULT_DT: f64 = 1e-3;
pub const MAX_DT: f64 = 1e-2;
pub const DEFAULT_CONSENSUS_TOLERANCE: f64 = 1e-2;
/// Per-step integration budget used by the invariance and monotonicity checks.
pub const DRIFT_PER_STEP: f64 = 1e-6;
/// Slack on the windowed `V₁` slope bound.
pub const RATE_BOUND_SLACK: f64 = 0.1;
/// Window (in integration steps) for the `V₁` slope estimate.
pub const DEFAULT_SLOPE_WINDOW_STEPS: usize = 50;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("dt must be positive and finite, got {0}")]
    NonPositiveDt(f64),
    #[error("dt = {0} exceeds the fixed-step limit {MAX_DT}")]
    DtTooLarge(f64),
    #[error("t_max = {t_max} must be at least dt = {dt}")]
    TMaxTooSmall { t_max: f64, dt: f64 },
    #[error("consensus_tolerance must be non-negative, got {0}")]
    NegativeTolerance(f64),
    #[error("record_stride must be positive")]
    ZeroStride,
    #[error("initial state has {actual} agents but the graph has {expected} nodes")]
    AgentCount { expected: usize, actual: usize },
    #[error("initial state: {0}")]
    InitialState(#[from] StateError),
    #[error("mode: {0}")]
    Mode(#[from] ControlError),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimConfig<T> {
    pub graph: Graph,
    pub initial_state: NetworkState<T>,
    pub dt: T,
    pub t_max: T,
    pub mode: SignMode<T>,
    pub consensus_tolerance: T,
    pub record_stride: usize,
}

impl<T: Real> SimConfig<T> {
    /// Defaults: `dt = 1e-3`, `t_max = 20`, deadband sign, tolerance `1e-2`,
    /// every step recorded.
    pub fn new(graph: Graph, initial_state: NetworkState<T>) -> Self {
        SimConfig {
            graph,
            initial_state,
            dt: T::lit(DEFAULT_DT),
            t_max: T::lit(20.0),
            mode: SignMode::default(),
            consensus_tolerance: T::lit(DEFAULT_CONSENSUS_TOLERANCE),
            record_stride: 1,
        }
    }

    pub fn with_dt(mut self, dt: T) -> Self {
        self.dt = dt;
        self
    }

    pub fn with_t_max(mut self, t_max: T) -> Self {
        self.t_max = t_max;
        self
    }

    pub fn with_mode(mut self, mode: SignMode<T>) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_consensus_tolerance(mut self, tol: T) -> Self {
        self.consensus_tolerance = tol;
        self
    }

    pub fn with_record_stride(mut self, stride: usize) -> Self {
        self.record_stride = stride;
        self
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.dt > T::zero() && self.dt.is_finite()) {
            return Err(ConfigError::NonPositiveDt(self.dt.as_f64()));
        }
        if self.dt > T::lit(MAX_DT) {
            return Err(ConfigError::DtTooLarge(self.dt.as_f64()));
        }
        if self.t_max.is_nan() || self.t_max < self.dt {
            return Err(ConfigError::TMaxTooSmall {
                t_max: self.t_max.as_f64(),
                dt: self.dt.as_f64(),
            });
        }
        if self.consensus_tolerance.is_nan() || self.consensus_tolerance < T::zero() {
            return Err(ConfigError::NegativeTolerance(self.consensus_tolerance.as_f64()));
        }
        if self.record_stride == 0 {
            return Err(ConfigError::ZeroStride);
        }
        if self.initial_state.len() != self.graph.node_count() {
            return Err(ConfigError::AgentCount {
                expected: self.graph.node_count(),
                actual: self.initial_state.len(),
            });
        }
        self.initial_state.check_chart()?;
        self.mode.validate()?;
        Ok(())
    }

    /// Number of Euler steps needed to reach `t_max`.
    pub fn step_count(&self) -> usize {
        (self.t_max / self.dt).round().to_usize().unwrap_or(0).max(1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    ConsensusReached,
    SingularityCrossed,
    DomainError,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Event<T> {
    pub time: T,
    pub step: usize,
    pub kind: EventKind,
}

/// Recorded samples of one run plus the events raised along the way.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrajectoryRecord<T> {
    pub dt: T,
    pub consensus_tolerance: T,
    /// Integration step index of each sample.
    pub steps: Vec<usize>,
    pub times: Vec<T>,
    pub states: Vec<NetworkState<T>>,
    pub v1: Vec<T>,
    pub v2: Vec<T>,
    pub max_norm: Vec<T>,
    pub disagreement: Vec<T>,
    pub events: Vec<Event<T>>,
}

impl<T: Real> TrajectoryRecord<T> {
    fn empty(dt: T, consensus_tolerance: T) -> Self {
        TrajectoryRecord {
            dt,
            consensus_tolerance,
            steps: Vec::new(),
            times: Vec::new(),
            states: Vec::new(),
            v1: Vec::new(),
            v2: Vec::new(),
            max_norm: Vec::new(),
            disagreement: Vec::new(),
            events: Vec::new(),
        }
    }

    /// Rebuilds a record from stored samples, recomputing every channel.
    pub fn from_samples(
        graph: &Graph,
        dt: T,
        consensus_tolerance: T,
        samples: impl IntoIterator<Item = (usize, NetworkState<T>)>,
    ) -> Self {
        let mut rec = Self::empty(dt, consensus_tolerance);
        for (step, state) in samples {
            rec.push(graph, step, state);
        }
        rec
    }

    fn push(&mut self, graph: &Graph, step: usize, state: NetworkState<T>) {
        self.steps.push(step);
        self.times.push(T::lit(step as f64) * self.dt);
        self.v1.push(lyapunov_v1(&state, graph));
        self.v2.push(lyapunov_v2(&state));
        self.max_norm.push(state.max_norm());
        self.disagreement.push(disagreement(&state));
        self.states.push(state);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last_state(&self) -> Option<&NetworkState<T>> {
        self.states.last()
    }

    pub fn first_event(&self, kind: EventKind) -> Option<&Event<T>> {
        self.events.iter().find(|e| e.kind == kind)
    }

    pub fn consensus_time(&self) -> Option<T> {
        self.first_event(EventKind::ConsensusReached).map(|e| e.time)
    }

    pub fn singularity_time(&self) -> Option<T> {
        self.first_event(EventKind::SingularityCrossed).map(|e| e.time)
    }

    /// Index of the first sample at or after the consensus event.
    pub fn consensus_sample(&self) -> Option<usize> {
        let step = self.first_event(EventKind::ConsensusReached)?.step;
        self.steps.iter().position(|&s| s >= step)
    }

    /// `min_i r(‖x_i‖)` per sample, where `r` is the smallest eigenvalue of
    /// the symmetric part of `L_{x_i}`. Zero once an agent reaches π.
    pub fn lambda_per_sample(&self) -> Vec<T> {
        self.states.iter().map(min_lambda).collect()
    }

    /// Largest increase of `V₂` between consecutive samples, per integration
    /// step. Non-positive for a monotone trajectory.
    pub fn v2_max_increase_per_step(&self) -> T {
        self.v2
            .windows(2)
            .zip(self.steps.windows(2))
            .map(|(v, s)| (v[1] - v[0]) / T::lit((s[1] - s[0]).max(1) as f64))
            .fold(T::neg_infinity(), T::max)
    }

    /// Largest disagreement from the consensus sample onwards.
    pub fn post_consensus_max_disagreement(&self) -> Option<T> {
        let start = self.consensus_sample()?;
        Some(self.disagreement[start..].iter().fold(T::zero(), |m, &d| m.max(d)))
    }
}

fn min_lambda<T: Real>(x: &NetworkState<T>) -> T {
    x.iter()
        .map(|xi| {
            let norm = xi.norm();
            if norm >= T::PI() {
                T::zero()
            } else {
                sinc_ratio_unchecked(norm)
            }
        })
        .fold(T::one(), T::min)
}

/// `V₂ = ½ Σ‖x_i‖²`
pub fn lyapunov_v2<T: Real>(x: &NetworkState<T>) -> T {
    x.sum_sq_norm() * T::lit(0.5)
}

/// `V₁ = ‖B̂ᵀx‖₁ = Σ_{(i,j)∈E} ‖x_i − x_j‖₁`
pub fn lyapunov_v1<T: Real>(x: &NetworkState<T>, g: &Graph) -> T {
    g.edges()
        .iter()
        .map(|&(i, j)| (*x.agent(i) - *x.agent(j)).norm_l1())
        .sum()
}

/// `max_{i,j} ‖x_i − x_j‖∞`, zero exactly on the consensus space.
pub fn disagreement<T: Real>(x: &NetworkState<T>) -> T {
    (0..3)
        .map(|k| {
            let (lo, hi) = x.iter().fold((T::infinity(), T::neg_infinity()), |(lo, hi), v| {
                (lo.min(v[k]), hi.max(v[k]))
            });
            if x.is_empty() {
                T::zero()
            } else {
                hi - lo
            }
        })
        .fold(T::zero(), T::max)
}

/// Runs explicit Euler until `t_max`, a singularity or a non-finite state.
///
/// A sample is recorded every `record_stride` steps, and the terminal state
/// is always recorded so that a chart crossing shows up in the table.
pub fn integrate<T: Real>(config: &SimConfig<T>) -> Result<TrajectoryRecord<T>, ConfigError> {
    config.validate()?;
    if !config.graph.is_connected() {
        log::warn!(
            "communication graph has {} components; finite-time consensus needs a connected graph",
            config.graph.connected_components()
        );
    }
    let graph = &config.graph;
    let dt = config.dt;
    let total = config.step_count();
    let mut rec = TrajectoryRecord::empty(dt, config.consensus_tolerance);
    let mut x = config.initial_state.clone();
    let mut consensus_seen = false;
    let mut step = 0usize;

    loop {
        let time = T::lit(step as f64) * dt;
        let d = disagreement(&x);
        if !consensus_seen && d <= config.consensus_tolerance {
            consensus_seen = true;
            rec.events.push(Event {
                time,
                step,
                kind: EventKind::ConsensusReached,
            });
        }
        let singular = x.max_norm() >= T::PI();
        let last = singular || step == total;
        if step.is_multiple_of(config.record_stride) || last {
            rec.push(graph, step, x.clone());
        }
        if singular {
            rec.events.push(Event {
                time,
                step,
                kind: EventKind::SingularityCrossed,
            });
            break;
        }
        if last {
            break;
        }
        let rhs = match closed_loop_rhs(&x, graph, config.mode) {
            Ok(rhs) => rhs,
            Err(ControlError::Singularity { .. }) => {
                rec.events.push(Event {
                    time,
                    step,
                    kind: EventKind::SingularityCrossed,
                });
                break;
            }
            Err(_) => {
                rec.events.push(Event {
                    time,
                    step,
                    kind: EventKind::DomainError,
                });
                break;
            }
        };
        let next = x.step(dt, &rhs);
        if !next.is_finite() {
            rec.events.push(Event {
                time: time + dt,
                step: step + 1,
                kind: EventKind::DomainError,
            });
            break;
        }
        x = next;
        step += 1;
    }
    Ok(rec)
}

/// `2·V₂(t) < C + 1e-6 · steps · dt` on every sample.
pub fn check_invariance<T: Real>(traj: &TrajectoryRecord<T>, bound: T) -> bool {
    let steps = traj.steps.last().copied().unwrap_or(0);
    let allowance = T::lit(DRIFT_PER_STEP) * T::lit(steps as f64) * traj.dt;
    traj.v2.iter().all(|&v| T::lit(2.0) * v < bound + allowance)
}

/// One windowed finite-difference slope of `V₁`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SlopeWindow<T> {
    pub start: usize,
    pub end: usize,
    pub slope: T,
    /// Running minimum of the per-sample λ up to `end`.
    pub lambda_bound: T,
}

/// All windowed `V₁` slopes that end before consensus (or anywhere, if
/// consensus is never reached). `window` counts samples.
pub fn v1_slope_windows<T: Real>(traj: &TrajectoryRecord<T>, window: usize) -> Vec<SlopeWindow<T>> {
    let window = window.max(1);
    let end = match traj.consensus_sample() {
        Some(0) => return Vec::new(),
        Some(k) => k,
        None => traj.len().saturating_sub(1),
    };
    let lambdas = traj.lambda_per_sample();
    let mut running = T::one();
    let running_min: Vec<T> = lambdas
        .iter()
        .map(|&l| {
            running = running.min(l);
            running
        })
        .collect();
    (0..)
        .map(|start| (start, start + window))
        .take_while(|&(_, stop)| stop <= end)
        .map(|(start, stop)| SlopeWindow {
            start,
            end: stop,
            slope: (traj.v1[stop] - traj.v1[start]) / (traj.times[stop] - traj.times[start]),
            lambda_bound: running_min[stop],
        })
        .collect()
}

/// Largest pre-consensus windowed slope of `V₁`; `None` when the run starts at
/// consensus or is shorter than one window.
pub fn estimate_v1_slope<T: Real>(traj: &TrajectoryRecord<T>, window: usize) -> Option<T> {
    v1_slope_windows(traj, window)
        .into_iter()
        .map(|w| w.slope)
        .reduce(T::max)
}

/// Number of windows violating `slope ≤ −λ/n + 0.1`.
pub fn rate_bound_violations<T: Real>(traj: &TrajectoryRecord<T>, window: usize, n: usize) -> usize {
    let n = T::lit(n.max(1) as f64);
    v1_slope_windows(traj, window)
        .iter()
        .filter(|w| w.slope > -w.lambda_bound / n + T::lit(RATE_BOUND_SLACK))
        .count()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonitorReport<T> {
    pub consensus_time: Option<T>,
    pub final_time: T,
    pub steps: usize,
    pub final_disagreement: T,
    pub post_consensus_max_disagreement: Option<T>,
    pub v2_max_increase_per_step: T,
    pub invariance_bound: T,
    pub invariance_violated: bool,
    pub min_lambda_along_trajectory: T,
    /// `r(√(2V₂(0)))`: lower bound on λ implied by invariance of the initial
    /// sublevel set, when that set stays inside the π-ball.
    pub a_priori_lambda_bound: Option<T>,
    pub v1_slope_window: usize,
    pub v1_max_slope_outside_consensus: Option<T>,
    pub rate_bound_violations: usize,
    pub singularity_time: Option<T>,
    pub domain_error_time: Option<T>,
}

impl<T: Real> MonitorReport<T> {
    /// Reached consensus and never left the chart.
    pub fn converged(&self) -> bool {
        self.consensus_time.is_some() && self.singularity_time.is_none() && self.domain_error_time.is_none()
    }
}

/// Slope window in samples for a given stride.
pub fn slope_window_samples(record_stride: usize) -> usize {
    DEFAULT_SLOPE_WINDOW_STEPS.div_ceil(record_stride.max(1))
}

pub fn build_report<T: Real>(
    traj: &TrajectoryRecord<T>,
    config: &SimConfig<T>,
    bound: T,
) -> MonitorReport<T> {
    let window = slope_window_samples(config.record_stride);
    let initial_radius = (T::lit(2.0) * traj.v2.first().copied().unwrap_or(T::zero())).sqrt();
    MonitorReport {
        consensus_time: traj.consensus_time(),
        final_time: traj.times.last().copied().unwrap_or(T::zero()),
        steps: traj.steps.last().copied().unwrap_or(0),
        final_disagreement: traj.disagreement.last().copied().unwrap_or(T::zero()),
        post_consensus_max_disagreement: traj.post_consensus_max_disagreement(),
        v2_max_increase_per_step: if traj.len() > 1 {
            traj.v2_max_increase_per_step()
        } else {
            T::zero()
        },
        invariance_bound: bound,
        invariance_violated: !check_invariance(traj, bound),
        min_lambda_along_trajectory: traj
            .lambda_per_sample()
            .into_iter()
            .fold(T::one(), T::min),
        a_priori_lambda_bound: (initial_radius < T::PI()).then(|| sinc_ratio_unchecked(initial_radius)),
        v1_slope_window: window,
        v1_max_slope_outside_consensus: estimate_v1_slope(traj, window),
        rate_bound_violations: rate_bound_violations(traj, window, config.graph.node_count()),
        singularity_time: traj.singularity_time(),
        domain_error_time: traj.first_event(EventKind::DomainError).map(|e| e.time),
    }
}
