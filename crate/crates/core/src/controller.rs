//! Distributed signum protocol `ω_i = Σ_{j∈N_i} sign(x_j − x_i)` and the
//! resulting closed loop `ẋ = −L_x B̂ sign(B̂ᵀx)`.
//!
//! The right-hand side is discontinuous on the switching surfaces
//! `x_{i,k} = x_{j,k}`. [`SignMode`] picks which single-valued selection is
//! integrated.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Graph;
use crate::kinematics::{transition_matrix, BodyVelocity, KinematicsError};
use crate::linalg::Vec3;
use crate::network::NetworkState;
use crate::scalar::Real;
use crate::so3::AxisAngle;

/// Default half-width of the deadband.
pub const DEFAULT_DEADBAND: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ControlError {
    #[error("state has {actual} agents but the graph has {expected} nodes")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("agent {agent} left the axis-angle chart (‖x‖ = {norm} ≥ π)")]
    Singularity { agent: usize, norm: f64 },
    #[error("agent {agent} has a non-finite state")]
    NonFinite { agent: usize },
    #[error("sign mode width must be positive and finite, got {0}")]
    InvalidWidth(f64),
    #[error(transparent)]
    Kinematics(#[from] KinematicsError),
}

/// Single-valued stand-in for the set-valued sign.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "epsilon", rename_all = "snake_case")]
pub enum SignMode<T> {
    /// `sign(0) = 0`, ±1 elsewhere.
    Exact,
    /// Zero on `|a| ≤ ε`, ±1 outside.
    Deadband(T),
    /// `tanh(a / ε)`.
    Smooth(T),
}

impl<T: Real> SignMode<T> {
    pub fn deadband(epsilon: T) -> Result<Self, ControlError> {
        Self::check_width(epsilon).map(SignMode::Deadband)
    }

    pub fn smooth(epsilon: T) -> Result<Self, ControlError> {
        Self::check_width(epsilon).map(SignMode::Smooth)
    }

    fn check_width(epsilon: T) -> Result<T, ControlError> {
        if epsilon > T::zero() && epsilon.is_finite() {
            Ok(epsilon)
        } else {
            Err(ControlError::InvalidWidth(epsilon.as_f64()))
        }
    }

    pub fn validate(&self) -> Result<(), ControlError> {
        match *self {
            SignMode::Exact => Ok(()),
            SignMode::Deadband(e) | SignMode::Smooth(e) => Self::check_width(e).map(|_| ()),
        }
    }

    /// Band half-width, zero for the exact sign.
    pub fn width(&self) -> T {
        match *self {
            SignMode::Exact => T::zero(),
            SignMode::Deadband(e) | SignMode::Smooth(e) => e,
        }
    }
}

impl<T: Real> Default for SignMode<T> {
    fn default() -> Self {
        SignMode::Deadband(T::lit(DEFAULT_DEADBAND))
    }
}

/// Odd, bounded by 1 in absolute value, for every mode.
pub fn sign_value<T: Real>(a: T, mode: SignMode<T>) -> T {
    match mode {
        SignMode::Exact => {
            if a > T::zero() {
                T::one()
            } else if a < T::zero() {
                -T::one()
            } else {
                T::zero()
            }
        }
        SignMode::Deadband(eps) => {
            if a.abs() <= eps {
                T::zero()
            } else {
                a.signum()
            }
        }
        SignMode::Smooth(eps) => (a / eps).tanh(),
    }
}

fn sign_vec<T: Real>(v: &Vec3<T>, mode: SignMode<T>) -> Vec3<T> {
    v.map(|c| sign_value(c, mode))
}

fn check_dimensions<T: Real>(x: &NetworkState<T>, g: &Graph) -> Result<(), ControlError> {
    if x.len() != g.node_count() {
        return Err(ControlError::DimensionMismatch {
            expected: g.node_count(),
            actual: x.len(),
        });
    }
    Ok(())
}

/// Neighbour-sum form of the protocol.
pub fn control_input<T: Real>(
    x: &NetworkState<T>,
    g: &Graph,
    mode: SignMode<T>,
) -> Result<Vec<BodyVelocity<T>>, ControlError> {
    check_dimensions(x, g)?;
    Ok((0..x.len())
        .map(|i| {
            let xi = x.agent(i);
            let mut omega = Vec3::zeros();
            for &j in g.neighbors(i) {
                omega += sign_vec(&(*x.agent(j) - *xi), mode);
            }
            BodyVelocity(omega)
        })
        .collect())
}

/// Stacked incidence form `−B̂ sign(B̂ᵀx)`, with `B̂ = B ⊗ I₃`.
///
/// Agrees with [`control_input`] for any edge orientation because every mode
/// is odd.
pub fn control_input_incidence<T: Real>(
    x: &NetworkState<T>,
    g: &Graph,
    mode: SignMode<T>,
) -> Result<Vec<BodyVelocity<T>>, ControlError> {
    check_dimensions(x, g)?;
    let b = g.incidence_matrix();
    // B̂ᵀx: one 3-vector per edge.
    let edge_signs: Vec<Vec3<T>> = (0..b.columns())
        .map(|k| {
            let mut diff = Vec3::zeros();
            for i in 0..b.rows() {
                match b.get(i, k) {
                    1 => diff += *x.agent(i),
                    -1 => diff -= *x.agent(i),
                    _ => {}
                }
            }
            sign_vec(&diff, mode)
        })
        .collect();
    Ok((0..b.rows())
        .map(|i| {
            let mut omega = Vec3::zeros();
            for (k, s) in edge_signs.iter().enumerate() {
                match b.get(i, k) {
                    1 => omega -= *s,
                    -1 => omega += *s,
                    _ => {}
                }
            }
            BodyVelocity(omega)
        })
        .collect())
}

/// `ẋ_i = L_{x_i} ω_i` with the protocol above.
///
/// Fails with [`ControlError::Singularity`] as soon as any agent reaches
/// `‖x_i‖ ≥ π`.
pub fn closed_loop_rhs<T: Real>(
    x: &NetworkState<T>,
    g: &Graph,
    mode: SignMode<T>,
) -> Result<Vec<Vec3<T>>, ControlError> {
    check_dimensions(x, g)?;
    let mut charts = Vec::with_capacity(x.len());
    for (agent, xi) in x.iter().enumerate() {
        if !xi.is_finite() {
            return Err(ControlError::NonFinite { agent });
        }
        let norm = xi.norm();
        if norm >= T::PI() {
            return Err(ControlError::Singularity {
                agent,
                norm: norm.as_f64(),
            });
        }
        charts.push(AxisAngle::new(*xi).map_err(|_| ControlError::Singularity {
            agent,
            norm: norm.as_f64(),
        })?);
    }
    let omega = control_input(x, g, mode)?;
    charts
        .iter()
        .zip(&omega)
        .map(|(xi, wi)| Ok(transition_matrix(xi)?.apply(wi)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinematics::transition_matrix;

    fn v(x: f64, y: f64, z: f64) -> Vec3<f64> {
        Vec3::new(x, y, z)
    }

    #[test]
    fn sign_value_examples() {
        assert_eq!(sign_value(2.5, SignMode::Exact), 1.0);
        assert_eq!(sign_value(0.0, SignMode::Exact), 0.0);
        assert_eq!(sign_value(-0.0, SignMode::Exact), 0.0);
        assert_eq!(sign_value(-3.0, SignMode::Exact), -1.0);
        assert_eq!(sign_value(-1e-6, SignMode::Deadband(1e-4)), 0.0);
        assert_eq!(sign_value(1e-4, SignMode::Deadband(1e-4)), 0.0);
        assert_eq!(sign_value(-2e-4, SignMode::Deadband(1e-4)), -1.0);
        assert_eq!(sign_value(0.0, SignMode::Smooth(1e-3)), 0.0);
        assert!((sign_value(1e-3, SignMode::Smooth(1e-3)) - 1f64.tanh()).abs() < 1e-15);
    }

    #[test]
    fn sign_modes_are_odd_and_bounded() {
        let modes: [SignMode<f64>; 3] = [SignMode::Exact, SignMode::Deadband(0.1), SignMode::Smooth(0.1)];
        for mode in modes {
            for a in [-5.0, -0.1, -0.05, -1e-9, 0.0, 1e-9, 0.05, 0.1, 5.0] {
                let s = sign_value(a, mode);
                assert!(s.abs() <= 1.0);
                assert_eq!(s, -sign_value(-a, mode));
            }
        }
    }

    #[test]
    fn invalid_widths() {
        assert!(SignMode::deadband(0.0).is_err());
        assert!(SignMode::smooth(-1.0).is_err());
        assert!(SignMode::deadband(f64::NAN).is_err());
        assert_eq!(SignMode::<f64>::default(), SignMode::Deadband(1e-3));
    }

    #[test]
    fn consensus_gives_zero_input() {
        let g = Graph::five_node_example();
        let x = NetworkState::consensus(5, v(0.3, -1.0, 0.2));
        for w in control_input(&x, &g, SignMode::Exact).unwrap() {
            assert_eq!(w.0, Vec3::zeros());
        }
        for d in closed_loop_rhs(&x, &g, SignMode::Exact).unwrap() {
            assert_eq!(d, Vec3::zeros());
        }
    }

    #[test]
    fn two_agent_input() {
        let x = NetworkState::new(vec![v(1.0, 0.0, 0.0), Vec3::zeros()]);
        let w = control_input(&x, &Graph::k2(), SignMode::Exact).unwrap();
        assert_eq!(w[0].0, v(-1.0, 0.0, 0.0));
        assert_eq!(w[1].0, v(1.0, 0.0, 0.0));
    }

    #[test]
    fn five_node_input() {
        // Node 2 (index 1) has neighbours 1, 3, 4.
        let g = Graph::five_node_example();
        let mut agents = vec![Vec3::zeros(); 5];
        agents[1] = v(1.0, 1.0, 1.0);
        let w = control_input(&NetworkState::new(agents), &g, SignMode::Exact).unwrap();
        assert_eq!(w[1].0, v(-3.0, -3.0, -3.0));
        for i in [0, 2, 3] {
            assert_eq!(w[i].0, v(1.0, 1.0, 1.0));
        }
        assert_eq!(w[4].0, Vec3::zeros());
    }

    #[test]
    fn two_agent_closed_loop() {
        // (1,0,0) is the rotation axis, so L_x leaves it unchanged.
        let x = NetworkState::new(vec![v(1.0, 0.0, 0.0), Vec3::zeros()]);
        let d = closed_loop_rhs(&x, &Graph::k2(), SignMode::Exact).unwrap();
        assert!((d[0] - v(-1.0, 0.0, 0.0)).norm() < 1e-15);
        assert_eq!(d[1], v(1.0, 0.0, 0.0));

        let zero = NetworkState::<f64>::zeros(2);
        assert!(closed_loop_rhs(&zero, &Graph::k2(), SignMode::Exact)
            .unwrap()
            .iter()
            .all(|d| *d == Vec3::zeros()));
    }

    #[test]
    fn closed_loop_matches_matrix_product() {
        let g = Graph::five_node_example();
        let x = NetworkState::new(vec![
            v(0.1, 0.2, -0.3),
            v(1.0, -0.5, 0.4),
            v(-0.7, 0.1, 0.9),
            v(0.0, 1.3, 0.2),
            v(0.4, 0.4, 0.4),
        ]);
        let mode = SignMode::Deadband(1e-3);
        let w = control_input(&x, &g, mode).unwrap();
        let d = closed_loop_rhs(&x, &g, mode).unwrap();
        for i in 0..5 {
            let l = transition_matrix(&AxisAngle::new(*x.agent(i)).unwrap()).unwrap();
            assert_eq!(d[i], l.apply(&w[i]));
        }
    }

    #[test]
    fn singularity_is_reported() {
        let x = NetworkState::new(vec![v(std::f64::consts::PI, 0.0, 0.0), Vec3::zeros()]);
        assert!(matches!(
            closed_loop_rhs(&x, &Graph::k2(), SignMode::Exact),
            Err(ControlError::Singularity { agent: 0, .. })
        ));
        let x = NetworkState::new(vec![v(f64::NAN, 0.0, 0.0), Vec3::zeros()]);
        assert!(matches!(
            closed_loop_rhs(&x, &Graph::k2(), SignMode::Exact),
            Err(ControlError::NonFinite { agent: 0 })
        ));
    }

    #[test]
    fn dimension_mismatch() {
        let x = NetworkState::<f64>::zeros(3);
        assert!(matches!(
            control_input(&x, &Graph::k2(), SignMode::Exact),
            Err(ControlError::DimensionMismatch { expected: 2, actual: 3 })
        ));
    }
}
