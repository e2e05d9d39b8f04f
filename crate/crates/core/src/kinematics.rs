//! Axis-angle kinematics `ẋ = L_x ω`.

use serde::Serialize;
use thiserror::Error;

use crate::linalg::{Mat3, Vec3};
use crate::network::{NetworkState, StateError};
use crate::scalar::Real;
use crate::so3::{hat, sinc_ratio_unchecked, AxisAngle, TAYLOR_THRESHOLD};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KinematicsError {
    #[error("axis-angle norm {norm} is outside the domain [0, π)")]
    OutsideDomain { norm: f64 },
    #[error("expected {expected} angular velocities, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error(transparent)]
    State(#[from] StateError),
}

/// Angular velocity of a body resolved in its own frame (rad/s).
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct BodyVelocity<T>(pub Vec3<T>);

impl<T: Real> BodyVelocity<T> {
    pub fn zero() -> Self {
        BodyVelocity(Vec3::zeros())
    }

    pub fn vector(&self) -> &Vec3<T> {
        &self.0
    }
}

/// `L_x = L¹_x + x̂/2` for one agent.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TransitionMatrix<T> {
    matrix: Mat3<T>,
    symmetric: Mat3<T>,
    source_state: AxisAngle<T>,
}

impl<T: Real> TransitionMatrix<T> {
    pub fn matrix(&self) -> &Mat3<T> {
        &self.matrix
    }

    /// The symmetric part `L¹_x`.
    pub fn symmetric(&self) -> &Mat3<T> {
        &self.symmetric
    }

    pub fn source_state(&self) -> &AxisAngle<T> {
        &self.source_state
    }

    pub fn apply(&self, omega: &BodyVelocity<T>) -> Vec3<T> {
        self.matrix * omega.0
    }
}

/// `(1 − r(θ)) / θ²` with `r` the sinc ratio; tends to 1/12 at θ = 0.
fn radial_gap_coefficient<T: Real>(theta: T) -> T {
    if theta < T::lit(TAYLOR_THRESHOLD) {
        T::one() / T::lit(12.0) + theta * theta / T::lit(720.0)
    } else {
        (T::one() - sinc_ratio_unchecked(theta)) / (theta * theta)
    }
}

/// `L¹_x = r I + (1 − r) x xᵀ/‖x‖²`, written as `I + c (x xᵀ − ‖x‖² I)` so that
/// nothing is divided by `‖x‖²` near the origin.
fn symmetric_unchecked<T: Real>(x: &Vec3<T>) -> Mat3<T> {
    let theta_sq = x.norm_squared();
    let c = radial_gap_coefficient(theta_sq.sqrt());
    Mat3::identity() + (x.outer(x) - Mat3::identity().scale(theta_sq)).scale(c)
}

fn check_domain<T: Real>(x: &AxisAngle<T>, strict: bool) -> Result<(), KinematicsError> {
    let norm = x.angle();
    let outside = if strict {
        norm >= T::PI()
    } else {
        norm > T::PI() + T::structural_tol()
    };
    if outside {
        return Err(KinematicsError::OutsideDomain {
            norm: norm.as_f64(),
        });
    }
    Ok(())
}

pub fn transition_matrix<T: Real>(x: &AxisAngle<T>) -> Result<TransitionMatrix<T>, KinematicsError> {
    check_domain(x, false)?;
    let symmetric = symmetric_unchecked(x.vector());
    Ok(TransitionMatrix {
        matrix: symmetric + hat(x.vector()).scale(T::lit(0.5)),
        symmetric,
        source_state: *x,
    })
}

/// Symmetric part of the transition matrix; eigenvalues `{r, r, 1}`.
pub fn symmetric_part<T: Real>(x: &AxisAngle<T>) -> Result<Mat3<T>, KinematicsError> {
    check_domain(x, false)?;
    Ok(symmetric_unchecked(x.vector()))
}

/// Smallest eigenvalue of `L¹_x`, which is the sinc ratio of `‖x‖`.
///
/// Only defined on the open ball, where it is strictly positive.
pub fn lambda_min<T: Real>(x: &AxisAngle<T>) -> Result<T, KinematicsError> {
    check_domain(x, true)?;
    Ok(sinc_ratio_unchecked(x.angle()))
}

/// Block-diagonal `L_x ω` over all agents.
pub fn state_derivative<T: Real>(
    x: &NetworkState<T>,
    omega: &[BodyVelocity<T>],
) -> Result<Vec<Vec3<T>>, KinematicsError> {
    if omega.len() != x.len() {
        return Err(KinematicsError::DimensionMismatch {
            expected: x.len(),
            actual: omega.len(),
        });
    }
    x.check_chart()?
        .iter()
        .zip(omega)
        .map(|(xi, wi)| Ok(transition_matrix(xi)?.apply(wi)))
        .collect()
}
