//! SO(3) and so(3) primitives in axis-angle coordinates.
//!
//! The exponential is the Rodrigues formula; the logarithm inverts it on the
//! closed ball of radius π, with a symmetric-part branch near the half-turn
//! where the antisymmetric part no longer carries the axis.

use serde::Serialize;
use thiserror::Error;

use crate::linalg::{Mat3, Vec3};
use crate::scalar::Real;

/// Below this angle every sinc-type coefficient switches to its Taylor series.
pub const TAYLOR_THRESHOLD: f64 = 1e-4;

/// Within this distance of π the logarithm reads the axis from the
/// symmetric part of the rotation.
pub const HALF_TURN_BRANCH: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum So3Error {
    #[error("matrix is not skew-symmetric (max |M + Mᵀ| = {asymmetry:e})")]
    NotSkew { asymmetry: f64 },
    #[error("matrix is not a rotation (‖RRᵀ - I‖_F = {orthogonality:e}, det = {determinant})")]
    NotRotation { orthogonality: f64, determinant: f64 },
    #[error("trace {trace} outside [-1, 3]")]
    TraceOutOfRange { trace: f64 },
    #[error("axis-angle norm {norm} exceeds π")]
    OutsideChart { norm: f64 },
    #[error("angle {theta} outside [0, π]")]
    AngleOutOfRange { theta: f64 },
    #[error("non-finite value")]
    NonFinite,
}

/// `p ↦ p̂`, the skew-symmetric matrix with `p̂ w = p × w`.
pub fn hat<T: Real>(v: &Vec3<T>) -> Mat3<T> {
    let [p1, p2, p3] = v.0;
    let z = T::zero();
    Mat3::from_rows([[z, -p3, p2], [p3, z, -p1], [-p2, p1, z]])
}

/// Inverse of [`hat`]. Rejects matrices that are not skew within the
/// structural tolerance.
pub fn vee<T: Real>(m: &Mat3<T>) -> Result<Vec3<T>, So3Error> {
    if !m.is_finite() {
        return Err(So3Error::NonFinite);
    }
    let asymmetry = (*m + m.transpose()).max_abs_diff(&Mat3::zeros());
    if asymmetry > T::structural_tol() {
        return Err(So3Error::NotSkew {
            asymmetry: asymmetry.as_f64(),
        });
    }
    Ok(vee_unchecked(m))
}

/// Reads the axial vector of the antisymmetric part; no skewness check.
pub(crate) fn vee_unchecked<T: Real>(m: &Mat3<T>) -> Vec3<T> {
    let half = T::lit(0.5);
    Vec3::new(
        (m.get(2, 1) - m.get(1, 2)) * half,
        (m.get(0, 2) - m.get(2, 0)) * half,
        (m.get(1, 0) - m.get(0, 1)) * half,
    )
}

/// A 3×3 orthonormal matrix with unit determinant.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Rotation<T> {
    matrix: Mat3<T>,
}

impl<T: Real> Rotation<T> {
    /// Validates orthonormality and orientation at the structural tolerance.
    pub fn new(matrix: Mat3<T>) -> Result<Self, So3Error> {
        if !matrix.is_finite() {
            return Err(So3Error::NonFinite);
        }
        let orthogonality = (matrix * matrix.transpose() - Mat3::identity()).frobenius_norm();
        let determinant = matrix.determinant();
        if orthogonality > T::structural_tol() || (determinant - T::one()).abs() > T::structural_tol()
        {
            return Err(So3Error::NotRotation {
                orthogonality: orthogonality.as_f64(),
                determinant: determinant.as_f64(),
            });
        }
        Ok(Rotation { matrix })
    }

    pub(crate) fn from_matrix_unchecked(matrix: Mat3<T>) -> Self {
        Rotation { matrix }
    }

    pub fn identity() -> Self {
        Rotation {
            matrix: Mat3::identity(),
        }
    }

    pub fn matrix(&self) -> &Mat3<T> {
        &self.matrix
    }

    pub fn inverse(&self) -> Self {
        Rotation {
            matrix: self.matrix.transpose(),
        }
    }

    pub fn compose(&self, other: &Self) -> Self {
        Rotation {
            matrix: self.matrix * other.matrix,
        }
    }

    pub fn apply(&self, v: &Vec3<T>) -> Vec3<T> {
        self.matrix * *v
    }
}

/// Axis scaled by angle, restricted to the closed ball of radius π.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AxisAngle<T> {
    vector: Vec3<T>,
}

impl<T: Real> AxisAngle<T> {
    pub fn new(vector: Vec3<T>) -> Result<Self, So3Error> {
        if !vector.is_finite() {
            return Err(So3Error::NonFinite);
        }
        let norm = vector.norm();
        if norm > T::PI() + T::structural_tol() {
            return Err(So3Error::OutsideChart {
                norm: norm.as_f64(),
            });
        }
        Ok(AxisAngle { vector })
    }

    pub fn zero() -> Self {
        AxisAngle {
            vector: Vec3::zeros(),
        }
    }

    pub fn vector(&self) -> &Vec3<T> {
        &self.vector
    }

    /// Rotation angle `‖x‖`.
    pub fn angle(&self) -> T {
        self.vector.norm()
    }

    pub fn to_rotation(&self) -> Rotation<T> {
        exp_so3(&self.vector)
    }
}

/// Rodrigues coefficients `(sin θ / θ, (1 − cos θ) / θ²)`.
pub(crate) fn rodrigues_coefficients<T: Real>(theta: T) -> (T, T) {
    if theta < T::lit(TAYLOR_THRESHOLD) {
        let t2 = theta * theta;
        let t4 = t2 * t2;
        (
            T::one() - t2 / T::lit(6.0) + t4 / T::lit(120.0),
            T::lit(0.5) - t2 / T::lit(24.0) + t4 / T::lit(720.0),
        )
    } else {
        // 1 − cos θ = 2 sin²(θ/2) avoids cancellation for small θ.
        let half_sin = (theta * T::lit(0.5)).sin();
        (
            theta.sin() / theta,
            T::lit(2.0) * half_sin * half_sin / (theta * theta),
        )
    }
}

/// Exponential map so(3) → SO(3).
pub fn exp_so3<T: Real>(v: &Vec3<T>) -> Rotation<T> {
    let theta = v.norm();
    let (a, b) = rodrigues_coefficients(theta);
    let k = hat(v);
    Rotation::from_matrix_unchecked(Mat3::identity() + k.scale(a) + (k * k).scale(b))
}

/// Logarithm SO(3) → closed π-ball, with `log(I) = 0`.
///
/// The angle is computed as `atan2(‖vee(R − Rᵀ)‖/2, (tr R − 1)/2)`, which is
/// the arccos of the trace term but keeps full precision at both ends.
pub fn log_so3<T: Real>(r: &Rotation<T>) -> Result<AxisAngle<T>, So3Error> {
    let m = r.matrix();
    let trace = m.trace();
    let tol = T::structural_tol();
    if !(trace >= -T::one() - tol && trace <= T::lit(3.0) + tol) {
        return Err(So3Error::TraceOutOfRange {
            trace: trace.as_f64(),
        });
    }
    let half = T::lit(0.5);
    let cos_theta = ((trace - T::one()) * half).max(-T::one()).min(T::one());
    let axial = vee_unchecked(m);
    let sin_theta = axial.norm();
    let theta = sin_theta.atan2(cos_theta);

    let vector = if theta > T::PI() - T::lit(HALF_TURN_BRANCH) {
        half_turn_axis(m, cos_theta, &axial).scale(theta)
    } else if theta < T::lit(TAYLOR_THRESHOLD) {
        let t2 = theta * theta;
        axial.scale(T::one() + t2 / T::lit(6.0) + T::lit(7.0) * t2 * t2 / T::lit(360.0))
    } else {
        axial.scale(theta / sin_theta)
    };
    AxisAngle::new(vector)
}

/// Unit axis of a rotation close to a half-turn.
///
/// `(R + Rᵀ)/2 = cos θ · I + (1 − cos θ) · a aᵀ`, so the column with the
/// largest diagonal entry of `aaᵀ` gives the axis up to sign. The sign comes
/// from the antisymmetric part `sin θ · a` while it is resolvable, otherwise
/// the first nonzero component is made positive.
fn half_turn_axis<T: Real>(m: &Mat3<T>, cos_theta: T, axial: &Vec3<T>) -> Vec3<T> {
    let sym = m.symmetric_part();
    let outer = (sym - Mat3::identity().scale(cos_theta)).scale((T::one() - cos_theta).recip());
    let k = (0..3)
        .max_by(|&i, &j| outer.get(i, i).partial_cmp(&outer.get(j, j)).unwrap())
        .unwrap_or(0);
    let mut axis = outer.column(k);
    axis = axis.scale(axis.norm().recip());

    if axial.norm() > T::structural_tol() {
        if axis.dot(axial) < T::zero() {
            axis = -axis;
        }
    } else if let Some(first) = axis.0.iter().find(|c| c.abs() > T::structural_tol()) {
        if *first < T::zero() {
            axis = -axis;
        }
    }
    axis
}

/// Riemannian distance `‖log(R₁⁻¹R₂)‖` (radians).
pub fn geodesic_distance<T: Real>(r1: &Rotation<T>, r2: &Rotation<T>) -> Result<T, So3Error> {
    let relative = r1.inverse().compose(r2);
    Ok(log_so3(&relative)?.angle())
}

/// `sinc(θ) / sinc²(θ/2)`, which simplifies to `(θ/2)·cot(θ/2)`.
///
/// Decreasing from 1 at θ = 0 to 0 at θ = π.
pub fn sinc_ratio<T: Real>(theta: T) -> Result<T, So3Error> {
    if !theta.is_finite() {
        return Err(So3Error::NonFinite);
    }
    if theta < T::zero() || theta > T::PI() + T::structural_tol() {
        return Err(So3Error::AngleOutOfRange {
            theta: theta.as_f64(),
        });
    }
    Ok(sinc_ratio_unchecked(theta))
}

pub(crate) fn sinc_ratio_unchecked<T: Real>(theta: T) -> T {
    if theta < T::lit(TAYLOR_THRESHOLD) {
        let t2 = theta * theta;
        return T::one() - t2 / T::lit(12.0) - t2 * t2 / T::lit(720.0);
    }
    let half = (theta * T::lit(0.5)).min(T::FRAC_PI_2());
    let (s, c) = half.sin_cos();
    (half * c / s).max(T::zero()).min(T::one())
}
