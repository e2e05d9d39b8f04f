//! Finite-time attitude synchronization of rigid bodies in axis-angle
//! coordinates, driven by a distributed signum controller.
//!
//! Everything numeric is generic over [`Real`] (`f64` or `f32`); the aliases
//! below pin the common case.

pub mod controller;
pub mod graph;
pub mod initial;
pub mod kinematics;
pub mod linalg;
pub mod network;
pub mod scalar;
pub mod simulator;
pub mod so3;

pub use controller::{closed_loop_rhs, control_input, control_input_incidence, ControlError, SignMode};
pub use graph::{Graph, GraphError, IncidenceMatrix};
pub use kinematics::{lambda_min, state_derivative, transition_matrix, BodyVelocity, KinematicsError};
pub use linalg::{Mat3, Vec3};
pub use network::{NetworkState, StateError};
pub use scalar::Real;
pub use simulator::{build_report, integrate, ConfigError, EventKind, MonitorReport, SimConfig, TrajectoryRecord};
pub use so3::{exp_so3, geodesic_distance, hat, log_so3, sinc_ratio, vee, AxisAngle, Rotation, So3Error};

pub type Vec3d = Vec3<f64>;
pub type Mat3d = Mat3<f64>;
pub type Rotationd = Rotation<f64>;
pub type AxisAngled = AxisAngle<f64>;
pub type NetworkStated = NetworkState<f64>;
pub type SimConfigd = SimConfig<f64>;
pub type TrajectoryRecordd = TrajectoryRecord<f64>;
pub type MonitorReportd = MonitorReport<f64>;

pub type Vec3f = Vec3<f32>;
pub type Mat3f = Mat3<f32>;
pub type Rotationf = Rotation<f32>;
pub type AxisAnglef = AxisAngle<f32>;
pub type NetworkStatef = NetworkState<f32>;
pub type SimConfigf = SimConfig<f32>;
pub type TrajectoryRecordf = TrajectoryRecord<f32>;
pub type MonitorReportf = MonitorReport<f32>;
