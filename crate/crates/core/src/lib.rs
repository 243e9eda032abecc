//! Interpolation of curves on the unit sphere S² with quaternion SLERP
//! compositions: piecewise SLERP, SQUAD, the recursive SIDER family and the
//! non-oscillatory SENO stencil selection.

pub mod curve;
pub mod datasets;
pub mod derivatives;
pub mod error;
pub mod geodesic;
pub mod harness;
pub mod io;
pub mod quat;
pub mod seno;
pub mod sider;

pub use curve::{build_interpolant, BuildOptions, CurveSegment, Method, SphericalCurve};
pub use derivatives::{
    angular_kinematics, fd_derivatives, knot_jump, AngularKinematics, DerivativeBundle,
    DerivativeSource, KnotJump,
};
pub use error::{InterpError, Result};
pub use geodesic::{count_slerp_calls, slerp, KnotSequence, PiecewiseSlerp, SquadCurve};
pub use quat::{rotate, Quaternion, RotationQuaternion, SpherePoint, Vec3};
pub use seno::{
    seno_select, variation, IntervalSelection, SenoCurve, StencilCandidate, VariationEstimate,
};
pub use sider::{validate_knots, Sider, SiderCurve, ValidationReport};
