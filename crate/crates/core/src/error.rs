use thiserror::Error;

use crate::curve::Method;

pub type Result<T> = std::result::Result<T, InterpError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InterpError {
    #[error("quaternion has zero norm")]
    ZeroNorm,

    #[error("rotation quaternion is not unit (norm {norm})")]
    NonUnitRotation { norm: f64 },

    #[error("vector is not on the unit sphere (norm {norm})")]
    NotUnit { norm: f64 },

    #[error("non-finite value in input")]
    NonFinite,

    #[error("points are antipodal (angle {angle} rad), geodesic is not unique")]
    AntipodalPoints { angle: f64 },

    #[error("knots {index} and {} are exactly a quarter turn apart; sign flip is ambiguous", index + 1)]
    AmbiguousAntipode { index: usize },

    #[error("interpolant left the pure-quaternion subspace (scalar part {w})")]
    Impurity { w: f64 },

    #[error("SIDER order {order} exceeds the recursion cap {max}")]
    RecursionDepth { order: usize, max: usize },

    #[error("SIDER order must be at least 2, got {0}")]
    InvalidOrder(usize),

    #[error("timestamps are not uniformly spaced (knot {index})")]
    UniformTimeRequired { index: usize },

    #[error("parameter {t} outside curve domain [{lo}, {hi}]")]
    Domain { t: f64, lo: f64, hi: f64 },

    #[error("expected {expected} knots, got {got}")]
    WindowSize { expected: usize, got: usize },

    #[error("at least {min} knots are required, got {got}")]
    TooFewKnots { min: usize, got: usize },

    #[error("method {0} is not supported here")]
    UnsupportedMethod(Method),

    #[error("blend endpoints coincide; closed-form derivative is singular at t = {t}")]
    DegenerateBlend { t: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
