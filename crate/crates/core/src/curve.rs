use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::derivatives::DerivativeBundle;
use crate::error::{InterpError, Result};
use crate::geodesic::{KnotSequence, PiecewiseSlerp, SquadCurve};
use crate::quat::{Quaternion, SpherePoint};
use crate::seno::SenoCurve;
use crate::sider::SiderCurve;

/// Interpolation scheme tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Slerp,
    Squad,
    Sider2,
    Sider3,
    Sider4,
    Seno2,
    Seno3,
}

impl Method {
    pub const ALL: [Method; 7] = [
        Method::Slerp,
        Method::Squad,
        Method::Sider2,
        Method::Sider3,
        Method::Sider4,
        Method::Seno2,
        Method::Seno3,
    ];

    /// SLERP calls spent per evaluation of an interior sample.
    pub fn slerp_calls_per_eval(self) -> u32 {
        match self {
            Method::Slerp => 1,
            Method::Squad => 3,
            Method::Sider2 => 3,
            Method::Sider3 => 7,
            Method::Sider4 => 15,
            Method::Seno2 => 6,
            Method::Seno3 => 21,
        }
    }

    /// Knots consumed by one local reconstruction.
    pub fn stencil_points(self) -> usize {
        match self {
            Method::Slerp => 2,
            Method::Squad => 4,
            Method::Sider2 => 3,
            Method::Sider3 => 4,
            Method::Sider4 => 5,
            Method::Seno2 => 4,
            Method::Seno3 => 6,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Method::Slerp => "slerp",
            Method::Squad => "squad",
            Method::Sider2 => "sider2",
            Method::Sider3 => "sider3",
            Method::Sider4 => "sider4",
            Method::Seno2 => "seno2",
            Method::Seno3 => "seno3",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = InterpError;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| InterpError::InvalidArgument(format!("unknown method `{s}`")))
    }
}

/// A parametric curve on S² over a closed time interval.
///
/// Evaluation outside the domain extrapolates with the nearest piece.
pub trait SphericalCurve: Send + Sync {
    fn method(&self) -> Method;

    fn domain(&self) -> (f64, f64);

    /// The curve as a pure unit quaternion `(0, p(t))`.
    fn eval_quaternion(&self, t: f64) -> Quaternion;

    fn eval(&self, t: f64) -> SpherePoint {
        SpherePoint::from_quaternion_unchecked(&self.eval_quaternion(t))
    }

    fn slerp_calls_per_eval(&self) -> u32 {
        self.method().slerp_calls_per_eval()
    }

    /// Closed-form position, velocity and acceleration at `t`.
    fn analytic_derivatives(&self, t: f64) -> Result<DerivativeBundle> {
        let _ = t;
        Err(InterpError::UnsupportedMethod(self.method()))
    }
}

pub type CurveSegment = Box<dyn SphericalCurve>;

/// Tuning knobs for [`build_interpolant`].
#[derive(Debug, Clone, Copy)]
pub struct BuildOptions {
    /// Interior quadrature points for the SENO variation estimate.
    pub variation_points: usize,
}

impl Default for BuildOptions {
    fn default() -> Self {
        Self {
            variation_points: 3,
        }
    }
}

/// Builds the interpolant of `method` through `knots`.
///
/// SIDER methods need exactly `n + 1` knots; the others accept any length at
/// or above their minimum.
pub fn build_interpolant(
    method: Method,
    knots: &KnotSequence,
    opts: &BuildOptions,
) -> Result<CurveSegment> {
    Ok(match method {
        Method::Slerp => Box::new(PiecewiseSlerp::new(knots)?),
        Method::Squad => Box::new(SquadCurve::new(knots)?),
        Method::Sider2 | Method::Sider3 | Method::Sider4 => {
            let order = method.stencil_points() - 1;
            if knots.len() != order + 1 {
                return Err(InterpError::WindowSize {
                    expected: order + 1,
                    got: knots.len(),
                });
            }
            Box::new(SiderCurve::new(knots)?)
        }
        Method::Seno2 => Box::new(SenoCurve::new(knots, 2, opts.variation_points)?),
        Method::Seno3 => Box::new(SenoCurve::new(knots, 3, opts.variation_points)?),
    })
}
