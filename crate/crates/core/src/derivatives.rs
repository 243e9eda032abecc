//! Analytic and finite-difference derivatives of the interpolants.
//!
//! Analytic derivatives propagate a second-order jet through every SLERP of a
//! composition, writing `SLERP(P, S, f) = P exp(f ln(P* S))` and
//! differentiating the angle and axis of `P* S` directly.

use serde::Serialize;

use crate::curve::SphericalCurve;
use crate::error::{InterpError, Result};
use crate::geodesic::{PiecewiseSlerp, SquadCurve};
use crate::quat::{Quaternion, Vec3};
use crate::sider::{SiderCurve, SiderNode};

/// Below this `sin θ` the axis of `P* S` is undefined.
const DEGENERATE_SIN: f64 = 1e-12;

/// A quaternion-valued function with its first two derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuatJet {
    pub q: Quaternion,
    pub d1: Quaternion,
    pub d2: Quaternion,
}

impl QuatJet {
    pub fn constant(q: Quaternion) -> Self {
        Self {
            q,
            d1: Quaternion::zero(),
            d2: Quaternion::zero(),
        }
    }
}

/// Jet of `SLERP(P(t), S(t), f(t))` from jets of `P`, `S` and `(f, f', f'')`.
///
/// `None` when `P` and `S` (nearly) coincide or are antipodal.
pub fn slerp_jet(p: &QuatJet, s: &QuatJet, f: (f64, f64, f64)) -> Option<QuatJet> {
    let (f0, f1, f2) = f;
    let w = p.q.conjugate() * s.q;
    let w1 = p.d1.conjugate() * s.q + p.q.conjugate() * s.d1;
    let w2 = p.d2.conjugate() * s.q + (p.d1.conjugate() * s.d1).scale(2.0) + p.q.conjugate() * s.d2;

    let sin = w.v.norm();
    if sin < DEGENERATE_SIN || !sin.is_finite() {
        return None;
    }
    let cos = w.w;
    let theta = sin.atan2(cos);
    let th1 = -w1.w / sin;
    let th2 = -(w2.w + cos * th1 * th1) / sin;
    let a = w.v / sin;
    let a1 = (w1.v - a * (cos * th1)) / sin;
    let a2 = (w2.v + a * (sin * th1 * th1) - a * (cos * th2) - a1 * (2.0 * cos * th1)) / sin;

    let phi = f0 * theta;
    let phi1 = f1 * theta + f0 * th1;
    let phi2 = f2 * theta + 2.0 * f1 * th1 + f0 * th2;
    let (sp, cp) = phi.sin_cos();
    let e = Quaternion::from_parts(cp, a * sp);
    let e1 = Quaternion::from_parts(-sp * phi1, a * (cp * phi1) + a1 * sp);
    let e2 = Quaternion::from_parts(
        -cp * phi1 * phi1 - sp * phi2,
        a * (cp * phi2 - sp * phi1 * phi1) + a1 * (2.0 * cp * phi1) + a2 * sp,
    );
    Some(QuatJet {
        q: p.q * e,
        d1: p.d1 * e + p.q * e1,
        d2: p.d2 * e + (p.d1 * e1).scale(2.0) + p.q * e2,
    })
}

/// First and second `t`-derivatives of `SLERP(qa, qb, t)` for fixed unit
/// endpoints: `S L` and `S L²` with `L = ln(qa* qb)`.
pub fn slerp_derivative(
    qa: &Quaternion,
    qb: &Quaternion,
    t: f64,
) -> Result<(Quaternion, Quaternion)> {
    let l = (qa.inverse()? * *qb).ln()?;
    let s = *qa * (l.scale(t)).exp();
    let sl = s * l;
    Ok((sl, sl * l))
}

fn linear(t: f64) -> (f64, f64, f64) {
    (t, 1.0, 0.0)
}

fn sider_node_jet(node: &SiderNode, s: f64, ds: f64) -> Option<QuatJet> {
    match node {
        SiderNode::Quadratic { q1, d2a, d2b, q3 } => {
            let f = (s, ds, 0.0);
            let a = slerp_jet(&QuatJet::constant(*q1), &QuatJet::constant(*d2a), f)?;
            let b = slerp_jet(&QuatJet::constant(*d2b), &QuatJet::constant(*q3), f)?;
            slerp_jet(&a, &b, f)
        }
        SiderNode::Blend {
            schedule,
            left,
            right,
        } => {
            let inner = schedule.slope() * ds;
            let a = sider_node_jet(left, schedule.g(s), inner)?;
            let b = sider_node_jet(right, schedule.h(s), inner)?;
            slerp_jet(&a, &b, (schedule.f(s), ds, 0.0))
        }
    }
}

/// Where a derivative estimate came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DerivativeSource {
    Analytic,
    Central,
    Forward,
    Backward,
}

/// Position and derivatives of a curve on S² with respect to absolute time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivativeBundle {
    pub t: f64,
    pub value: Vec3,
    pub d1: Vec3,
    pub d2: Vec3,
    /// Finite-difference estimates only.
    pub d3: Option<Vec3>,
    pub source: DerivativeSource,
}

impl DerivativeBundle {
    fn from_local_jet(t: f64, jet: QuatJet, scale: f64) -> Self {
        Self {
            t,
            value: jet.q.v,
            d1: jet.d1.v * scale,
            d2: jet.d2.v * (scale * scale),
            d3: None,
            source: DerivativeSource::Analytic,
        }
    }
}

pub(crate) fn piecewise_slerp_derivatives(
    curve: &PiecewiseSlerp,
    t: f64,
) -> Result<DerivativeBundle> {
    let (i, u) = curve.knots().locate(t);
    let q = curve.quats();
    let (d1, d2) = slerp_derivative(&q[i], &q[i + 1], u)?;
    let jet = QuatJet {
        q: curve.eval_quaternion(t),
        d1,
        d2,
    };
    Ok(DerivativeBundle::from_local_jet(
        t,
        jet,
        1.0 / curve.knots().dt(),
    ))
}

pub(crate) fn squad_derivatives(curve: &SquadCurve, t: f64) -> Result<DerivativeBundle> {
    let (i, u) = curve.knots().locate(t);
    let q = curve.quats();
    let c = curve.controls();
    let outer = slerp_jet(
        &QuatJet::constant(q[i]),
        &QuatJet::constant(q[i + 1]),
        linear(u),
    );
    let inner = slerp_jet(
        &QuatJet::constant(c[i]),
        &QuatJet::constant(c[i + 1]),
        linear(u),
    );
    let jet = match (outer, inner) {
        (Some(a), Some(b)) => slerp_jet(&a, &b, (2.0 * u * (1.0 - u), 2.0 - 4.0 * u, -4.0)),
        _ => None,
    }
    .ok_or(InterpError::DegenerateBlend { t })?;
    Ok(DerivativeBundle::from_local_jet(
        t,
        jet,
        1.0 / curve.knots().dt(),
    ))
}

pub(crate) fn sider_derivatives(curve: &SiderCurve, t: f64) -> Result<DerivativeBundle> {
    if curve.order() > 3 {
        return Err(InterpError::UnsupportedMethod(curve.method()));
    }
    let jet = sider_node_jet(&curve.sider().root, curve.local(t), 1.0)
        .ok_or(InterpError::DegenerateBlend { t })?;
    Ok(DerivativeBundle::from_local_jet(t, jet, 1.0 / curve.span()))
}

/// Which samples a finite-difference stencil may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Central,
    Forward,
    Backward,
}

fn at(curve: &dyn SphericalCurve, t: f64) -> Vec3 {
    curve.eval_quaternion(t).v
}

/// Second-order accurate `(d1, d2, d3)` at `t` from samples spaced `h` apart.
///
/// One-sided stencils reach `4h` into their side; the central one `2h`.
pub fn fd_stencil(curve: &dyn SphericalCurve, t: f64, h: f64, side: Side) -> [Vec3; 3] {
    match side {
        Side::Central => {
            let (m2, m1, z, p1, p2) = (
                at(curve, t - 2.0 * h),
                at(curve, t - h),
                at(curve, t),
                at(curve, t + h),
                at(curve, t + 2.0 * h),
            );
            [
                (p1 - m1) / (2.0 * h),
                (p1 - 2.0 * z + m1) / (h * h),
                (p2 - 2.0 * p1 + 2.0 * m1 - m2) / (2.0 * h * h * h),
            ]
        }
        Side::Forward | Side::Backward => {
            let sign = if side == Side::Forward { 1.0 } else { -1.0 };
            let f: Vec<Vec3> = (0..5).map(|j| at(curve, t + sign * j as f64 * h)).collect();
            let d1 = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
            let d2 = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / (h * h);
            let d3 = (-5.0 * f[0] + 18.0 * f[1] - 24.0 * f[2] + 14.0 * f[3] - 3.0 * f[4])
                / (2.0 * h * h * h);
            [d1 * sign, d2, d3 * sign]
        }
    }
}

/// Finite-difference derivatives, central where the stencil fits inside the
/// domain and one-sided near its ends.
pub fn fd_derivatives(curve: &dyn SphericalCurve, t: f64, h: f64) -> DerivativeBundle {
    let (lo, hi) = curve.domain();
    let (side, source) = if t - 2.0 * h >= lo && t + 2.0 * h <= hi {
        (Side::Central, DerivativeSource::Central)
    } else if t + 4.0 * h <= hi {
        (Side::Forward, DerivativeSource::Forward)
    } else {
        (Side::Backward, DerivativeSource::Backward)
    };
    let [d1, d2, d3] = fd_stencil(curve, t, h, side);
    DerivativeBundle {
        t,
        value: at(curve, t),
        d1,
        d2,
        d3: Some(d3),
        source,
    }
}

/// Magnitudes of the one-sided derivative jumps across a knot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KnotJump {
    pub t: f64,
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
}

/// `|left limit − right limit|` of the first three derivatives at `t`.
///
/// The first two orders use step `h`; the third uses `h3`, which must be
/// large enough that roundoff (about `ε / h3³`) stays below the jump of
/// interest.
pub fn knot_jump(curve: &dyn SphericalCurve, t: f64, h: f64, h3: f64) -> KnotJump {
    let left = fd_stencil(curve, t, h, Side::Backward);
    let right = fd_stencil(curve, t, h, Side::Forward);
    let left3 = fd_stencil(curve, t, h3, Side::Backward)[2];
    let right3 = fd_stencil(curve, t, h3, Side::Forward)[2];
    KnotJump {
        t,
        d1: (left[0] - right[0]).norm(),
        d2: (left[1] - right[1]).norm(),
        d3: (left3 - right3).norm(),
    }
}

/// Angular velocity, acceleration and jerk of a point curve carried as the
/// pure quaternion `q(t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngularKinematics {
    /// `vec(2 q' q⁻¹)`.
    pub omega: Vec3,
    /// `vec((2 q'' − ω q') q⁻¹)`.
    pub alpha: Vec3,
    /// `vec((2 q''' − 2 α q' − ω q'') q⁻¹)`, when `q'''` is known.
    pub zeta: Option<Vec3>,
    /// Largest `|real part|` dropped from the three products.
    pub max_real_part: f64,
}

pub fn angular_kinematics(bundle: &DerivativeBundle) -> Result<AngularKinematics> {
    let q = Quaternion::pure(bundle.value);
    let inv = q.inverse()?;
    let q1 = Quaternion::pure(bundle.d1);
    let q2 = Quaternion::pure(bundle.d2);
    let omega = q1.scale(2.0) * inv;
    let om = Quaternion::pure(omega.v);
    let alpha = (q2.scale(2.0) - om * q1) * inv;
    let mut max_real_part = omega.w.abs().max(alpha.w.abs());
    let zeta = bundle.d3.map(|d3| {
        let al = Quaternion::pure(alpha.v);
        let z = (Quaternion::pure(d3).scale(2.0) - (al * q1).scale(2.0) - om * q2) * inv;
        max_real_part = max_real_part.max(z.w.abs());
        z.v
    });
    Ok(AngularKinematics {
        omega: omega.v,
        alpha: alpha.v,
        zeta,
        max_real_part,
    })
}
