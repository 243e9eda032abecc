//! SIDER-n: spherical curves through `n + 1` equally spaced knots, built by
//! recursive SLERP blending of two SIDER-(n-1) curves down to the quadratic
//! case.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::Serialize;

use crate::curve::{Method, SphericalCurve};
use crate::derivatives::{self, DerivativeBundle};
use crate::error::{InterpError, Result};
use crate::geodesic::{canonicalize_points, slerp, slerp_unit, KnotSequence};
use crate::quat::{Quaternion, SpherePoint};

/// Highest SIDER order accepted by default. Cost doubles per level.
pub const MAX_SIDER_ORDER: usize = 8;

/// Extrapolated control points of a quadratic SIDER curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SiderControls2 {
    /// `SLERP(q3, q2, 2)`: `p2` reflected away from `p3`.
    pub c_2a: SpherePoint,
    /// `SLERP(q1, q2, 2)`: `p2` reflected away from `p1`.
    pub c_2b: SpherePoint,
}

/// Inner-parameter schedules `g`, `h`, `f` of a SIDER-n blend on `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlendSchedule {
    order: usize,
}

impl BlendSchedule {
    pub fn new(order: usize) -> Result<Self> {
        if order < 2 {
            return Err(InterpError::InvalidOrder(order));
        }
        Ok(Self { order })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Slope of `g` and `h`: `n / (n - 1)`.
    pub fn slope(&self) -> f64 {
        self.order as f64 / (self.order - 1) as f64
    }

    /// Parameter of the left SIDER-(n-1): `n t / (n - 1)`.
    pub fn g(&self, t: f64) -> f64 {
        self.slope() * t
    }

    /// Parameter of the right SIDER-(n-1): `g(t) - 1 / (n - 1)`.
    pub fn h(&self, t: f64) -> f64 {
        self.g(t) - 1.0 / (self.order - 1) as f64
    }

    /// Blend weight of the outer SLERP.
    pub fn f(&self, t: f64) -> f64 {
        t
    }
}

/// Validates and canonicalizes pure unit inputs of the free-function API.
fn sphere_points(qs: &[Quaternion]) -> Result<Vec<SpherePoint>> {
    let mut pts = qs
        .iter()
        .map(SpherePoint::from_quaternion)
        .collect::<Result<Vec<_>>>()?;
    canonicalize_points(&mut pts)?;
    Ok(pts)
}

/// Controls `c_2a = SLERP(q3, q2, 2)` and `c_2b = SLERP(q1, q2, 2)`.
pub fn sider2_controls(
    q1: &Quaternion,
    q2: &Quaternion,
    q3: &Quaternion,
) -> Result<SiderControls2> {
    let pts = sphere_points(&[*q1, *q2, *q3])?;
    let (d2a, d2b) = quadratic_controls(
        &pts[0].to_quaternion(),
        &pts[1].to_quaternion(),
        &pts[2].to_quaternion(),
    )?;
    Ok(SiderControls2 {
        c_2a: SpherePoint::from_quaternion_unchecked(&d2a),
        c_2b: SpherePoint::from_quaternion_unchecked(&d2b),
    })
}

fn quadratic_controls(
    q1: &Quaternion,
    q2: &Quaternion,
    q3: &Quaternion,
) -> Result<(Quaternion, Quaternion)> {
    Ok((slerp(q3, q2, 2.0)?, slerp(q1, q2, 2.0)?))
}

/// Quadratic SIDER through `q1, q2, q3` at `t = 0, 1/2, 1`.
pub fn sider2(q1: &Quaternion, q2: &Quaternion, q3: &Quaternion, t: f64) -> Result<Quaternion> {
    Ok(Sider::from_quaternions(&[*q1, *q2, *q3])?.eval(t))
}

/// Cubic SIDER through four knots at `t = 0, 1/3, 2/3, 1`.
pub fn sider3(
    q1: &Quaternion,
    q2: &Quaternion,
    q3: &Quaternion,
    q4: &Quaternion,
    t: f64,
) -> Result<Quaternion> {
    Ok(Sider::from_quaternions(&[*q1, *q2, *q3, *q4])?.eval(t))
}

/// SIDER of order `knots.len() - 1` at parameter `t`.
pub fn sider_n(knots: &[Quaternion], t: f64) -> Result<Quaternion> {
    Ok(Sider::from_quaternions(knots)?.eval(t))
}

#[derive(Debug, Clone)]
pub(crate) enum SiderNode {
    Quadratic {
        q1: Quaternion,
        d2a: Quaternion,
        d2b: Quaternion,
        q3: Quaternion,
    },
    Blend {
        schedule: BlendSchedule,
        left: Box<SiderNode>,
        right: Box<SiderNode>,
    },
}

impl SiderNode {
    fn build(qs: &[Quaternion]) -> Result<Self> {
        if qs.len() == 3 {
            let (d2a, d2b) = quadratic_controls(&qs[0], &qs[1], &qs[2])?;
            return Ok(SiderNode::Quadratic {
                q1: qs[0],
                d2a,
                d2b,
                q3: qs[2],
            });
        }
        let n = qs.len() - 1;
        Ok(SiderNode::Blend {
            schedule: BlendSchedule::new(n)?,
            left: Box::new(Self::build(&qs[..n])?),
            right: Box::new(Self::build(&qs[1..])?),
        })
    }

    fn eval(&self, t: f64) -> Quaternion {
        match self {
            SiderNode::Quadratic { q1, d2a, d2b, q3 } => {
                let a = slerp_unit(q1, d2a, t);
                let b = slerp_unit(d2b, q3, t);
                slerp_unit(&a, &b, t)
            }
            SiderNode::Blend {
                schedule,
                left,
                right,
            } => {
                let a = left.eval(schedule.g(t));
                let b = right.eval(schedule.h(t));
                slerp_unit(&a, &b, schedule.f(t))
            }
        }
    }
}

/// A SIDER-n curve on the local parameter `t ∈ [0, 1]`, knots at `i / n`.
///
/// Inner curves are evaluated outside `[0, 1]` (e.g. `g ∈ [0, 3/2]` for
/// SIDER3) and are never clamped.
#[derive(Debug, Clone)]
pub struct Sider {
    order: usize,
    pub(crate) root: SiderNode,
}

impl Sider {
    pub fn new(points: &[SpherePoint]) -> Result<Self> {
        Self::with_max_order(points, MAX_SIDER_ORDER)
    }

    pub fn with_max_order(points: &[SpherePoint], max_order: usize) -> Result<Self> {
        if points.len() < 3 {
            return Err(InterpError::InvalidOrder(points.len().saturating_sub(1)));
        }
        let order = points.len() - 1;
        if order > max_order {
            return Err(InterpError::RecursionDepth {
                order,
                max: max_order,
            });
        }
        let mut pts = points.to_vec();
        canonicalize_points(&mut pts)?;
        let qs: Vec<Quaternion> = pts.iter().map(|p| p.to_quaternion()).collect();
        Ok(Self {
            order,
            root: SiderNode::build(&qs)?,
        })
    }

    pub fn from_quaternions(qs: &[Quaternion]) -> Result<Self> {
        Self::new(&sphere_points(qs)?)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Pure unit quaternion at local parameter `t`.
    pub fn eval(&self, t: f64) -> Quaternion {
        Quaternion::pure(self.root.eval(t).v).renormalized()
    }
}

/// A [`Sider`] mapped onto the absolute time span of its knots.
#[derive(Debug, Clone)]
pub struct SiderCurve {
    sider: Sider,
    t_start: f64,
    span: f64,
}

impl SiderCurve {
    /// SIDER of order `knots.len() - 1` through every knot.
    pub fn new(knots: &KnotSequence) -> Result<Self> {
        let sider = Sider::new(knots.points())?;
        Ok(Self {
            t_start: knots.t0(),
            span: knots.end_time() - knots.t0(),
            sider,
        })
    }

    pub fn sider(&self) -> &Sider {
        &self.sider
    }

    pub fn order(&self) -> usize {
        self.sider.order
    }

    /// Local parameter of absolute time `t`.
    pub fn local(&self, t: f64) -> f64 {
        (t - self.t_start) / self.span
    }

    pub fn span(&self) -> f64 {
        self.span
    }
}

impl SphericalCurve for SiderCurve {
    fn method(&self) -> Method {
        match self.sider.order {
            2 => Method::Sider2,
            3 => Method::Sider3,
            _ => Method::Sider4,
        }
    }

    fn domain(&self) -> (f64, f64) {
        (self.t_start, self.t_start + self.span)
    }

    fn eval_quaternion(&self, t: f64) -> Quaternion {
        self.sider.eval(self.local(t))
    }

    fn slerp_calls_per_eval(&self) -> u32 {
        (1u32 << self.sider.order) - 1
    }

    fn analytic_derivatives(&self, t: f64) -> Result<DerivativeBundle> {
        derivatives::sider_derivatives(self, t)
    }
}

/// Per-pair outcome of [`validate_knots`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairReport {
    pub index: usize,
    /// Angle between the pair after canonical sign flips.
    pub angle: f64,
    /// The second knot of the pair was negated.
    pub flipped: bool,
    /// The pair is a quarter turn apart and cannot be canonicalized.
    pub ambiguous: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ValidationWarning {
    /// Every knot lies on one great circle; higher-order schemes degenerate.
    GreatCircle { max_triple_product: f64 },
    /// A SIDER2 control point of pair `index` lies within π/8 of the antipode
    /// from its anchor knot.
    ControlSpread { index: usize, angle: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub pairs: Vec<PairReport>,
    pub warnings: Vec<ValidationWarning>,
}

impl ValidationReport {
    pub fn is_fatal(&self) -> bool {
        self.pairs.iter().any(|p| p.ambiguous)
    }

    pub fn flipped(&self) -> impl Iterator<Item = usize> + '_ {
        self.pairs.iter().filter(|p| p.flipped).map(|p| p.index + 1)
    }

    pub fn great_circle(&self) -> bool {
        self.warnings
            .iter()
            .any(|w| matches!(w, ValidationWarning::GreatCircle { .. }))
    }
}

/// Largest `|p_i · (p_j × p_k)|` over distinct triples. Exhaustive up to 128
/// knots; beyond that, triples anchored on the best-conditioned pair through
/// the first knot.
fn max_triple_product(pts: &[SpherePoint]) -> f64 {
    let v: Vec<_> = pts.iter().map(|p| p.vector()).collect();
    let n = v.len();
    let mut best: f64 = 0.0;
    if n <= 128 {
        for i in 0..n {
            for j in i + 1..n {
                let c = v[i].cross(&v[j]);
                for vk in &v[j + 1..] {
                    best = best.max(c.dot(vk).abs());
                }
            }
        }
    } else {
        let (j, _) = v
            .iter()
            .enumerate()
            .skip(1)
            .map(|(j, vj)| (j, v[0].cross(vj).norm()))
            .fold((1, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        let c = v[0].cross(&v[j]);
        for vk in &v {
            best = best.max(c.dot(vk).abs());
        }
    }
    best
}

/// Control-to-anchor angle beyond which the SIDER2 controls are flagged.
const CONTROL_SPREAD_LIMIT: f64 = 7.0 * PI / 8.0;

/// Checks adjacency angles, sign flips, great-circle degeneracy and control
/// spread. Never fails; fatal conditions are flagged in the report.
pub fn validate_knots(knots: &KnotSequence) -> ValidationReport {
    let mut pts = knots.points().to_vec();
    let mut pairs = Vec::with_capacity(pts.len() - 1);
    for i in 0..pts.len() - 1 {
        let raw = pts[i].angle_to(&pts[i + 1]);
        let ambiguous = (raw - FRAC_PI_2).abs() <= 1e-9;
        let flipped = !ambiguous && pts[i].dot(&pts[i + 1]) < 0.0;
        if flipped {
            pts[i + 1] = pts[i + 1].antipode();
        }
        pairs.push(PairReport {
            index: i,
            angle: pts[i].angle_to(&pts[i + 1]),
            flipped,
            ambiguous,
        });
    }

    let mut warnings = Vec::new();
    if pts.len() >= 3 {
        let triple = max_triple_product(&pts);
        if triple <= 1e-9 {
            warnings.push(ValidationWarning::GreatCircle {
                max_triple_product: triple,
            });
        }
        for p in &pairs {
            if 2.0 * p.angle > CONTROL_SPREAD_LIMIT {
                warnings.push(ValidationWarning::ControlSpread {
                    index: p.index,
                    angle: 2.0 * p.angle,
                });
            }
        }
    }
    ValidationReport { pairs, warnings }
}
