//! SLERP, piecewise SLERP and SQUAD.

use std::cell::Cell;
use std::f64::consts::{FRAC_PI_2, PI};

use crate::curve::{Method, SphericalCurve};
use crate::derivatives::{self, DerivativeBundle};
use crate::error::{InterpError, Result};
use crate::quat::{Quaternion, SpherePoint};

/// Below this angle SLERP falls back to a normalized linear blend.
const PARALLEL_ANGLE: f64 = 1e-8;
/// Points closer than this to antipodal are rejected.
const ANTIPODAL_MARGIN: f64 = 1e-9;
/// Adjacent knots within this of a quarter turn cannot be sign-canonicalized.
const QUARTER_TURN_TOL: f64 = 1e-9;

thread_local! {
    static SLERP_CALLS: Cell<u64> = const { Cell::new(0) };
}

/// Runs `f` and returns its result with the number of SLERP evaluations it made
/// on the current thread.
pub fn count_slerp_calls<R>(f: impl FnOnce() -> R) -> (R, u64) {
    let before = SLERP_CALLS.with(Cell::get);
    let out = f();
    let after = SLERP_CALLS.with(Cell::get);
    (out, after - before)
}

/// Angle between unit quaternions viewed as points on S³.
fn angle_4d(a: &Quaternion, b: &Quaternion) -> f64 {
    2.0 * (*a - *b).norm().atan2((*a + *b).norm())
}

/// SLERP of unit quaternions without precondition checks.
///
/// Equals `a (a⁻¹ b)^t` for every real `t`; no clamping and no shortest-path
/// sign flip.
pub(crate) fn slerp_unit(a: &Quaternion, b: &Quaternion, t: f64) -> Quaternion {
    SLERP_CALLS.with(|c| c.set(c.get() + 1));
    let theta = angle_4d(a, b);
    if theta < PARALLEL_ANGLE {
        return (a.scale(1.0 - t) + b.scale(t)).renormalized_or(*a);
    }
    let s = theta.sin();
    (a.scale(((1.0 - t) * theta).sin() / s) + b.scale((t * theta).sin() / s)).renormalized()
}

/// `qa (qa⁻¹ qb)^t` for unit quaternions, with any real `t`.
pub fn slerp(qa: &Quaternion, qb: &Quaternion, t: f64) -> Result<Quaternion> {
    for q in [qa, qb] {
        if !q.is_finite() || !t.is_finite() {
            return Err(InterpError::NonFinite);
        }
        if (q.norm() - 1.0).abs() > 1e-9 {
            return Err(InterpError::NotUnit { norm: q.norm() });
        }
    }
    let angle = angle_4d(qa, qb);
    if angle >= PI - ANTIPODAL_MARGIN {
        return Err(InterpError::AntipodalPoints { angle });
    }
    Ok(slerp_unit(qa, qb, t))
}

/// SLERP between two sphere points.
pub fn slerp_points(pa: &SpherePoint, pb: &SpherePoint, t: f64) -> Result<SpherePoint> {
    let q = slerp(&pa.to_quaternion(), &pb.to_quaternion(), t)?;
    Ok(SpherePoint::from_quaternion_unchecked(&q))
}

/// `SLERP(-qa, -qb, t) == -SLERP(qa, qb, t)` to 1e-12.
pub fn slerp_negation_check(qa: &Quaternion, qb: &Quaternion, t: f64) -> bool {
    match (slerp(&-*qa, &-*qb, t), slerp(qa, qb, t)) {
        (Ok(neg), Ok(pos)) => (neg + pos).norm() <= 1e-12,
        _ => false,
    }
}

/// Ordered sphere points at uniformly spaced times `t0 + i·dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct KnotSequence {
    points: Vec<SpherePoint>,
    t0: f64,
    dt: f64,
}

impl KnotSequence {
    pub fn new(points: Vec<SpherePoint>, t0: f64, dt: f64) -> Result<Self> {
        if points.len() < 2 {
            return Err(InterpError::TooFewKnots {
                min: 2,
                got: points.len(),
            });
        }
        if !(dt.is_finite() && dt > 0.0 && t0.is_finite()) {
            return Err(InterpError::InvalidArgument(format!(
                "time spacing must be positive and finite, got t0={t0}, dt={dt}"
            )));
        }
        Ok(Self { points, t0, dt })
    }

    /// Knots on `[0, len - 1]` with unit spacing.
    pub fn indexed(points: Vec<SpherePoint>) -> Result<Self> {
        Self::new(points, 0.0, 1.0)
    }

    /// Builds from `(t, p)` rows, requiring uniform spacing to 1e-9 relative.
    pub fn from_timed(rows: &[(f64, SpherePoint)]) -> Result<Self> {
        if rows.len() < 2 {
            return Err(InterpError::TooFewKnots {
                min: 2,
                got: rows.len(),
            });
        }
        let t0 = rows[0].0;
        let dt = (rows[rows.len() - 1].0 - t0) / (rows.len() - 1) as f64;
        let tol = 1e-9 * (rows[rows.len() - 1].0 - t0).abs().max(1.0);
        for (i, (t, _)) in rows.iter().enumerate() {
            if (t - (t0 + i as f64 * dt)).abs() > tol {
                return Err(InterpError::UniformTimeRequired { index: i });
            }
        }
        Self::new(rows.iter().map(|(_, p)| *p).collect(), t0, dt)
    }

    pub fn points(&self) -> &[SpherePoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn time(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.dt
    }

    pub fn end_time(&self) -> f64 {
        self.time(self.points.len() - 1)
    }

    pub fn intervals(&self) -> usize {
        self.points.len() - 1
    }

    /// Interval index containing `t` (clamped to the ends) and the local
    /// parameter `u = (t - t_i) / dt`.
    pub fn locate(&self, t: f64) -> (usize, f64) {
        let x = (t - self.t0) / self.dt;
        let i = (x.floor().max(0.0) as usize).min(self.intervals() - 1);
        (i, x - i as f64)
    }

    /// Consecutive sub-sequence `[start, start + count)`, keeping absolute times.
    pub fn window(&self, start: usize, count: usize) -> Result<Self> {
        if start + count > self.len() {
            return Err(InterpError::WindowSize {
                expected: start + count,
                got: self.len(),
            });
        }
        Self::new(
            self.points[start..start + count].to_vec(),
            self.time(start),
            self.dt,
        )
    }

    /// Flips successive knots onto the hemisphere of their predecessor.
    ///
    /// Returns the flipped sequence and, per knot, whether it was negated.
    pub fn canonicalized(&self) -> Result<(Self, Vec<bool>)> {
        let mut points = self.points.clone();
        let flips = canonicalize_points(&mut points)?;
        Ok((
            Self {
                points,
                t0: self.t0,
                dt: self.dt,
            },
            flips,
        ))
    }
}

/// In-place successive sign canonicalization: `p[i+1] ← -p[i+1]` whenever
/// `p[i]·p[i+1] < 0`.
pub fn canonicalize_points(points: &mut [SpherePoint]) -> Result<Vec<bool>> {
    let mut flips = vec![false; points.len()];
    for i in 0..points.len().saturating_sub(1) {
        let angle = points[i].angle_to(&points[i + 1]);
        if (angle - FRAC_PI_2).abs() <= QUARTER_TURN_TOL {
            return Err(InterpError::AmbiguousAntipode { index: i });
        }
        if points[i].dot(&points[i + 1]) < 0.0 {
            points[i + 1] = points[i + 1].antipode();
            flips[i + 1] = true;
        }
    }
    Ok(flips)
}

/// Geodesic arcs between consecutive knots.
#[derive(Debug, Clone)]
pub struct PiecewiseSlerp {
    knots: KnotSequence,
    quats: Vec<Quaternion>,
}

impl PiecewiseSlerp {
    pub fn new(knots: &KnotSequence) -> Result<Self> {
        let (knots, _) = knots.canonicalized()?;
        let quats: Vec<Quaternion> = knots.points().iter().map(|p| p.to_quaternion()).collect();
        Ok(Self { knots, quats })
    }

    pub fn knots(&self) -> &KnotSequence {
        &self.knots
    }

    pub(crate) fn quats(&self) -> &[Quaternion] {
        &self.quats
    }
}

impl SphericalCurve for PiecewiseSlerp {
    fn method(&self) -> Method {
        Method::Slerp
    }

    fn domain(&self) -> (f64, f64) {
        (self.knots.t0(), self.knots.end_time())
    }

    fn eval_quaternion(&self, t: f64) -> Quaternion {
        let (i, u) = self.knots.locate(t);
        slerp_unit(&self.quats[i], &self.quats[i + 1], u)
    }

    fn analytic_derivatives(&self, t: f64) -> Result<DerivativeBundle> {
        derivatives::piecewise_slerp_derivatives(self, t)
    }
}

/// `q exp(-¼ (ln(q⁻¹ q_next) + ln(q⁻¹ q_prev)))`.
pub fn squad_control(
    q_prev: &Quaternion,
    q: &Quaternion,
    q_next: &Quaternion,
) -> Result<Quaternion> {
    let inv = q.inverse()?;
    let sum = (inv * *q_next).ln()? + (inv * *q_prev).ln()?;
    Ok((*q * sum.scale(-0.25).exp()).renormalized())
}

/// Inner control quaternions `(s_i, s_{i+1})` of the SQUAD piece from `q_i` to
/// `q_{i+1}`.
pub fn squad_controls(
    q_im1: &Quaternion,
    q_i: &Quaternion,
    q_ip1: &Quaternion,
    q_ip2: &Quaternion,
) -> Result<(Quaternion, Quaternion)> {
    Ok((
        squad_control(q_im1, q_i, q_ip1)?,
        squad_control(q_i, q_ip1, q_ip2)?,
    ))
}

/// Zeroes a rounding-level scalar part and renormalizes; larger scalar parts
/// mean an input was not sign-canonical.
pub(crate) fn enforce_pure(q: Quaternion) -> Result<Quaternion> {
    if q.w.abs() >= 1e-9 {
        return Err(InterpError::Impurity { w: q.w });
    }
    Ok(Quaternion::pure(q.v).renormalized())
}

/// `SLERP(SLERP(q_i, q_{i+1}, t), SLERP(s_i, s_{i+1}, t), 2t(1-t))`.
pub fn squad(
    q_im1: &Quaternion,
    q_i: &Quaternion,
    q_ip1: &Quaternion,
    q_ip2: &Quaternion,
    t: f64,
) -> Result<Quaternion> {
    let (s_i, s_ip1) = squad_controls(q_im1, q_i, q_ip1, q_ip2)?;
    let outer = slerp(q_i, q_ip1, t)?;
    let inner = slerp(&s_i, &s_ip1, t)?;
    enforce_pure(slerp(&outer, &inner, 2.0 * t * (1.0 - t))?)
}

/// Piecewise SQUAD; missing neighbors at the sequence ends duplicate the end
/// knot.
#[derive(Debug, Clone)]
pub struct SquadCurve {
    knots: KnotSequence,
    quats: Vec<Quaternion>,
    controls: Vec<Quaternion>,
}

impl SquadCurve {
    /// End controls use duplicated end knots as their missing neighbours.
    pub fn new(knots: &KnotSequence) -> Result<Self> {
        Self::with_end_neighbors(knots, None, None)
    }

    /// Like [`new`](Self::new), with real neighbours one step before the first
    /// and after the last knot where they are known.
    pub fn with_end_neighbors(
        knots: &KnotSequence,
        before: Option<SpherePoint>,
        after: Option<SpherePoint>,
    ) -> Result<Self> {
        let n = knots.len();
        let mut ext: Vec<SpherePoint> = before.into_iter().collect();
        let offset = ext.len();
        ext.extend_from_slice(knots.points());
        ext.extend(after);
        canonicalize_points(&mut ext)?;
        let ext: Vec<Quaternion> = ext.iter().map(|p| p.to_quaternion()).collect();
        let quats = ext[offset..offset + n].to_vec();
        let knots = KnotSequence::new(
            quats
                .iter()
                .map(SpherePoint::from_quaternion_unchecked)
                .collect(),
            knots.t0(),
            knots.dt(),
        )?;
        let last = ext.len() - 1;
        let controls = (offset..offset + n)
            .map(|i| {
                let prev = &ext[i.saturating_sub(1)];
                let next = &ext[(i + 1).min(last)];
                squad_control(prev, &ext[i], next)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            knots,
            quats,
            controls,
        })
    }

    pub fn knots(&self) -> &KnotSequence {
        &self.knots
    }

    pub(crate) fn quats(&self) -> &[Quaternion] {
        &self.quats
    }

    pub fn controls(&self) -> &[Quaternion] {
        &self.controls
    }

    /// The SQUAD piece `i` at local parameter `u ∈ [0, 1]`.
    pub(crate) fn piece(&self, i: usize, u: f64) -> Quaternion {
        let outer = slerp_unit(&self.quats[i], &self.quats[i + 1], u);
        let inner = slerp_unit(&self.controls[i], &self.controls[i + 1], u);
        let q = slerp_unit(&outer, &inner, 2.0 * u * (1.0 - u));
        Quaternion::pure(q.v).renormalized()
    }
}

impl SphericalCurve for SquadCurve {
    fn method(&self) -> Method {
        Method::Squad
    }

    fn domain(&self) -> (f64, f64) {
        (self.knots.t0(), self.knots.end_time())
    }

    fn eval_quaternion(&self, t: f64) -> Quaternion {
        let (i, u) = self.knots.locate(t);
        self.piece(i, u)
    }

    fn analytic_derivatives(&self, t: f64) -> Result<DerivativeBundle> {
        derivatives::squad_derivatives(self, t)
    }
}
