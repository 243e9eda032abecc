//! Grid-refinement and timing experiments against an analytic generating curve.

use std::f64::consts::PI;
use std::fmt;
use std::hint::black_box;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::curve::{build_interpolant, BuildOptions, CurveSegment, Method, SphericalCurve};
use crate::error::{InterpError, Result};
use crate::geodesic::{KnotSequence, SquadCurve};
use crate::io::Cell;
use crate::quat::{SpherePoint, Vec3};

/// Error quadrature samples per knot interval.
pub const SAMPLES_PER_INTERVAL: usize = 64;

pub const DOMAIN: (f64, f64) = (-0.5, 0.5);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CurveKind {
    /// `z = exp(-t²/2σ²) sin 2πt`.
    Smooth,
    /// `z = |exp(-t²/2σ²) sin 2πt|`, kinked at `t = 0`.
    Kinked,
}

impl fmt::Display for CurveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CurveKind::Smooth => "smooth",
            CurveKind::Kinked => "kinked",
        })
    }
}

impl FromStr for CurveKind {
    type Err = InterpError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "smooth" => Ok(CurveKind::Smooth),
            "kinked" => Ok(CurveKind::Kinked),
            _ => Err(InterpError::InvalidArgument(format!("unknown curve `{s}`"))),
        }
    }
}

/// The curve `(1, t, z(t)) / ‖·‖` on S², `t ∈ [-0.5, 0.5]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeneratingCurve {
    pub kind: CurveKind,
    pub sigma: f64,
}

impl GeneratingCurve {
    pub fn new(kind: CurveKind, sigma: f64) -> Result<Self> {
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(InterpError::InvalidArgument(format!(
                "sigma must be positive, got {sigma}"
            )));
        }
        Ok(Self { kind, sigma })
    }

    pub fn smooth() -> Self {
        Self {
            kind: CurveKind::Smooth,
            sigma: 0.1,
        }
    }

    pub fn kinked() -> Self {
        Self {
            kind: CurveKind::Kinked,
            sigma: 0.1,
        }
    }

    pub fn z(&self, t: f64) -> f64 {
        let f = (-t * t / (2.0 * self.sigma * self.sigma)).exp() * (2.0 * PI * t).sin();
        match self.kind {
            CurveKind::Smooth => f,
            CurveKind::Kinked => f.abs(),
        }
    }

    /// Exact projection onto the sphere.
    pub fn point(&self, t: f64) -> SpherePoint {
        SpherePoint::normalize(Vec3::new(1.0, t, self.z(t))).expect("x component is 1")
    }
}

/// Knots `t_i = -0.5 + i / inv_dt`, `i = 0..=inv_dt`.
pub fn synthesize_knots(curve: &GeneratingCurve, inv_dt: usize) -> Result<KnotSequence> {
    if inv_dt < 2 {
        return Err(InterpError::InvalidArgument(format!(
            "inv_dt must be at least 2, got {inv_dt}"
        )));
    }
    let dt = 1.0 / inv_dt as f64;
    let points = (0..=inv_dt)
        .map(|i| curve.point(DOMAIN.0 + i as f64 * dt))
        .collect();
    KnotSequence::new(points, DOMAIN.0, dt)
}

/// `∫ ‖y(t) − z(t)‖ dt` over the domain by the composite trapezoid rule on
/// `samples` uniform subintervals.
pub fn reconstruction_error(
    interpolant: &dyn SphericalCurve,
    curve: &GeneratingCurve,
    samples: usize,
) -> f64 {
    let (lo, hi) = DOMAIN;
    let h = (hi - lo) / samples as f64;
    let integrand = |j: usize| {
        let t = lo + j as f64 * h;
        (interpolant.eval(t).vector() - curve.point(t).vector()).norm()
    };
    let interior: f64 = (1..samples).map(integrand).sum();
    h * (interior + 0.5 * (integrand(0) + integrand(samples)))
}

/// `[min, 2 min, 4 min, ..., max]`.
pub fn doubling_range(min: usize, max: usize) -> Result<Vec<usize>> {
    if min < 2 || max < min || !(max / min).is_power_of_two() || !max.is_multiple_of(min) {
        return Err(InterpError::InvalidArgument(format!(
            "inv-dt range must double from {min} to {max}"
        )));
    }
    Ok(std::iter::successors(Some(min), |&n| Some(n * 2))
        .take_while(|&n| n <= max)
        .collect())
}

/// `log₂(coarse / fine)`.
pub fn order(coarse: f64, fine: f64) -> f64 {
    (coarse / fine).log2()
}

/// One grid of a convergence study; `errors` and `orders` follow the
/// table's method order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub inv_dt: usize,
    pub errors: Vec<f64>,
    /// Order against the previous (coarser) row; `None` on the first.
    pub orders: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceTable {
    pub curve: GeneratingCurve,
    pub methods: Vec<Method>,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    /// Order of `method` at the finest grid.
    pub fn finest_order(&self, method: Method) -> Option<f64> {
        let j = self.methods.iter().position(|&m| m == method)?;
        self.rows.last()?.orders[j]
    }

    pub fn header(&self) -> Vec<String> {
        let mut h = vec!["inv_dt".to_string()];
        for m in &self.methods {
            h.push(format!("e_{m}"));
            h.push(format!("rho_{m}"));
        }
        h
    }

    /// Cells aligned with [`header`](Self::header).
    pub fn cells(&self) -> Vec<Vec<Cell>> {
        self.rows
            .iter()
            .map(|r| {
                let mut row = vec![Cell::from(r.inv_dt)];
                for (e, o) in r.errors.iter().zip(&r.orders) {
                    row.push(Cell::from(*e));
                    row.push(Cell::from(*o));
                }
                row
            })
            .collect()
    }
}

/// Builds `method` through `knots`; SQUAD takes its end neighbours from the
/// generating curve one step outside the domain.
pub fn build_on_curve(
    method: Method,
    curve: &GeneratingCurve,
    knots: &KnotSequence,
    opts: &BuildOptions,
) -> Result<CurveSegment> {
    if method == Method::Squad {
        let before = curve.point(knots.t0() - knots.dt());
        let after = curve.point(knots.end_time() + knots.dt());
        return Ok(Box::new(SquadCurve::with_end_neighbors(
            knots,
            Some(before),
            Some(after),
        )?));
    }
    build_interpolant(method, knots, opts)
}

/// Error of `method` on the knots of `inv_dt`, measured with
/// `SAMPLES_PER_INTERVAL · inv_dt` quadrature intervals.
pub fn grid_error(
    curve: &GeneratingCurve,
    method: Method,
    inv_dt: usize,
    opts: &BuildOptions,
) -> Result<f64> {
    let knots = synthesize_knots(curve, inv_dt)?;
    let interp = build_on_curve(method, curve, &knots, opts)?;
    Ok(reconstruction_error(
        interp.as_ref(),
        curve,
        SAMPLES_PER_INTERVAL * inv_dt,
    ))
}

/// Errors and orders of every method on every grid. Grids and methods are
/// processed in parallel; results do not depend on scheduling.
pub fn convergence_study(
    curve: &GeneratingCurve,
    methods: &[Method],
    inv_dts: &[usize],
    opts: &BuildOptions,
) -> Result<ConvergenceTable> {
    if inv_dts.is_empty() || inv_dts.windows(2).any(|w| w[1] != 2 * w[0]) {
        return Err(InterpError::InvalidArgument(
            "grid sizes must form a doubling sequence".into(),
        ));
    }
    let jobs: Vec<(usize, Method)> = inv_dts
        .iter()
        .flat_map(|&n| methods.iter().map(move |&m| (n, m)))
        .collect();
    let errors = jobs
        .par_iter()
        .map(|&(n, m)| grid_error(curve, m, n, opts))
        .collect::<Result<Vec<f64>>>()?;
    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(inv_dts.len());
    for (r, &inv_dt) in inv_dts.iter().enumerate() {
        let errs = errors[r * methods.len()..(r + 1) * methods.len()].to_vec();
        let orders = match rows.last() {
            Some(prev) => prev
                .errors
                .iter()
                .zip(&errs)
                .map(|(&c, &f)| Some(order(c, f)))
                .collect(),
            None => vec![None; methods.len()],
        };
        rows.push(ConvergenceRow {
            inv_dt,
            errors: errs,
            orders,
        });
    }
    Ok(ConvergenceTable {
        curve: *curve,
        methods: methods.to_vec(),
        rows,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimingRecord {
    pub method: Method,
    pub inv_dt: usize,
    /// Median wall time of building the interpolant and evaluating it at
    /// every quadrature sample.
    pub wall_seconds: f64,
    pub error: f64,
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

/// Times every method on every grid, serially.
pub fn efficiency_study(
    curve: &GeneratingCurve,
    methods: &[Method],
    inv_dts: &[usize],
    reps: usize,
    opts: &BuildOptions,
) -> Result<Vec<TimingRecord>> {
    if reps < 3 {
        return Err(InterpError::InvalidArgument(format!(
            "at least 3 repetitions are required, got {reps}"
        )));
    }
    let mut out = Vec::with_capacity(methods.len() * inv_dts.len());
    for &method in methods {
        for &inv_dt in inv_dts {
            let knots = synthesize_knots(curve, inv_dt)?;
            let samples = SAMPLES_PER_INTERVAL * inv_dt;
            let h = (DOMAIN.1 - DOMAIN.0) / samples as f64;
            let mut times = Vec::with_capacity(reps);
            for _ in 0..reps {
                let start = Instant::now();
                let interp = build_on_curve(method, curve, black_box(&knots), opts)?;
                let mut acc = Vec3::zeros();
                for j in 0..=samples {
                    acc += interp.eval(DOMAIN.0 + j as f64 * h).vector();
                }
                black_box(acc);
                times.push(start.elapsed().as_secs_f64());
            }
            let interp = build_on_curve(method, curve, &knots, opts)?;
            out.push(TimingRecord {
                method,
                inv_dt,
                wall_seconds: median(times).max(f64::MIN_POSITIVE),
                error: reconstruction_error(interp.as_ref(), curve, samples),
            });
        }
    }
    Ok(out)
}

/// Wall time at which `method` reaches `target` error, by log-log
/// interpolation between the two records that bracket it.
pub fn time_to_error(records: &[TimingRecord], method: Method, target: f64) -> Option<f64> {
    let mut pts: Vec<(f64, f64)> = records
        .iter()
        .filter(|r| r.method == method)
        .map(|r| (r.error.ln(), r.wall_seconds.ln()))
        .collect();
    pts.sort_by(|a, b| b.0.total_cmp(&a.0));
    let x = target.ln();
    pts.windows(2).find_map(|w| {
        let ((e0, t0), (e1, t1)) = (w[0], w[1]);
        if x <= e0 && x >= e1 {
            let s = if e0 == e1 { 0.0 } else { (x - e0) / (e1 - e0) };
            Some((t0 + s * (t1 - t0)).exp())
        } else {
            None
        }
    })
}

/// Smallest error both methods reach.
pub fn finest_common_error(records: &[TimingRecord], a: Method, b: Method) -> Option<f64> {
    let best = |m: Method| {
        records
            .iter()
            .filter(|r| r.method == m)
            .map(|r| r.error)
            .reduce(f64::min)
    };
    Some(best(a)?.max(best(b)?))
}

pub const TIMING_HEADER: [&str; 4] = ["method", "inv_dt", "wall_seconds", "error"];

pub fn timing_cells(records: &[TimingRecord]) -> Vec<Vec<Cell>> {
    records
        .iter()
        .map(|r| {
            vec![
                Cell::from(r.method.name()),
                Cell::from(r.inv_dt),
                Cell::from(r.wall_seconds),
                Cell::from(r.error),
            ]
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geodesic::PiecewiseSlerp;

    struct Exact(GeneratingCurve);

    impl SphericalCurve for Exact {
        fn method(&self) -> Method {
            Method::Slerp
        }
        fn domain(&self) -> (f64, f64) {
            DOMAIN
        }
        fn eval_quaternion(&self, t: f64) -> crate::quat::Quaternion {
            self.0.point(t).to_quaternion()
        }
    }

    #[test]
    fn knots_at_origin_and_count() {
        for c in [GeneratingCurve::smooth(), GeneratingCurve::kinked()] {
            let k = synthesize_knots(&c, 16).unwrap();
            assert_eq!(k.len(), 17);
            assert_eq!(k.points()[8].vector(), Vec3::new(1.0, 0.0, 0.0));
        }
        assert!(synthesize_knots(&GeneratingCurve::smooth(), 1).is_err());
    }

    #[test]
    fn kink_has_opposite_one_sided_slopes() {
        let c = GeneratingCurve::kinked();
        let h = 1e-7;
        let left = (c.z(0.0) - c.z(-h)) / h;
        let right = (c.z(h) - c.z(0.0)) / h;
        assert!(left < -6.0 && right > 6.0);
    }

    #[test]
    fn exact_interpolant_has_no_error() {
        let c = GeneratingCurve::smooth();
        assert!(reconstruction_error(&Exact(c), &c, 1024) <= 1e-14);
    }

    #[test]
    fn slerp_error_quarters_under_refinement() {
        let c = GeneratingCurve::smooth();
        let e = |n| {
            let k = synthesize_knots(&c, n).unwrap();
            reconstruction_error(&PiecewiseSlerp::new(&k).unwrap(), &c, 64 * n)
        };
        let rho = order(e(128), e(256));
        assert!((rho - 2.0).abs() < 0.05, "{rho}");
    }

    #[test]
    fn doubling_range_checks() {
        assert_eq!(doubling_range(16, 128).unwrap(), vec![16, 32, 64, 128]);
        assert!(doubling_range(16, 100).is_err());
        assert!(doubling_range(32, 16).is_err());
    }

    #[test]
    fn time_to_error_interpolates_log_log() {
        let rec = |inv_dt, t, e| TimingRecord {
            method: Method::Squad,
            inv_dt,
            wall_seconds: t,
            error: e,
        };
        let rs = vec![rec(16, 1.0, 1e-4), rec(32, 2.0, 1e-6)];
        let t = time_to_error(&rs, Method::Squad, 1e-5).unwrap();
        assert!((t - 2f64.sqrt()).abs() < 1e-12);
        assert!(time_to_error(&rs, Method::Squad, 1e-8).is_none());
        assert!(time_to_error(&rs, Method::Seno3, 1e-5).is_none());
    }

    #[test]
    fn convergence_is_deterministic() {
        let c = GeneratingCurve::kinked();
        let methods = [Method::Slerp, Method::Seno2];
        let a = convergence_study(&c, &methods, &[16, 32], &BuildOptions::default()).unwrap();
        let b = convergence_study(&c, &methods, &[16, 32], &BuildOptions::default()).unwrap();
        assert_eq!(a, b);
        assert!(a.rows[0].orders[0].is_none());
        assert!(a.finest_order(Method::Seno2).is_some());
    }
}
