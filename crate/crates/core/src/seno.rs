//! Essentially non-oscillatory stencil selection on the sphere.
//!
//! For the interval `[t_i, t_{i+1}]`, SENO-n builds the `n` SIDER-n curves whose
//! `n + 1` consecutive knots contain both ends of the interval and keeps the one
//! with the least variation (approximate arc length) across it.

use rayon::prelude::*;
use serde::Serialize;

use crate::curve::{Method, SphericalCurve};
use crate::error::{InterpError, Result};
use crate::geodesic::KnotSequence;
use crate::quat::{Quaternion, SpherePoint};
use crate::sider::{SiderCurve, MAX_SIDER_ORDER};

/// Default number of interior quadrature points.
pub const DEFAULT_VARIATION_POINTS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VariationEstimate {
    /// Accumulated geodesic length in radians.
    pub length: f64,
    /// Interior points inserted between the interval ends.
    pub k: usize,
}

fn check_domain(curve: &dyn SphericalCurve, t_i: f64, t_ip1: f64) -> Result<()> {
    let (lo, hi) = curve.domain();
    let slack = 1e-12 * (hi - lo).abs().max(1.0);
    for t in [t_i, t_ip1] {
        if !(t >= lo - slack && t <= hi + slack) {
            return Err(InterpError::Domain { t, lo, hi });
        }
    }
    Ok(())
}

fn chord_sum(
    first: SpherePoint,
    inner: impl Iterator<Item = SpherePoint>,
    last: SpherePoint,
) -> f64 {
    let mut prev = first;
    let mut length = 0.0;
    for p in inner.chain(std::iter::once(last)) {
        length += prev.angle_to(&p);
        prev = p;
    }
    length
}

/// Composite-trapezoid arc length of `curve` over `[t_i, t_ip1]`: `k` equally
/// spaced interior samples, `k + 1` geodesic chords.
pub fn variation(
    curve: &dyn SphericalCurve,
    t_i: f64,
    t_ip1: f64,
    k: usize,
) -> Result<VariationEstimate> {
    if k == 0 {
        return Err(InterpError::InvalidArgument(
            "variation needs at least one interior point".into(),
        ));
    }
    check_domain(curve, t_i, t_ip1)?;
    let step = (t_ip1 - t_i) / (k + 1) as f64;
    let length = chord_sum(
        curve.eval(t_i),
        (1..=k).map(|j| curve.eval(t_i + j as f64 * step)),
        curve.eval(t_ip1),
    );
    Ok(VariationEstimate { length, k })
}

/// Variation of an interpolating candidate whose values at the interval ends
/// are the knots themselves; only the `k` interior samples are evaluated.
fn candidate_variation(
    curve: &SiderCurve,
    knots: &KnotSequence,
    interval: usize,
    k: usize,
) -> VariationEstimate {
    let t_i = knots.time(interval);
    let step = knots.dt() / (k + 1) as f64;
    let length = chord_sum(
        knots.points()[interval],
        (1..=k).map(|j| curve.eval(t_i + j as f64 * step)),
        knots.points()[interval + 1],
    );
    VariationEstimate { length, k }
}

/// Distance between the centre of candidate `start` and the centre of
/// `interval`, in half-intervals.
fn off_centre(start: usize, order: usize, interval: usize) -> usize {
    (2 * start + order).abs_diff(2 * interval + 1)
}

/// Index into `variations` of the least-variation candidate. Exact ties go to
/// the most centred stencil, then the lower start index.
fn least_variation(starts: &[usize], variations: &[f64], order: usize, interval: usize) -> usize {
    (0..starts.len())
        .min_by(|&a, &b| {
            variations[a]
                .total_cmp(&variations[b])
                .then(
                    off_centre(starts[a], order, interval)
                        .cmp(&off_centre(starts[b], order, interval)),
                )
                .then(starts[a].cmp(&starts[b]))
        })
        .expect("at least one candidate")
}

/// One SIDER-n stencil considered for an interval.
#[derive(Debug, Clone)]
pub struct StencilCandidate {
    /// Index of the stencil's first knot.
    pub start_index: usize,
    pub curve: SiderCurve,
    /// Absolute time span of the interval inside the candidate's domain.
    pub restriction: (f64, f64),
    pub variation: VariationEstimate,
}

/// Picks the least-variation SIDER-n candidate for the central interval of a
/// `2n`-knot window. Knot times are the window indices `0..2n`, so the central
/// interval is `[n - 1, n]` and `start_index` counts from the first window knot.
pub fn seno_select(window: &[SpherePoint], n: usize, k: usize) -> Result<StencilCandidate> {
    if !(2..=MAX_SIDER_ORDER).contains(&n) {
        return Err(InterpError::InvalidOrder(n));
    }
    if window.len() != 2 * n {
        return Err(InterpError::WindowSize {
            expected: 2 * n,
            got: window.len(),
        });
    }
    if k == 0 {
        return Err(InterpError::InvalidArgument(
            "variation needs at least one interior point".into(),
        ));
    }
    let (knots, _) = KnotSequence::indexed(window.to_vec())?.canonicalized()?;
    let interval = n - 1;
    let mut candidates = (0..n)
        .map(|s| {
            let curve = SiderCurve::new(&knots.window(s, n + 1)?)?;
            let variation = candidate_variation(&curve, &knots, interval, k);
            Ok(StencilCandidate {
                start_index: s,
                curve,
                restriction: (knots.time(interval), knots.time(interval + 1)),
                variation,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let starts: Vec<usize> = candidates.iter().map(|c| c.start_index).collect();
    let lengths: Vec<f64> = candidates.iter().map(|c| c.variation.length).collect();
    let best = least_variation(&starts, &lengths, n, interval);
    Ok(candidates.swap_remove(best))
}

/// The stencil decision for one interval of a [`SenoCurve`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntervalSelection {
    pub interval: usize,
    /// Start indices of every candidate stencil covering the interval.
    pub starts: Vec<usize>,
    /// Variation of each candidate, aligned with `starts`.
    pub variations: Vec<f64>,
    /// Start index of the chosen stencil.
    pub selected: usize,
}

/// Piecewise SENO-n interpolant over a knot sequence.
///
/// Intervals near the ends, where fewer than `n` stencils fit, choose among the
/// stencils that do.
#[derive(Debug, Clone)]
pub struct SenoCurve {
    knots: KnotSequence,
    order: usize,
    k: usize,
    candidates: Vec<SiderCurve>,
    selections: Vec<IntervalSelection>,
}

impl SenoCurve {
    pub fn new(knots: &KnotSequence, order: usize, k: usize) -> Result<Self> {
        if !(2..=3).contains(&order) {
            return Err(InterpError::InvalidOrder(order));
        }
        if k == 0 {
            return Err(InterpError::InvalidArgument(
                "variation needs at least one interior point".into(),
            ));
        }
        if knots.len() < order + 1 {
            return Err(InterpError::TooFewKnots {
                min: order + 1,
                got: knots.len(),
            });
        }
        let (knots, _) = knots.canonicalized()?;
        let last_start = knots.len() - 1 - order;
        let candidates = (0..=last_start)
            .into_par_iter()
            .map(|s| SiderCurve::new(&knots.window(s, order + 1)?))
            .collect::<Result<Vec<_>>>()?;
        let selections = (0..knots.intervals())
            .into_par_iter()
            .map(|i| {
                let starts: Vec<usize> =
                    (i.saturating_sub(order - 1)..=i.min(last_start)).collect();
                let variations: Vec<f64> = starts
                    .iter()
                    .map(|&s| candidate_variation(&candidates[s], &knots, i, k).length)
                    .collect();
                let best = least_variation(&starts, &variations, order, i);
                IntervalSelection {
                    interval: i,
                    selected: starts[best],
                    starts,
                    variations,
                }
            })
            .collect();
        Ok(Self {
            knots,
            order,
            k,
            candidates,
            selections,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn variation_points(&self) -> usize {
        self.k
    }

    pub fn knots(&self) -> &KnotSequence {
        &self.knots
    }

    pub fn selections(&self) -> &[IntervalSelection] {
        &self.selections
    }

    pub fn candidate(&self, start: usize) -> Option<&SiderCurve> {
        self.candidates.get(start)
    }

    /// Every candidate covering the interval of `t`, evaluated at `t`.
    pub fn eval_candidates(&self, t: f64) -> Vec<(usize, SpherePoint)> {
        let (i, _) = self.knots.locate(t);
        self.selections[i]
            .starts
            .iter()
            .map(|&s| (s, self.candidates[s].eval(t)))
            .collect()
    }
}

impl SphericalCurve for SenoCurve {
    fn method(&self) -> Method {
        if self.order == 2 {
            Method::Seno2
        } else {
            Method::Seno3
        }
    }

    fn domain(&self) -> (f64, f64) {
        (self.knots.t0(), self.knots.end_time())
    }

    /// Reconstructs every candidate stencil of the interval at `t` (n SIDER-n
    /// evaluations per sample) and returns the selected one.
    fn eval_quaternion(&self, t: f64) -> Quaternion {
        let (i, _) = self.knots.locate(t);
        let sel = &self.selections[i];
        let mut chosen = None;
        for &s in &sel.starts {
            let q = self.candidates[s].eval_quaternion(t);
            if s == sel.selected {
                chosen = Some(q);
            }
        }
        chosen.expect("selected stencil is among the candidates")
    }

    fn slerp_calls_per_eval(&self) -> u32 {
        self.order as u32 * ((1u32 << self.order) - 1)
    }
}
