//! One PASS/FAIL line per acceptance criterion; exits non-zero on any FAIL.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sphere_interp::datasets;
use sphere_interp::derivatives::{fd_stencil, knot_jump, Side};
use sphere_interp::geodesic::slerp_negation_check;
use sphere_interp::harness::{
    convergence_study, doubling_range, efficiency_study, finest_common_error, time_to_error,
    GeneratingCurve,
};
use sphere_interp::{
    build_interpolant, count_slerp_calls, seno_select, BuildOptions, KnotSequence, Method,
    PiecewiseSlerp, Quaternion, SiderCurve, SpherePoint, SquadCurve, Vec3,
};

struct Report {
    failures: Vec<String>,
}

impl Report {
    fn check(&mut self, id: &str, ok: bool, detail: String) {
        println!("[{}] {id}: {detail}", if ok { "PASS" } else { "FAIL" });
        if !ok {
            self.failures.push(id.to_string());
        }
    }
}

fn random_unit(rng: &mut ChaCha8Rng) -> Vec3 {
    loop {
        let v = Vec3::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        );
        let n = v.norm();
        if n > 0.1 && n <= 1.0 {
            return v / n;
        }
    }
}

/// A random walk on S² with steps in `[0.05, 0.6]` rad and turning angles
/// below a right angle, so no pair needs a sign flip.
fn random_knots(rng: &mut ChaCha8Rng, count: usize) -> Vec<SpherePoint> {
    let mut p = random_unit(rng);
    let mut dir = {
        let r = random_unit(rng);
        (r - p * p.dot(&r)).normalize()
    };
    let mut out = vec![SpherePoint::new(p).unwrap()];
    for _ in 1..count {
        let turn = rng.gen_range(-1.2..1.2);
        let side = p.cross(&dir);
        dir = dir * f64::cos(turn) + side * f64::sin(turn);
        let step: f64 = rng.gen_range(0.05..0.6);
        let next = p * step.cos() + dir * step.sin();
        dir = (dir * step.cos() - p * step.sin()).normalize();
        p = next.normalize();
        out.push(SpherePoint::new(p).unwrap());
    }
    out
}

fn convergence(
    report: &mut Report,
    id: &str,
    curve: GeneratingCurve,
    nominal: &[(Method, f64)],
) -> f64 {
    let start = Instant::now();
    let methods: Vec<Method> = nominal.iter().map(|(m, _)| *m).collect();
    let grids = doubling_range(16, 2048).unwrap();
    let table = convergence_study(&curve, &methods, &grids, &BuildOptions::default()).unwrap();
    let secs = start.elapsed().as_secs_f64();
    for &(m, rho0) in nominal {
        let rho = table.finest_order(m).unwrap();
        report.check(
            &format!("{id} {m}"),
            (rho - rho0).abs() <= 0.1,
            format!("rho(2048) = {rho:.4}, nominal {rho0:.1} +/- 0.1"),
        );
    }
    secs
}

fn criterion_1_2(report: &mut Report) {
    let smooth = convergence(
        report,
        "C1 smooth order",
        GeneratingCurve::smooth(),
        &[
            (Method::Slerp, 2.0),
            (Method::Squad, 3.0),
            (Method::Seno2, 3.0),
            (Method::Seno3, 4.0),
        ],
    );
    report.check(
        "C1 runtime",
        smooth < 300.0,
        format!("{smooth:.2} s for the smooth study (limit 300 s)"),
    );
    let kinked = convergence(
        report,
        "C2 kinked order",
        GeneratingCurve::kinked(),
        &[
            (Method::Slerp, 2.0),
            (Method::Squad, 2.0),
            (Method::Seno2, 3.0),
            (Method::Seno3, 4.0),
        ],
    );
    println!("       kinked study took {kinked:.2} s");
}

fn criterion_3(report: &mut Report) {
    let cases = [
        ("case (a) -> S_123", datasets::four_point_a(), 2, 0),
        ("case (b) -> S_234", datasets::four_point_b(), 2, 1),
        ("six points -> S_3456", datasets::six_point(), 3, 2),
    ];
    for (name, knots, n, expected) in cases {
        let chosen = seno_select(knots.points(), n, 3).unwrap().start_index;
        report.check(
            &format!("C3 selection {name}"),
            chosen == expected,
            format!(
                "picked S_{}..{} (stencil start {chosen})",
                chosen + 1,
                chosen + n + 1
            ),
        );
    }
}

fn criterion_4(report: &mut Report) {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let opts = BuildOptions::default();
    for method in [
        Method::Sider2,
        Method::Sider3,
        Method::Sider4,
        Method::Seno2,
        Method::Seno3,
    ] {
        let mut worst = 0.0f64;
        for _ in 0..100 {
            let count = match method {
                Method::Sider2 => 3,
                Method::Sider3 => 4,
                Method::Sider4 => 5,
                _ => rng.gen_range(7..12),
            };
            let pts = random_knots(&mut rng, count);
            let knots =
                KnotSequence::new(pts, rng.gen_range(-1.0..1.0), rng.gen_range(0.1..2.0)).unwrap();
            let curve = build_interpolant(method, &knots, &opts).unwrap();
            for (i, p) in knots.points().iter().enumerate() {
                let d = (curve.eval(knots.time(i)).vector() - p.vector()).norm();
                worst = worst.max(d);
            }
        }
        report.check(
            &format!("C4 knot interpolation {method}"),
            worst <= 1e-10,
            format!("max deviation {worst:.3e} over 100 sets (limit 1e-10)"),
        );
    }
}

fn criterion_5(report: &mut Report) {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let pts = random_knots(&mut rng, 9);
    let opts = BuildOptions::default();
    let expected = [
        (Method::Slerp, 1u64),
        (Method::Squad, 3),
        (Method::Sider2, 3),
        (Method::Seno2, 6),
        (Method::Sider3, 7),
        (Method::Seno3, 21),
    ];
    for (method, calls) in expected {
        let knots = match method {
            Method::Sider2 | Method::Sider3 => {
                KnotSequence::indexed(pts[..method.stencil_points()].to_vec()).unwrap()
            }
            _ => KnotSequence::indexed(pts.clone()).unwrap(),
        };
        let curve = build_interpolant(method, &knots, &opts).unwrap();
        let t = 0.5 * knots.end_time() + 0.137;
        let (_, counted) = count_slerp_calls(|| curve.eval(t));
        report.check(
            &format!("C5 SLERP calls {method}"),
            counted == calls,
            format!("{counted} per evaluation (expected {calls})"),
        );
    }
}

fn criterion_6(report: &mut Report) {
    let (h, h3) = (1e-5, 1e-3);
    let three = datasets::three_point();
    let four = datasets::four_point_a();
    let mid = three.time(1);

    let slerp = PiecewiseSlerp::new(&three).unwrap();
    let j = knot_jump(&slerp, mid, h, h3);
    report.check(
        "C6 continuity SLERP",
        j.d1 >= 1e-1,
        format!("d1 jump {:.3e} (>= 1e-1)", j.d1),
    );

    let squad = SquadCurve::new(&three).unwrap();
    let j = knot_jump(&squad, mid, h, h3);
    report.check(
        "C6 continuity SQUAD",
        j.d1 <= 1e-3 && j.d2 >= 1e-1,
        format!(
            "d1 jump {:.3e} (<= 1e-3), d2 jump {:.3e} (>= 1e-1)",
            j.d1, j.d2
        ),
    );

    let sider2 = SiderCurve::new(&three).unwrap();
    let j = knot_jump(&sider2, mid, h, h3);
    report.check(
        "C6 continuity SIDER2",
        j.d1 <= 1e-3 && j.d2 <= 1e-3,
        format!("d1 jump {:.3e}, d2 jump {:.3e} (<= 1e-3)", j.d1, j.d2),
    );

    let sider3 = SiderCurve::new(&four).unwrap();
    let worst = [four.time(1), four.time(2)]
        .iter()
        .map(|&t| knot_jump(&sider3, t, h, h3))
        .fold([0.0f64; 3], |acc, j| {
            [acc[0].max(j.d1), acc[1].max(j.d2), acc[2].max(j.d3)]
        });
    report.check(
        "C6 continuity SIDER3",
        worst.iter().all(|&x| x <= 1e-3),
        format!(
            "d1 {:.3e}, d2 {:.3e}, d3 {:.3e} (<= 1e-3; d3 with step {h3:e})",
            worst[0], worst[1], worst[2]
        ),
    );
}

fn criterion_7(report: &mut Report) {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for method in [Method::Slerp, Method::Squad, Method::Sider2, Method::Sider3] {
        let (mut e1, mut e2) = (0.0f64, 0.0f64);
        let mut richardson_ok = true;
        let mut worst_ratio = f64::NAN;
        for _ in 0..50 {
            let count = match method {
                Method::Sider2 => 3,
                Method::Sider3 => 4,
                _ => 6,
            };
            let knots =
                KnotSequence::new(random_knots(&mut rng, count), 0.0, rng.gen_range(0.2..1.0))
                    .unwrap();
            let curve = build_interpolant(method, &knots, &BuildOptions::default()).unwrap();
            // stay clear of knots so the central stencil sees one piece
            let i = rng.gen_range(0..knots.intervals());
            let t = knots.time(i) + knots.dt() * rng.gen_range(0.05..0.95);
            let exact = curve.analytic_derivatives(t).unwrap();
            let [f1, f2, _] = fd_stencil(curve.as_ref(), t, 1e-4, Side::Central);
            e1 = e1.max((exact.d1 - f1).norm());
            e2 = e2.max((exact.d2 - f2).norm());

            for (order, a) in [(0usize, exact.d1), (1, exact.d2)] {
                let coarse = (fd_stencil(curve.as_ref(), t, 2e-3, Side::Central)[order] - a).norm();
                let fine = (fd_stencil(curve.as_ref(), t, 1e-3, Side::Central)[order] - a).norm();
                if coarse > 1e-7 {
                    let ratio = coarse / fine;
                    if !(3.0..=5.0).contains(&ratio) {
                        richardson_ok = false;
                        worst_ratio = ratio;
                    }
                }
            }
        }
        report.check(
            &format!("C7 derivatives {method}"),
            e1 <= 1e-5 && e2 <= 1e-4 && richardson_ok,
            format!(
                "max |d1 - fd| {e1:.2e} (<= 1e-5), max |d2 - fd| {e2:.2e} (<= 1e-4), h-halving ratio {}",
                if richardson_ok { "in [3, 5]".to_string() } else { format!("{worst_ratio:.2} out of [3, 5]") }
            ),
        );
    }
}

fn random_quaternion(rng: &mut ChaCha8Rng) -> Quaternion {
    let scale = 10f64.powf(rng.gen_range(-1.0..1.0));
    let v = random_unit(rng);
    let w: f64 = rng.gen_range(-1.0..1.0);
    Quaternion::new(w, v.x, v.y, v.z).scale(scale)
}

fn criterion_8(report: &mut Report) {
    const CASES: usize = 10_000;
    let mut rng = ChaCha8Rng::seed_from_u64(8);

    let mut exp_log = 0.0f64;
    let mut power = 0.0f64;
    let mut norm_rel = 0.0f64;
    let mut negation_failures = 0usize;
    for _ in 0..CASES {
        let q = random_quaternion(&mut rng);
        let round = q.ln().unwrap().exp();
        exp_log = exp_log.max((round - q).norm() / q.norm().max(1.0));

        let u = q.normalize().unwrap();
        let (s, t) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let lhs = u.powf(s).unwrap() * u.powf(t).unwrap();
        power = power.max((lhs - u.powf(s + t).unwrap()).norm());

        let p = random_quaternion(&mut rng);
        let rel = ((p * q).norm() - p.norm() * q.norm()).abs() / (p.norm() * q.norm());
        norm_rel = norm_rel.max(rel);

        let a = random_quaternion(&mut rng).normalize().unwrap();
        let b = random_quaternion(&mut rng).normalize().unwrap();
        if a.dot(&b) > -0.99 && !slerp_negation_check(&a, &b, rng.gen_range(0.0..1.0)) {
            negation_failures += 1;
        }
    }
    report.check(
        "C8 exp/log round trip",
        exp_log <= 1e-10,
        format!("max error {exp_log:.2e} over {CASES} cases (<= 1e-10)"),
    );
    report.check(
        "C8 power composition",
        power <= 1e-10,
        format!("max |q^s q^t - q^(s+t)| {power:.2e} over {CASES} cases (<= 1e-10)"),
    );
    report.check(
        "C8 norm multiplicativity",
        norm_rel <= 1e-12,
        format!("max relative error {norm_rel:.2e} over {CASES} cases (<= 1e-12)"),
    );
    report.check(
        "C8 SLERP negation",
        negation_failures == 0,
        format!("{negation_failures} of {CASES} cases off by more than 1e-12"),
    );
}

fn secs(t: Option<f64>) -> String {
    t.map_or("unreached".into(), |t| format!("{t:.3e}"))
}

fn criterion_9(report: &mut Report) {
    let opts = BuildOptions::default();
    let methods = [Method::Squad, Method::Seno3];

    let kinked = efficiency_study(
        &GeneratingCurve::kinked(),
        &methods,
        &doubling_range(16, 2048).unwrap(),
        3,
        &opts,
    )
    .unwrap();
    let target = finest_common_error(&kinked, Method::Squad, Method::Seno3).unwrap();
    let squad = time_to_error(&kinked, Method::Squad, target);
    let seno3 = time_to_error(&kinked, Method::Seno3, target);
    report.check(
        "C9 kinked efficiency SENO3 < SQUAD",
        matches!((seno3, squad), (Some(a), Some(b)) if a < b),
        format!(
            "at error {target:.3e}: SENO3 {} s, SQUAD {} s",
            secs(seno3),
            secs(squad)
        ),
    );

    let smooth = efficiency_study(
        &GeneratingCurve::smooth(),
        &methods,
        &doubling_range(16, 4096).unwrap(),
        3,
        &opts,
    )
    .unwrap();
    let target = 1e-10;
    let squad = time_to_error(&smooth, Method::Squad, target);
    let seno3 = time_to_error(&smooth, Method::Seno3, target);
    report.check(
        "C9 smooth efficiency SQUAD < SENO3",
        matches!((squad, seno3), (Some(a), Some(b)) if a < b),
        format!(
            "at error {target:.0e}: SQUAD {} s, SENO3 {} s",
            secs(squad),
            secs(seno3)
        ),
    );
}

fn main() {
    let mut report = Report {
        failures: Vec::new(),
    };
    criterion_1_2(&mut report);
    criterion_3(&mut report);
    criterion_4(&mut report);
    criterion_5(&mut report);
    criterion_6(&mut report);
    criterion_7(&mut report);
    criterion_8(&mut report);
    criterion_9(&mut report);
    if report.failures.is_empty() {
        println!("acceptance: all criteria passed");
    } else {
        println!("acceptance: {} failed: {:?}", report.failures.len(), report.failures);
        std::process::exit(1);
    }
}
