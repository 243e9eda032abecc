use proptest::prelude::*;

use sphere_interp::harness::{reconstruction_error, synthesize_knots, GeneratingCurve};
use sphere_interp::io::{write_csv_table, Cell};
use sphere_interp::{build_interpolant, BuildOptions, KnotSequence, Method, SpherePoint, Vec3};

/// Knots on a gently turning path: every pair is less than 0.6 rad apart.
fn knot_path(count: usize) -> impl Strategy<Value = Vec<SpherePoint>> {
    prop::collection::vec((0.05f64..0.6, -1.0f64..1.0), count).prop_map(|steps| {
        let mut heading: f64 = 0.0;
        let mut lat: f64 = 0.0;
        let mut lon: f64 = 0.0;
        steps
            .into_iter()
            .map(|(step, turn)| {
                let p = Vec3::new(lat.cos() * lon.cos(), lat.cos() * lon.sin(), lat.sin());
                heading += turn;
                lat = (lat + step * heading.sin()).clamp(-1.2, 1.2);
                lon += step * heading.cos();
                SpherePoint::new(p.normalize()).unwrap()
            })
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn every_method_interpolates_and_stays_on_the_sphere(pts in knot_path(7), t0 in -2.0f64..2.0, dt in 0.1f64..3.0) {
        let knots = KnotSequence::new(pts, t0, dt).unwrap();
        for method in Method::ALL {
            let k = match method {
                Method::Sider2 | Method::Sider3 | Method::Sider4 => knots.window(0, method.stencil_points()).unwrap(),
                _ => knots.clone(),
            };
            let curve = build_interpolant(method, &k, &BuildOptions::default()).unwrap();
            for (i, p) in k.points().iter().enumerate() {
                prop_assert!((curve.eval(k.time(i)).vector() - p.vector()).norm() < 1e-10);
            }
            for j in 0..=16 {
                let t = k.t0() + (k.end_time() - k.t0()) * j as f64 / 16.0;
                let q = curve.eval_quaternion(t);
                prop_assert!(q.w.abs() < 1e-12);
                prop_assert!((q.norm() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn seno_picks_among_its_candidates(pts in knot_path(8), k in 1usize..6) {
        let knots = KnotSequence::indexed(pts).unwrap();
        let seno = sphere_interp::SenoCurve::new(&knots, 3, k).unwrap();
        for sel in seno.selections() {
            prop_assert!(sel.starts.contains(&sel.selected));
            let best = sel.variations.iter().cloned().fold(f64::INFINITY, f64::min);
            let i = sel.starts.iter().position(|&s| s == sel.selected).unwrap();
            prop_assert_eq!(sel.variations[i], best);
        }
    }
}

#[test]
fn smooth_errors_decrease_under_refinement() {
    let curve = GeneratingCurve::smooth();
    for method in [Method::Slerp, Method::Squad, Method::Seno2, Method::Seno3] {
        let errors: Vec<f64> = [16, 32, 64, 128]
            .iter()
            .map(|&n| {
                let knots = synthesize_knots(&curve, n).unwrap();
                let interp = build_interpolant(method, &knots, &BuildOptions::default()).unwrap();
                reconstruction_error(interp.as_ref(), &curve, 64 * n)
            })
            .collect();
        for w in errors.windows(2) {
            assert!(w[1] <= w[0] * 1.05, "{method}: {errors:?}");
        }
    }
}

#[test]
fn csv_output_is_byte_stable() {
    let render = || {
        let curve = GeneratingCurve::kinked();
        let knots = synthesize_knots(&curve, 32).unwrap();
        let interp = build_interpolant(Method::Seno3, &knots, &BuildOptions::default()).unwrap();
        let rows: Vec<Vec<Cell>> = (0..50)
            .map(|j| {
                let t = -0.5 + j as f64 / 49.0;
                let p = interp.eval(t).vector();
                vec![t.into(), p.x.into(), p.y.into(), p.z.into()]
            })
            .collect();
        let mut buf = Vec::new();
        write_csv_table(&mut buf, &["t", "x", "y", "z"], &rows).unwrap();
        buf
    };
    assert_eq!(render(), render());
}
