//! Small reference datasets used by the examples, tests and CLI.
//!
//! Every set lives on `t ∈ [0, 1]` with uniform spacing.

use crate::geodesic::KnotSequence;
use crate::quat::{SpherePoint, Vec3};

fn knots(coords: &[[f64; 3]]) -> KnotSequence {
    let points = coords
        .iter()
        .map(|c| SpherePoint::normalize(Vec3::new(c[0], c[1], c[2])).expect("nonzero"))
        .collect::<Vec<_>>();
    let dt = 1.0 / (points.len() - 1) as f64;
    KnotSequence::new(points, 0.0, dt).expect("at least two knots")
}

/// Three knots at `t = 0, 1/2, 1` for SLERP, SQUAD and SIDER2.
pub fn three_point() -> KnotSequence {
    let h = 0.5f64.sqrt();
    knots(&[[0.8, -0.6, 0.0], [0.8, 0.6, 0.0], [0.0, h, h]])
}

fn four_point(p4: [f64; 3]) -> KnotSequence {
    knots(&[
        [0.6144f64.sqrt(), 0.3456f64.sqrt(), 0.2],
        [0.0, 0.84f64.sqrt(), 0.4],
        [-(0.3564f64.sqrt()), 0.6336f64.sqrt(), -0.1],
        p4,
    ])
}

/// Four knots at `t = 0, 1/3, 2/3, 1` for SIDER3; also the first SENO2 case,
/// where the stencil `(p1, p2, p3)` wins on the middle interval.
pub fn four_point_a() -> KnotSequence {
    four_point([-0.64, 0.48, 0.6])
}

/// Same as [`four_point_a`] with `p4` moved so that `(p2, p3, p4)` wins.
pub fn four_point_b() -> KnotSequence {
    four_point([-(0.6336f64.sqrt()), 0.3564f64.sqrt(), 0.1])
}

/// Six knots for SENO3; `(p3, p4, p5, p6)` wins on the middle interval.
pub fn six_point() -> KnotSequence {
    knots(&[
        [-0.9462408024134863, 0.2340693569139826, -0.2232484714432692],
        [-0.5756591575040059, 0.7203584217199284, -0.3869112025244969],
        [-0.5139135508439371, 0.8072140040848369, 0.29034189134243293],
        [0.1733822829796129, 0.5285757390277231, 0.830991138376381],
        [0.8196895318805648, -0.045366259610012546, 0.571008733571053],
        [0.8410803457569805, 0.5409102069487302, 0.0],
    ])
}

/// Every bundled set by name.
pub fn by_name(name: &str) -> Option<KnotSequence> {
    match name {
        "three-point" => Some(three_point()),
        "four-point-a" => Some(four_point_a()),
        "four-point-b" => Some(four_point_b()),
        "six-point" => Some(six_point()),
        _ => None,
    }
}

pub const NAMES: [&str; 4] = ["three-point", "four-point-a", "four-point-b", "six-point"];
