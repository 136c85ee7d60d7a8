//! Rank of the horizon observation map for an exciting input, a pure
//! rotation and a translation parallel to the line's plane.

use lineobs::stability::observability_rank;
use lineobs::{CameraTwist, MpLine, Vec3, DEFAULT_DT};

fn main() {
    let m = Vec3::new(0.2, 0.3, 0.9).normalize();
    let x = MpLine::new(m, m.cross(&Vec3::x()).normalize() * 0.5);
    let in_plane = m.cross(&Vec3::y()).normalize() * 0.3;

    let cases = [
        ("translation along the normal", CameraTwist::new(m * 0.3 + in_plane, Vec3::new(0.0, 0.1, 0.0))),
        ("rotation only", CameraTwist::new(Vec3::zeros(), Vec3::new(0.1, 0.2, 0.0))),
        ("translation in the plane", CameraTwist::new(in_plane, Vec3::zeros())),
    ];
    for (name, u) in cases {
        let r = observability_rank(&x, &[u; 6], DEFAULT_DT);
        let smallest = r.singular_values.last().copied().unwrap_or(0.0);
        println!("{name:30} rank {}  smallest singular value {smallest:.3e}", r.rank);
    }
}
