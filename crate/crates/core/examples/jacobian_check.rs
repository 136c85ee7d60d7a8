//! Compares the analytic Jacobian of the moment/inverse-depth dynamics with
//! central finite differences.

use lineobs::dynamics::{mp_dynamics, mp_jacobian};
use lineobs::geometry::MpLine;
use lineobs::{CameraTwist, Vec3};
use nalgebra::{Matrix6, Vector6};

fn field(x: &Vector6<f64>, u: &CameraTwist) -> Vector6<f64> {
    let d = mp_dynamics(&MpLine::from_slice(x.as_slice()), u);
    Vector6::new(d.dm.x, d.dm.y, d.dm.z, d.dchi.x, d.dchi.y, d.dchi.z)
}

fn main() {
    let m = Vec3::new(0.3, -0.4, 0.8).normalize();
    let chi = m.cross(&Vec3::new(1.0, 0.2, 0.0)).normalize() * 0.4;
    let state = MpLine::new(m, chi);
    let u = CameraTwist::new(Vec3::new(0.2, -0.1, 0.3), Vec3::new(0.05, 0.1, -0.2));

    let x = state.to_vector();
    let h = 1e-6;
    let mut fd = Matrix6::zeros();
    for j in 0..6 {
        let mut e = Vector6::zeros();
        e[j] = h;
        fd.set_column(j, &((field(&(x + e), &u) - field(&(x - e), &u)) / (2.0 * h)));
    }
    let an = mp_jacobian(&state, &u);
    println!("analytic Jacobian:{an:.5}");
    println!("max |analytic - fd| = {:.3e}", (an - fd).amax());
}
