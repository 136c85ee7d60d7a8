#![allow(dead_code)]

use lineobs::dynamics::SphereDerivative;
use lineobs::geometry::{MpLine, SphereBasis, SphereLine, Vec3};
use lineobs::CameraTwist;
use rand::Rng;

pub fn unit(rng: &mut impl Rng) -> Vec3 {
    loop {
        let v = Vec3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let n = v.norm();
        if n > 1e-3 && n <= 1.0 {
            return v / n;
        }
    }
}

/// A Moment-Point state with `‖χ‖` uniform in `[lo, hi]`.
pub fn mp_state(rng: &mut impl Rng, lo: f64, hi: f64) -> MpLine {
    let m = unit(rng);
    let c = m.cross(&unit(rng)).normalize();
    MpLine::new(m, c * rng.random_range(lo..=hi))
}

/// A twist with `‖ν‖ ≤ max_nu` and `‖ω‖ ≤ max_omega`.
pub fn twist(rng: &mut impl Rng, max_nu: f64, max_omega: f64) -> CameraTwist {
    CameraTwist::new(
        unit(rng) * rng.random_range(0.0..=max_nu),
        unit(rng) * rng.random_range(0.0..=max_omega),
    )
}

/// Moment-Point tangent vector of a Sphere motion, by the chain rule on
/// `m = m_S(θ, φ)` and `χ = (η₁ m_P + η₂ m_S × m_P) × m_S`.
pub fn sphere_tangent_to_mp(s: &SphereLine, ds: &SphereDerivative) -> (Vec3, Vec3) {
    let (st, ct) = s.theta.sin_cos();
    let (sp, cp) = s.phi.sin_cos();
    let b = SphereBasis::new(s.theta, s.phi);
    let dm_s = b.m_sp * (cp * ds.dtheta) - b.m_p * ds.dphi;
    let dm_p = b.m_sp * (sp * ds.dtheta) + b.m_s * ds.dphi;
    let dm_sp = Vec3::new(-ct, -st, 0.0) * ds.dtheta;
    let v = b.m_p * s.eta1 + b.m_sp * s.eta2;
    let dv = b.m_p * ds.deta1 + dm_p * s.eta1 + b.m_sp * ds.deta2 + dm_sp * s.eta2;
    (dm_s, dv.cross(&b.m_s) + v.cross(&dm_s))
}
