//! Continuous line dynamics under a known camera twist, the analytic
//! Jacobian of the Moment-Point vector field and Euler discretization.

use nalgebra::{Matrix3, Matrix6};

use crate::error::{Error, Result};
use crate::geometry::{skew, wrap_angle, MpLine, SphereLine, Vec3, POLE_TOL};

/// Camera frame rate used throughout unless configured otherwise.
pub const DEFAULT_DT: f64 = 1.0 / 30.0;

/// Linear (`nu`, m/s) and angular (`omega`, rad/s) camera velocity in the camera frame.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CameraTwist {
    pub nu: Vec3,
    pub omega: Vec3,
}

impl CameraTwist {
    pub fn new(nu: Vec3, omega: Vec3) -> Self {
        Self { nu, omega }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn is_finite(&self) -> bool {
        self.nu.iter().chain(self.omega.iter()).all(|c| c.is_finite())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MpDerivative {
    pub dm: Vec3,
    pub dchi: Vec3,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereDerivative {
    pub dtheta: f64,
    pub dphi: f64,
    pub deta1: f64,
    pub deta2: f64,
}

/// `g_m` of the Moment-Point system.
#[inline]
pub fn moment_rate(m: &Vec3, chi: &Vec3, twist: &CameraTwist) -> Vec3 {
    twist.omega.cross(m) - chi * twist.nu.dot(m)
}

/// `g_χ` of the Moment-Point system,
/// `[ω]ₓχ + (νᵀm) m χᵀχ − (νᵀχ) χ`.
///
/// These signs are the ones that keep `mᵀχ = 0` along the flow and agree with
/// the Sphere dynamics mapped through `χ = (d / l) × m`.
#[inline]
pub fn chi_rate(m: &Vec3, chi: &Vec3, twist: &CameraTwist) -> Vec3 {
    twist.omega.cross(chi) + m * (twist.nu.dot(m) * chi.norm_squared()) - chi * twist.nu.dot(chi)
}

pub fn mp_dynamics(state: &MpLine, twist: &CameraTwist) -> MpDerivative {
    MpDerivative {
        dm: moment_rate(&state.moment, &state.chi, twist),
        dchi: chi_rate(&state.moment, &state.chi, twist),
    }
}

pub(crate) fn check_pole(phi: f64) -> Result<()> {
    if phi.sin().abs() > 1.0 - POLE_TOL || !phi.is_finite() {
        return Err(Error::SphericalSingularity(phi.sin()));
    }
    Ok(())
}

/// `f_η₁` and `f_η₂`, evaluated at the angles `(theta, phi)` with inverse-depth
/// projections `(eta1, eta2)`.
pub fn eta_rates(theta: f64, phi: f64, eta1: f64, eta2: f64, twist: &CameraTwist) -> (f64, f64) {
    let b = crate::geometry::SphereBasis::new(theta, phi);
    let tan = phi.tan();
    let (nu, w) = (&twist.nu, &twist.omega);
    let rot = w.dot(&(b.m_p * tan + b.m_s));
    let deta1 = -rot * eta2
        + nu.dot(&((b.m_s * tan - b.m_p) * (eta1 * eta2) + b.m_sp * (eta1 * eta1)));
    let deta2 = rot * eta1
        + nu.dot(&(b.m_sp * (eta1 * eta2) - b.m_s * (tan * eta1 * eta1) - b.m_p * (eta2 * eta2)));
    (deta1, deta2)
}

pub fn sphere_dynamics(state: &SphereLine, twist: &CameraTwist) -> Result<SphereDerivative> {
    check_pole(state.phi)?;
    let b = state.basis();
    let s = twist.nu.dot(&b.m_s);
    let dtheta = (-twist.omega.dot(&b.m_p) + s * state.eta1) / state.phi.cos();
    let dphi = -twist.omega.dot(&b.m_sp) + s * state.eta2;
    let (deta1, deta2) = eta_rates(state.theta, state.phi, state.eta1, state.eta2, twist);
    Ok(SphereDerivative { dtheta, dphi, deta1, deta2 })
}

/// Jacobian of `(g_m, g_χ)` with respect to the stacked state `(m, χ)`.
pub fn mp_jacobian(state: &MpLine, twist: &CameraTwist) -> Matrix6<f64> {
    let (m, chi) = (&state.moment, &state.chi);
    let (nu, w) = (&twist.nu, &twist.omega);
    let s = nu.dot(m);
    let chi_sq = chi.norm_squared();
    let wx = skew(w);
    let id = Matrix3::identity();

    let j1 = wx - chi * nu.transpose();
    let j2 = -s * id;
    let j3 = s * chi_sq * id + m * nu.transpose() * chi_sq;
    let j4 = wx + 2.0 * s * m * chi.transpose() - chi * nu.transpose() - nu.dot(chi) * id;

    let mut jac = Matrix6::zeros();
    jac.fixed_view_mut::<3, 3>(0, 0).copy_from(&j1);
    jac.fixed_view_mut::<3, 3>(0, 3).copy_from(&j2);
    jac.fixed_view_mut::<3, 3>(3, 0).copy_from(&j3);
    jac.fixed_view_mut::<3, 3>(3, 3).copy_from(&j4);
    jac
}

/// The plain Euler map `x + g(x, u) dt`, without any constraint projection.
///
/// This is the discrete model the Lipschitz and observability analysis is
/// stated for.
#[inline]
pub fn euler_flow(state: &MpLine, twist: &CameraTwist, dt: f64) -> MpLine {
    let d = mp_dynamics(state, twist);
    MpLine {
        moment: state.moment + d.dm * dt,
        chi: state.chi + d.dchi * dt,
    }
}

/// One Euler step followed by re-projection onto `‖m‖ = 1`, `mᵀχ = 0`.
#[inline]
pub fn euler_step(state: &MpLine, twist: &CameraTwist, dt: f64) -> MpLine {
    if dt == 0.0 {
        return *state;
    }
    euler_flow(state, twist, dt).projected()
}

pub fn euler_step_sphere(state: &SphereLine, twist: &CameraTwist, dt: f64) -> Result<SphereLine> {
    let d = sphere_dynamics(state, twist)?;
    let next = SphereLine {
        theta: wrap_angle(state.theta + d.dtheta * dt),
        phi: state.phi + d.dphi * dt,
        eta1: state.eta1 + d.deta1 * dt,
        eta2: state.eta2 + d.deta2 * dt,
    };
    check_pole(next.phi)?;
    if next.phi.abs() >= std::f64::consts::FRAC_PI_2 {
        return Err(Error::SphericalSingularity(next.phi.sin()));
    }
    Ok(next)
}
