//! Memory-less observers for the Moment-Point and Sphere line states.
//!
//! Both observers integrate a continuous-time correction law in lockstep with
//! the camera: one Euler step of length `dt` per measurement. Measured
//! quantities (the moment, or its spherical angles) enter the model terms
//! directly; only the unmeasured substate is driven by the innovation.

use nalgebra::{DMatrix, Matrix2, Matrix3, SMatrix};

use crate::dynamics::{check_pole, chi_rate, eta_rates, CameraTwist};
use crate::error::{Error, Result};
use crate::geometry::{wrap_angle, MpLine, SphereBasis, SphereLine, Vec3};

/// `Ω_MP = −(νᵀm) I₃`, the influence of `χ` on the moment dynamics.
pub fn omega_mp(measured_m: &Vec3, twist: &CameraTwist) -> Matrix3<f64> {
    Matrix3::identity() * -twist.nu.dot(measured_m)
}

/// `Ω_S = (νᵀm_S) diag(1 / cos φ, 1)`.
pub fn omega_sphere(theta: f64, phi: f64, twist: &CameraTwist) -> Matrix2<f64> {
    let s = twist.nu.dot(&SphereBasis::new(theta, phi).m_s);
    Matrix2::new(s / phi.cos(), 0.0, 0.0, s)
}

/// Gain `H = V diag(2√α σᵢ) Vᵀ` built from the SVD `Ω = U Σ Vᵀ`.
///
/// The resulting closed loop on the measured substate is critically damped.
pub fn gain_matrix<const D: usize>(omega: &SMatrix<f64, D, D>, alpha: f64) -> SMatrix<f64, D, D> {
    debug_assert!(alpha > 0.0);
    let svd = DMatrix::from_column_slice(D, D, omega.as_slice()).svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let scale = 2.0 * alpha.sqrt();
    let mut h = DMatrix::<f64>::zeros(D, D);
    for (i, sigma) in svd.singular_values.iter().enumerate() {
        let v = v_t.row(i).transpose();
        h += &v * v.transpose() * (scale * sigma);
    }
    SMatrix::<f64, D, D>::from_column_slice(h.as_slice())
}

/// Memory-less observer state for the Moment-Point representation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MloMpState {
    pub m_hat: Vec3,
    pub chi_hat: Vec3,
    pub alpha: f64,
}

impl MloMpState {
    pub fn new(m_hat: Vec3, chi_hat: Vec3, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0) {
            return Err(Error::Config(format!("observer gain must be positive, got {alpha}")));
        }
        Ok(Self { m_hat: m_hat.normalize(), chi_hat, alpha })
    }

    pub fn estimate(&self) -> MpLine {
        MpLine::new(self.m_hat, self.chi_hat)
    }

    pub fn step(&self, measured_m: &Vec3, twist: &CameraTwist, dt: f64) -> Self {
        mlo_mp_step(self, measured_m, twist, dt)
    }
}

/// One Euler step of the Moment-Point observer.
pub fn mlo_mp_step(state: &MloMpState, measured_m: &Vec3, twist: &CameraTwist, dt: f64) -> MloMpState {
    let m = measured_m;
    let omega = omega_mp(m, twist);
    let h = gain_matrix(&omega, state.alpha);
    let innovation = m - state.m_hat;

    let dm_hat = twist.omega.cross(m) + omega.transpose() * state.chi_hat + h * innovation;
    let dchi_hat = chi_rate(m, &state.chi_hat, twist) + omega * innovation * state.alpha;

    let next = MpLine::new(state.m_hat + dm_hat * dt, state.chi_hat + dchi_hat * dt).projected();
    MloMpState { m_hat: next.moment, chi_hat: next.chi, alpha: state.alpha }
}

/// Memory-less observer state for the Sphere representation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MloSphereState {
    pub theta_hat: f64,
    pub phi_hat: f64,
    pub eta1_hat: f64,
    pub eta2_hat: f64,
    pub alpha: f64,
}

impl MloSphereState {
    pub fn new(estimate: SphereLine, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0) {
            return Err(Error::Config(format!("observer gain must be positive, got {alpha}")));
        }
        check_pole(estimate.phi)?;
        Ok(Self {
            theta_hat: estimate.theta,
            phi_hat: estimate.phi,
            eta1_hat: estimate.eta1,
            eta2_hat: estimate.eta2,
            alpha,
        })
    }

    pub fn estimate(&self) -> SphereLine {
        SphereLine::new(self.theta_hat, self.phi_hat, self.eta1_hat, self.eta2_hat)
    }

    pub fn step(&self, measured: (f64, f64), twist: &CameraTwist, dt: f64) -> Result<Self> {
        mlo_sphere_step(self, measured, twist, dt)
    }
}

/// One Euler step of the Sphere observer, driven by measured `(θ, φ)`.
pub fn mlo_sphere_step(
    state: &MloSphereState,
    measured: (f64, f64),
    twist: &CameraTwist,
    dt: f64,
) -> Result<MloSphereState> {
    let (theta, phi) = measured;
    check_pole(phi)?;
    check_pole(state.phi_hat)?;
    let b = SphereBasis::new(theta, phi);
    let omega = omega_sphere(theta, phi, twist);
    let h = gain_matrix(&omega, state.alpha);
    let innovation = nalgebra::Vector2::new(wrap_angle(theta - state.theta_hat), phi - state.phi_hat);
    let eta_hat = nalgebra::Vector2::new(state.eta1_hat, state.eta2_hat);

    let rotation = nalgebra::Vector2::new(
        -twist.omega.dot(&b.m_p) / phi.cos(),
        -twist.omega.dot(&b.m_sp),
    );
    let d_angles = rotation + omega.transpose() * eta_hat + h * innovation;
    let (f1, f2) = eta_rates(theta, phi, state.eta1_hat, state.eta2_hat, twist);
    let d_eta = nalgebra::Vector2::new(f1, f2) + omega * innovation * state.alpha;

    let next = MloSphereState {
        theta_hat: wrap_angle(state.theta_hat + d_angles.x * dt),
        phi_hat: state.phi_hat + d_angles.y * dt,
        eta1_hat: state.eta1_hat + d_eta.x * dt,
        eta2_hat: state.eta2_hat + d_eta.y * dt,
        alpha: state.alpha,
    };
    check_pole(next.phi_hat)?;
    if next.phi_hat.abs() >= std::f64::consts::FRAC_PI_2 {
        return Err(Error::SphericalSingularity(next.phi_hat.sin()));
    }
    Ok(next)
}
