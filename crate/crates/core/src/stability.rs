//! Lipschitz bounds, the prediction-gain certificate of the Moment-Point
//! horizon observer, and a numerical observability rank test.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::dynamics::{euler_flow, CameraTwist};
use crate::error::{Error, Result};
use crate::geometry::{MpLine, Vec3};

/// Relative singular-value threshold used by [`observability_rank`].
pub const RANK_TOL: f64 = 1e-9;

/// Bounds on the camera twist and the line state over which the
/// certificate holds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OperatingEnvelope {
    pub max_nu: f64,
    pub max_omega: f64,
    pub max_chi: f64,
    pub dt: f64,
    pub window: usize,
}

impl OperatingEnvelope {
    pub fn new(max_nu: f64, max_omega: f64, max_chi: f64, dt: f64, window: usize) -> Result<Self> {
        let env = Self { max_nu, max_omega, max_chi, dt, window };
        env.validate()?;
        Ok(env)
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [self.max_nu, self.max_omega, self.max_chi, self.dt];
        if fields.iter().any(|v| !v.is_finite() || *v < 0.0) || !(self.dt > 0.0) {
            return Err(Error::Config(format!("envelope bounds must be non-negative with dt > 0: {self:?}")));
        }
        if self.window < 1 {
            return Err(Error::Config("window size must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StabilityCertificate {
    pub window: usize,
    pub c_g: f64,
    pub c_f: f64,
    pub c_big_f: f64,
    pub delta: f64,
    pub mu_max: f64,
}

impl StabilityCertificate {
    /// Whether `mu` satisfies `8 c_f² μ / (μ + δ) < 1`.
    pub fn admits(&self, mu: f64) -> bool {
        mu > 0.0 && 8.0 * self.c_f * self.c_f * mu / (mu + self.delta) < 1.0
    }
}

/// Upper bound of the Lipschitz constant of the continuous Moment-Point field.
pub fn lipschitz_cg(env: &OperatingEnvelope) -> f64 {
    let (nu, om, chi) = (env.max_nu, env.max_omega, env.max_chi);
    2.0 * om + nu + 5.0 * nu * chi + 2.0 * nu * chi * chi
}

/// Lipschitz constant of one Euler step.
pub fn lipschitz_cf(c_g: f64, dt: f64) -> f64 {
    1.0 + c_g * dt
}

/// Lipschitz constant of the stacked observation map over `n` samples.
pub fn lipschitz_c_big_f(c_f: f64, n: usize) -> f64 {
    (0..n).map(|k| c_f.powi(k as i32)).sum()
}

pub fn certificate(env: &OperatingEnvelope) -> Result<StabilityCertificate> {
    env.validate()?;
    let c_g = lipschitz_cg(env);
    let c_f = lipschitz_cf(c_g, env.dt);
    let c_big_f = lipschitz_c_big_f(c_f, env.window);
    let delta = 1.0 / c_big_f;
    let mu_max = delta / (8.0 * c_f * c_f - 1.0);
    Ok(StabilityCertificate { window: env.window, c_g, c_f, c_big_f, delta, mu_max })
}

/// Measured moments along the discrete trajectory from `start`.
///
/// Uses the unprojected Euler map so that every component of the 6-vector
/// start state reaches the outputs; with the projected step the moment
/// normalization hides the radial directions.
pub fn observation_map(start: &MpLine, inputs: &[CameraTwist], dt: f64) -> Vec<Vec3> {
    let mut out = Vec::with_capacity(inputs.len() + 1);
    let mut x = *start;
    out.push(x.moment);
    for u in inputs {
        x = euler_flow(&x, u, dt);
        out.push(x.moment);
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankReport {
    pub rank: usize,
    pub singular_values: Vec<f64>,
}

/// Numerical rank of the Jacobian of [`observation_map`] with respect to the
/// start state, by central differences.
pub fn observability_rank(start: &MpLine, inputs: &[CameraTwist], dt: f64) -> RankReport {
    const H: f64 = 1e-6;
    let rows = 3 * (inputs.len() + 1);
    let base = start.to_vector();
    let mut jac = DMatrix::<f64>::zeros(rows, 6);
    for j in 0..6 {
        let mut plus = base;
        let mut minus = base;
        plus[j] += H;
        minus[j] -= H;
        let yp = observation_map(&MpLine::from_slice(plus.as_slice()), inputs, dt);
        let ym = observation_map(&MpLine::from_slice(minus.as_slice()), inputs, dt);
        for (k, (a, b)) in yp.iter().zip(&ym).enumerate() {
            for r in 0..3 {
                jac[(3 * k + r, j)] = (a[r] - b[r]) / (2.0 * H);
            }
        }
    }
    let mut sv: Vec<f64> = jac.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    let largest = sv.first().copied().unwrap_or(0.0);
    let rank = sv.iter().filter(|s| **s > RANK_TOL * largest).count();
    RankReport { rank, singular_values: sv }
}
