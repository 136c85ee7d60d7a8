use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dynamics::DEFAULT_DT;
use crate::error::{Error, Result};
use crate::geometry::{PluckerLine, Vec3};

const MAX_LINE_TRIES: usize = 100;

/// Default clearance between the camera and a sampled line, in meters. The
/// excitation motion moves the camera well under this, so the camera never
/// crosses the line.
pub const DEFAULT_MIN_DEPTH: f64 = 1.0;

pub const LINE_STREAM: u64 = 0;
pub const INIT_STREAM: u64 = 1;
pub const NOISE_STREAM: u64 = 2;

/// A generator for one of the independent random streams of a run.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Camera motion pattern.
///
/// The alternating patterns use the excitation motion on even seconds and a
/// non-observable motion on odd seconds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Trajectory {
    Excitation,
    /// `ν = 0`, `ω = 0`.
    AlternatingNullNu,
    /// `ν = 0`, `ω` from the excitation.
    AlternatingNullNuWithOmega,
    /// `ν` projected into the interpretation plane, `ω = 0`.
    AlternatingInPlaneNu,
    /// `ν` projected into the interpretation plane, `ω` from the excitation.
    AlternatingInPlaneNuWithOmega,
}

impl Trajectory {
    pub const ALL: [Trajectory; 5] = [
        Trajectory::Excitation,
        Trajectory::AlternatingNullNu,
        Trajectory::AlternatingNullNuWithOmega,
        Trajectory::AlternatingInPlaneNu,
        Trajectory::AlternatingInPlaneNuWithOmega,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Trajectory::Excitation => "excitation",
            Trajectory::AlternatingNullNu => "alternating_null_nu",
            Trajectory::AlternatingNullNuWithOmega => "alternating_null_nu_with_omega",
            Trajectory::AlternatingInPlaneNu => "alternating_in_plane_nu",
            Trajectory::AlternatingInPlaneNuWithOmega => "alternating_in_plane_nu_with_omega",
        }
    }
}

impl fmt::Display for Trajectory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Trajectory {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Trajectory::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown trajectory '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub seed: u64,
    pub duration: f64,
    pub dt: f64,
    pub cube_side: f64,
    /// Standard deviation of each Euler angle of the moment perturbation, in radians.
    pub noise_std: f64,
    pub trajectory: Trajectory,
    /// Bound on `‖ν‖` (m/s) and `‖ω‖` (rad/s).
    pub velocity_cap: f64,
    /// Lines closer than this to the camera at t = 0 are resampled.
    pub min_depth: f64,
    /// Simplex tolerance (`x_tol` and `f_tol`) used by horizon observers.
    pub solver_tol: f64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            duration: 10.0,
            dt: DEFAULT_DT,
            cube_side: 5.0,
            noise_std: 0.0,
            trajectory: Trajectory::Excitation,
            velocity_cap: 0.5,
            min_depth: DEFAULT_MIN_DEPTH,
            solver_tol: 1e-8,
        }
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must be positive, got {v}")))
            }
        };
        positive("duration", self.duration)?;
        positive("dt", self.dt)?;
        positive("cube_side", self.cube_side)?;
        positive("velocity_cap", self.velocity_cap)?;
        positive("solver_tol", self.solver_tol)?;
        if !(self.min_depth >= 0.0 && self.min_depth.is_finite()) {
            return Err(Error::Config(format!("min_depth must be non-negative, got {}", self.min_depth)));
        }
        if !(self.noise_std >= 0.0 && self.noise_std.is_finite()) {
            return Err(Error::Config(format!("noise_std must be non-negative, got {}", self.noise_std)));
        }
        Ok(())
    }

    /// Number of plant steps; the run records `steps() + 1` samples.
    pub fn steps(&self) -> usize {
        (self.duration / self.dt).round() as usize
    }
}

/// Center of the sampling cube: on the optical axis, one meter beyond the
/// camera plus half a side, so every point has depth at least one meter.
pub fn cube_center(cube_side: f64) -> Vec3 {
    Vec3::new(0.0, 0.0, 1.0 + cube_side / 2.0)
}

/// Uniform direction on the unit sphere.
pub fn random_direction(rng: &mut impl Rng) -> Vec3 {
    let z: f64 = rng.random_range(-1.0..=1.0);
    let a: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let r = (1.0 - z * z).max(0.0).sqrt();
    Vec3::new(r * a.cos(), r * a.sin(), z)
}

/// A random line through a point of the sampling cube, at least
/// `min_depth` away from the camera.
pub fn sample_line(rng: &mut impl Rng, cube_side: f64, min_depth: f64) -> Result<PluckerLine> {
    if !(cube_side > 0.0) {
        return Err(Error::Config(format!("cube_side must be positive, got {cube_side}")));
    }
    let center = cube_center(cube_side);
    let h = cube_side / 2.0;
    let mut last = Error::DegenerateLine(0.0);
    for _ in 0..MAX_LINE_TRIES {
        let p = center + Vec3::new(rng.random_range(-h..h), rng.random_range(-h..h), rng.random_range(-h..h));
        match PluckerLine::from_point_direction(&p, &random_direction(rng)) {
            Ok(line) if line.depth() >= min_depth => return Ok(line),
            Ok(line) => last = Error::DegenerateLine(line.depth()),
            Err(e) => last = e,
        }
    }
    Err(last)
}
