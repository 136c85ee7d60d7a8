use nalgebra::Rotation3;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::geometry::Vec3;

use super::scenario::{stream_rng, NOISE_STREAM};

/// Random-rotation perturbation of measured moments.
///
/// Each of the three Euler angles is uniform on `[−σ√3, σ√3]`, which has
/// standard deviation `σ`.
#[derive(Debug, Clone)]
pub struct NoiseModel {
    std: f64,
    rng: ChaCha8Rng,
}

impl NoiseModel {
    pub fn new(std: f64, seed: u64) -> Self {
        Self { std, rng: stream_rng(seed, NOISE_STREAM) }
    }

    pub fn std(&self) -> f64 {
        self.std
    }

    pub fn half_width(&self) -> f64 {
        self.std * 3f64.sqrt()
    }

    /// Rotates `m` by a random rotation (roll, pitch, yaw about x, y, z).
    pub fn perturb_moment(&mut self, m: &Vec3) -> Vec3 {
        if self.std == 0.0 {
            return *m;
        }
        let w = self.half_width();
        let roll = self.rng.random_range(-w..=w);
        let pitch = self.rng.random_range(-w..=w);
        let yaw = self.rng.random_range(-w..=w);
        Rotation3::from_euler_angles(roll, pitch, yaw) * m
    }
}
