//! Incremental structure-from-motion of 3D straight lines seen by a moving
//! camera with known velocity.
//!
//! The crate provides two line states (Moment-Point and Sphere), their
//! dynamics, a memory-less observer and a moving horizon observer for each,
//! the stability certificate that bounds the horizon observer's prediction
//! gain, and a seeded simulation harness. See the `examples/` directory for
//! one runnable program per capability.

pub mod cli;
pub mod dynamics;
pub mod error;
pub mod geometry;
pub mod mho;
pub mod mlo;
pub mod sim;
pub mod simplex;
pub mod stability;

pub use dynamics::{CameraTwist, DEFAULT_DT};
pub use error::{Error, Result};
pub use geometry::{MpLine, PluckerLine, SphereLine, Vec3};
