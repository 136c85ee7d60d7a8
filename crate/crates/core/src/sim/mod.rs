//! Seeded simulation harness: line sampling, camera trajectories,
//! measurement noise, error metrics and the per-run driver.

pub mod io;
pub mod metrics;
pub mod noise;
pub mod run;
pub mod scenario;
pub mod trajectory;

pub use metrics::{depth_error, detect_convergence, direction_error, CONVERGENCE_THRESHOLD};
pub use noise::NoiseModel;
pub use run::{run_scenario, summarize, ObserverSpec, RunRecord, RunSummary};
pub use scenario::{sample_line, ScenarioConfig, Trajectory};
pub use trajectory::{alternating_twist, excitation_twist, scenario_twist};
