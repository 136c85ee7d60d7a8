use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dynamics::{euler_step, CameraTwist};
use crate::error::{Error, Result};
use crate::geometry::{mp_to_plucker, mp_to_sphere, plucker_to_mp, sphere_to_plucker, MpLine, PluckerLine, SphereLine, Vec3};
use crate::mho::{HorizonModel, MhoEstimate, MovingHorizonObserver, MpHorizonObserver, MpModel, SphereHorizonObserver, SphereModel};
use crate::mlo::{MloMpState, MloSphereState};
use crate::simplex::SimplexConfig;

use super::metrics::{depth_error, detect_convergence, direction_error, tail_mean};
use super::noise::NoiseModel;
use super::scenario::{sample_line, stream_rng, ScenarioConfig, INIT_STREAM, LINE_STREAM};
use super::trajectory::scenario_twist;

/// Which observer to run, with its tuning.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ObserverSpec {
    MloMp { alpha: f64 },
    MloSphere { alpha: f64 },
    MhoMp { window: usize, mu: f64 },
    MhoSphere { window: usize, mu: f64 },
}

impl ObserverSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            ObserverSpec::MloMp { .. } => "mlo_mp",
            ObserverSpec::MloSphere { .. } => "mlo_sphere",
            ObserverSpec::MhoMp { .. } => "mho_mp",
            ObserverSpec::MhoSphere { .. } => "mho_sphere",
        }
    }

    /// Tuning as `alpha=…` or `N=…;mu=…`.
    pub fn parameter(&self) -> String {
        match self {
            ObserverSpec::MloMp { alpha } | ObserverSpec::MloSphere { alpha } => format!("alpha={alpha}"),
            ObserverSpec::MhoMp { window, mu } | ObserverSpec::MhoSphere { window, mu } => format!("N={window};mu={mu}"),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            ObserverSpec::MloMp { alpha } | ObserverSpec::MloSphere { alpha } if !(alpha > 0.0) => {
                Err(Error::Config(format!("alpha must be positive, got {alpha}")))
            }
            ObserverSpec::MhoMp { window, mu } | ObserverSpec::MhoSphere { window, mu } if window < 2 || !(mu > 0.0) => {
                Err(Error::Config(format!("MHO needs N >= 2 and mu > 0, got N={window} mu={mu}")))
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for ObserverSpec {
    /// Column-safe label, e.g. `mlo_mp_a1000` or `mho_mp_n7_mu0.014`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ObserverSpec::MloMp { alpha } | ObserverSpec::MloSphere { alpha } => write!(f, "{}_a{alpha}", self.kind()),
            ObserverSpec::MhoMp { window, mu } | ObserverSpec::MhoSphere { window, mu } => {
                write!(f, "{}_n{window}_mu{mu}", self.kind())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRecord {
    pub step: usize,
    pub time: f64,
    pub truth: PluckerLine,
    pub measured: Vec3,
    pub twist: CameraTwist,
}

/// Solver bookkeeping of a horizon observer over one run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct SolverAudit {
    pub calls: usize,
    pub not_converged: usize,
    /// Solutions whose cost exceeded the cost of the prediction.
    pub cost_above_prediction: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObserverTrace {
    pub spec: ObserverSpec,
    pub estimates: Vec<Option<PluckerLine>>,
    /// Distance to the true state in the observer's own coordinates.
    pub error_norm: Vec<f64>,
    pub eps_d: Vec<f64>,
    pub eps_l: Vec<f64>,
    pub audit: SolverAudit,
    /// Set when the observer hit a singularity; later samples are NaN.
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub config: ScenarioConfig,
    pub steps: Vec<StepRecord>,
    pub observers: Vec<ObserverTrace>,
}

/// One summary line per (run, observer).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub seed: u64,
    /// Observer kind, e.g. `mho_mp`.
    pub observer: String,
    /// Observer tuning, e.g. `N=5;mu=0.014`.
    pub parameter: String,
    pub convergence_time_s: Option<f64>,
    /// `null` in JSON when the observer failed; read back as NaN.
    #[serde(deserialize_with = "nan_from_null")]
    pub eps_d_rad: f64,
    #[serde(deserialize_with = "nan_from_null")]
    pub eps_l_m: f64,
    pub noise_std: f64,
    pub trajectory: String,
    pub solver_calls: usize,
    pub cost_above_prediction: usize,
}

fn nan_from_null<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
}

enum Live {
    MloMp(MloMpState),
    MloSphere(MloSphereState),
    MhoMp(Box<MpHorizonObserver>),
    MhoSphere(Box<SphereHorizonObserver>),
    Failed,
}

/// An estimate in the observer's own coordinates.
enum Estimate {
    Mp(MpLine),
    Sphere(SphereLine),
}

fn measured_angles(y: &Vec3) -> (f64, f64) {
    (y.y.atan2(y.x), y.z.clamp(-1.0, 1.0).asin())
}

fn audit_mho<S>(audit: &mut SolverAudit, est: &MhoEstimate<S>) {
    if let Some(r) = &est.solver {
        audit.calls += 1;
        audit.not_converged += (!r.converged) as usize;
        audit.cost_above_prediction += (est.cost > est.prediction_cost) as usize;
    }
}

impl Live {
    fn start(spec: &ObserverSpec, y0: &Vec3, chi0: &Vec3, dt: f64) -> Result<Self> {
        let init = MpLine::new(*y0, *chi0);
        Ok(match *spec {
            ObserverSpec::MloMp { alpha } => Live::MloMp(MloMpState::new(*y0, *chi0, alpha)?),
            ObserverSpec::MloSphere { alpha } => Live::MloSphere(MloSphereState::new(mp_to_sphere(&init)?, alpha)?),
            ObserverSpec::MhoMp { window, mu } => {
                Live::MhoMp(Box::new(MpHorizonObserver::new(MpModel, window, mu, dt, init)?))
            }
            ObserverSpec::MhoSphere { window, mu } => Live::MhoSphere(Box::new(SphereHorizonObserver::new(
                SphereModel,
                window,
                mu,
                dt,
                mp_to_sphere(&init)?,
            )?)),
        })
    }

    /// Consumes sample `k` and returns the estimate for time `k`.
    fn advance(&mut self, y: &Vec3, u: &CameraTwist, dt: f64, tol: f64, audit: &mut SolverAudit) -> Result<Estimate> {
        match self {
            Live::MloMp(s) => {
                let est = s.estimate();
                *s = s.step(y, u, dt);
                Ok(Estimate::Mp(est))
            }
            Live::MloSphere(s) => {
                let est = s.estimate();
                *s = s.step(measured_angles(y), u, dt)?;
                Ok(Estimate::Sphere(est))
            }
            Live::MhoMp(o) => {
                let est = update_mho(o, y, u, tol)?;
                audit_mho(audit, &est);
                Ok(Estimate::Mp(est.state_now))
            }
            Live::MhoSphere(o) => {
                let est = update_mho(o, y, u, tol)?;
                audit_mho(audit, &est);
                Ok(Estimate::Sphere(est.state_now))
            }
            Live::Failed => Err(Error::Config("observer already failed".into())),
        }
    }
}

fn update_mho<M: HorizonModel>(
    o: &mut MovingHorizonObserver<M>,
    y: &Vec3,
    u: &CameraTwist,
    tol: f64,
) -> Result<MhoEstimate<M::State>> {
    let cfg = SimplexConfig { x_tol: tol, f_tol: tol, ..SimplexConfig::for_dim(o.model().dim()) };
    match o.update(*y, *u, &cfg) {
        Err(Error::SolverFailed { .. }) => o.predict_now(),
        other => other,
    }
}

/// Random initial guess for `χ̂`: uniform in `[−max, max]³` restricted to the
/// ball of radius `max`, then projected orthogonal to `m`.
pub fn initial_chi(rng: &mut impl Rng, m: &Vec3, max: f64) -> Vec3 {
    let c = loop {
        let c = Vec3::new(rng.random_range(-max..=max), rng.random_range(-max..=max), rng.random_range(-max..=max));
        if c.norm() <= max {
            break c;
        }
    };
    let n = m.normalize();
    c - n * n.dot(&c)
}

/// Bound on the random initial `‖χ̂‖`.
pub const INITIAL_CHI_MAX: f64 = 0.2;

/// Simulates one line and runs every observer on the same measurements.
pub fn run_scenario(config: &ScenarioConfig, observers: &[ObserverSpec]) -> Result<RunRecord> {
    config.validate()?;
    for o in observers {
        o.validate()?;
    }
    let dt = config.dt;
    let line = sample_line(&mut stream_rng(config.seed, LINE_STREAM), config.cube_side, config.min_depth)?;
    let mut noise = NoiseModel::new(config.noise_std, config.seed);
    let mut truth = plucker_to_mp(&line);
    let y0 = noise.perturb_moment(&truth.moment);
    let chi0 = initial_chi(&mut stream_rng(config.seed, INIT_STREAM), &y0, INITIAL_CHI_MAX);

    let samples = config.steps() + 1;
    let mut live = Vec::with_capacity(observers.len());
    let mut traces = Vec::with_capacity(observers.len());
    for spec in observers {
        let (state, failure) = match Live::start(spec, &y0, &chi0, dt) {
            Ok(s) => (s, None),
            Err(e) => (Live::Failed, Some(e.to_string())),
        };
        live.push(state);
        traces.push(ObserverTrace {
            spec: *spec,
            estimates: Vec::with_capacity(samples),
            error_norm: Vec::with_capacity(samples),
            eps_d: Vec::with_capacity(samples),
            eps_l: Vec::with_capacity(samples),
            audit: SolverAudit::default(),
            failure,
        });
    }

    let mut steps = Vec::with_capacity(samples);
    for k in 0..samples {
        let time = k as f64 * dt;
        let truth_line = mp_to_plucker(&truth)?;
        let y = if k == 0 { y0 } else { noise.perturb_moment(&truth.moment) };
        let u = scenario_twist(time, config.trajectory, &truth.moment, config.velocity_cap);
        let truth_sphere = mp_to_sphere(&truth).ok();

        for (obs, trace) in live.iter_mut().zip(traces.iter_mut()) {
            let result = match obs {
                Live::Failed => None,
                _ => match obs.advance(&y, &u, dt, config.solver_tol, &mut trace.audit) {
                    Ok(e) => Some(e),
                    Err(e) => {
                        trace.failure = Some(format!("step {k}: {e}"));
                        *obs = Live::Failed;
                        None
                    }
                },
            };
            let (plucker, err) = match result {
                Some(Estimate::Mp(x)) => (mp_to_plucker(&x).ok(), x.distance(&truth)),
                Some(Estimate::Sphere(s)) => (
                    sphere_to_plucker(&s).ok(),
                    truth_sphere.map_or(f64::NAN, |t| s.distance(&t)),
                ),
                None => (None, f64::NAN),
            };
            trace.estimates.push(plucker);
            trace.error_norm.push(err);
            trace.eps_d.push(plucker.map_or(f64::NAN, |p| direction_error(&p, &truth_line)));
            trace.eps_l.push(plucker.map_or(f64::NAN, |p| depth_error(&p, &truth_line)));
        }

        steps.push(StepRecord { step: k, time, truth: truth_line, measured: y, twist: u });
        truth = euler_step(&truth, &u, dt);
    }

    Ok(RunRecord { config: *config, steps, observers: traces })
}

/// Per-observer summary: convergence time and tail-averaged errors.
pub fn summarize(record: &RunRecord) -> Vec<RunSummary> {
    record
        .observers
        .iter()
        .map(|t| RunSummary {
            seed: record.config.seed,
            observer: t.spec.kind().to_string(),
            parameter: t.spec.parameter(),
            convergence_time_s: detect_convergence(&t.error_norm, record.config.dt),
            eps_d_rad: tail_mean(&t.eps_d),
            eps_l_m: tail_mean(&t.eps_l),
            noise_std: record.config.noise_std,
            trajectory: record.config.trajectory.to_string(),
            solver_calls: t.audit.calls,
            cost_above_prediction: t.audit.cost_above_prediction,
        })
        .collect()
}
