//! Moving Horizon Observer.
//!
//! The observer keeps the last `N + 1` measured moments and the `N` camera
//! twists between them. At every sample it searches for the state at the
//! start of the window minimizing
//!
//! ```text
//! μ ‖x − x̄‖² + Σᵢ ‖yᵢ − h(xᵢ)‖²,   x_{i+1} = f(xᵢ, uᵢ)
//! ```
//!
//! where `x̄` is the prediction obtained by pushing the previous window-start
//! estimate one step through the model. The decision variable lives in the
//! model's parameter space; the model maps candidates back onto its
//! constraint manifold before propagating them.

use std::collections::VecDeque;

use crate::dynamics::{euler_step, euler_step_sphere, CameraTwist};
use crate::error::{Error, Result};
use crate::geometry::{wrap_angle, MpLine, SphereBasis, SphereLine, Vec3};
use crate::simplex::{minimize, OptResult, SimplexConfig};

/// Cost assigned to candidates the model cannot propagate (Sphere poles).
const INFEASIBLE_COST: f64 = 1e12;

/// Discrete line model used inside the horizon cost.
pub trait HorizonModel {
    type State: Copy + std::fmt::Debug;

    /// Number of free parameters of the decision variable.
    fn dim(&self) -> usize;
    fn to_params(&self, state: &Self::State) -> Vec<f64>;
    /// Maps a raw parameter vector onto a valid state.
    fn from_params(&self, params: &[f64]) -> Self::State;
    /// One model step; `None` when the state hits a singularity.
    fn propagate(&self, state: &Self::State, twist: &CameraTwist, dt: f64) -> Option<Self::State>;
    /// The measured moment predicted by a state.
    fn output(&self, state: &Self::State) -> Vec3;
    /// Squared distance of a candidate to the prediction in parameter space.
    fn params_distance_sq(&self, a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum()
    }
}

/// The Moment-Point model `(m, χ)` with projected Euler steps.
#[derive(Debug, Clone, Copy, Default)]
pub struct MpModel;

impl HorizonModel for MpModel {
    type State = MpLine;

    fn dim(&self) -> usize {
        6
    }

    fn to_params(&self, state: &MpLine) -> Vec<f64> {
        state.to_vector().as_slice().to_vec()
    }

    fn from_params(&self, params: &[f64]) -> MpLine {
        MpLine::from_slice(params).projected()
    }

    #[inline]
    fn propagate(&self, state: &MpLine, twist: &CameraTwist, dt: f64) -> Option<MpLine> {
        Some(euler_step(state, twist, dt))
    }

    #[inline]
    fn output(&self, state: &MpLine) -> Vec3 {
        state.moment
    }
}

/// The Sphere model `(θ, φ, η₁, η₂)`; no stability certificate applies to it.
#[derive(Debug, Clone, Copy, Default)]
pub struct SphereModel;

impl HorizonModel for SphereModel {
    type State = SphereLine;

    fn dim(&self) -> usize {
        4
    }

    fn to_params(&self, s: &SphereLine) -> Vec<f64> {
        vec![s.theta, s.phi, s.eta1, s.eta2]
    }

    fn from_params(&self, p: &[f64]) -> SphereLine {
        SphereLine::new(wrap_angle(p[0]), p[1], p[2], p[3])
    }

    fn propagate(&self, state: &SphereLine, twist: &CameraTwist, dt: f64) -> Option<SphereLine> {
        euler_step_sphere(state, twist, dt).ok()
    }

    fn output(&self, s: &SphereLine) -> Vec3 {
        SphereBasis::new(s.theta, s.phi).m_s
    }

    fn params_distance_sq(&self, a: &[f64], b: &[f64]) -> f64 {
        wrap_angle(a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2) + (a[3] - b[3]).powi(2)
    }
}

/// FIFO memory of measured moments and the twists applied after each.
///
/// Sample `i` pairs measurement `yᵢ` with the twist `uᵢ` applied between
/// `yᵢ` and `yᵢ₊₁`; the twist of the newest sample is not used until the
/// next measurement arrives.
#[derive(Debug, Clone, PartialEq)]
pub struct MemoryWindow {
    capacity: usize,
    samples: VecDeque<(Vec3, CameraTwist)>,
}

impl MemoryWindow {
    /// A window of `n + 1` measurements and `n` twists.
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Config(format!("window size N must be at least 2, got {n}")));
        }
        Ok(Self { capacity: n, samples: VecDeque::with_capacity(n + 2) })
    }

    pub fn size(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn is_warm(&self) -> bool {
        self.samples.len() == self.capacity + 1
    }

    /// Appends a measurement (renormalized) and returns the evicted sample, if any.
    pub fn push(&mut self, y: Vec3, u: CameraTwist) -> Option<(Vec3, CameraTwist)> {
        let evicted = if self.is_warm() { self.samples.pop_front() } else { None };
        self.samples.push_back((y.normalize(), u));
        evicted
    }

    pub fn measurements(&self) -> impl ExactSizeIterator<Item = &Vec3> + '_ {
        self.samples.iter().map(|(y, _)| y)
    }

    /// Twists connecting consecutive measurements, oldest first.
    pub fn inputs(&self) -> impl Iterator<Item = &CameraTwist> + '_ {
        let n = self.samples.len().saturating_sub(1);
        self.samples.iter().take(n).map(|(_, u)| u)
    }

    fn front_input(&self) -> Option<CameraTwist> {
        (self.samples.len() > 1).then(|| self.samples[0].1)
    }
}

/// Horizon cost of a raw candidate parameter vector.
pub fn horizon_cost<M: HorizonModel>(
    model: &M,
    candidate: &[f64],
    measurements: &[Vec3],
    inputs: &[CameraTwist],
    prediction: &[f64],
    mu: f64,
    dt: f64,
) -> f64 {
    let mut cost = mu * model.params_distance_sq(candidate, prediction);
    let mut x = model.from_params(candidate);
    for (i, y) in measurements.iter().enumerate() {
        if i > 0 {
            match model.propagate(&x, &inputs[i - 1], dt) {
                Some(next) => x = next,
                None => return INFEASIBLE_COST,
            }
        }
        cost += (y - model.output(&x)).norm_squared();
    }
    cost
}

/// Horizon cost for a Moment-Point candidate window-start state.
pub fn mho_cost(candidate: &MpLine, window: &MemoryWindow, prediction: &MpLine, mu: f64, dt: f64) -> f64 {
    let ys: Vec<Vec3> = window.measurements().copied().collect();
    let us: Vec<CameraTwist> = window.inputs().copied().collect();
    horizon_cost(
        &MpModel,
        candidate.to_vector().as_slice(),
        &ys,
        &us,
        prediction.to_vector().as_slice(),
        mu,
        dt,
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct MhoEstimate<S> {
    pub state_at_window_start: S,
    pub state_now: S,
    pub cost: f64,
    /// Cost of the un-optimized prediction on the same window.
    pub prediction_cost: f64,
    /// `None` while the window is still filling up.
    pub solver: Option<OptResult>,
}

/// A moving horizon observer over any [`HorizonModel`].
#[derive(Debug, Clone)]
pub struct MovingHorizonObserver<M: HorizonModel> {
    model: M,
    window: MemoryWindow,
    /// Prediction for the state at the time of the window's oldest sample.
    prediction: M::State,
    /// Prediction for the following window start, set by [`Self::step`].
    next_prediction: Option<M::State>,
    mu: f64,
    dt: f64,
}

pub type MpHorizonObserver = MovingHorizonObserver<MpModel>;
pub type SphereHorizonObserver = MovingHorizonObserver<SphereModel>;

impl<M: HorizonModel> MovingHorizonObserver<M> {
    /// Observer with window size `n`, prediction gain `mu` and the initial
    /// guess for the state at the first sample.
    pub fn new(model: M, n: usize, mu: f64, dt: f64, initial: M::State) -> Result<Self> {
        if !(mu > 0.0) {
            return Err(Error::Config(format!("mu must be positive, got {mu}")));
        }
        if !(dt > 0.0) {
            return Err(Error::Config(format!("dt must be positive, got {dt}")));
        }
        Ok(Self {
            model,
            window: MemoryWindow::new(n)?,
            prediction: initial,
            next_prediction: None,
            mu,
            dt,
        })
    }

    pub fn model(&self) -> &M {
        &self.model
    }

    pub fn window(&self) -> &MemoryWindow {
        &self.window
    }

    pub fn prediction(&self) -> &M::State {
        &self.prediction
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Adds the measurement taken now and the twist applied until the next one.
    pub fn push_sample(&mut self, y: Vec3, u: CameraTwist) -> Result<()> {
        if let Some((_, evicted_u)) = self.window.push(y, u) {
            self.prediction = match self.next_prediction.take() {
                Some(p) => p,
                None => self
                    .model
                    .propagate(&self.prediction, &evicted_u, self.dt)
                    .ok_or_else(|| singular(&self.prediction))?,
            };
        }
        Ok(())
    }

    fn propagate_window(&self, start: &M::State) -> Result<M::State> {
        let mut x = *start;
        for u in self.window.inputs() {
            x = self.model.propagate(&x, u, self.dt).ok_or_else(|| singular(&x))?;
        }
        Ok(x)
    }

    fn window_data(&self) -> (Vec<Vec3>, Vec<CameraTwist>) {
        (self.window.measurements().copied().collect(), self.window.inputs().copied().collect())
    }

    /// Open-loop estimate: the prediction pushed through the stored twists.
    pub fn predict_now(&self) -> Result<MhoEstimate<M::State>> {
        let (ys, us) = self.window_data();
        let p = self.model.to_params(&self.prediction);
        let cost = horizon_cost(&self.model, &p, &ys, &us, &p, self.mu, self.dt);
        Ok(MhoEstimate {
            state_at_window_start: self.prediction,
            state_now: self.propagate_window(&self.prediction)?,
            cost,
            prediction_cost: cost,
            solver: None,
        })
    }

    /// Solves the horizon problem on a warm window.
    pub fn step(&mut self, config: &SimplexConfig) -> Result<MhoEstimate<M::State>> {
        if !self.window.is_warm() {
            return Err(Error::WindowNotWarm { have: self.window.len(), need: self.window.size() + 1 });
        }
        let (ys, us) = self.window_data();
        let x0 = self.model.to_params(&self.prediction);
        let (model, mu, dt) = (&self.model, self.mu, self.dt);
        let objective = |c: &[f64]| horizon_cost(model, c, &ys, &us, &x0, mu, dt);
        let prediction_cost = objective(&x0);
        let result = minimize(objective, &x0, config)?;
        let front = self.window.front_input().expect("warm window has inputs");

        if !result.converged && result.f_min > prediction_cost {
            self.next_prediction = self.model.propagate(&self.prediction, &front, self.dt);
            return Err(Error::SolverFailed { achieved: result.f_min, prediction: prediction_cost });
        }

        let start = self.model.from_params(&result.x_min);
        let now = self.propagate_window(&start)?;
        self.next_prediction = Some(self.model.propagate(&start, &front, self.dt).ok_or_else(|| singular(&start))?);
        Ok(MhoEstimate {
            state_at_window_start: start,
            state_now: now,
            cost: result.f_min,
            prediction_cost,
            solver: Some(result),
        })
    }

    /// Pushes a sample, then solves if the window is warm or predicts otherwise.
    pub fn update(&mut self, y: Vec3, u: CameraTwist, config: &SimplexConfig) -> Result<MhoEstimate<M::State>> {
        self.push_sample(y, u)?;
        if self.window.is_warm() {
            self.step(config)
        } else {
            self.predict_now()
        }
    }
}

fn singular<S: std::fmt::Debug>(state: &S) -> Error {
    Error::InvalidLine(format!("model cannot propagate {state:?}"))
}
