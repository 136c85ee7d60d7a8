//! Derivative-free Nelder–Mead simplex minimization.
//!
//! Follows the Lagarias et al. variant (the one behind MATLAB's
//! `fminsearch`): reflection, expansion, outside/inside contraction and
//! shrink, with convergence declared when both the simplex diameter and the
//! spread of objective values fall under their tolerances.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexConfig {
    pub reflection: f64,
    pub expansion: f64,
    pub contraction: f64,
    pub shrink: f64,
    pub max_iters: usize,
    /// Bound on `max_i ‖v_i − v_best‖∞`.
    pub x_tol: f64,
    /// Bound on `max_i |f(v_i) − f(v_best)|`.
    pub f_tol: f64,
    /// Relative size of the initial simplex edge along each coordinate.
    pub initial_step: f64,
    /// Edge used for coordinates where the relative step would be smaller.
    pub min_step: f64,
}

impl SimplexConfig {
    /// Standard coefficients and tolerances for an `n`-dimensional problem.
    pub fn for_dim(n: usize) -> Self {
        Self {
            reflection: 1.0,
            expansion: 2.0,
            contraction: 0.5,
            shrink: 0.5,
            max_iters: 200 * n,
            x_tol: 1e-8,
            f_tol: 1e-8,
            initial_step: 0.05,
            min_step: 0.00025,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [self.reflection, self.expansion, self.contraction, self.shrink]
            .iter()
            .all(|c| *c > 0.0);
        if !positive || self.expansion <= 1.0 || self.contraction >= 1.0 || self.shrink >= 1.0 {
            return Err(Error::Config(format!("invalid simplex coefficients {self:?}")));
        }
        if self.x_tol < 0.0 || self.f_tol < 0.0 {
            return Err(Error::Config("negative tolerance".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptResult {
    pub x_min: Vec<f64>,
    pub f_min: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
}

struct Counted<F> {
    f: F,
    evaluations: usize,
}

impl<F: FnMut(&[f64]) -> f64> Counted<F> {
    fn eval(&mut self, x: &[f64]) -> Result<f64> {
        self.evaluations += 1;
        let value = (self.f)(x);
        if !value.is_finite() {
            return Err(Error::NonFiniteObjective { value, evaluation: self.evaluations });
        }
        Ok(value)
    }
}

/// Minimizes `objective` starting from `x0`.
pub fn minimize<F>(objective: F, x0: &[f64], config: &SimplexConfig) -> Result<OptResult>
where
    F: FnMut(&[f64]) -> f64,
{
    config.validate()?;
    let n = x0.len();
    let mut obj = Counted { f: objective, evaluations: 0 };
    let f0 = obj.eval(x0)?;
    if config.max_iters == 0 || n == 0 {
        return Ok(OptResult {
            x_min: x0.to_vec(),
            f_min: f0,
            iterations: 0,
            evaluations: obj.evaluations,
            converged: n == 0,
        });
    }

    let mut vertices: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    let mut values: Vec<f64> = Vec::with_capacity(n + 1);
    vertices.push(x0.to_vec());
    values.push(f0);
    for i in 0..n {
        let mut v = x0.to_vec();
        let step = (config.initial_step * x0[i].abs()).max(config.min_step);
        v[i] += if x0[i] < 0.0 { -step } else { step };
        values.push(obj.eval(&v)?);
        vertices.push(v);
    }

    let mut order: Vec<usize> = (0..=n).collect();
    let mut centroid = vec![0.0; n];
    let mut trial = vec![0.0; n];
    let mut trial2 = vec![0.0; n];
    let mut iterations = 0;
    let mut converged = false;

    let point = |c: &[f64], w: &[f64], coef: f64, out: &mut [f64]| {
        for j in 0..c.len() {
            out[j] = c[j] + coef * (c[j] - w[j]);
        }
    };

    loop {
        // stable: ties keep the previous relative order
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let best = order[0];
        let worst = order[n];

        let f_spread = order[1..].iter().map(|&i| (values[i] - values[best]).abs()).fold(0.0, f64::max);
        let x_spread = order[1..]
            .iter()
            .flat_map(|&i| vertices[i].iter().zip(&vertices[best]).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if f_spread <= config.f_tol && x_spread <= config.x_tol {
            converged = true;
            break;
        }
        if iterations >= config.max_iters {
            break;
        }
        iterations += 1;

        centroid.iter_mut().for_each(|c| *c = 0.0);
        for &i in &order[..n] {
            for (c, v) in centroid.iter_mut().zip(&vertices[i]) {
                *c += v / n as f64;
            }
        }

        point(&centroid, &vertices[worst], config.reflection, &mut trial);
        let f_r = obj.eval(&trial)?;

        if f_r < values[best] {
            point(&centroid, &vertices[worst], config.reflection * config.expansion, &mut trial2);
            let f_e = obj.eval(&trial2)?;
            if f_e < f_r {
                vertices[worst].copy_from_slice(&trial2);
                values[worst] = f_e;
            } else {
                vertices[worst].copy_from_slice(&trial);
                values[worst] = f_r;
            }
            continue;
        }
        if f_r < values[order[n - 1]] {
            vertices[worst].copy_from_slice(&trial);
            values[worst] = f_r;
            continue;
        }
        if f_r < values[worst] {
            point(&centroid, &vertices[worst], config.reflection * config.contraction, &mut trial2);
            let f_c = obj.eval(&trial2)?;
            if f_c <= f_r {
                vertices[worst].copy_from_slice(&trial2);
                values[worst] = f_c;
                continue;
            }
        } else {
            point(&centroid, &vertices[worst], -config.contraction, &mut trial2);
            let f_cc = obj.eval(&trial2)?;
            if f_cc < values[worst] {
                vertices[worst].copy_from_slice(&trial2);
                values[worst] = f_cc;
                continue;
            }
        }
        let anchor = vertices[best].clone();
        for &i in &order[1..] {
            for (v, a) in vertices[i].iter_mut().zip(&anchor) {
                *v = a + config.shrink * (*v - a);
            }
            values[i] = obj.eval(&vertices[i])?;
        }
    }

    let best = order[0];
    Ok(OptResult {
        x_min: vertices[best].clone(),
        f_min: values[best],
        iterations,
        evaluations: obj.evaluations,
        converged,
    })
}
