//! Non-communicating multi-agent baselines.
//!
//! Each of the `N` agents runs its own single-agent method to completion and
//! the lowest final agent is reported. `GdBacktrack` is the swarm with every
//! relative mass pinned to one.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::linesearch::{backtrack, BacktrackParams};
use crate::objectives::Objective;
use crate::swarm::{argmin, RunResult, StopReason};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BaselineMethod {
    /// Gradient descent with a fixed step `h`.
    GdFixed,
    /// Gradient descent with backtracking at full descent parameter `lambda`.
    GdBacktrack,
    /// Adam with initial step `h`.
    Adam,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaselineParams {
    pub method: BaselineMethod,
    pub h: f64,
    pub backtrack: BacktrackParams,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub adam_eps: f64,
    pub tolres: f64,
    pub max_iters: usize,
}

impl BaselineParams {
    pub fn new(method: BaselineMethod) -> Self {
        Self {
            method,
            h: match method {
                BaselineMethod::GdFixed => 0.8,
                _ => 0.1,
            },
            backtrack: BacktrackParams::default(),
            adam_beta1: 0.9,
            adam_beta2: 0.999,
            adam_eps: 1e-8,
            tolres: 1e-4,
            max_iters: 10_000,
        }
    }

    pub fn gd_fixed(h: f64) -> Self {
        Self { h, ..Self::new(BaselineMethod::GdFixed) }
    }

    pub fn gd_backtrack(backtrack: BacktrackParams) -> Self {
        Self { backtrack, ..Self::new(BaselineMethod::GdBacktrack) }
    }

    pub fn adam(h0: f64) -> Self {
        Self { h: h0, ..Self::new(BaselineMethod::Adam) }
    }

    pub fn validate(&self) -> Result<()> {
        match self.method {
            BaselineMethod::GdFixed | BaselineMethod::Adam => {
                if !(self.h.is_finite() && self.h > 0.0) {
                    return Err(invalid(format!("step size h must be positive, got {}", self.h)));
                }
            }
            BaselineMethod::GdBacktrack => self.backtrack.validate()?,
        }
        if self.method == BaselineMethod::Adam {
            for (name, b) in [("adam_beta1", self.adam_beta1), ("adam_beta2", self.adam_beta2)] {
                if !(0.0..1.0).contains(&b) {
                    return Err(invalid(format!("{name} must lie in [0, 1), got {b}")));
                }
            }
            if !(self.adam_eps > 0.0) {
                return Err(invalid("adam_eps must be positive"));
            }
        }
        if !(self.tolres.is_finite() && self.tolres > 0.0) {
            return Err(invalid(format!("tolres must be positive, got {}", self.tolres)));
        }
        if self.max_iters == 0 {
            return Err(invalid("max_iters must be at least 1"));
        }
        Ok(())
    }
}

/// Outcome of one independent agent.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentRun {
    pub position: Vec<f64>,
    pub height: f64,
    pub iterations: usize,
    pub objective_evals: usize,
    pub gradient_evals: usize,
    pub converged: bool,
}

#[derive(Debug, Clone)]
struct AdamState {
    first: Vec<f64>,
    second: Vec<f64>,
    t: i32,
}

impl AdamState {
    fn new(d: usize) -> Self {
        Self { first: vec![0.0; d], second: vec![0.0; d], t: 0 }
    }

    fn step(&mut self, x: &[f64], g: &[f64], p: &BaselineParams) -> Vec<f64> {
        self.t += 1;
        let bias1 = 1.0 - p.adam_beta1.powi(self.t);
        let bias2 = 1.0 - p.adam_beta2.powi(self.t);
        x.iter()
            .zip(g)
            .zip(self.first.iter_mut().zip(self.second.iter_mut()))
            .map(|((xi, gi), (m, v))| {
                *m = p.adam_beta1 * *m + (1.0 - p.adam_beta1) * gi;
                *v = p.adam_beta2 * *v + (1.0 - p.adam_beta2) * gi * gi;
                let m_hat = *m / bias1;
                let v_hat = *v / bias2;
                xi - p.h * m_hat / (v_hat.sqrt() + p.adam_eps)
            })
            .collect()
    }
}

/// Runs one agent from `x0`, reporting every iterate to `observer`.
pub fn run_single_agent(
    obj: &Objective,
    x0: &[f64],
    params: &BaselineParams,
    mut observer: impl FnMut(usize, &[f64]),
) -> Result<AgentRun> {
    let mut x = x0.to_vec();
    let mut fx = obj.evaluate(&x)?;
    let mut objective_evals = 1;
    let mut gradient_evals = 0;
    let mut adam = AdamState::new(x.len());
    let mut converged = false;
    let mut iterations = 0;
    while iterations < params.max_iters {
        let g = obj.gradient(&x)?;
        gradient_evals += 1;
        let (x_next, f_next) = match params.method {
            BaselineMethod::GdBacktrack => {
                let bt = backtrack(obj, &x, fx, &g, params.backtrack.lambda, &params.backtrack)?;
                objective_evals += bt.evaluations;
                (bt.x_next, bt.f_next)
            }
            BaselineMethod::GdFixed => {
                let next: Vec<f64> = x.iter().zip(&g).map(|(xi, gi)| xi - params.h * gi).collect();
                objective_evals += 1;
                let f = obj.evaluate(&next)?;
                (next, f)
            }
            BaselineMethod::Adam => {
                let next = adam.step(&x, &g, params);
                objective_evals += 1;
                let f = obj.evaluate(&next)?;
                (next, f)
            }
        };
        iterations += 1;
        let residual = x.iter().zip(&x_next).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        x = x_next;
        fx = f_next;
        observer(iterations, &x);
        if residual < params.tolres {
            converged = true;
            break;
        }
        if !fx.is_finite() {
            break;
        }
    }
    Ok(AgentRun { position: x, height: fx, iterations, objective_evals, gradient_evals, converged })
}

/// Runs every agent independently and reports the lowest.
pub fn run_baseline(
    obj: &Objective,
    init_positions: &[Vec<f64>],
    params: &BaselineParams,
) -> Result<RunResult> {
    params.validate()?;
    if init_positions.is_empty() {
        return Err(invalid("at least one initial position is required"));
    }
    let runs = init_positions
        .iter()
        .map(|x0| run_single_agent(obj, x0, params, |_, _| {}))
        .collect::<Result<Vec<_>>>()?;
    let best = argmin(runs.iter().map(|r| r.height));
    let stop_reason = if runs.iter().all(|r| r.converged) {
        StopReason::Residual
    } else {
        StopReason::MaxIters
    };
    Ok(RunResult {
        x_sol: runs[best].position.clone(),
        f_sol: runs[best].height,
        iterations: runs.iter().map(|r| r.iterations).max().unwrap_or(0),
        objective_evals: runs.iter().map(|r| r.objective_evals).sum(),
        gradient_evals: runs.iter().map(|r| r.gradient_evals).sum(),
        stop_reason,
    })
}
