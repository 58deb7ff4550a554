//! Geometric backtracking line search on the steepest-descent ray.
//!
//! Starting from `h0`, the step is shrunk by `gamma` until the sufficient
//! decrease condition `F(x - h g) <= F(x) - c h |g|^2` holds. The caller
//! supplies the effective descent parameter `c`; the swarm passes
//! `lambda * m_rel^q`, plain backtracking gradient descent passes `lambda`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::objectives::{norm_sq, Objective};

pub const DEFAULT_H_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BacktrackParams {
    pub lambda: f64,
    pub gamma: f64,
    pub h0: f64,
    pub h_floor: f64,
    pub q: f64,
}

impl Default for BacktrackParams {
    fn default() -> Self {
        Self { lambda: 0.2, gamma: 0.9, h0: 1.0, h_floor: DEFAULT_H_FLOOR, q: 1.0 }
    }
}

impl BacktrackParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0 && self.lambda < 1.0) {
            return Err(invalid(format!("lambda must lie in (0, 1), got {}", self.lambda)));
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(invalid(format!("gamma must lie in (0, 1), got {}", self.gamma)));
        }
        if !(self.h0.is_finite() && self.h0 > 0.0) {
            return Err(invalid(format!("h0 must be positive, got {}", self.h0)));
        }
        if !(self.h_floor > 0.0 && self.h_floor < self.h0) {
            return Err(invalid(format!(
                "h_floor must lie in (0, h0), got {} with h0 = {}",
                self.h_floor, self.h0
            )));
        }
        if !(self.q.is_finite() && self.q > 0.0) {
            return Err(invalid(format!("q must be positive, got {}", self.q)));
        }
        Ok(())
    }
}

/// Result of one line search. `step == 0.0` means no admissible step above the
/// floor was found and the point did not move.
#[derive(Debug, Clone, PartialEq)]
pub struct Backtrack {
    pub step: f64,
    pub x_next: Vec<f64>,
    pub f_next: f64,
    pub evaluations: usize,
}

/// Backtracking line search from `x` along `-g`, where `fx = F(x)` and `g = ∇F(x)`.
///
/// Only trial points are counted in `evaluations`; `fx` is supplied by the caller.
pub fn backtrack(
    obj: &Objective,
    x: &[f64],
    fx: f64,
    g: &[f64],
    c: f64,
    params: &BacktrackParams,
) -> Result<Backtrack> {
    if g.len() != x.len() {
        return Err(invalid(format!(
            "gradient length {} does not match position length {}",
            g.len(),
            x.len()
        )));
    }
    let g_sq = norm_sq(g);
    let mut h = params.h0;
    let mut evaluations = 0;
    while h > params.h_floor {
        let trial: Vec<f64> = x.iter().zip(g).map(|(xi, gi)| xi - h * gi).collect();
        let f_trial = obj.evaluate(&trial)?;
        evaluations += 1;
        // NaN trial values fail the comparison and shrink the step
        if f_trial <= fx - c * h * g_sq {
            return Ok(Backtrack { step: h, x_next: trial, f_next: f_trial, evaluations });
        }
        h *= params.gamma;
    }
    Ok(Backtrack { step: 0.0, x_next: x.to_vec(), f_next: fx, evaluations })
}
