//! Seeded multi-run experiments and their statistics.
//!
//! Run `k` of an experiment with base seed `s` draws its initial positions from
//! a ChaCha8 generator seeded with `child_seed(s, k)`, the `(k+1)`-th output of
//! a SplitMix64 stream started at `s`. Positions are drawn one coordinate at
//! a time in (agent, coordinate) order as `lo + (hi - lo) * u`, `u ~ U[0, 1)`.
//! Runs are independent, so they execute in parallel and are reduced in index
//! order; reports are bitwise reproducible for a fixed configuration.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{run_baseline, run_single_agent, BaselineParams};
use crate::error::{invalid, Result};
use crate::linesearch::{backtrack, BacktrackParams};
use crate::objectives::{norm, norm_sq, Objective};
use crate::swarm::{run_sbgd, RunResult, SbgdParams};

/// Half-width of the success box around the global minimizer.
pub const SUCCESS_HALF_WIDTH: f64 = 0.25;
/// Half-width of the box a corrected mean solution has to land in.
pub const CORRECTED_HALF_WIDTH: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Method {
    Sbgd(SbgdParams),
    Baseline(BaselineParams),
}

impl Method {
    pub fn validate(&self) -> Result<()> {
        match self {
            Method::Sbgd(p) => p.validate(),
            Method::Baseline(p) => p.validate(),
        }
    }

    pub fn run(&self, obj: &Objective, init_positions: &[Vec<f64>]) -> Result<RunResult> {
        match self {
            Method::Sbgd(p) => run_sbgd(obj, init_positions, p),
            Method::Baseline(p) => run_baseline(obj, init_positions, p),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub objective: Objective,
    pub method: Method,
    pub n_agents: usize,
    pub n_runs: usize,
    pub seed: u64,
    pub init_lo: Vec<f64>,
    pub init_hi: Vec<f64>,
    pub success_half_width: f64,
}

impl ExperimentConfig {
    /// Config with a hypercube `[lo, hi]^d` initialization box and the default success box.
    pub fn new(
        objective: Objective,
        method: Method,
        n_agents: usize,
        n_runs: usize,
        seed: u64,
        (lo, hi): (f64, f64),
    ) -> Self {
        let d = objective.dimension();
        Self {
            objective,
            method,
            n_agents,
            n_runs,
            seed,
            init_lo: vec![lo; d],
            init_hi: vec![hi; d],
            success_half_width: SUCCESS_HALF_WIDTH,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.method.validate()?;
        let d = self.objective.dimension();
        if self.init_lo.len() != d || self.init_hi.len() != d {
            return Err(invalid(format!("initialization box must have {d} coordinates")));
        }
        if self.init_lo.iter().zip(&self.init_hi).any(|(lo, hi)| !(lo < hi) || !hi.is_finite() || !lo.is_finite()) {
            return Err(invalid("initialization box needs finite lo < hi in every coordinate"));
        }
        if self.n_agents == 0 {
            return Err(invalid("number of agents must be at least 1"));
        }
        if self.n_runs == 0 {
            return Err(invalid("number of runs must be at least 1"));
        }
        if !(self.success_half_width >= 0.0) {
            return Err(invalid("success half-width must be non-negative"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub run: usize,
    pub seed: u64,
    pub success: bool,
    #[serde(flatten)]
    pub result: RunResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub success_rate: f64,
    /// `(1/d) E|x_sol - x*|^2`
    pub mean_sq_error: f64,
    pub mean_abs_error: f64,
    /// `E[F(x_sol)]`
    pub avg_loss: f64,
    pub mean_solution: Vec<f64>,
    pub per_run: Vec<RunRecord>,
}

impl ExperimentReport {
    /// Aggregates per-run records in index order.
    pub fn from_runs(per_run: Vec<RunRecord>, x_star: &[f64]) -> Self {
        let m = per_run.len() as f64;
        let d = x_star.len() as f64;
        let successes = per_run.iter().filter(|r| r.success).count();
        let mut sq = 0.0;
        let mut abs = 0.0;
        let mut loss = 0.0;
        let mut mean = vec![0.0; x_star.len()];
        for r in &per_run {
            let err: Vec<f64> = r.result.x_sol.iter().zip(x_star).map(|(a, b)| a - b).collect();
            sq += norm_sq(&err);
            abs += norm(&err);
            loss += r.result.f_sol;
            for (acc, x) in mean.iter_mut().zip(&r.result.x_sol) {
                *acc += x;
            }
        }
        mean.iter_mut().for_each(|v| *v /= m);
        Self {
            success_rate: successes as f64 / m,
            mean_sq_error: sq / m / d,
            mean_abs_error: abs / m,
            avg_loss: loss / m,
            mean_solution: mean,
            per_run,
        }
    }

    pub fn solutions(&self) -> impl Iterator<Item = &[f64]> {
        self.per_run.iter().map(|r| r.result.x_sol.as_slice())
    }
}

/// The `(k+1)`-th output of SplitMix64 seeded with `base`.
pub fn child_seed(base: u64, run: u64) -> u64 {
    const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;
    let mut z = base.wrapping_add(GOLDEN.wrapping_mul(run.wrapping_add(1)));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Draws `n` points uniformly from the box `[lo, hi]`.
pub fn sample_uniform(seed: u64, n: usize, lo: &[f64], hi: &[f64]) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            lo.iter()
                .zip(hi)
                .map(|(l, h)| l + (h - l) * rng.random::<f64>())
                .collect()
        })
        .collect()
}

/// Closed box test: every coordinate within `half_width` of the target.
pub fn is_success(x_sol: &[f64], x_star: &[f64], half_width: f64) -> bool {
    x_sol.len() == x_star.len()
        && x_sol.iter().zip(x_star).all(|(a, b)| (a - b).abs() <= half_width)
}

/// Executes run `k` of an experiment on its own.
pub fn run_one(cfg: &ExperimentConfig, run: usize) -> Result<RunRecord> {
    let seed = child_seed(cfg.seed, run as u64);
    let init = sample_uniform(seed, cfg.n_agents, &cfg.init_lo, &cfg.init_hi);
    let result = cfg.method.run(&cfg.objective, &init)?;
    let success = is_success(&result.x_sol, cfg.objective.minimizer(), cfg.success_half_width);
    Ok(RunRecord { run, seed, success, result })
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let per_run = (0..cfg.n_runs)
        .into_par_iter()
        .map(|k| run_one(cfg, k))
        .collect::<Result<Vec<_>>>()?;
    Ok(ExperimentReport::from_runs(per_run, cfg.objective.minimizer()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrectionParams {
    pub backtrack: BacktrackParams,
    pub grad_tol: f64,
    pub max_iters: usize,
}

impl Default for CorrectionParams {
    fn default() -> Self {
        Self { backtrack: BacktrackParams::default(), grad_tol: 1e-3, max_iters: 100_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Correction {
    pub x_corr: Vec<f64>,
    /// `|x_corr - x*|_inf`
    pub err_inf: f64,
    /// `|E[x_sol] - x*|_inf`
    pub mean_err_inf: f64,
    /// Whether `|∇F(x_corr)| < grad_tol` was reached. When false, `x_corr` is the
    /// last iterate before the iteration cap or a stalled line search.
    pub converged: bool,
    pub iterations: usize,
    /// `x_corr` lies in the half-width 0.5 box around `x*`.
    pub in_box: bool,
}

/// Refines the mean solution of a report with backtracking gradient descent
/// at the full descent parameter until the gradient norm drops below `grad_tol`.
pub fn precondition_and_correct(
    report: &ExperimentReport,
    obj: &Objective,
    params: &CorrectionParams,
) -> Result<Correction> {
    params.backtrack.validate()?;
    let x_star = obj.minimizer();
    let inf_dist = |x: &[f64]| x.iter().zip(x_star).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let mut x = report.mean_solution.clone();
    let mut fx = obj.evaluate(&x)?;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < params.max_iters {
        let g = obj.gradient(&x)?;
        if norm(&g) < params.grad_tol {
            converged = true;
            break;
        }
        let bt = backtrack(obj, &x, fx, &g, params.backtrack.lambda, &params.backtrack)?;
        if bt.step == 0.0 {
            break;
        }
        x = bt.x_next;
        fx = bt.f_next;
        iterations += 1;
    }
    Ok(Correction {
        err_inf: inf_dist(&x),
        mean_err_inf: inf_dist(&report.mean_solution),
        in_box: is_success(&x, x_star, CORRECTED_HALF_WIDTH),
        x_corr: x,
        converged,
        iterations,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bin {
    pub center: f64,
    pub count: usize,
}

/// Counts solutions per bin of width `bin_width` (bins are `[k w, (k+1) w)`).
/// Multi-dimensional solutions need a `coordinate`.
pub fn histogram<'a>(
    solutions: impl IntoIterator<Item = &'a [f64]>,
    bin_width: f64,
    coordinate: Option<usize>,
) -> Result<Vec<Bin>> {
    if !(bin_width.is_finite() && bin_width > 0.0) {
        return Err(invalid("bin width must be positive"));
    }
    let mut bins: BTreeMap<i64, usize> = BTreeMap::new();
    for x in solutions {
        let k = match coordinate {
            Some(k) if k < x.len() => k,
            Some(k) => return Err(invalid(format!("coordinate {k} out of range for d = {}", x.len()))),
            None if x.len() == 1 => 0,
            None => return Err(invalid("histogram of multi-dimensional solutions needs a coordinate")),
        };
        if !x[k].is_finite() {
            return Err(invalid("cannot bin a non-finite solution"));
        }
        *bins.entry((x[k] / bin_width).floor() as i64).or_default() += 1;
    }
    Ok(bins
        .into_iter()
        .map(|(k, count)| Bin { center: (k as f64 + 0.5) * bin_width, count })
        .collect())
}

/// `steps` evenly spaced points from `from` to `to` inclusive.
pub fn linspace(from: f64, to: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![from],
        _ => (0..steps)
            .map(|i| from + (to - from) * i as f64 / (steps - 1) as f64)
            .collect(),
    }
}

/// Terminal point of a single-agent run from every grid start (1D objectives only).
pub fn basin_sweep(obj: &Objective, method: &Method, grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    if obj.dimension() != 1 {
        return Err(invalid("basin sweeps need a one-dimensional objective"));
    }
    method.validate()?;
    grid.par_iter()
        .map(|&x0| {
            let end = match method {
                Method::Sbgd(p) => run_sbgd(obj, &[vec![x0]], p)?.x_sol[0],
                Method::Baseline(p) => run_single_agent(obj, &[x0], p, |_, _| {})?.position[0],
            };
            Ok((x0, end))
        })
        .collect()
}
