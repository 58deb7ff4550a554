//! Swarm-based gradient descent with mass transfer.
//!
//! Each agent carries a position and a mass; total mass is one. Every
//! iteration the agents above the current best shed a fraction
//! `eta^p` of their mass to it, where `eta` is the agent's relative height in
//! the swarm. Each agent then takes a backtracking gradient step whose
//! descent parameter is scaled by its relative mass `m / max m` raised to `q`:
//! heavy agents demand the full descent `lambda` and move cautiously, light
//! agents accept large exploratory steps.
//!
//! Agents whose mass drops below `tolm / N0` are removed (their mass goes to
//! the current best), agents closer than `tolmerge` are merged, and the run
//! stops when the best position moves less than `tolres` in one iteration.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::linesearch::{backtrack, BacktrackParams};
use crate::objectives::{norm_sq, Objective};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SbgdParams {
    /// Mass-transition exponent: an agent sheds `eta^p` of its mass.
    pub p: f64,
    /// Line search settings; `backtrack.q` is the relative-mass exponent.
    pub backtrack: BacktrackParams,
    pub tolm: f64,
    pub tolmerge: f64,
    pub tolres: f64,
    pub eps_eta: f64,
    pub max_iters: usize,
}

impl Default for SbgdParams {
    fn default() -> Self {
        Self {
            p: 1.0,
            backtrack: BacktrackParams::default(),
            tolm: 1e-4,
            tolmerge: 1e-3,
            tolres: 1e-4,
            eps_eta: 1e-10,
            max_iters: 10_000,
        }
    }
}

impl SbgdParams {
    pub fn validate(&self) -> Result<()> {
        self.backtrack.validate()?;
        if !(self.p.is_finite() && self.p > 0.0) {
            return Err(invalid(format!("p must be positive, got {}", self.p)));
        }
        for (name, v) in [
            ("tolm", self.tolm),
            ("tolmerge", self.tolmerge),
            ("tolres", self.tolres),
            ("eps_eta", self.eps_eta),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(invalid(format!("{name} must be positive, got {v}")));
            }
        }
        if self.max_iters == 0 {
            return Err(invalid("max_iters must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StopReason {
    Residual,
    MaxIters,
    SingleStalledAgent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub x_sol: Vec<f64>,
    pub f_sol: f64,
    pub iterations: usize,
    pub objective_evals: usize,
    pub gradient_evals: usize,
    pub stop_reason: StopReason,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Agent {
    pub position: Vec<f64>,
    pub mass: f64,
    /// Cached objective value at `position`.
    pub height: f64,
}

/// What happened to one agent during the gradient step of an iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentStep {
    pub height_before: f64,
    pub height_after: f64,
    pub relative_mass: f64,
    /// Effective descent parameter `lambda * relative_mass^q`.
    pub descent_parameter: f64,
    pub step: f64,
    pub grad_norm_sq: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationReport {
    pub residual: f64,
    pub eliminated: usize,
    pub merged: usize,
    /// Masses after the transition, in the order the agents were stepped.
    pub masses: Vec<f64>,
    pub steps: Vec<AgentStep>,
    pub best_height_before: f64,
    pub best_height_after: f64,
}

/// Relative heights `(F_i - F_min) / (F_max - F_min + eps)`.
pub fn relative_heights(heights: &[f64], eps: f64) -> Vec<f64> {
    let f_min = heights.iter().copied().fold(f64::INFINITY, f64::min);
    let f_max = heights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let denom = f_max - f_min + eps;
    heights.iter().map(|f| (f - f_min) / denom).collect()
}

/// Every agent other than `i_min` sheds `eta_i^p m_i`; the shed mass goes to `i_min`.
pub fn transfer_mass(masses: &[f64], eta: &[f64], p: f64, i_min: usize) -> Vec<f64> {
    let mut out = masses.to_vec();
    let mut shed_total = 0.0;
    for (i, (m, e)) in masses.iter().zip(eta).enumerate() {
        if i != i_min {
            let shed = e.powf(p) * m;
            out[i] = m - shed;
            shed_total += shed;
        }
    }
    out[i_min] = masses[i_min] + shed_total;
    out
}

/// Index of the smallest value; ties and NaNs resolve to the lowest index.
pub(crate) fn argmin(values: impl IntoIterator<Item = f64>) -> usize {
    let mut best = 0;
    let mut best_value = f64::INFINITY;
    for (i, v) in values.into_iter().enumerate() {
        if v < best_value || (i == 0 && !v.is_nan()) {
            best = i;
            best_value = v;
        }
    }
    best
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

#[derive(Debug, Clone)]
pub struct Swarm {
    agents: Vec<Agent>,
    initial_count: usize,
    objective_evals: usize,
    gradient_evals: usize,
}

impl Swarm {
    /// Places one agent at each position with equal mass `1/N`.
    pub fn new(obj: &Objective, positions: &[Vec<f64>]) -> Result<Self> {
        if positions.is_empty() {
            return Err(invalid("at least one initial position is required"));
        }
        let mass = 1.0 / positions.len() as f64;
        let agents = positions
            .iter()
            .map(|x| {
                Ok(Agent { position: x.clone(), mass, height: obj.evaluate(x)? })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            initial_count: agents.len(),
            objective_evals: agents.len(),
            gradient_evals: 0,
            agents,
        })
    }

    pub fn agents(&self) -> &[Agent] {
        &self.agents
    }

    pub fn initial_count(&self) -> usize {
        self.initial_count
    }

    pub fn len(&self) -> usize {
        self.agents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.agents.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.agents.iter().map(|a| a.mass).sum()
    }

    pub fn best_index(&self) -> usize {
        argmin(self.agents.iter().map(|a| a.height))
    }

    pub fn best(&self) -> &Agent {
        &self.agents[self.best_index()]
    }

    pub fn objective_evals(&self) -> usize {
        self.objective_evals
    }

    pub fn gradient_evals(&self) -> usize {
        self.gradient_evals
    }

    /// One full iteration: elimination, mass transition, mass-weighted
    /// backtracking steps, merging, and the residual of the best position.
    pub fn iterate(&mut self, obj: &Objective, params: &SbgdParams) -> Result<IterationReport> {
        let best = self.best_index();
        let best_before = self.agents[best].position.clone();
        let best_height_before = self.agents[best].height;

        // elimination of light agents; the current best always survives
        let threshold = params.tolm / self.initial_count as f64;
        let mut freed = 0.0;
        let mut eliminated = 0;
        let mut new_best = 0;
        let mut survivors = Vec::with_capacity(self.agents.len());
        for (i, agent) in self.agents.drain(..).enumerate() {
            if i != best && agent.mass < threshold {
                freed += agent.mass;
                eliminated += 1;
            } else {
                if i == best {
                    new_best = survivors.len();
                }
                survivors.push(agent);
            }
        }
        self.agents = survivors;
        let best = new_best;
        self.agents[best].mass += freed;

        // mass transition
        let heights: Vec<f64> = self.agents.iter().map(|a| a.height).collect();
        let eta = relative_heights(&heights, params.eps_eta);
        let masses: Vec<f64> = self.agents.iter().map(|a| a.mass).collect();
        let mut masses = transfer_mass(&masses, &eta, params.p, best);
        let others: f64 = masses.iter().enumerate().filter(|&(i, _)| i != best).map(|(_, m)| m).sum();
        masses[best] = 1.0 - others;
        let heaviest = masses.iter().copied().fold(0.0, f64::max);

        // gradient steps from iteration-n positions with post-transition masses
        let bt = &params.backtrack;
        let mut steps = Vec::with_capacity(self.agents.len());
        for (agent, &mass) in self.agents.iter_mut().zip(&masses) {
            agent.mass = mass;
            let relative_mass = mass / heaviest;
            let descent_parameter = bt.lambda * relative_mass.powf(bt.q);
            let g = obj.gradient(&agent.position)?;
            self.gradient_evals += 1;
            let result = backtrack(obj, &agent.position, agent.height, &g, descent_parameter, bt)?;
            self.objective_evals += result.evaluations;
            steps.push(AgentStep {
                height_before: agent.height,
                height_after: result.f_next,
                relative_mass,
                descent_parameter,
                step: result.step,
                grad_norm_sq: norm_sq(&g),
            });
            agent.position = result.x_next;
            agent.height = result.f_next;
        }

        let before_merge = self.agents.len();
        self.merge(params.tolmerge);
        let merged = before_merge - self.agents.len();

        let best_after = self.best();
        let residual = distance(&best_after.position, &best_before);
        Ok(IterationReport {
            residual,
            eliminated,
            merged,
            masses,
            steps,
            best_height_before,
            best_height_after: best_after.height,
        })
    }

    /// Greedy leader clustering in index order. Each cluster collapses onto
    /// its lowest member with the summed mass.
    fn merge(&mut self, tolmerge: f64) {
        let n = self.agents.len();
        if n < 2 {
            return;
        }
        let mut assigned = vec![false; n];
        let mut clusters: Vec<Vec<usize>> = Vec::new();
        for i in 0..n {
            if assigned[i] {
                continue;
            }
            assigned[i] = true;
            let mut cluster = vec![i];
            for j in i + 1..n {
                if !assigned[j]
                    && distance(&self.agents[i].position, &self.agents[j].position) < tolmerge
                {
                    assigned[j] = true;
                    cluster.push(j);
                }
            }
            clusters.push(cluster);
        }
        if clusters.len() == n {
            return;
        }
        let mut old: Vec<Option<Agent>> = self.agents.drain(..).map(Some).collect();
        for cluster in clusters {
            let mass: f64 = cluster.iter().map(|&k| old[k].as_ref().unwrap().mass).sum();
            let keep = cluster[argmin(cluster.iter().map(|&k| old[k].as_ref().unwrap().height))];
            let mut survivor = old[keep].take().unwrap();
            survivor.mass = mass;
            self.agents.push(survivor);
        }
    }
}

/// Runs the swarm until the best position stalls, calling `observer` after every iteration.
pub fn run_sbgd_observed(
    obj: &Objective,
    init_positions: &[Vec<f64>],
    params: &SbgdParams,
    mut observer: impl FnMut(&Swarm, &IterationReport),
) -> Result<RunResult> {
    params.validate()?;
    let mut swarm = Swarm::new(obj, init_positions)?;
    let mut stop_reason = StopReason::MaxIters;
    let mut iterations = 0;
    while iterations < params.max_iters {
        let lone = swarm.len() == 1;
        let report = swarm.iterate(obj, params)?;
        iterations += 1;
        observer(&swarm, &report);
        if lone && report.steps[0].step == 0.0 {
            stop_reason = StopReason::SingleStalledAgent;
            break;
        }
        if report.residual < params.tolres {
            stop_reason = StopReason::Residual;
            break;
        }
    }
    let best = swarm.best();
    Ok(RunResult {
        x_sol: best.position.clone(),
        f_sol: best.height,
        iterations,
        objective_evals: swarm.objective_evals,
        gradient_evals: swarm.gradient_evals,
        stop_reason,
    })
}

pub fn run_sbgd(obj: &Objective, init_positions: &[Vec<f64>], params: &SbgdParams) -> Result<RunResult> {
    run_sbgd_observed(obj, init_positions, params, |_, _| {})
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baselines::{run_baseline, BaselineParams};
    use approx::assert_relative_eq;

    #[test]
    fn relative_heights_examples() {
        let eta = relative_heights(&[1.0, 2.0, 3.0], 1e-10);
        assert_eq!(eta[0], 0.0);
        assert!((eta[1] - 0.5).abs() < 1e-9 && (eta[2] - 1.0).abs() < 1e-9);
        assert!(eta[2] < 1.0);
        assert_eq!(relative_heights(&[2.0, 2.0, 2.0], 1e-10), vec![0.0; 3]);
        assert_eq!(relative_heights(&[5.0], 1e-10), vec![0.0]);
    }

    #[test]
    fn transfer_mass_examples() {
        let third = [1.0 / 3.0; 3];
        let m = transfer_mass(&third, &[0.0, 0.5, 1.0], 1.0, 0);
        assert_relative_eq!(m[0], 5.0 / 6.0, max_relative = 1e-15);
        assert_relative_eq!(m[1], 1.0 / 6.0, max_relative = 1e-15);
        assert_eq!(m[2], 0.0);
        let m = transfer_mass(&third, &[0.0, 0.5, 1.0], 2.0, 0);
        assert_relative_eq!(m[0], 0.75, max_relative = 1e-15);
        assert_relative_eq!(m[1], 0.25, max_relative = 1e-15);
        assert_eq!(transfer_mass(&[1.0], &[0.0], 3.0, 0), vec![1.0]);
    }

    #[test]
    fn argmin_prefers_lowest_index() {
        assert_eq!(argmin([3.0, 1.0, 1.0]), 1);
        assert_eq!(argmin([f64::NAN, 2.0, 1.0]), 2);
        assert_eq!(argmin([2.0, f64::NAN]), 0);
    }

    #[test]
    fn three_agent_iteration_uses_post_transition_masses() {
        let obj = Objective::quadratic(1, 1.0).unwrap();
        let mut swarm = Swarm::new(&obj, &[vec![1.0], vec![2.0], vec![3.0]]).unwrap();
        let params = SbgdParams::default();
        let report = swarm.iterate(&obj, &params).unwrap();
        let eta = relative_heights(&[0.5, 2.0, 4.5], params.eps_eta);
        let expected = transfer_mass(&[1.0 / 3.0; 3], &eta, 1.0, 0);
        for (got, want) in report.masses.iter().zip(&expected) {
            assert_relative_eq!(*got, *want, epsilon = 1e-15);
        }
        assert_eq!(report.steps[0].relative_mass, 1.0);
        assert_eq!(report.steps[0].descent_parameter, params.backtrack.lambda);
        assert!(report.steps[1..].iter().all(|s| s.descent_parameter < params.backtrack.lambda));
        assert!((swarm.total_mass() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn lone_agent_matches_one_backtracking_step() {
        let obj = Objective::quadratic(1, 1.0).unwrap();
        let params = SbgdParams::default();
        let mut swarm = Swarm::new(&obj, &[vec![1.0]]).unwrap();
        let report = swarm.iterate(&obj, &params).unwrap();
        let bt = backtrack(&obj, &[1.0], 0.5, &[1.0], 0.2, &params.backtrack).unwrap();
        assert_eq!(report.steps[0].step, bt.step);
        assert_eq!(swarm.agents()[0].position, bt.x_next);
        assert_eq!(swarm.agents()[0].mass, 1.0);
    }

    #[test]
    fn close_agents_merge_onto_lower_one() {
        let obj = Objective::quadratic(1, 1.0).unwrap();
        let mut swarm = Swarm::new(&obj, &[vec![0.0], vec![0.0]]).unwrap();
        swarm.agents[0].position = vec![0.5001];
        swarm.agents[0].height = obj.evaluate(&[0.5001]).unwrap();
        swarm.agents[1].position = vec![0.5];
        swarm.agents[1].height = 0.125;
        swarm.agents[0].mass = 0.3;
        swarm.agents[1].mass = 0.7;
        swarm.merge(1e-3);
        assert_eq!(swarm.len(), 1);
        assert_eq!(swarm.agents()[0].position, vec![0.5]);
        assert_relative_eq!(swarm.agents()[0].mass, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn quadratic_converges() {
        let obj = Objective::quadratic(2, 1.0).unwrap();
        let init = vec![vec![-2.5, 1.0], vec![0.3, 2.9], vec![1.7, -1.1], vec![-0.4, -2.2], vec![2.8, 2.8]];
        let run = run_sbgd(&obj, &init, &SbgdParams::default()).unwrap();
        assert!(run.f_sol < 1e-6, "{run:?}");
        assert_eq!(run.f_sol, obj.evaluate(&run.x_sol).unwrap());
    }

    #[test]
    fn single_agent_equals_backtracking_baseline() {
        let obj = Objective::rastrigin(2, 0.0, 0.0).unwrap();
        let init = vec![vec![1.3, -2.1]];
        let sbgd = run_sbgd(&obj, &init, &SbgdParams::default()).unwrap();
        let gd = run_baseline(&obj, &init, &BaselineParams::gd_backtrack(BacktrackParams::default())).unwrap();
        assert_eq!(sbgd.x_sol, gd.x_sol);
        assert_eq!(sbgd.f_sol.to_bits(), gd.f_sol.to_bits());
        assert_eq!(sbgd.iterations, gd.iterations);
    }

    #[test]
    fn flat_basin_escapes_left_box() {
        let obj = Objective::flat_basin();
        let init: Vec<Vec<f64>> = (0..30).map(|i| vec![-3.0 + 2.0 * i as f64 / 29.0]).collect();
        let params = SbgdParams { p: 2.0, ..SbgdParams::default() };
        let run = run_sbgd(&obj, &init, &params).unwrap();
        assert!((run.x_sol[0] - obj.minimizer()[0]).abs() <= 0.25, "{run:?}");
        assert_eq!(run.stop_reason, StopReason::Residual);
    }

    #[test]
    fn invalid_inputs() {
        let obj = Objective::quadratic(1, 1.0).unwrap();
        assert!(run_sbgd(&obj, &[], &SbgdParams::default()).is_err());
        assert!(run_sbgd(&obj, &[vec![1.0, 2.0]], &SbgdParams::default()).is_err());
        assert!(SbgdParams { p: 0.0, ..Default::default() }.validate().is_err());
        assert!(SbgdParams { tolmerge: -1.0, ..Default::default() }.validate().is_err());
    }
}
