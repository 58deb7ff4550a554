//! Declarative experiment configuration (TOML).
//!
//! Only `objective` is required; `d` is also required for objectives without
//! a fixed dimension. Unknown keys are rejected. Example:
//!
//! ```toml
//! objective = "flatbasin1d"
//! method = "sbgd"      # sbgd | gd | gdbt | adam
//! n = 30               # agents per run
//! m = 200              # runs
//! seed = 1
//! init_box = [-3.0, -1.0]
//! p = 2.0
//! q = 1.0
//! ```

use serde::{Deserialize, Serialize};

use crate::baselines::{BaselineMethod, BaselineParams};
use crate::error::{Error, Result};
use crate::harness::{CorrectionParams, ExperimentConfig, Method};
use crate::linesearch::BacktrackParams;
use crate::objectives::{Objective, ObjectiveKind};
use crate::swarm::SbgdParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodName {
    Sbgd,
    Gd,
    Gdbt,
    Adam,
}

impl std::str::FromStr for MethodName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sbgd" => Ok(MethodName::Sbgd),
            "gd" => Ok(MethodName::Gd),
            "gdbt" | "gd-bt" => Ok(MethodName::Gdbt),
            "adam" => Ok(MethodName::Adam),
            _ => Err(Error::Config(format!("unknown method `{s}` (expected sbgd, gd, gdbt or adam)"))),
        }
    }
}

mod defaults {
    pub fn method() -> super::MethodName {
        super::MethodName::Sbgd
    }
    pub fn n() -> usize {
        20
    }
    pub fn m() -> usize {
        1
    }
    pub fn init_box() -> [f64; 2] {
        [-3.0, 3.0]
    }
    pub fn one() -> f64 {
        1.0
    }
    pub fn lambda() -> f64 {
        0.2
    }
    pub fn gamma() -> f64 {
        0.9
    }
    pub fn tolm() -> f64 {
        1e-4
    }
    pub fn tolmerge() -> f64 {
        1e-3
    }
    pub fn tolres() -> f64 {
        1e-4
    }
    pub fn eps_eta() -> f64 {
        1e-10
    }
    pub fn h_floor() -> f64 {
        crate::linesearch::DEFAULT_H_FLOOR
    }
    pub fn max_iters() -> usize {
        10_000
    }
    pub fn beta1() -> f64 {
        0.9
    }
    pub fn beta2() -> f64 {
        0.999
    }
    pub fn adam_eps() -> f64 {
        1e-8
    }
    pub fn half_width() -> f64 {
        crate::harness::SUCCESS_HALF_WIDTH
    }
    pub fn grad_tol() -> f64 {
        1e-3
    }
    pub fn correction_iters() -> usize {
        100_000
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub objective: ObjectiveKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(default)]
    pub b: f64,
    #[serde(default)]
    pub c: f64,
    #[serde(default = "defaults::one")]
    pub mu: f64,
    #[serde(default = "defaults::method")]
    pub method: MethodName,
    #[serde(default = "defaults::n")]
    pub n: usize,
    #[serde(default = "defaults::m")]
    pub m: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "defaults::init_box")]
    pub init_box: [f64; 2],
    #[serde(default = "defaults::one")]
    pub p: f64,
    #[serde(default = "defaults::one")]
    pub q: f64,
    #[serde(default = "defaults::lambda")]
    pub lambda: f64,
    #[serde(default = "defaults::gamma")]
    pub gamma: f64,
    #[serde(default = "defaults::one")]
    pub h0: f64,
    /// Fixed step of `gd` and initial step of `adam`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    #[serde(default = "defaults::tolm")]
    pub tolm: f64,
    #[serde(default = "defaults::tolmerge")]
    pub tolmerge: f64,
    #[serde(default = "defaults::tolres")]
    pub tolres: f64,
    #[serde(default = "defaults::eps_eta")]
    pub eps_eta: f64,
    #[serde(default = "defaults::h_floor")]
    pub h_floor: f64,
    #[serde(default = "defaults::max_iters")]
    pub max_iters: usize,
    #[serde(default = "defaults::beta1")]
    pub adam_beta1: f64,
    #[serde(default = "defaults::beta2")]
    pub adam_beta2: f64,
    #[serde(default = "defaults::adam_eps")]
    pub adam_eps: f64,
    #[serde(default = "defaults::half_width")]
    pub success_half_width: f64,
    /// Refine the mean solution with gradient descent after the batch.
    #[serde(default)]
    pub correct: bool,
    #[serde(default = "defaults::grad_tol")]
    pub grad_tol: f64,
    #[serde(default = "defaults::correction_iters")]
    pub correction_max_iters: usize,
}

impl ConfigFile {
    /// Config with every optional setting at its default.
    pub fn new(objective: ObjectiveKind) -> Self {
        toml::from_str(&format!("objective = \"{}\"", objective.name())).expect("defaults parse")
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Fills the dimension and method step defaults and validates everything.
    pub fn resolve(mut self) -> Result<Self> {
        let d = match (self.d, self.objective.fixed_dimension()) {
            (Some(d), _) => d,
            (None, Some(fixed)) => fixed,
            (None, None) => {
                return Err(Error::Config(format!("objective `{}` needs a dimension `d`", self.objective)))
            }
        };
        self.d = Some(d);
        if self.h.is_none() {
            self.h = match self.method {
                MethodName::Gd => Some(0.8),
                MethodName::Adam => Some(0.1),
                _ => None,
            };
        }
        self.experiment()?.validate().map_err(|e| Error::Config(e.to_string()))?;
        if self.correct {
            self.correction().backtrack.validate().map_err(|e| Error::Config(e.to_string()))?;
        }
        Ok(self)
    }

    pub fn build_objective(&self) -> Result<Objective> {
        let d = self.d.or(self.objective.fixed_dimension()).ok_or_else(|| {
            Error::Config(format!("objective `{}` needs a dimension `d`", self.objective))
        })?;
        Objective::with_curvature(self.objective, d, self.b, self.c, self.mu)
            .map_err(|e| Error::Config(e.to_string()))
    }

    fn backtrack(&self) -> BacktrackParams {
        BacktrackParams {
            lambda: self.lambda,
            gamma: self.gamma,
            h0: self.h0,
            h_floor: self.h_floor,
            q: self.q,
        }
    }

    pub fn method(&self) -> Method {
        let backtrack = self.backtrack();
        let baseline = |method| BaselineParams {
            method,
            h: self.h.unwrap_or(match method {
                BaselineMethod::GdFixed => 0.8,
                _ => 0.1,
            }),
            backtrack,
            adam_beta1: self.adam_beta1,
            adam_beta2: self.adam_beta2,
            adam_eps: self.adam_eps,
            tolres: self.tolres,
            max_iters: self.max_iters,
        };
        match self.method {
            MethodName::Sbgd => Method::Sbgd(SbgdParams {
                p: self.p,
                backtrack,
                tolm: self.tolm,
                tolmerge: self.tolmerge,
                tolres: self.tolres,
                eps_eta: self.eps_eta,
                max_iters: self.max_iters,
            }),
            MethodName::Gd => Method::Baseline(baseline(BaselineMethod::GdFixed)),
            MethodName::Gdbt => Method::Baseline(baseline(BaselineMethod::GdBacktrack)),
            MethodName::Adam => Method::Baseline(baseline(BaselineMethod::Adam)),
        }
    }

    pub fn experiment(&self) -> Result<ExperimentConfig> {
        let objective = self.build_objective()?;
        let mut cfg = ExperimentConfig::new(
            objective,
            self.method(),
            self.n,
            self.m,
            self.seed,
            (self.init_box[0], self.init_box[1]),
        );
        cfg.success_half_width = self.success_half_width;
        Ok(cfg)
    }

    pub fn correction(&self) -> CorrectionParams {
        CorrectionParams {
            backtrack: self.backtrack(),
            grad_tol: self.grad_tol,
            max_iters: self.correction_max_iters,
        }
    }
}
