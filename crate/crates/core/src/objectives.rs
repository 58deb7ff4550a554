//! Closed-form benchmark objectives with analytic gradients.
//!
//! Every objective is evaluated in the shifted variable `z = x - B·1`, then
//! offset by `C`, so the global minimizer is the unshifted minimizer moved by
//! `B` in every coordinate and the global minimum is the unshifted one plus `C`.
//!
//! | name          | d     | unshifted F(z)                                                   |
//! |---------------|-------|------------------------------------------------------------------|
//! | `flatbasin1d` | 1     | `exp(sin(2z²)) + (z - π/2)² / 10`                                |
//! | `ackley1d`    | 1     | `-20 exp(-0.2|z|) - exp(cos 2πz) + 20 + e`                       |
//! | `rastrigin1d` | 1     | `z² - 10 cos 2πz + 10`                                           |
//! | `ackley`      | any   | `-20 exp(-0.2 |z|/√d) - exp(Σ cos(2πz_i)/d) + 20 + e`            |
//! | `rastrigin`   | any   | `Σ (z_i² - 10 cos 2πz_i + 10) / d`                               |
//! | `dropwave`    | any   | `-(1 + cos 12|z|) / (|z|²/2 + 2)`                                |
//! | `rosenbrock`  | 2     | `(1 - z_1)² + 100 (z_2 - z_1²)²`                                 |
//! | `quadratic`   | any   | `μ |z|² / 2`                                                     |
//!
//! The Ackley and drop-wave gradients are not defined where `|z| = 0`; there
//! the gradient is the zero vector, which makes the minimizer a fixed point.

use std::f64::consts::{E, FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Location of the unique global minimizer of the flat-basin function,
/// refined from a 1e-6 grid scan of [-3, 3] by root finding on F'.
pub const FLAT_BASIN_MINIMIZER: f64 = 1.535_498_830_125_013_3;
/// F at [`FLAT_BASIN_MINIMIZER`].
pub const FLAT_BASIN_MIN_VALUE: f64 = 0.368_005_828_022_528_47;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ObjectiveKind {
    #[serde(rename = "flatbasin1d")]
    FlatBasin1D,
    #[serde(rename = "ackley1d")]
    Ackley1D,
    #[serde(rename = "rastrigin1d")]
    Rastrigin1D,
    #[serde(rename = "ackley")]
    AckleyND,
    #[serde(rename = "rastrigin")]
    RastriginND,
    #[serde(rename = "dropwave")]
    DropWave,
    #[serde(rename = "rosenbrock")]
    Rosenbrock2D,
    #[serde(rename = "quadratic")]
    Quadratic,
}

impl ObjectiveKind {
    pub const ALL: [ObjectiveKind; 8] = [
        ObjectiveKind::FlatBasin1D,
        ObjectiveKind::Ackley1D,
        ObjectiveKind::Rastrigin1D,
        ObjectiveKind::AckleyND,
        ObjectiveKind::RastriginND,
        ObjectiveKind::DropWave,
        ObjectiveKind::Rosenbrock2D,
        ObjectiveKind::Quadratic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ObjectiveKind::FlatBasin1D => "flatbasin1d",
            ObjectiveKind::Ackley1D => "ackley1d",
            ObjectiveKind::Rastrigin1D => "rastrigin1d",
            ObjectiveKind::AckleyND => "ackley",
            ObjectiveKind::RastriginND => "rastrigin",
            ObjectiveKind::DropWave => "dropwave",
            ObjectiveKind::Rosenbrock2D => "rosenbrock",
            ObjectiveKind::Quadratic => "quadratic",
        }
    }

    /// The dimension this kind is restricted to, if any.
    pub fn fixed_dimension(self) -> Option<usize> {
        match self {
            ObjectiveKind::FlatBasin1D | ObjectiveKind::Ackley1D | ObjectiveKind::Rastrigin1D => {
                Some(1)
            }
            ObjectiveKind::Rosenbrock2D => Some(2),
            _ => None,
        }
    }
}

impl fmt::Display for ObjectiveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ObjectiveKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        ObjectiveKind::ALL
            .into_iter()
            .find(|k| k.name() == lower)
            .ok_or_else(|| {
                let names: Vec<_> = ObjectiveKind::ALL.iter().map(|k| k.name()).collect();
                invalid(format!("unknown objective `{s}` (expected one of {})", names.join(", ")))
            })
    }
}

/// A benchmark objective with known global minimizer. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct Objective {
    kind: ObjectiveKind,
    dimension: usize,
    shift_b: f64,
    shift_c: f64,
    mu: f64,
    minimizer: Vec<f64>,
    min_value: f64,
}

impl Objective {
    /// Builds an objective of the given kind with minimizer shift `b` and value offset `c`.
    /// The quadratic gets unit curvature; see [`Objective::quadratic`].
    pub fn new(kind: ObjectiveKind, dimension: usize, b: f64, c: f64) -> Result<Self> {
        Self::with_curvature(kind, dimension, b, c, 1.0)
    }

    /// Like [`Objective::new`], with the curvature `mu` used by the quadratic.
    pub fn with_curvature(
        kind: ObjectiveKind,
        dimension: usize,
        b: f64,
        c: f64,
        mu: f64,
    ) -> Result<Self> {
        if dimension == 0 {
            return Err(invalid("dimension must be positive"));
        }
        if let Some(fixed) = kind.fixed_dimension() {
            if dimension != fixed {
                return Err(invalid(format!("{kind} requires d = {fixed}, got d = {dimension}")));
            }
        }
        if !b.is_finite() || !c.is_finite() {
            return Err(invalid("shift parameters must be finite"));
        }
        if !(mu.is_finite() && mu > 0.0) {
            return Err(invalid("quadratic curvature must be positive"));
        }
        let (base_minimizer, base_min) = match kind {
            ObjectiveKind::FlatBasin1D => (FLAT_BASIN_MINIMIZER, FLAT_BASIN_MIN_VALUE),
            ObjectiveKind::Rosenbrock2D => (1.0, 0.0),
            ObjectiveKind::DropWave => (0.0, -1.0),
            _ => (0.0, 0.0),
        };
        Ok(Self {
            kind,
            dimension,
            shift_b: b,
            shift_c: c,
            mu,
            minimizer: vec![base_minimizer + b; dimension],
            min_value: base_min + c,
        })
    }

    pub fn quadratic(dimension: usize, mu: f64) -> Result<Self> {
        Self::with_curvature(ObjectiveKind::Quadratic, dimension, 0.0, 0.0, mu)
    }

    pub fn flat_basin() -> Self {
        Self::new(ObjectiveKind::FlatBasin1D, 1, 0.0, 0.0).expect("valid")
    }

    pub fn ackley(dimension: usize, b: f64, c: f64) -> Result<Self> {
        Self::new(ObjectiveKind::AckleyND, dimension, b, c)
    }

    pub fn rastrigin(dimension: usize, b: f64, c: f64) -> Result<Self> {
        Self::new(ObjectiveKind::RastriginND, dimension, b, c)
    }

    pub fn drop_wave(dimension: usize) -> Result<Self> {
        Self::new(ObjectiveKind::DropWave, dimension, 0.0, 0.0)
    }

    pub fn rosenbrock() -> Self {
        Self::new(ObjectiveKind::Rosenbrock2D, 2, 0.0, 0.0).expect("valid")
    }

    pub fn kind(&self) -> ObjectiveKind {
        self.kind
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn shift_b(&self) -> f64 {
        self.shift_b
    }

    pub fn shift_c(&self) -> f64 {
        self.shift_c
    }

    /// Curvature of the quadratic (also its Lipschitz constant). Ignored by other kinds.
    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn minimizer(&self) -> &[f64] {
        &self.minimizer
    }

    pub fn min_value(&self) -> f64 {
        self.min_value
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() == self.dimension {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected: self.dimension, got: x.len() })
        }
    }

    fn shifted(&self, x: &[f64]) -> Vec<f64> {
        x.iter().map(|xi| xi - self.shift_b).collect()
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        let z = self.shifted(x);
        Ok(self.base_value(&z) + self.shift_c)
    }

    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(x)?;
        let z = self.shifted(x);
        Ok(self.base_gradient(&z))
    }

    fn base_value(&self, z: &[f64]) -> f64 {
        let d = self.dimension as f64;
        match self.kind {
            ObjectiveKind::FlatBasin1D => {
                let t = z[0];
                (2.0 * t * t).sin().exp() + 0.1 * (t - FRAC_PI_2).powi(2)
            }
            ObjectiveKind::Ackley1D | ObjectiveKind::AckleyND => {
                // 20 (1 - e^{-a}) + e (1 - e^{mean cos - 1}), with 1 - cos θ = 2 sin²(θ/2)
                let r = norm(z);
                let cos_mean_minus_one =
                    -2.0 * z.iter().map(|t| (PI * t).sin().powi(2)).sum::<f64>() / d;
                -20.0 * (-0.2 * r / d.sqrt()).exp_m1() - E * cos_mean_minus_one.exp_m1()
            }
            ObjectiveKind::Rastrigin1D | ObjectiveKind::RastriginND => {
                // 10 - 10 cos 2πt = 20 sin² πt
                z.iter().map(|t| t * t + 20.0 * (PI * t).sin().powi(2)).sum::<f64>() / d
            }
            ObjectiveKind::DropWave => {
                let r = norm(z);
                -(1.0 + (12.0 * r).cos()) / (0.5 * r * r + 2.0)
            }
            ObjectiveKind::Rosenbrock2D => {
                let (a, b) = (z[0], z[1]);
                (1.0 - a).powi(2) + 100.0 * (b - a * a).powi(2)
            }
            ObjectiveKind::Quadratic => 0.5 * self.mu * z.iter().map(|t| t * t).sum::<f64>(),
        }
    }

    fn base_gradient(&self, z: &[f64]) -> Vec<f64> {
        let d = self.dimension as f64;
        match self.kind {
            ObjectiveKind::FlatBasin1D => {
                let t = z[0];
                let s = 2.0 * t * t;
                vec![s.sin().exp() * s.cos() * 4.0 * t + 0.2 * (t - FRAC_PI_2)]
            }
            ObjectiveKind::Ackley1D | ObjectiveKind::AckleyND => {
                let r = norm(z);
                if r == 0.0 {
                    return vec![0.0; z.len()];
                }
                let sqrt_d = d.sqrt();
                let radial = 4.0 * (-0.2 * r / sqrt_d).exp() / (sqrt_d * r);
                let cos_mean = z.iter().map(|t| (2.0 * PI * t).cos()).sum::<f64>() / d;
                let wave = cos_mean.exp() * 2.0 * PI / d;
                z.iter().map(|t| radial * t + wave * (2.0 * PI * t).sin()).collect()
            }
            ObjectiveKind::Rastrigin1D | ObjectiveKind::RastriginND => z
                .iter()
                .map(|t| (2.0 * t + 20.0 * PI * (2.0 * PI * t).sin()) / d)
                .collect(),
            ObjectiveKind::DropWave => {
                let r = norm(z);
                if r == 0.0 {
                    return vec![0.0; z.len()];
                }
                let den = 0.5 * r * r + 2.0;
                let num = 1.0 + (12.0 * r).cos();
                let d_dr = (12.0 * (12.0 * r).sin() * den + num * r) / (den * den);
                z.iter().map(|t| d_dr * t / r).collect()
            }
            ObjectiveKind::Rosenbrock2D => {
                let (a, b) = (z[0], z[1]);
                vec![-2.0 * (1.0 - a) - 400.0 * a * (b - a * a), 200.0 * (b - a * a)]
            }
            ObjectiveKind::Quadratic => z.iter().map(|t| self.mu * t).collect(),
        }
    }
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|t| t * t).sum::<f64>().sqrt()
}

pub(crate) fn norm_sq(v: &[f64]) -> f64 {
    v.iter().map(|t| t * t).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn central_difference(obj: &Objective, x: &[f64], step: f64) -> Vec<f64> {
        (0..x.len())
            .map(|k| {
                let mut hi = x.to_vec();
                let mut lo = x.to_vec();
                hi[k] += step;
                lo[k] -= step;
                (obj.evaluate(&hi).unwrap() - obj.evaluate(&lo).unwrap()) / (2.0 * step)
            })
            .collect()
    }

    #[test]
    fn ackley_origin_is_zero() {
        let obj = Objective::ackley(20, 0.0, 0.0).unwrap();
        assert_eq!(obj.evaluate(&[0.0; 20]).unwrap(), 0.0);
    }

    #[test]
    fn drop_wave_minimum() {
        let obj = Objective::drop_wave(2).unwrap();
        assert_eq!(obj.evaluate(&[0.0, 0.0]).unwrap(), -1.0);
    }

    #[test]
    fn rosenbrock_minimum() {
        assert_eq!(Objective::rosenbrock().evaluate(&[1.0, 1.0]).unwrap(), 0.0);
    }

    #[test]
    fn flat_basin_minimizer_matches_grid_scan() {
        let obj = Objective::flat_basin();
        let n = 6_000_000usize;
        let (mut best_x, mut best_f) = (f64::NAN, f64::INFINITY);
        for i in 0..=n {
            let x = -3.0 + 6.0 * i as f64 / n as f64;
            let f = obj.evaluate(&[x]).unwrap();
            if f < best_f {
                best_f = f;
                best_x = x;
            }
        }
        assert!((best_x - FLAT_BASIN_MINIMIZER).abs() <= 1e-6);
        let at_star = obj.evaluate(&[FLAT_BASIN_MINIMIZER]).unwrap();
        assert!(at_star <= best_f + 1e-15);
        assert_abs_diff_eq!(at_star, obj.min_value(), epsilon = 1e-12);
        assert_abs_diff_eq!(obj.gradient(&[FLAT_BASIN_MINIMIZER]).unwrap()[0], 0.0, epsilon = 1e-12);
        // 4-digit value quoted for this function
        assert_abs_diff_eq!(obj.evaluate(&[1.5355]).unwrap(), best_f, epsilon = 1e-9);
    }

    #[test]
    fn quadratic_gradient() {
        let obj = Objective::quadratic(2, 1.0).unwrap();
        assert_eq!(obj.gradient(&[3.0, 4.0]).unwrap(), vec![3.0, 4.0]);
    }

    #[test]
    fn nonsmooth_minimizers_have_zero_gradient() {
        let a = Objective::ackley(2, 0.0, 0.0).unwrap();
        assert_eq!(a.gradient(&[0.0, 0.0]).unwrap(), vec![0.0, 0.0]);
        let shifted = Objective::ackley(3, 2.5, 1.0).unwrap();
        assert_eq!(shifted.gradient(&[2.5; 3]).unwrap(), vec![0.0; 3]);
        let w = Objective::drop_wave(2).unwrap();
        assert_eq!(w.gradient(&[0.0, 0.0]).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn rastrigin_1d_gradient_matches_finite_difference() {
        let obj = Objective::new(ObjectiveKind::Rastrigin1D, 1, 0.0, 0.0).unwrap();
        let fd = central_difference(&obj, &[0.5], 1e-7)[0];
        let g = obj.gradient(&[0.5]).unwrap()[0];
        assert!((g - fd).abs() <= 1e-5 * (1.0 + g.abs()), "{g} vs {fd}");
    }

    #[test]
    fn minimizer_values() {
        for kind in ObjectiveKind::ALL {
            let d = kind.fixed_dimension().unwrap_or(3);
            let obj = Objective::new(kind, d, 1.25, -0.5).unwrap();
            let f = obj.evaluate(obj.minimizer()).unwrap();
            assert_abs_diff_eq!(f, obj.min_value(), epsilon = 1e-12);
        }
    }

    #[test]
    fn dimension_checks() {
        assert!(Objective::new(ObjectiveKind::Rosenbrock2D, 3, 0.0, 0.0).is_err());
        assert!(Objective::new(ObjectiveKind::FlatBasin1D, 2, 0.0, 0.0).is_err());
        assert!(Objective::new(ObjectiveKind::AckleyND, 0, 0.0, 0.0).is_err());
        let obj = Objective::ackley(2, 0.0, 0.0).unwrap();
        assert_eq!(
            obj.evaluate(&[1.0]),
            Err(Error::DimensionMismatch { expected: 2, got: 1 })
        );
        assert!(obj.gradient(&[1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn ackley_1d_matches_nd_at_d1() {
        let a1 = Objective::new(ObjectiveKind::Ackley1D, 1, 0.3, 0.0).unwrap();
        let an = Objective::new(ObjectiveKind::AckleyND, 1, 0.3, 0.0).unwrap();
        for x in [-2.7, -0.1, 0.9, 3.3] {
            assert_eq!(a1.evaluate(&[x]).unwrap(), an.evaluate(&[x]).unwrap());
        }
    }

    #[test]
    fn parse_names() {
        assert_eq!("Ackley".parse::<ObjectiveKind>().unwrap(), ObjectiveKind::AckleyND);
        assert_eq!("flatbasin1d".parse::<ObjectiveKind>().unwrap(), ObjectiveKind::FlatBasin1D);
        assert!("sphere".parse::<ObjectiveKind>().is_err());
    }
}
