use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use swarm_descent::objectives::{Objective, ObjectiveKind};

fn all_objectives(d: usize, b: f64, c: f64) -> Vec<Objective> {
    ObjectiveKind::ALL
        .into_iter()
        .map(|k| Objective::new(k, k.fixed_dimension().unwrap_or(d), b, c).unwrap())
        .collect()
}

#[test]
fn gradients_match_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for obj in all_objectives(3, 0.7, -1.0) {
        let mut checked = 0;
        while checked < 100 {
            let x: Vec<f64> = obj.minimizer().iter().map(|m| m + rng.random_range(-3.0..3.0)).collect();
            if obj.minimizer().iter().zip(&x).map(|(a, b)| (a - b).powi(2)).sum::<f64>() < 1e-4 {
                continue;
            }
            let g = obj.gradient(&x).unwrap();
            for k in 0..x.len() {
                let h = 1e-6;
                let mut xp = x.clone();
                let mut xm = x.clone();
                xp[k] += h;
                xm[k] -= h;
                let fd = (obj.evaluate(&xp).unwrap() - obj.evaluate(&xm).unwrap()) / (2.0 * h);
                let tol = 1e-5 * (1.0 + fd.abs());
                assert!((fd - g[k]).abs() < tol, "{:?} at {x:?}: {} vs {fd}", obj.kind(), g[k]);
            }
            checked += 1;
        }
    }
}

#[test]
fn minimizer_is_global_on_samples() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for obj in all_objectives(2, 1.5, 2.0) {
        let best = obj.evaluate(obj.minimizer()).unwrap();
        assert!((best - obj.min_value()).abs() < 1e-12, "{:?}", obj.kind());
        for _ in 0..100_000 {
            let x: Vec<f64> = obj.minimizer().iter().map(|m| m + rng.random_range(-5.0..5.0)).collect();
            assert!(obj.evaluate(&x).unwrap() >= best, "{:?} at {x:?}", obj.kind());
        }
    }
}

#[test]
fn flat_basin_has_local_minimum_left_of_box() {
    // the basin the left-box agents fall into sits in [-2, -1]
    let obj = Objective::flat_basin();
    let grid: Vec<f64> = (0..=10_000).map(|i| -2.0 + i as f64 * 1e-4).collect();
    let (x_loc, f_loc) = grid
        .iter()
        .map(|&x| (x, obj.evaluate(&[x]).unwrap()))
        .fold((0.0, f64::INFINITY), |acc, p| if p.1 < acc.1 { p } else { acc });
    assert!((-2.0..=-1.0).contains(&x_loc) && f_loc > obj.min_value());
}

proptest! {
    #[test]
    fn shift_covariance(
        kind in prop::sample::select(ObjectiveKind::ALL.to_vec()),
        b in -5.0..5.0f64,
        c in -5.0..5.0f64,
        z in prop::collection::vec(-3.0..3.0f64, 3),
    ) {
        let d = kind.fixed_dimension().unwrap_or(3);
        let base = Objective::new(kind, d, 0.0, 0.0).unwrap();
        let shifted = Objective::new(kind, d, b, c).unwrap();
        let x: Vec<f64> = z[..d].iter().map(|v| v + b).collect();
        let lhs = shifted.evaluate(&x).unwrap();
        let rhs = base.evaluate(&z[..d]).unwrap() + c;
        // x - b recovers z only up to one rounding of size ulp(b)
        let slope: f64 = base.gradient(&z[..d]).unwrap().iter().map(|g| g.abs()).sum();
        let tol = 1e-13 * (1.0 + rhs.abs() + slope * (1.0 + b.abs()));
        prop_assert!((lhs - rhs).abs() <= tol, "{lhs} vs {rhs}");
    }

    #[test]
    fn objectives_are_finite(
        kind in prop::sample::select(ObjectiveKind::ALL.to_vec()),
        z in prop::collection::vec(-50.0..50.0f64, 4),
    ) {
        let d = kind.fixed_dimension().unwrap_or(4);
        let obj = Objective::new(kind, d, 0.0, 0.0).unwrap();
        prop_assert!(obj.evaluate(&z[..d]).unwrap().is_finite());
        prop_assert!(obj.gradient(&z[..d]).unwrap().iter().all(|g| g.is_finite()));
    }
}
