use proptest::prelude::*;

use swarm_descent::harness::sample_uniform;
use swarm_descent::swarm::{relative_heights, transfer_mass};
use swarm_descent::{run_sbgd, run_sbgd_observed, BacktrackParams, Objective, SbgdParams, StopReason, Swarm};

proptest! {
    #[test]
    fn relative_heights_in_unit_interval(heights in prop::collection::vec(-1e3..1e3f64, 1..20)) {
        let eta = relative_heights(&heights, 1e-10);
        let i_min = heights.iter().enumerate().fold(0, |b, (i, h)| if *h < heights[b] { i } else { b });
        prop_assert_eq!(eta[i_min], 0.0);
        prop_assert!(eta.iter().all(|e| (0.0..1.0).contains(e)));
    }

    #[test]
    fn transfer_conserves_mass(
        raw in prop::collection::vec(0.01..1.0f64, 1..20),
        heights in prop::collection::vec(-10.0..10.0f64, 20),
        p in 0.1..5.0f64,
    ) {
        let total: f64 = raw.iter().sum();
        let masses: Vec<f64> = raw.iter().map(|m| m / total).collect();
        let heights = &heights[..masses.len()];
        let eta = relative_heights(heights, 1e-10);
        let i_min = heights.iter().enumerate().fold(0, |b, (i, h)| if *h < heights[b] { i } else { b });
        let out = transfer_mass(&masses, &eta, p, i_min);
        prop_assert!((out.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        prop_assert!(out[i_min] >= masses[i_min]);
        for (i, (new, old)) in out.iter().zip(&masses).enumerate() {
            if i != i_min {
                prop_assert!(new <= old && *new >= 0.0);
            }
        }
    }

    #[test]
    fn run_result_is_consistent(seed in any::<u64>(), n in 1usize..15, b in -2.0..2.0f64) {
        let obj = Objective::rastrigin(2, b, 0.5).unwrap();
        let init = sample_uniform(seed, n, &[-3.0, -3.0], &[3.0, 3.0]);
        let mut counts = Vec::new();
        let run = run_sbgd_observed(&obj, &init, &SbgdParams::default(), |s: &Swarm, _| counts.push(s.len())).unwrap();
        prop_assert_eq!(run.f_sol, obj.evaluate(&run.x_sol).unwrap());
        prop_assert!(counts.windows(2).all(|w| w[1] <= w[0]));
        prop_assert!(run.f_sol <= init.iter().map(|x| obj.evaluate(x).unwrap()).fold(f64::INFINITY, f64::min));
        prop_assert_eq!(run.iterations, counts.len());
    }
}

#[test]
fn flat_basin_left_box_success() {
    let obj = Objective::flat_basin();
    let params = SbgdParams { p: 2.0, ..SbgdParams::default() };
    let hits = (0..50)
        .filter(|&k| {
            let init = sample_uniform(1000 + k, 30, &[-3.0], &[-1.0]);
            let run = run_sbgd(&obj, &init, &params).unwrap();
            (run.x_sol[0] - obj.minimizer()[0]).abs() <= 0.25
        })
        .count();
    assert!(hits >= 48, "{hits}/50");
}

#[test]
fn rastrigin_1d_is_accurate() {
    let obj = Objective::rastrigin(1, 0.0, 0.0).unwrap();
    for k in 0..20 {
        let init = sample_uniform(k, 20, &[-3.0], &[3.0]);
        let run = run_sbgd(&obj, &init, &SbgdParams::default()).unwrap();
        assert!(run.x_sol[0].abs() < 1e-3, "{run:?}");
    }
}

#[test]
fn max_iters_is_reported() {
    let obj = Objective::rosenbrock();
    let params = SbgdParams { max_iters: 3, ..SbgdParams::default() };
    let run = run_sbgd(&obj, &sample_uniform(2, 10, &[-4.0, -4.0], &[-2.0, -2.0]), &params).unwrap();
    assert_eq!(run.stop_reason, StopReason::MaxIters);
    assert_eq!(run.iterations, 3);
}

#[test]
fn lone_agent_at_minimizer_stalls_or_stops() {
    let obj = Objective::ackley(2, 0.0, 0.0).unwrap();
    let params = SbgdParams { backtrack: BacktrackParams { h0: 2.0, ..Default::default() }, ..Default::default() };
    let run = run_sbgd(&obj, &[vec![0.0, 0.0]], &params).unwrap();
    assert_eq!(run.iterations, 1);
    assert_eq!(run.x_sol, vec![0.0, 0.0]);
}
