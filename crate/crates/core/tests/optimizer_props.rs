use std::sync::Mutex;

use flywheel_core::optimizer::{minimize, RandomMode};
use flywheel_core::{run, FlywheelSpec, Problem, ProblemConfig, SolverSettings};
use proptest::prelude::*;

fn small(seed: u64) -> ProblemConfig {
    ProblemConfig {
        population_size: 40,
        max_iterations: 60,
        restarts: 2,
        random_seed: seed,
        ..ProblemConfig::thresher(8)
    }
}

fn problem() -> Problem {
    Problem::new(FlywheelSpec::thresher(), &SolverSettings::default()).unwrap()
}

#[test]
fn degenerate_box_returns_constant_thickness() {
    let config = ProblemConfig {
        population_size: 5,
        max_iterations: 10,
        restarts: 1,
        ..ProblemConfig::with_bounds(vec![0.02; 8], vec![0.02; 8])
    };
    let result = run(&problem(), &config).unwrap();
    assert!(result.best_x.iter().all(|&t| t == 0.02));
    assert!((result.kinetic_energy - 30483.66).abs() < 0.005 * 30483.66);
    // 6.42 N/mm² is just over the stress limit
    assert!(!result.feasible);
}

#[test]
fn same_seed_is_bit_identical() {
    let p = problem();
    let a = run(&p, &small(7)).unwrap();
    let b = run(&p, &small(7)).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.best_objective.to_bits(), b.best_objective.to_bits());
    let c = run(&p, &small(8)).unwrap();
    assert_ne!(a.history, c.history);
}

#[test]
fn thread_count_does_not_change_the_result() {
    let p = problem();
    let a = run(&p, &small(3)).unwrap();
    let b = run(&p, &ProblemConfig { threads: Some(2), ..small(3) }).unwrap();
    assert_eq!(a, b);
}

#[test]
fn feasible_result_beats_any_penalised_point() {
    let p = problem();
    let config = ProblemConfig {
        upper_bounds: vec![0.04, 0.015, 0.015, 0.015, 0.015, 0.015, 0.03, 0.06],
        ..small(11)
    };
    let result = run(&p, &config).unwrap();
    assert!(result.feasible);
    assert_eq!(result.best_objective, -result.kinetic_energy);
    let heavy = p.penalized_objective(&[0.06; 8], &config).unwrap();
    assert!(heavy > 0.0 && heavy > result.best_objective);
    assert_eq!(result.restart_objectives.len(), 2);
    assert!(result.restart_objectives.iter().all(|&f| f >= result.best_objective));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn history_never_worsens_and_points_stay_in_bounds(
        seed in any::<u64>(),
        lo in prop::collection::vec(-2.0..0.0f64, 3),
        width in prop::collection::vec(0.0..3.0f64, 3),
        per_candidate in any::<bool>(),
    ) {
        let hi: Vec<f64> = lo.iter().zip(&width).map(|(l, w)| l + w).collect();
        let config = ProblemConfig {
            population_size: 12,
            max_iterations: 40,
            restarts: 1,
            random_seed: seed,
            random_mode: if per_candidate { RandomMode::PerCandidate } else { RandomMode::Shared },
            ..ProblemConfig::with_bounds(lo.clone(), hi.clone())
        };
        let seen = Mutex::new(Vec::new());
        let found = minimize(
            |x: &[f64]| {
                seen.lock().unwrap().push(x.to_vec());
                Ok(x.iter().map(|v| (v - 0.3).powi(2)).sum::<f64>())
            },
            &config,
        )
        .unwrap();
        prop_assert!(found.history.windows(2).all(|w| w[1] <= w[0]));
        prop_assert_eq!(*found.history.last().unwrap(), found.objective);
        for x in seen.into_inner().unwrap() {
            for j in 0..3 {
                prop_assert!(x[j] >= lo[j] && x[j] <= hi[j]);
            }
        }
    }
}
