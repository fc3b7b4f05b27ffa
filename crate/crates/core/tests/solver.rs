mod common;

use std::time::Duration;

use common::{graph, random_graph};
use mwis_core::heuristic::{SelectionAmount, SelectionKind, SelectionStrategy};
use mwis_core::kernel::PRESET_NAMES;
use mwis_core::oracle::alpha;
use mwis_core::solver::{solve_with_progress, verify, SolveEvent};
use mwis_core::{solve, SolverConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn small(seed: u64) -> SolverConfig {
    SolverConfig { time_limit: Duration::from_secs(5), seed, population_size: 30, ls_iterations: 2000, unsuccessful_limit: 200, ..SolverConfig::default() }
}

#[test]
fn path_is_solved_by_exact_reductions_alone() {
    let g = graph(&[5, 1, 5], &[(0, 1), (1, 2)]);
    let r = solve(&g, &small(0));
    assert_eq!(r.weight, 10);
    assert_eq!(r.solution.members(), &[0, 2]);
    assert_eq!(r.rounds, 1);
    assert_eq!(r.kernel_trace[0].live_vertices, 0);
}

#[test]
fn twenty_vertex_graphs_reach_the_optimum() {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    for trial in 0..10 {
        let g = random_graph(&mut rng, 20, 0.15 + 0.05 * (trial % 3) as f64, 200);
        let r = solve(&g, &small(trial));
        assert!(verify(&g, r.solution.members()).is_ok());
        assert_eq!(r.weight, alpha(&g), "trial {trial}");
    }
}

#[test]
fn every_ordering_and_strategy_returns_a_valid_set() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let g = random_graph(&mut rng, 120, 0.04, 100);
    let amounts = [SelectionAmount::Single, SelectionAmount::Fraction(0.2)];
    for (i, name) in PRESET_NAMES.iter().enumerate() {
        for kind in SelectionKind::ALL {
            let config = SolverConfig {
                population_size: 8,
                unsuccessful_limit: 20,
                ls_iterations: 300,
                strategy: SelectionStrategy { kind, amount: amounts[i % 2] },
                ..small(i as u64)
            }
            .with_ordering(name)
            .unwrap();
            let r = solve(&g, &config);
            let report = verify(&g, r.solution.members());
            assert!(report.is_ok(), "{name}/{kind}: {report}");
            assert_eq!(report.weight, r.weight);
        }
    }
}

#[test]
fn zero_time_limit_still_returns_a_maximal_set() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let g = random_graph(&mut rng, 80, 0.1, 50);
    let r = solve(&g, &SolverConfig { time_limit: Duration::ZERO, ..small(1) });
    assert!(verify(&g, r.solution.members()).is_ok());
    let c = g.compact();
    let bits = r.solution.to_bitvector(g.n_original());
    assert!(c.bits_maximal(&bits));
}

#[test]
fn progress_reports_rounds_and_improvements() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let g = random_graph(&mut rng, 150, 0.05, 100);
    let mut rounds = 0;
    let mut improvements = Vec::new();
    let r = solve_with_progress(&g, &SolverConfig { population_size: 10, unsuccessful_limit: 30, ..small(2) }, &mut |e| match e {
        SolveEvent::Round { .. } => rounds += 1,
        SolveEvent::Improved { weight } => improvements.push(weight),
        SolveEvent::Evolve { .. } => {}
    });
    assert_eq!(rounds, r.rounds);
    assert!(improvements.windows(2).all(|w| w[0] < w[1]));
    assert_eq!(improvements.last().copied(), Some(r.weight));
}

#[test]
fn same_seed_same_answer() {
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    let g = random_graph(&mut rng, 100, 0.06, 100);
    let config = SolverConfig { population_size: 10, unsuccessful_limit: 40, time_limit: Duration::from_secs(300), ..small(9) };
    assert_eq!(solve(&g, &config).solution, solve(&g, &config).solution);
}
