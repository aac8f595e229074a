mod common;

use common::{consistent_closed_form, minimax_deviation, random_consistent, random_valid, rng, GridOracle, RawInstance};
use proptest::prelude::*;
use rand::Rng;
use weatherwise::bwm::{consistency_ratio, solve_weights, BwmSolution, ConsistencyIndexTable};
use weatherwise::lp::{lp_minimize, LinearProgram, Sense};

fn solve(raw: &RawInstance) -> BwmSolution {
    solve_weights(&raw.build()).unwrap()
}

fn instance(best: usize, worst: usize, bo: &[i64], ow: &[i64]) -> RawInstance {
    RawInstance {
        best,
        worst,
        best_to_others: bo.to_vec(),
        others_to_worst: ow.to_vec(),
    }
}

fn size() -> impl Strategy<Value = (u64, usize)> {
    (any::<u64>(), 3usize..=6)
}

#[test]
fn consistent_three_criteria() {
    let raw = instance(0, 2, &[1, 2, 4], &[4, 2, 1]);
    let sol = solve(&raw);
    let expect = [4.0 / 7.0, 2.0 / 7.0, 1.0 / 7.0];
    for (w, e) in sol.weights.weights.iter().zip(expect) {
        assert!((w - e).abs() < 1e-9);
    }
    assert!(sol.weights.xi_star.abs() < 1e-12);
    let lp = lp_minimize(&raw.build().to_linear_program()).unwrap();
    assert!(lp.objective.abs() < 1e-12);
}

#[test]
fn all_ones_gives_equal_weights() {
    let sol = solve(&instance(0, 3, &[1, 1, 1, 1], &[1, 1, 1, 1]));
    assert!(sol.weights.weights.iter().all(|w| (w - 0.25).abs() < 1e-12));
    assert!(sol.weights.xi_star.abs() < 1e-12);
}

#[test]
fn inconsistent_three_criteria_match_oracle() {
    let raw = instance(0, 2, &[1, 3, 9], &[9, 2, 1]);
    let sol = solve(&raw);
    let oracle = GridOracle::new(&raw).solve();
    assert!(sol.weights.xi_star > 1e-6);
    assert!((sol.weights.xi_star - oracle.xi).abs() < 1e-5);
    for (w, o) in sol.weights.weights.iter().zip(&oracle.weights) {
        assert!((w - o).abs() < 1e-3, "{:?} vs {:?}", sol.weights.weights, oracle.weights);
    }
}

#[test]
fn lp_examples() {
    let mut lp = LinearProgram::new(vec![1.0]);
    lp.add_constraint(vec![1.0], Sense::Ge, 3.0).unwrap();
    let s = lp_minimize(&lp).unwrap();
    assert!((s.values[0] - 3.0).abs() < 1e-9 && (s.objective - 3.0).abs() < 1e-9);

    let mut lp = LinearProgram::new(vec![1.0, 1.0]);
    lp.add_constraint(vec![1.0, 1.0], Sense::Eq, 1.0).unwrap();
    let s = lp_minimize(&lp).unwrap();
    assert!((s.objective - 1.0).abs() < 1e-9);
    assert!(lp.max_violation(&s.values) < 1e-9);
}

#[test]
fn consistency_ratio_examples() {
    let table = ConsistencyIndexTable::default();
    assert_eq!(consistency_ratio(0.0, 4, &table).unwrap(), 0.0);
    assert!((consistency_ratio(0.23, 5, &table).unwrap() - 0.1).abs() < 1e-12);
    assert!(consistency_ratio(0.5, 1, &table).is_err());
}

/// The ordering holds strictly wherever a comparison exceeds one. A
/// criterion rated equal to the best (`a_Bj = 1`) may outweigh it once the
/// judgments are inconsistent, for example `[0.278, 0.167, 0.333, 0.222]`
/// below, so those pairs are exempt.
#[test]
fn equal_to_best_may_outweigh_best() {
    let sol = solve(&instance(0, 1, &[1, 2, 1, 1], &[2, 1, 2, 1]));
    let w = &sol.weights.weights;
    assert!(w[2] > w[0] + 1e-3);
    assert!((w[2] - 1.0 / 3.0).abs() < 1e-9);
    assert!((sol.weights.xi_star - 1.0 / 18.0).abs() < 1e-9);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn weight_vector_invariants((seed, n) in size()) {
        let raw = random_valid(&mut rng(seed), n);
        let sol = solve(&raw);
        let w = &sol.weights.weights;
        prop_assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        prop_assert!(w.iter().all(|v| *v >= 0.0));
        prop_assert!((minimax_deviation(&raw, w) - sol.weights.xi_star).abs() < 1e-6);
    }

    #[test]
    fn best_and_worst_bound_the_rest((seed, n) in size()) {
        let raw = random_valid(&mut rng(seed), n);
        let w = solve(&raw).weights.weights;
        for j in 0..n {
            if raw.best_to_others[j] > 1 {
                prop_assert!(w[raw.best] >= w[j] - 1e-9, "{raw:?} {w:?}");
            }
            if raw.others_to_worst[j] > 1 {
                prop_assert!(w[j] >= w[raw.worst] - 1e-9, "{raw:?} {w:?}");
            }
        }
    }

    #[test]
    fn consistent_instances_are_ordered_exactly((seed, n) in size()) {
        let raw = random_consistent(&mut rng(seed), n);
        let sol = solve(&raw);
        let w = &sol.weights.weights;
        prop_assert!(sol.weights.xi_star <= 1e-8);
        for (got, want) in w.iter().zip(consistent_closed_form(&raw)) {
            prop_assert!((got - want).abs() < 1e-9);
        }
        for j in 0..n {
            prop_assert!(w[raw.best] >= w[j] - 1e-12 && w[j] >= w[raw.worst] - 1e-12);
            if raw.best_to_others[j] > 1 {
                prop_assert!(w[raw.best] > w[j]);
            }
            if raw.others_to_worst[j] > 1 {
                prop_assert!(w[j] > w[raw.worst]);
            }
        }
    }

    #[test]
    fn relabelling_permutes_weights((seed, n) in size()) {
        let mut r = rng(seed);
        let raw = random_valid(&mut r, n);
        let mut perm: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            perm.swap(i, r.random_range(0..=i));
        }
        // criterion perm[k] of the original becomes criterion k
        let inverse = |old: usize| perm.iter().position(|&p| p == old).unwrap();
        let moved = RawInstance {
            best: inverse(raw.best),
            worst: inverse(raw.worst),
            best_to_others: perm.iter().map(|&p| raw.best_to_others[p]).collect(),
            others_to_worst: perm.iter().map(|&p| raw.others_to_worst[p]).collect(),
        };
        let (a, b) = (solve(&raw), solve(&moved));
        prop_assert!((a.weights.xi_star - b.weights.xi_star).abs() < 1e-9);
        if a.multiple_optima || b.multiple_optima {
            prop_assert!((minimax_deviation(&moved, &b.weights.weights) - a.weights.xi_star).abs() < 1e-9);
        } else {
            for (k, &p) in perm.iter().enumerate() {
                prop_assert!((b.weights.weights[k] - a.weights.weights[p]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn raising_a_best_comparison_never_raises_that_weight((seed, n) in size()) {
        let mut r = rng(seed);
        let raw = random_valid(&mut r, n);
        let a_bw = raw.best_to_others[raw.worst];
        let candidates: Vec<usize> = (0..n)
            .filter(|&j| j != raw.best && j != raw.worst && raw.best_to_others[j] < a_bw)
            .collect();
        prop_assume!(!candidates.is_empty());
        let j = candidates[r.random_range(0..candidates.len())];
        let mut raised = raw.clone();
        raised.best_to_others[j] += r.random_range(1..=a_bw - raw.best_to_others[j]);
        let (before, after) = (solve(&raw), solve(&raised));
        prop_assert!(
            after.weights.weights[j] <= before.weights.weights[j] + 1e-9,
            "{raw:?} -> {raised:?}: {:?} -> {:?}", before.weights.weights, after.weights.weights
        );
    }
}

#[test]
fn small_instances_match_oracle() {
    let mut r = rng(404);
    for k in 0..40 {
        let raw = random_valid(&mut r, 3 + k % 3);
        let sol = solve(&raw);
        let oracle = GridOracle::new(&raw).solve();
        assert!((sol.weights.xi_star - oracle.xi).abs() < 1e-3, "{raw:?}");
        for (w, o) in sol.weights.weights.iter().zip(&oracle.weights) {
            assert!((w - o).abs() < 1e-3, "{raw:?}");
        }
    }
}
