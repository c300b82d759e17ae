//! Cross-module invariants on generated instances.

use std::sync::Arc;

use probemin_core::gen;
use probemin_core::metamin::{call_bound, pruning_is_monotone, threshold_grid, ub_interval_claim, MetaMin};
use probemin_core::model::sample_realization;
use probemin_core::oracle::{knapsack_budget, set_expectation};
use probemin_core::policy::{exact_expected_objective, SetPolicy};
use probemin_core::solvers::{cheap_universe, density_greedy, ext_greedy, mgreedy, DensitySolver, ExtGreedySolver, ThresholdSolver};
use probemin_core::{execute, IdSet, Objective, ObjectiveSpec};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 96,
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    /// Every sampled run of the threshold search respects the call bound,
    /// prunes monotonically, and reports an upper bound in the right grid
    /// interval.
    #[test]
    fn threshold_search_audit(seed in any::<u64>(), trial in 0u64..1000, ext in any::<bool>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=8);
        let m = r.gen_range(1..=40);
        let inst = gen::knapsack_instance(&mut r, n, m, ObjectiveSpec::MinElement);
        let obj = Objective::from_instance(&inst);
        let solver: Arc<dyn ThresholdSolver> = if ext { Arc::new(ExtGreedySolver) } else { Arc::new(DensitySolver) };
        let beta = solver.beta(1);
        let policy = MetaMin::new(solver, obj.clone(), obj.bound());
        let x = sample_realization(&inst, seed, trial);
        let rep = execute(&policy, &inst, &x, &obj).unwrap();
        let calls: Vec<(u64, bool)> = rep.call_log.iter().map(|c| (c.t, c.success)).collect();
        let ub = rep.ub_value.expect("search reports an upper bound");
        prop_assert!(ub >= rep.objective_value);
        prop_assert!(calls.len() <= call_bound(obj.bound()));
        prop_assert!(pruning_is_monotone(&calls));
        prop_assert!(ub_interval_claim(&threshold_grid(obj.bound()).unwrap(), &calls, ub));
        prop_assert!(rep.feasible_set_count <= beta * calls.len());
        let b = knapsack_budget(&inst).unwrap();
        prop_assert!(rep.total_cost() <= b * probemin_core::rational::int(rep.feasible_set_count as i64));
    }

    /// Enumerating a fixed set as a policy agrees with the direct
    /// expectation over the set's own outcomes.
    #[test]
    fn set_policy_expectation_matches_direct(seed in any::<u64>(), mask in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=6);
        let m = r.gen_range(1..=5);
        let k = r.gen_range(1..=3);
        let inst = gen::mink_knapsack_instance(&mut r, n, m, k);
        let obj = Objective::from_instance(&inst);
        // elements costing at most B, so each one fits a feasible set on its own
        let fits = cheap_universe(&inst, &knapsack_budget(&inst).unwrap(), 1);
        let set = IdSet::from_mask(mask & fits.mask());
        let policy = SetPolicy::augmented("set", set.iter(), n.max(1));
        let via_policy = exact_expected_objective(&policy, &inst, &obj).unwrap().expectation;
        prop_assert_eq!(via_policy, set_expectation(&inst, &obj, set).unwrap());
    }

    /// Raising the greedy target only extends the chosen prefix.
    #[test]
    fn greedy_targets_are_nested(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=10);
        let m = r.gen_range(1..=4);
        let inst = gen::knapsack_instance(&mut r, n, m, ObjectiveSpec::MinElement);
        let t = r.gen_range(0..m);
        let b = knapsack_budget(&inst).unwrap();
        let u = cheap_universe(&inst, &b, 1);
        let mut prev = ext_greedy(&inst, u, &b, 0, t).order;
        prop_assert_eq!(&prev, &density_greedy(&inst, &b, t).order);
        for extra in 1..=4 {
            let next = ext_greedy(&inst, u, &b, extra, t).order;
            prop_assert!(next.starts_with(&prev), "{:?} not a prefix of {:?}", prev, next);
            prev = next;
        }
    }

    /// The matroid greedy returns a basis.
    #[test]
    fn mgreedy_returns_a_basis(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=9);
        let m = r.gen_range(1..=4);
        let inst = gen::matroid_instance(&mut r, n, m, 4);
        let t = r.gen_range(0..m);
        let mat = inst.outer_matroid().unwrap();
        let basis: IdSet = mgreedy(&inst, mat, t).into_iter().collect();
        prop_assert!(mat.is_independent(basis).unwrap());
        prop_assert_eq!(basis.len(), mat.full_rank());
    }

    /// Sampled weights always come from the element's support, and the
    /// same (seed, trial) reproduces them.
    #[test]
    fn samples_are_in_support_and_reproducible(seed in any::<u64>(), trial in any::<u64>()) {
        let mut r = rng(seed ^ 0x5eed);
        let n = r.gen_range(1..=10);
        let inst = gen::knapsack_instance(&mut r, n, 6, ObjectiveSpec::MinElement);
        let x = sample_realization(&inst, seed, trial);
        let again = sample_realization(&inst, seed, trial);
        prop_assert_eq!(x.weights(), again.weights());
        for (e, &w) in x.weights().iter().enumerate() {
            prop_assert!(inst.elements[e].dist.support().iter().any(|(v, _)| *v == w));
        }
    }
}
