//! Adaptive binary search over power-of-two thresholds, and the sum-of-`k`
//! driver built on it.
//!
//! A search first tests the threshold 0. Unless that already drives the
//! objective to 0 it binary-searches the grid `{1, 2, 4, …, 2^⌊log2 M⌋}`,
//! always testing the lower median of the surviving range: a success at `t`
//! discards every threshold `≥ t`, a failure discards every threshold `≤ t`.
//! The threshold test `f(Ŝ_t) ≤ t` looks at the set chosen by that call
//! alone (optionally at the running union).

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::idset::IdSet;
use crate::model::Instance;
use crate::objective::Objective;
use crate::policy::{PhaseBudget, Policy, Prober, ThresholdCall};
use crate::rational::{ceil_log2, floor_log2};
use crate::solvers::ThresholdSolver;

/// `{0} ∪ {2^j : 2^j ≤ M}`, ascending.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ThresholdGrid {
    pub values: Vec<u64>,
}

impl ThresholdGrid {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max(&self) -> u64 {
        *self.values.last().expect("grid holds 0 and 1")
    }
}

pub fn threshold_grid(bound: u64) -> Result<ThresholdGrid> {
    if bound < 1 {
        return Err(Error::invalid("the value bound must be at least 1"));
    }
    let top = floor_log2(bound);
    let mut values = vec![0];
    values.extend((0..=top).map(|j| 1u64 << j));
    Ok(ThresholdGrid { values })
}

/// Most threshold calls a single search makes: `1 + ceil(log2(⌊log2 M⌋ + 2))`.
pub fn call_bound(bound: u64) -> usize {
    1 + ceil_log2(floor_log2(bound) as u64 + 2) as usize
}

/// Outcome of one search, recovered from a run's call log.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MetaMinResult {
    pub selection: IdSet,
    pub objective_value: u64,
    /// Last failed threshold.
    pub tau: Option<u64>,
    pub ub: u64,
    pub threshold_calls: Vec<(u64, bool)>,
}

/// `max(objective, τ + 1)`, or the objective when nothing failed.
pub fn upper_bound(objective_value: u64, tau: Option<u64>) -> u64 {
    match tau {
        Some(t) => objective_value.max(t + 1),
        None => objective_value,
    }
}

/// The adaptive threshold search as a composite policy.
#[derive(Clone)]
pub struct MetaMin {
    pub solver: Arc<dyn ThresholdSolver>,
    pub objective: Objective,
    /// Objective index handed to the solver (1 for single-term objectives).
    pub index: usize,
    pub bound: u64,
    /// Test `f ≤ t` on the running union instead of the call's own set.
    pub test_on_union: bool,
    /// Whether the search reports its upper bound to the executor.
    pub report_ub: bool,
}

impl MetaMin {
    pub fn new(solver: Arc<dyn ThresholdSolver>, objective: Objective, bound: u64) -> Self {
        MetaMin {
            solver,
            objective,
            index: 1,
            bound,
            test_on_union: false,
            report_ub: true,
        }
    }

    /// Runs the search and returns its result; the executor records the
    /// same calls in its log.
    pub fn search(&self, probe: &mut Prober<'_>) -> Result<MetaMinResult> {
        let grid = threshold_grid(self.bound)?;
        let instance: &Instance = probe.instance();
        let mut calls = Vec::new();
        let mut chosen = IdSet::EMPTY;
        let mut test = |probe: &mut Prober<'_>, t: u64, calls: &mut Vec<(u64, bool)>| -> Result<bool> {
            let t32 = u32::try_from(t).map_err(|_| Error::invalid("threshold exceeds u32"))?;
            let sub = self.solver.policy_for(instance, self.index, t32)?;
            let label = format!("{}[i={},t={t}]", self.solver.name(), self.index);
            let set = probe.run_sub(&*sub, &label)?;
            chosen = chosen.union(set);
            let tested = if self.test_on_union { probe.selection() } else { set };
            let value = self.objective.value(tested, &probe.revealed_weights());
            let success = value <= t;
            probe.log_threshold(ThresholdCall {
                index: self.index,
                t,
                success,
            });
            calls.push((t, success));
            Ok(success)
        };

        let mut tau = None;
        if !test(probe, 0, &mut calls)? {
            tau = Some(0);
            let mut range = &grid.values[1..];
            while !range.is_empty() {
                let mid = (range.len() - 1) / 2;
                let t = range[mid];
                if test(probe, t, &mut calls)? {
                    range = &range[..mid];
                } else {
                    tau = Some(t);
                    range = &range[mid + 1..];
                }
            }
        }
        let weights = probe.revealed_weights();
        let objective_value = self.objective.value(probe.selection(), &weights);
        let ub = upper_bound(objective_value, tau);
        Ok(MetaMinResult {
            selection: chosen,
            objective_value,
            tau,
            ub,
            threshold_calls: calls,
        })
    }
}

impl Policy for MetaMin {
    fn name(&self) -> String {
        format!("metamin({}, {})", self.solver.name(), self.objective.name())
    }

    fn budget(&self) -> PhaseBudget {
        PhaseBudget::Composite
    }

    fn run(&self, probe: &mut Prober<'_>) -> Result<()> {
        let result = self.search(probe)?;
        if self.report_ub {
            probe.report_ub(result.ub);
        }
        Ok(())
    }
}

/// Checks, for one search, that the upper bound lands in the grid interval
/// delimited by the last failure and the first success:
/// `UB = 0` iff the call at 0 succeeded; `UB ∈ (a, b]` for adjacent grid
/// points iff the search failed at `a` and succeeded at `b`; `UB > max(R)`
/// iff it failed at `max(R)`.
pub fn ub_interval_claim(grid: &ThresholdGrid, calls: &[(u64, bool)], ub: u64) -> bool {
    let failed = |t: u64| calls.iter().any(|&(c, s)| c == t && !s);
    let succeeded = |t: u64| calls.iter().any(|&(c, s)| c == t && s);
    if (ub == 0) != succeeded(0) {
        return false;
    }
    for w in grid.values.windows(2) {
        let (a, b) = (w[0], w[1]);
        if (a < ub && ub <= b) != (failed(a) && succeeded(b)) {
            return false;
        }
    }
    (ub > grid.max()) == failed(grid.max())
}

/// Monotone pruning: after a success at `t` no later call tests `≥ t`, after
/// a failure at `t` none tests `≤ t`.
pub fn pruning_is_monotone(calls: &[(u64, bool)]) -> bool {
    calls.iter().enumerate().all(|(j, &(t, s))| {
        calls[j + 1..]
            .iter()
            .all(|&(u, _)| if s { u < t } else { u > t })
    })
}

/// Sum-of-`k` driver: one threshold search per index `i = 2^j ≤ k`, in
/// descending order of `i`, each on the summand objective with value bound
/// `bound`; the selection is the union of all searches.
#[derive(Clone)]
pub struct SumOfK {
    pub solver: Arc<dyn ThresholdSolver>,
    pub objective: Objective,
    /// Value bound of a single summand.
    pub bound: u64,
}

impl SumOfK {
    pub fn new(solver: Arc<dyn ThresholdSolver>, objective: Objective, bound: u64) -> Self {
        SumOfK {
            solver,
            objective,
            bound,
        }
    }

    /// Indices `2^j`, `j = ⌊log2 k⌋ … 0`.
    pub fn indices(&self) -> Vec<usize> {
        let k = self.objective.k();
        (0..=floor_log2(k as u64)).rev().map(|j| 1usize << j).collect()
    }

    /// Explicit feasible-set bound: runs × calls per run × `β` of the
    /// largest index.
    pub fn feasible_set_bound(&self) -> usize {
        let runs = self.indices();
        let beta = runs.iter().map(|&i| self.solver.beta(i)).max().unwrap_or(1);
        runs.len() * call_bound(self.bound) * beta
    }
}

impl Policy for SumOfK {
    fn name(&self) -> String {
        format!("sum-of-k({}, {})", self.solver.name(), self.objective.name())
    }

    fn budget(&self) -> PhaseBudget {
        PhaseBudget::Composite
    }

    fn run(&self, probe: &mut Prober<'_>) -> Result<()> {
        for i in self.indices() {
            let run = MetaMin {
                solver: Arc::clone(&self.solver),
                objective: self.objective.component(i),
                index: i,
                bound: self.bound,
                test_on_union: false,
                report_ub: false,
            };
            run.search(probe)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{gap_instance, Realization};
    use crate::policy::execute;
    use crate::solvers::DensitySolver;

    #[test]
    fn grids() {
        assert_eq!(threshold_grid(1).unwrap().values, vec![0, 1]);
        assert_eq!(threshold_grid(100).unwrap().values, vec![0, 1, 2, 4, 8, 16, 32, 64]);
        assert_eq!(threshold_grid(64).unwrap().values, vec![0, 1, 2, 4, 8, 16, 32, 64]);
        assert!(threshold_grid(0).is_err());
        for m in 1..300u64 {
            let g = threshold_grid(m).unwrap();
            assert_eq!(g.len() as u32, floor_log2(m) + 2);
            assert!(g.values.windows(2).all(|w| w[0] < w[1]));
            assert!(g.max() <= m);
        }
    }

    #[test]
    fn call_bounds() {
        assert_eq!(call_bound(100), 4);
        assert_eq!(call_bound(1), 2);
        assert_eq!(call_bound(3), 3);
        assert_eq!(call_bound(15), 4);
    }

    /// Simulates the search over a monotone success pattern: succeeds at
    /// every grid point `≥ cut`.
    fn simulate(grid: &ThresholdGrid, cut: u64) -> Vec<(u64, bool)> {
        let mut calls = vec![(0, cut == 0)];
        if cut == 0 {
            return calls;
        }
        let mut range = &grid.values[1..];
        while !range.is_empty() {
            let mid = (range.len() - 1) / 2;
            let t = range[mid];
            let ok = t >= cut;
            calls.push((t, ok));
            range = if ok { &range[..mid] } else { &range[mid + 1..] };
        }
        calls
    }

    #[test]
    fn search_walks_within_bound() {
        for m in 1..2000u64 {
            let grid = threshold_grid(m).unwrap();
            for &cut in grid.values.iter().chain(std::iter::once(&(m + 1))) {
                let calls = simulate(&grid, cut);
                assert!(calls.len() <= call_bound(m), "m={m} cut={cut}");
                assert!(pruning_is_monotone(&calls));
            }
        }
    }

    #[test]
    fn gap_instance_search() {
        let inst = gap_instance(4);
        let obj = Objective::from_instance(&inst);
        let pol = MetaMin::new(Arc::new(DensitySolver), obj.clone(), obj.bound());
        for x in [vec![1, 0, 4], vec![16, 16, 4], vec![1, 16, 4]] {
            let r = execute(&pol, &inst, &Realization(x), &obj).unwrap();
            let calls: Vec<_> = r.call_log.iter().map(|c| (c.t, c.success)).collect();
            let grid = threshold_grid(obj.bound()).unwrap();
            assert!(calls.len() <= call_bound(obj.bound()));
            assert!(pruning_is_monotone(&calls));
            assert!(ub_interval_claim(&grid, &calls, r.ub_value.unwrap()));
            assert!(r.ub_value.unwrap() >= r.objective_value);
        }
    }

    #[test]
    fn early_return_at_zero() {
        let inst = gap_instance(4);
        let obj = Objective::from_instance(&inst);
        let pol = MetaMin::new(Arc::new(DensitySolver), obj.clone(), obj.bound());
        // density greedy at t=0 picks element 1, which realizes 0
        let r = execute(&pol, &inst, &Realization(vec![1, 0, 4]), &obj).unwrap();
        assert_eq!(r.call_log.len(), 1);
        assert_eq!(r.ub_value, Some(0));
    }

    #[test]
    fn interval_claim_rejects_mismatch() {
        let grid = threshold_grid(8).unwrap();
        let calls = [(0, false), (2, true), (1, false)];
        assert!(ub_interval_claim(&grid, &calls, 2));
        assert!(!ub_interval_claim(&grid, &calls, 3));
        assert!(!ub_interval_claim(&grid, &calls, 0));
    }

    #[test]
    fn sum_of_k_indices() {
        let inst = gap_instance(4);
        for (k, expect) in [(1, vec![1]), (4, vec![4, 2, 1]), (7, vec![4, 2, 1]), (8, vec![8, 4, 2, 1])] {
            let s = SumOfK::new(Arc::new(DensitySolver), Objective::MinK { k, m: inst.m }, inst.m as u64);
            assert_eq!(s.indices(), expect);
        }
    }
}
