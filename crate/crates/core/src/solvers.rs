//! Threshold and rank solvers.
//!
//! * [`density_greedy`]: overflowing greedy by reward density for the
//!   min-element knapsack threshold problem.
//! * [`ext_greedy`] and [`bin`]: the two halves of the non-adaptive i-heads
//!   solver [`rank_knapsack_solver`].
//! * [`mgreedy`]: matroid greedy by below-threshold probability.
//! * [`AdapMGreedy`]: adaptive matroid greedy for the matroid threshold rank
//!   under a cardinality budget.
//!
//! All orderings break ties by the smaller id.

use std::cmp::Ordering;

use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::idset::IdSet;
use crate::matroid::Matroid;
use crate::model::{ConstraintSpec, Instance};
use crate::objective::{prob_at_least, reward, width};
use crate::policy::{PhaseBudget, Policy, Prober, SetPolicy};
use crate::rational::{self, ceil_log2, Rational};

/// Greedy output in order of addition.
#[derive(Debug, Clone, Serialize)]
pub struct GreedySelection {
    pub order: Vec<usize>,
    #[serde(serialize_with = "ser_rational")]
    pub total_cost: Rational,
    /// Reward density per candidate, in greedy order.
    pub densities: Vec<(usize, f64)>,
    /// Largest constraint cost in the candidate universe.
    #[serde(serialize_with = "ser_rational")]
    pub delta: Rational,
}

impl GreedySelection {
    pub fn set(&self) -> IdSet {
        self.order.iter().collect()
    }
}

fn ser_rational<S: serde::Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    rational::ExactValue::from(r).serialize(s)
}

/// Candidates in descending reward density, ties by id. Zero-cost elements
/// have infinite density when their reward is positive and are dropped
/// otherwise.
pub fn density_order(instance: &Instance, universe: IdSet, t: u32) -> Vec<(usize, f64)> {
    let mut out: Vec<(usize, f64)> = universe
        .iter()
        .filter_map(|e| {
            let r = reward(e, t, instance);
            let c = instance.constraint_cost(e);
            if c.is_zero() {
                (r > 0.0).then_some((e, f64::INFINITY))
            } else {
                Some((e, r / rational::to_f64(&c)))
            }
        })
        .collect();
    out.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(Ordering::Equal).then(a.0.cmp(&b.0)));
    out
}

fn greedy_until(instance: &Instance, universe: IdSet, t: u32, target: &Rational) -> GreedySelection {
    let densities = density_order(instance, universe, t);
    let delta = universe
        .iter()
        .map(|e| instance.constraint_cost(e))
        .max()
        .unwrap_or_else(Rational::zero);
    let mut order = Vec::new();
    let mut total = Rational::zero();
    for &(e, _) in &densities {
        let c = instance.constraint_cost(e);
        // free elements never hurt; everything else stops once the target is met
        if total >= *target && !c.is_zero() {
            break;
        }
        total += c;
        order.push(e);
    }
    GreedySelection {
        order,
        total_cost: total,
        densities,
        delta,
    }
}

/// Overflowing density greedy for `min P(min_{e∈S} X_e > t)` under budget
/// `budget`: drop elements costing more than the budget, then add by
/// descending `-log2 P(X_e > t) / c_e` until the cost reaches the budget.
/// Everything but the last element fits the budget, and so does the last
/// element alone.
pub fn density_greedy(instance: &Instance, budget: &Rational, t: u32) -> GreedySelection {
    let pool: IdSet = instance
        .universe()
        .iter()
        .filter(|&e| instance.constraint_cost(e) <= *budget)
        .collect();
    greedy_until(instance, pool, t, budget)
}

/// Extended greedy over `universe`: like [`density_greedy`] but stops once
/// the cost reaches `budget + extra·δ`, `δ` the largest cost in `universe`.
pub fn ext_greedy(instance: &Instance, universe: IdSet, budget: &Rational, extra: usize, t: u32) -> GreedySelection {
    let delta = universe
        .iter()
        .map(|e| instance.constraint_cost(e))
        .max()
        .unwrap_or_else(Rational::zero);
    let target = budget + &delta * rational::int(extra as i64);
    greedy_until(instance, universe, t, &target)
}

#[derive(Debug, Clone, Serialize)]
pub struct BinLevel {
    pub level: u32,
    #[serde(serialize_with = "ser_rational")]
    pub low: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub high: Rational,
    pub chosen: Vec<usize>,
    #[serde(serialize_with = "ser_rational")]
    pub cost: Rational,
}

#[derive(Debug, Clone, Serialize)]
pub struct BinSelection {
    pub levels: Vec<BinLevel>,
    pub union: IdSet,
}

/// Elements with `c_e ≤ budget / i`, the universe of the extended greedy.
pub fn cheap_universe(instance: &Instance, budget: &Rational, i: usize) -> IdSet {
    let cap = budget / rational::int(i as i64);
    instance
        .universe()
        .iter()
        .filter(|&e| instance.constraint_cost(e) <= cap)
        .collect()
}

/// Cost binning for the expensive elements: level `j = 1..ceil(log2 i)`
/// takes up to `2^j` elements of highest `P(X_e ≤ t)` with cost in
/// `(max(B/2^j, B/i), B/2^{j-1}]`.
pub fn bin(instance: &Instance, budget: &Rational, i: usize, t: u32) -> BinSelection {
    assert!(i >= 1, "bin needs i >= 1");
    let z = ceil_log2(i as u64);
    let probs = instance.below_probs(t);
    let floor = budget / rational::int(i as i64);
    let mut levels = Vec::with_capacity(z as usize);
    let mut union = IdSet::EMPTY;
    for j in 1..=z {
        let pow = rational::int(1i64 << j);
        let low = std::cmp::max(budget / &pow, floor.clone());
        let high = budget * rational::int(2) / &pow;
        let mut bucket: Vec<usize> = instance
            .universe()
            .iter()
            .filter(|&e| {
                let c = instance.constraint_cost(e);
                low < c && c <= high
            })
            .collect();
        bucket.sort_by(|&a, &b| probs[b].cmp(&probs[a]).then(a.cmp(&b)));
        bucket.truncate(1usize << j);
        let cost = bucket.iter().map(|&e| instance.constraint_cost(e)).sum();
        union = union.union(bucket.iter().collect());
        levels.push(BinLevel {
            level: j,
            low,
            high,
            chosen: bucket,
            cost,
        });
    }
    BinSelection { levels, union }
}

#[derive(Debug, Clone, Serialize)]
pub struct RankKnapsackSelection {
    pub greedy: GreedySelection,
    pub bins: BinSelection,
    pub union: IdSet,
    #[serde(serialize_with = "ser_rational")]
    pub cost: Rational,
}

/// Non-adaptive i-heads solver: `G ∪ C` with `G` the extended greedy over
/// the cheap universe (budget `B`, extension `i`) and `C` the binning.
pub fn rank_knapsack_solver(instance: &Instance, budget: &Rational, i: usize, t: u32) -> RankKnapsackSelection {
    let greedy = ext_greedy(instance, cheap_universe(instance, budget, i), budget, i, t);
    let bins = bin(instance, budget, i, t);
    let union = greedy.set().union(bins.union);
    let cost = instance.set_cost_for_constraint(union);
    RankKnapsackSelection {
        greedy,
        bins,
        union,
        cost,
    }
}

/// Cost bound `3B + 2B·ceil(log2 i)` of [`rank_knapsack_solver`], as a
/// multiple of `B`.
pub fn rank_knapsack_factor(i: usize) -> usize {
    3 + 2 * ceil_log2(i as u64) as usize
}

/// Matroid greedy: scan by descending `P(X_e ≤ t)` and keep every element
/// that preserves independence. The result is a basis, in scan order.
pub fn mgreedy(instance: &Instance, matroid: &Matroid, t: u32) -> Vec<usize> {
    let probs = instance.below_probs(t);
    let mut order = matroid.ground().to_vec();
    order.sort_by(|&a, &b| probs[b].cmp(&probs[a]).then(a.cmp(&b)));
    let mut acc = IdSet::EMPTY;
    let mut out = Vec::new();
    for e in order {
        if matroid.independent_unchecked(acc.with(e)) {
            acc.insert(e);
            out.push(e);
        }
    }
    out
}

/// Adaptive matroid greedy for `max P(Mtrank(S) ≥ i)` with at most
/// `budget` probes: keep the accepted below-threshold set `T`; probe the
/// element of highest `P(X_e ≤ t)` that is independent together with `T`;
/// accept it when its weight is at most `t`.
#[derive(Debug, Clone)]
pub struct AdapMGreedy {
    pub inner: Matroid,
    pub budget: usize,
    pub t: u32,
    order: Vec<usize>,
}

impl AdapMGreedy {
    pub fn new(instance: &Instance, inner: &Matroid, budget: usize, t: u32) -> Self {
        let probs = instance.below_probs(t);
        let mut order = inner.ground().to_vec();
        order.sort_by(|&a, &b| probs[b].cmp(&probs[a]).then(a.cmp(&b)));
        AdapMGreedy {
            inner: inner.clone(),
            budget,
            t,
            order,
        }
    }
}

impl Policy for AdapMGreedy {
    fn name(&self) -> String {
        format!("adap-mgreedy(t={})", self.t)
    }

    fn budget(&self) -> PhaseBudget {
        PhaseBudget::Strict
    }

    fn run(&self, probe: &mut Prober<'_>) -> Result<()> {
        let mut probed = IdSet::EMPTY;
        let mut accepted = IdSet::EMPTY;
        while probed.len() < self.budget {
            let next = self
                .order
                .iter()
                .copied()
                .find(|&e| !probed.contains(e) && self.inner.independent_unchecked(accepted.with(e)));
            let Some(e) = next else { break };
            probed.insert(e);
            if probe.probe(e)? <= self.t {
                accepted.insert(e);
            }
        }
        Ok(())
    }
}

pub fn adap_mgreedy(instance: &Instance, inner: &Matroid, budget: usize, t: u32) -> Result<AdapMGreedy> {
    match instance.constraint {
        ConstraintSpec::Cardinality { .. } => Ok(AdapMGreedy::new(instance, inner, budget, t)),
        _ => Err(Error::invalid("adaptive matroid greedy needs a cardinality constraint")),
    }
}

/// Rectangle decomposition of `P(trank(G) ≥ ℓ)` along `ordering`:
/// `Σ_j [width(L_j) − width(L_{j−1})]·P(trank(G − L_j) ≥ ℓ − 1)` where
/// `L_j` is the first `j` elements of the ordering. Returns the absolute
/// difference to the direct value (zero for every ordering).
pub fn decomposition_check(instance: &Instance, set: IdSet, ordering: &[usize], t: u32, ell: usize) -> Result<Rational> {
    if set.is_empty() {
        return Err(Error::invalid("decomposition needs a nonempty set"));
    }
    if ell == 0 {
        return Err(Error::invalid("decomposition needs ell >= 1"));
    }
    let as_set: IdSet = ordering.iter().collect();
    if as_set != set || ordering.len() != set.len() {
        return Err(Error::invalid("ordering must list the set exactly once"));
    }
    let probs = instance.below_probs(t);
    let direct = prob_at_least(set.iter().map(|e| &probs[e]), ell);
    let mut prefix = IdSet::EMPTY;
    let mut prev_width = Rational::zero();
    let mut total = Rational::zero();
    for &e in ordering {
        prefix.insert(e);
        let w = width(prefix, t, instance);
        let rest = set.difference(prefix);
        let height = prob_at_least(rest.iter().map(|r| &probs[r]), ell - 1);
        total += (&w - &prev_width) * height;
        prev_width = w;
    }
    let diff = total - direct;
    Ok(if diff < Rational::zero() { -diff } else { diff })
}

/// Solver for the threshold problem of one objective index at one
/// threshold, used by the threshold search.
pub trait ThresholdSolver: Send + Sync {
    fn name(&self) -> String;

    /// Sub-policy for `value_i(S) ≤ t`, where `index` is the objective index
    /// `i` (1 for single-term objectives).
    fn policy_for(&self, instance: &Instance, index: usize, t: u32) -> Result<Box<dyn Policy + Send + Sync>>;

    /// Feasible sets used by one call, for the ledger bound.
    fn beta(&self, index: usize) -> usize;
}

fn knapsack_budget(instance: &Instance) -> Result<Rational> {
    instance
        .budget()
        .ok_or_else(|| Error::invalid("solver needs a knapsack or cardinality constraint"))
}

/// [`density_greedy`] as a threshold solver (min-element objectives).
#[derive(Debug, Clone, Copy, Default)]
pub struct DensitySolver;

impl ThresholdSolver for DensitySolver {
    fn name(&self) -> String {
        "density".into()
    }

    fn policy_for(&self, instance: &Instance, index: usize, t: u32) -> Result<Box<dyn Policy + Send + Sync>> {
        if index != 1 {
            return Err(Error::invalid("density greedy solves the single-head problem only"));
        }
        let sel = density_greedy(instance, &knapsack_budget(instance)?, t);
        Ok(Box::new(SetPolicy::augmented(&format!("density(t={t})"), sel.order, 2)))
    }

    fn beta(&self, _index: usize) -> usize {
        2
    }
}

/// [`ext_greedy`] on the cheap universe alone, as a threshold solver.
#[derive(Debug, Clone, Copy, Default)]
pub struct ExtGreedySolver;

impl ThresholdSolver for ExtGreedySolver {
    fn name(&self) -> String {
        "extgreedy".into()
    }

    fn policy_for(&self, instance: &Instance, index: usize, t: u32) -> Result<Box<dyn Policy + Send + Sync>> {
        let b = knapsack_budget(instance)?;
        let sel = ext_greedy(instance, cheap_universe(instance, &b, index), &b, index, t);
        Ok(Box::new(SetPolicy::augmented(&format!("extgreedy(i={index},t={t})"), sel.order, 3)))
    }

    fn beta(&self, _index: usize) -> usize {
        3
    }
}

/// [`bin`] alone, as a threshold solver.
#[derive(Debug, Clone, Copy, Default)]
pub struct BinSolver;

impl ThresholdSolver for BinSolver {
    fn name(&self) -> String {
        "bin".into()
    }

    fn policy_for(&self, instance: &Instance, index: usize, t: u32) -> Result<Box<dyn Policy + Send + Sync>> {
        let b = knapsack_budget(instance)?;
        let sel = bin(instance, &b, index, t);
        let beta = self.beta(index);
        Ok(Box::new(SetPolicy::augmented(&format!("bin(i={index},t={t})"), sel.union, beta)))
    }

    fn beta(&self, index: usize) -> usize {
        (2 * ceil_log2(index as u64) as usize).max(1)
    }
}

/// Non-adaptive `G ∪ C`, or with `handoff` the adaptive variant that probes
/// `C` first and then the extended greedy for `ℓ* = max(i − trank(C), 1)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct RankKnapsackSolver {
    pub handoff: bool,
}

impl ThresholdSolver for RankKnapsackSolver {
    fn name(&self) -> String {
        if self.handoff {
            "rank-knapsack-handoff".into()
        } else {
            "rank-knapsack".into()
        }
    }

    fn policy_for(&self, instance: &Instance, index: usize, t: u32) -> Result<Box<dyn Policy + Send + Sync>> {
        let b = knapsack_budget(instance)?;
        let beta = self.beta(index);
        if self.handoff {
            return Ok(Box::new(BinHandoff {
                budget: b,
                i: index,
                t,
                beta,
            }));
        }
        let sel = rank_knapsack_solver(instance, &b, index, t);
        let mut order = sel.greedy.order.clone();
        order.extend(sel.bins.union.difference(sel.greedy.set()).iter());
        Ok(Box::new(SetPolicy::augmented(&format!("rank-knapsack(i={index},t={t})"), order, beta)))
    }

    fn beta(&self, index: usize) -> usize {
        rank_knapsack_factor(index)
    }
}

/// Probes the binning set, then the extended greedy set for the number of
/// heads still missing.
#[derive(Debug, Clone)]
pub struct BinHandoff {
    pub budget: Rational,
    pub i: usize,
    pub t: u32,
    pub beta: usize,
}

impl Policy for BinHandoff {
    fn name(&self) -> String {
        format!("rank-knapsack-handoff(i={},t={})", self.i, self.t)
    }

    fn budget(&self) -> PhaseBudget {
        PhaseBudget::Augmented(self.beta)
    }

    fn run(&self, probe: &mut Prober<'_>) -> Result<()> {
        let instance = probe.instance();
        let c = bin(instance, &self.budget, self.i, self.t);
        let mut heads = 0;
        for e in c.union {
            if probe.probe(e)? <= self.t {
                heads += 1;
            }
        }
        let ell = self.i.saturating_sub(heads).max(1);
        let g = ext_greedy(instance, cheap_universe(instance, &self.budget, self.i), &self.budget, ell, self.t);
        for e in g.order {
            if !c.union.contains(e) {
                probe.probe(e)?;
            }
        }
        Ok(())
    }
}

/// [`mgreedy`] on the constraint matroid.
#[derive(Debug, Clone, Copy, Default)]
pub struct MGreedySolver;

impl ThresholdSolver for MGreedySolver {
    fn name(&self) -> String {
        "mgreedy".into()
    }

    fn policy_for(&self, instance: &Instance, _index: usize, t: u32) -> Result<Box<dyn Policy + Send + Sync>> {
        let mat = instance
            .outer_matroid()
            .ok_or_else(|| Error::invalid("mgreedy needs a matroid constraint"))?;
        let mut p = SetPolicy::strict(mgreedy(instance, mat, t));
        p.name = format!("mgreedy(t={t})");
        Ok(Box::new(p))
    }

    fn beta(&self, _index: usize) -> usize {
        1
    }
}

/// [`AdapMGreedy`] on the inner matroid with the cardinality budget.
#[derive(Debug, Clone, Copy, Default)]
pub struct AdapMGreedySolver;

impl ThresholdSolver for AdapMGreedySolver {
    fn name(&self) -> String {
        "adap-mgreedy".into()
    }

    fn policy_for(&self, instance: &Instance, _index: usize, t: u32) -> Result<Box<dyn Policy + Send + Sync>> {
        let inner = instance
            .inner_matroid()
            .ok_or_else(|| Error::invalid("adaptive matroid greedy needs an inner matroid"))?;
        let ConstraintSpec::Cardinality { budget } = instance.constraint else {
            return Err(Error::invalid("adaptive matroid greedy needs a cardinality constraint"));
        };
        Ok(Box::new(adap_mgreedy(instance, inner, budget, t)?))
    }

    fn beta(&self, _index: usize) -> usize {
        1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matroid::MatroidSpec;
    use crate::model::{Element, ObjectiveSpec, WeightDistribution};
    use crate::objective::RankKind;
    use crate::policy::exact_success_probability;
    use crate::rational::{int, ratio};
    use num_traits::One;

    /// Coins with below-threshold probability `p` (weight 0) else weight 1.
    fn knapsack(items: &[(Rational, Rational)], budget: Rational) -> Instance {
        let elements = items
            .iter()
            .enumerate()
            .map(|(id, (cost, p))| Element {
                id,
                cost: cost.clone(),
                dist: WeightDistribution::two_point(0, p.clone(), 1),
            })
            .collect();
        Instance::new(
            elements,
            1,
            1,
            ConstraintSpec::Knapsack { budget },
            ObjectiveSpec::MinElement,
            None,
            None,
        )
        .unwrap()
    }

    #[test]
    fn density_greedy_single_cheap_element() {
        let inst = knapsack(&[(int(1), ratio(1, 3))], int(2));
        assert_eq!(density_greedy(&inst, &int(2), 0).order, vec![0]);
    }

    #[test]
    fn sure_elements_come_first() {
        let inst = knapsack(
            &[(int(1), ratio(1, 2)), (int(2), Rational::one()), (int(5), ratio(9, 10))],
            int(3),
        );
        let g = density_greedy(&inst, &int(3), 0);
        assert_eq!(g.order, vec![1, 0]);
        assert_eq!(g.densities[0], (1, f64::INFINITY));
        // element 2 costs more than the budget and is excluded up front
        assert!(g.densities.iter().all(|&(e, _)| e != 2));
    }

    #[test]
    fn density_greedy_overflows_once() {
        let inst = knapsack(
            &[(int(2), ratio(1, 2)), (int(2), ratio(1, 2)), (int(2), ratio(1, 4))],
            int(3),
        );
        let g = density_greedy(&inst, &int(3), 0);
        assert_eq!(g.order, vec![0, 1]);
        assert_eq!(g.total_cost, int(4));
    }

    #[test]
    fn zero_cost_elements() {
        let inst = knapsack(&[(int(0), ratio(1, 2)), (int(0), Rational::zero()), (int(1), ratio(1, 2))], int(0));
        // budget zero still takes the free useful element, never the useless one
        assert_eq!(density_greedy(&inst, &int(0), 0).order, vec![0]);
    }

    #[test]
    fn ext_greedy_without_extension_is_density_rule() {
        let inst = knapsack(
            &[(int(1), ratio(1, 2)), (int(2), ratio(3, 4)), (int(1), ratio(1, 5)), (int(3), ratio(9, 10))],
            int(3),
        );
        let a = ext_greedy(&inst, inst.universe(), &int(3), 0, 0);
        let b = density_greedy(&inst, &int(3), 0);
        assert_eq!(a.order, b.order);
    }

    #[test]
    fn ext_greedy_cost_bound_on_cheap_universe() {
        let inst = knapsack(
            &(0..8).map(|j| (ratio(1 + j % 3, 2), ratio(1 + j, 10))).collect::<Vec<_>>(),
            int(3),
        );
        let b = int(3);
        for i in 1..=4 {
            let u = cheap_universe(&inst, &b, i);
            let g = ext_greedy(&inst, u, &b, i, 0);
            assert!(g.total_cost <= &b + &g.delta * int(i as i64 + 1));
            assert!(g.total_cost <= &b * int(3));
        }
    }

    #[test]
    fn bin_levels() {
        let inst = knapsack(&[(int(1), ratio(1, 2))], int(8));
        assert!(bin(&inst, &int(8), 1, 0).levels.is_empty());
        // everything at or below B/i leaves every bucket empty
        let cheap = knapsack(&[(int(2), ratio(1, 2)), (int(1), ratio(1, 2))], int(8));
        assert!(bin(&cheap, &int(8), 4, 0).union.is_empty());

        let items: Vec<_> = [5, 8, 6, 3, 4, 3, 3, 3, 2]
            .iter()
            .enumerate()
            .map(|(j, &c)| (int(c), ratio(j as i64 + 1, 10)))
            .collect();
        let inst = knapsack(&items, int(8));
        let c = bin(&inst, &int(8), 4, 0);
        assert_eq!(c.levels.len(), 2);
        assert_eq!((c.levels[0].low.clone(), c.levels[0].high.clone()), (int(4), int(8)));
        assert_eq!((c.levels[1].low.clone(), c.levels[1].high.clone()), (int(2), int(4)));
        // level 1: costs in (4,8], two best by probability: ids 2 (p=.3) and 1 (p=.2)
        assert_eq!(c.levels[0].chosen, vec![2, 1]);
        // level 2: costs in (2,4]: ids 3..=7 minus overflow; four best are 7,6,5,4
        assert_eq!(c.levels[1].chosen, vec![7, 6, 5, 4]);
        for level in &c.levels {
            assert!(level.cost <= int(16));
        }
    }

    #[test]
    fn unit_costs_reduce_to_extended_budget() {
        let items: Vec<_> = (0..8).map(|j| (int(1), ratio(j + 1, 10))).collect();
        let inst = knapsack(&items, int(3));
        let sel = rank_knapsack_solver(&inst, &int(3), 2, 0);
        assert!(sel.bins.union.is_empty());
        assert_eq!(sel.union.len(), 5);
        assert_eq!(sel.union, [7, 6, 5, 4, 3].iter().collect());
    }

    #[test]
    fn mgreedy_examples() {
        let items: Vec<_> = (0..5).map(|j| (int(1), ratio([3, 9, 1, 7, 5][j], 10))).collect();
        let inst = knapsack(&items, int(1));
        assert_eq!(mgreedy(&inst, &Matroid::uniform(IdSet::full(5), 2), 0), vec![1, 3]);
        assert_eq!(mgreedy(&inst, &Matroid::uniform(IdSet::full(5), 1), 0), vec![1]);
    }

    fn cardinality_with_inner(ps: &[Rational], budget: usize, inner: MatroidSpec) -> Instance {
        let elements = ps
            .iter()
            .enumerate()
            .map(|(id, p)| Element {
                id,
                cost: Rational::one(),
                dist: WeightDistribution::two_point(0, p.clone(), 1),
            })
            .collect();
        let k = Matroid::from_spec(&inner).unwrap().full_rank();
        Instance::new(
            elements,
            1,
            k,
            ConstraintSpec::Cardinality { budget },
            ObjectiveSpec::MinBasis,
            Some(inner),
            None,
        )
        .unwrap()
    }

    #[test]
    fn adap_mgreedy_all_heads_probes_best() {
        let ps: Vec<_> = [2, 8, 5, 9, 1].iter().map(|&p| ratio(p, 10)).collect();
        let inner = MatroidSpec::Uniform { rank: 5, ground: (0..5).collect() };
        let inst = cardinality_with_inner(&ps, 3, inner);
        let pol = AdapMGreedySolver.policy_for(&inst, 1, 0).unwrap();
        let obj = crate::objective::Objective::from_instance(&inst);
        let r = crate::policy::execute(&*pol, &inst, &crate::model::Realization(vec![0; 5]), &obj).unwrap();
        assert_eq!(r.selection, [3, 1, 2].iter().collect());
    }

    #[test]
    fn adap_mgreedy_cannot_beat_small_budget() {
        let ps: Vec<_> = [2, 8, 5].iter().map(|&p| ratio(p, 10)).collect();
        let inner = MatroidSpec::Uniform { rank: 3, ground: (0..3).collect() };
        let inst = cardinality_with_inner(&ps, 1, inner);
        let inner = inst.inner_matroid().unwrap().clone();
        let pol = AdapMGreedySolver.policy_for(&inst, 1, 0).unwrap();
        let p = exact_success_probability(&*pol, &inst, 0, 2, &RankKind::Mtrank(inner)).unwrap();
        assert!(p.is_zero());
    }

    #[test]
    fn decomposition_examples() {
        let items: Vec<_> = (0..5).map(|j| (int(1), ratio(j + 1, 7))).collect();
        let inst = knapsack(&items, int(5));
        let single = decomposition_check(&inst, IdSet::singleton(2), &[2], 0, 1).unwrap();
        assert!(single.is_zero());
        let all = IdSet::full(5);
        for ell in 1..=5 {
            assert!(decomposition_check(&inst, all, &[0, 1, 2, 3, 4], 0, ell).unwrap().is_zero());
            assert!(decomposition_check(&inst, all, &[4, 2, 0, 3, 1], 0, ell).unwrap().is_zero());
        }
        assert!(decomposition_check(&inst, all, &[0, 1], 0, 1).is_err());
        assert!(decomposition_check(&inst, IdSet::EMPTY, &[], 0, 1).is_err());
    }
}
