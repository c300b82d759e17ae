//! Brute-force optimal values on small instances.
//!
//! * Rank problems (`max P(rank(S) ≥ i)`) are solved by backward induction
//!   over `(probed set, heads)` after collapsing every weight to the coin
//!   `X_e ≤ t`, which happens with probability `p_e`.
//! * The matroid threshold rank under a cardinality budget is solved over
//!   `(probed set, accepted set)` states, where accepted elements are the
//!   below-threshold ones kept independent (a contraction of the inner
//!   matroid); [`opt_adaptive_mtrank_plain`] solves the same problem over
//!   `(probed set, below-threshold set)` without contraction.
//! * Expectation problems are solved over full belief states (the probed
//!   set and the values seen).
//! * Non-adaptive optima enumerate every feasible set.
//!
//! Every DP allows stopping at any time.

use std::collections::{HashMap, HashSet};
use std::sync::{Arc, Mutex};

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::idset::IdSet;
use crate::matroid::Matroid;
use crate::model::{enumerate_with_cap, state_cap, ConstraintSpec, Instance};
use crate::objective::{prob_at_least, Objective, RankKind};
use crate::policy::{PhaseBudget, Policy, Prober, SetPolicy};
use crate::rational::{self, Rational};
use crate::solvers::ThresholdSolver;

pub const RANK_MAX_N: usize = 20;
pub const MATROID_MAX_GROUND: usize = 14;
pub const MTRANK_MAX_GROUND: usize = 12;
pub const NONADAPTIVE_MAX_N: usize = 20;
pub const TREE_MAX_N: usize = 5;

/// Value of an oracle together with the number of DP states it touched.
#[derive(Debug, Clone, Serialize)]
pub struct OracleValue {
    #[serde(serialize_with = "ser_rational")]
    pub value: Rational,
    pub states_visited: usize,
}

fn ser_rational<S: serde::Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    rational::ExactValue::from(r).serialize(s)
}

fn too_large(what: &str, size: usize, limit: usize) -> Error {
    Error::TooLarge(format!("{what} has {size} elements, limit is {limit}"))
}

/// Which elements may be added to a probed set.
#[derive(Clone)]
enum Admit {
    /// Total constraint cost at most the budget.
    Knapsack { costs: Vec<Rational>, budget: Rational },
    /// Independent in the matroid.
    Matroid(Matroid),
}

impl Admit {
    fn allows(&self, probed: IdSet, e: usize) -> bool {
        match self {
            Admit::Knapsack { costs, budget } => {
                let spent: Rational = probed.iter().map(|j| &costs[j]).sum();
                spent + &costs[e] <= *budget
            }
            Admit::Matroid(m) => m.independent_unchecked(probed.with(e)),
        }
    }
}

/// Backward induction for `max P(heads ≥ target)`.
struct RankDp {
    probs: Vec<Rational>,
    candidates: IdSet,
    admit: Admit,
    target: usize,
    memo: HashMap<(u64, usize), Rational>,
}

impl RankDp {
    fn new(probs: Vec<Rational>, candidates: IdSet, admit: Admit, target: usize) -> Self {
        RankDp {
            probs,
            candidates,
            admit,
            target,
            memo: HashMap::new(),
        }
    }

    fn value(&mut self, probed: IdSet, heads: usize) -> Rational {
        if heads >= self.target {
            return Rational::one();
        }
        if let Some(v) = self.memo.get(&(probed.mask(), heads)) {
            return v.clone();
        }
        let mut best = Rational::zero();
        for e in self.candidates.difference(probed) {
            if !self.admit.allows(probed, e) {
                continue;
            }
            let q = self.continuation(probed, heads, e);
            if q > best {
                best = q;
            }
        }
        self.memo.insert((probed.mask(), heads), best.clone());
        best
    }

    fn continuation(&mut self, probed: IdSet, heads: usize, e: usize) -> Rational {
        let p = self.probs[e].clone();
        let next = probed.with(e);
        let up = self.value(next, heads + 1);
        let down = self.value(next, heads);
        &p * up + (Rational::one() - &p) * down
    }

    /// Best element to probe next (smallest id among ties), or `None` when
    /// stopping is optimal.
    fn best_action(&mut self, probed: IdSet, heads: usize) -> Option<usize> {
        if heads >= self.target {
            return None;
        }
        let mut best: Option<(usize, Rational)> = None;
        for e in self.candidates.difference(probed) {
            if !self.admit.allows(probed, e) {
                continue;
            }
            let q = self.continuation(probed, heads, e);
            if best.as_ref().is_none_or(|(_, b)| q > *b) {
                best = Some((e, q));
            }
        }
        best.filter(|(_, q)| !q.is_zero()).map(|(e, _)| e)
    }
}

fn knapsack_admit(instance: &Instance, budget: &Rational) -> Admit {
    Admit::Knapsack {
        costs: (0..instance.n()).map(|e| instance.constraint_cost(e)).collect(),
        budget: budget.clone(),
    }
}

/// Optimal strict adaptive `P(trank ≥ i)` under the knapsack budget `B`
/// (constraint costs: one per element for cardinality budgets).
pub fn opt_adaptive_rank_knapsack(instance: &Instance, budget: &Rational, i: usize, t: u32) -> Result<OracleValue> {
    opt_adaptive_rank_knapsack_within(instance, instance.universe(), budget, i, t)
}

/// As [`opt_adaptive_rank_knapsack`] for policies confined to `universe`.
pub fn opt_adaptive_rank_knapsack_within(
    instance: &Instance,
    universe: IdSet,
    budget: &Rational,
    i: usize,
    t: u32,
) -> Result<OracleValue> {
    if instance.n() > RANK_MAX_N {
        return Err(too_large("rank knapsack instance", instance.n(), RANK_MAX_N));
    }
    let mut dp = RankDp::new(instance.below_probs(t), universe, knapsack_admit(instance, budget), i);
    let value = dp.value(IdSet::EMPTY, 0);
    Ok(OracleValue {
        value,
        states_visited: dp.memo.len(),
    })
}

/// Optimal adaptive `P(trank ≥ i)` over policies whose probed set stays
/// independent in `matroid`.
pub fn opt_adaptive_rank_matroid(instance: &Instance, matroid: &Matroid, i: usize, t: u32) -> Result<OracleValue> {
    let g = matroid.ground().len();
    if g > MATROID_MAX_GROUND {
        return Err(too_large("matroid ground", g, MATROID_MAX_GROUND));
    }
    let mut dp = RankDp::new(instance.below_probs(t), matroid.ground(), Admit::Matroid(matroid.clone()), i);
    let value = dp.value(IdSet::EMPTY, 0);
    Ok(OracleValue {
        value,
        states_visited: dp.memo.len(),
    })
}

/// The optimal adaptive i-heads policy read off the DP table.
pub struct OptimalRankPolicy {
    name: String,
    budget: PhaseBudget,
    t: u32,
    dp: Mutex<RankDp>,
}

impl OptimalRankPolicy {
    /// Optimal strict knapsack policy for `P(trank ≥ i)` at threshold `t`.
    pub fn knapsack(instance: &Instance, budget: &Rational, i: usize, t: u32) -> Result<Self> {
        if instance.n() > RANK_MAX_N {
            return Err(too_large("rank knapsack instance", instance.n(), RANK_MAX_N));
        }
        let mut dp = RankDp::new(instance.below_probs(t), instance.universe(), knapsack_admit(instance, budget), i);
        dp.value(IdSet::EMPTY, 0);
        Ok(OptimalRankPolicy {
            name: format!("opt-rank(i={i},t={t})"),
            budget: PhaseBudget::Strict,
            t,
            dp: Mutex::new(dp),
        })
    }

    /// Optimal policy confined to independent sets of `matroid`.
    pub fn matroid(instance: &Instance, matroid: &Matroid, i: usize, t: u32) -> Result<Self> {
        let mut dp = RankDp::new(instance.below_probs(t), matroid.ground(), Admit::Matroid(matroid.clone()), i);
        dp.value(IdSet::EMPTY, 0);
        Ok(OptimalRankPolicy {
            name: format!("opt-rank-matroid(i={i},t={t})"),
            budget: PhaseBudget::Strict,
            t,
            dp: Mutex::new(dp),
        })
    }

    /// Optimal success probability.
    pub fn value(&self) -> Rational {
        self.dp.lock().expect("dp lock").value(IdSet::EMPTY, 0)
    }
}

impl Policy for OptimalRankPolicy {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn budget(&self) -> PhaseBudget {
        self.budget
    }

    fn run(&self, probe: &mut Prober<'_>) -> Result<()> {
        let t = self.t;
        let mut probed = IdSet::EMPTY;
        let mut heads = 0;
        loop {
            let next = self.dp.lock().expect("dp lock").best_action(probed, heads);
            let Some(e) = next else { break };
            probed.insert(e);
            if probe.probe(e)? <= t {
                heads += 1;
            }
        }
        Ok(())
    }
}

struct Shared(Arc<OptimalRankPolicy>);

impl Policy for Shared {
    fn name(&self) -> String {
        self.0.name()
    }

    fn budget(&self) -> PhaseBudget {
        self.0.budget()
    }

    fn run(&self, probe: &mut Prober<'_>) -> Result<()> {
        self.0.run(probe)
    }
}

/// Exact (`α = 1`) threshold solver for knapsack and cardinality
/// instances: the optimal strict adaptive i-heads policy, cached per
/// `(i, t)`.
#[derive(Default)]
pub struct OptimalRankSolver {
    cache: Mutex<HashMap<(usize, u32), Arc<OptimalRankPolicy>>>,
}

impl OptimalRankSolver {
    pub fn new() -> Self {
        Self::default()
    }
}

impl ThresholdSolver for OptimalRankSolver {
    fn name(&self) -> String {
        "optimal".into()
    }

    fn policy_for(&self, instance: &Instance, index: usize, t: u32) -> Result<Box<dyn Policy + Send + Sync>> {
        let budget = instance
            .budget()
            .ok_or_else(|| Error::invalid("the optimal rank solver needs a knapsack or cardinality constraint"))?;
        let mut cache = self.cache.lock().expect("cache lock");
        let pol = match cache.get(&(index, t)) {
            Some(p) => Arc::clone(p),
            None => {
                let p = Arc::new(OptimalRankPolicy::knapsack(instance, &budget, index, t)?);
                cache.insert((index, t), Arc::clone(&p));
                p
            }
        };
        Ok(Box::new(Shared(pol)))
    }

    fn beta(&self, _index: usize) -> usize {
        1
    }
}

/// Exact threshold solver for min-element objectives: the best strict
/// non-adaptive set for `min P(min_{e∈S} X_e > t)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct NonAdaptiveThresholdSolver;

impl ThresholdSolver for NonAdaptiveThresholdSolver {
    fn name(&self) -> String {
        "optimal-set".into()
    }

    fn policy_for(&self, instance: &Instance, index: usize, t: u32) -> Result<Box<dyn Policy + Send + Sync>> {
        if index != 1 {
            return Err(Error::invalid("the optimal-set solver handles the single-head problem only"));
        }
        let best = opt_nonadaptive(instance, &NonAdaptiveTarget::Threshold { t })?;
        let mut p = SetPolicy::strict(best.set);
        p.name = format!("optimal-set(t={t})");
        Ok(Box::new(p))
    }

    fn beta(&self, _index: usize) -> usize {
        1
    }
}

/// Optimal adaptive `P(Mtrank(S) ≥ i)` with at most `budget` probes,
/// solved over contractions of the inner matroid: after accepting the
/// below-threshold independent set `A`, the remaining problem lives in
/// `M / A` with target `i − |A|`, and only elements independent in `M / A`
/// are worth probing.
pub fn opt_adaptive_mtrank_cardinality(
    instance: &Instance,
    inner: &Matroid,
    budget: usize,
    i: usize,
    t: u32,
) -> Result<OracleValue> {
    let g = inner.ground().len();
    if g > MTRANK_MAX_GROUND {
        return Err(too_large("inner matroid ground", g, MTRANK_MAX_GROUND));
    }
    struct Dp<'a> {
        inner: &'a Matroid,
        probs: Vec<Rational>,
        budget: usize,
        target: usize,
        memo: HashMap<(u64, u64), Rational>,
    }
    impl Dp<'_> {
        fn value(&mut self, probed: IdSet, accepted: IdSet) -> Rational {
            if accepted.len() >= self.target {
                return Rational::one();
            }
            let left = self.budget - probed.len();
            if left < self.target - accepted.len() {
                return Rational::zero();
            }
            if let Some(v) = self.memo.get(&(probed.mask(), accepted.mask())) {
                return v.clone();
            }
            let contracted = self.inner.contract(accepted).expect("accepted set is independent");
            let mut best = Rational::zero();
            for e in self.inner.ground().difference(probed) {
                if !contracted.independent_unchecked(IdSet::singleton(e)) {
                    continue;
                }
                let p = self.probs[e].clone();
                let next = probed.with(e);
                let q = &p * self.value(next, accepted.with(e)) + (Rational::one() - &p) * self.value(next, accepted);
                if q > best {
                    best = q;
                }
            }
            self.memo.insert((probed.mask(), accepted.mask()), best.clone());
            best
        }
    }
    let mut dp = Dp {
        inner,
        probs: instance.below_probs(t),
        budget,
        target: i,
        memo: HashMap::new(),
    };
    let value = dp.value(IdSet::EMPTY, IdSet::EMPTY);
    Ok(OracleValue {
        value,
        states_visited: dp.memo.len(),
    })
}

/// The same optimum as [`opt_adaptive_mtrank_cardinality`], computed over
/// `(probed set, below-threshold set)` with success tested by the rank of
/// the below-threshold set and no contraction.
pub fn opt_adaptive_mtrank_plain(
    instance: &Instance,
    inner: &Matroid,
    budget: usize,
    i: usize,
    t: u32,
) -> Result<OracleValue> {
    let g = inner.ground().len();
    if g > 10 {
        return Err(too_large("inner matroid ground", g, 10));
    }
    struct Dp<'a> {
        inner: &'a Matroid,
        probs: Vec<Rational>,
        budget: usize,
        target: usize,
        memo: HashMap<(u64, u64), Rational>,
    }
    impl Dp<'_> {
        fn value(&mut self, probed: IdSet, below: IdSet) -> Rational {
            if self.inner.rank(below) >= self.target {
                return Rational::one();
            }
            if probed.len() >= self.budget {
                return Rational::zero();
            }
            if let Some(v) = self.memo.get(&(probed.mask(), below.mask())) {
                return v.clone();
            }
            let mut best = Rational::zero();
            for e in self.inner.ground().difference(probed) {
                let p = self.probs[e].clone();
                let next = probed.with(e);
                let q = &p * self.value(next, below.with(e)) + (Rational::one() - &p) * self.value(next, below);
                if q > best {
                    best = q;
                }
            }
            self.memo.insert((probed.mask(), below.mask()), best.clone());
            best
        }
    }
    let mut dp = Dp {
        inner,
        probs: instance.below_probs(t),
        budget,
        target: i,
        memo: HashMap::new(),
    };
    let value = dp.value(IdSet::EMPTY, IdSet::EMPTY);
    Ok(OracleValue {
        value,
        states_visited: dp.memo.len(),
    })
}

/// Number of belief states `Σ_S Π_{e∈S} |support(e)|` over feasible `S`.
fn belief_state_count(instance: &Instance) -> u128 {
    instance
        .universe()
        .subsets()
        .filter(|&s| instance.is_feasible(s))
        .map(|s| instance.outcome_count(s))
        .fold(0u128, |a, b| a.saturating_add(b))
}

/// Optimal adaptive `E[f(S)]` over strict-feasible policies.
pub fn opt_adaptive_expectation(instance: &Instance, objective: &Objective) -> Result<OracleValue> {
    if instance.n() > NONADAPTIVE_MAX_N {
        return Err(too_large("expectation instance", instance.n(), NONADAPTIVE_MAX_N));
    }
    let cap = state_cap();
    let needed = belief_state_count(instance);
    if needed > cap {
        return Err(Error::CapExceeded { needed, cap });
    }
    struct Dp<'a> {
        instance: &'a Instance,
        objective: &'a Objective,
        memo: HashMap<(u64, Vec<u32>), Rational>,
    }
    impl Dp<'_> {
        fn value(&mut self, probed: IdSet, x: &mut Vec<u32>) -> Rational {
            let key: Vec<u32> = probed.iter().map(|e| x[e]).collect();
            if let Some(v) = self.memo.get(&(probed.mask(), key.clone())) {
                return v.clone();
            }
            let here = self.objective.value(probed, x);
            let mut best = rational::int(here as i64);
            if here > 0 {
                for e in self.instance.universe().difference(probed) {
                    let next = probed.with(e);
                    if !self.instance.is_feasible(next) {
                        continue;
                    }
                    let mut q = Rational::zero();
                    for (w, p) in self.instance.element(e).dist.support().to_vec() {
                        x[e] = w;
                        q += p * self.value(next, x);
                    }
                    x[e] = self.instance.m;
                    if q < best {
                        best = q;
                    }
                }
            }
            self.memo.insert((probed.mask(), key), best.clone());
            best
        }
    }
    let mut dp = Dp {
        instance,
        objective,
        memo: HashMap::new(),
    };
    let mut x = vec![instance.m; instance.n()];
    let value = dp.value(IdSet::EMPTY, &mut x);
    Ok(OracleValue {
        value,
        states_visited: dp.memo.len(),
    })
}

/// Target of a non-adaptive optimization.
#[derive(Debug, Clone)]
pub enum NonAdaptiveTarget {
    /// Minimize `E[f(S)]`.
    Expectation(Objective),
    /// Minimize `P(min_{e∈S} X_e > t)`.
    Threshold { t: u32 },
    /// Maximize `P(rank_t(S) ≥ i)`.
    Rank { t: u32, i: usize, kind: RankKind },
}

/// Best feasible set and its value; the first optimal set in increasing
/// bitmask order.
#[derive(Debug, Clone, Serialize)]
pub struct NonAdaptiveOptimum {
    #[serde(serialize_with = "ser_rational")]
    pub value: Rational,
    pub set: IdSet,
    pub sets_examined: usize,
}

/// `E[f(S)]` for a fixed set, by enumerating the outcomes of `S`.
pub fn set_expectation(instance: &Instance, objective: &Objective, s: IdSet) -> Result<Rational> {
    let mut total = Rational::zero();
    for (x, p) in enumerate_with_cap(instance, s, state_cap())? {
        total += p * rational::int(objective.value(s, x.weights()) as i64);
    }
    Ok(total)
}

/// `P(rank_t(S) ≥ i)` for a fixed set.
pub fn set_rank_probability(instance: &Instance, s: IdSet, t: u32, i: usize, kind: &RankKind) -> Result<Rational> {
    match kind {
        RankKind::Trank => {
            let probs = instance.below_probs(t);
            Ok(prob_at_least(s.iter().map(|e| &probs[e]), i))
        }
        RankKind::Mtrank(inner) => {
            let probs = instance.below_probs(t);
            let mut total = Rational::zero();
            for below in s.subsets() {
                if inner.rank(below) < i {
                    continue;
                }
                let p = s.iter().fold(Rational::one(), |acc, e| {
                    if below.contains(e) {
                        acc * &probs[e]
                    } else {
                        acc * (Rational::one() - &probs[e])
                    }
                });
                total += p;
            }
            Ok(total)
        }
    }
}

/// Exhaustive search over strict-feasible sets.
pub fn opt_nonadaptive(instance: &Instance, target: &NonAdaptiveTarget) -> Result<NonAdaptiveOptimum> {
    if instance.n() > NONADAPTIVE_MAX_N {
        return Err(too_large("non-adaptive instance", instance.n(), NONADAPTIVE_MAX_N));
    }
    let mut best: Option<(Rational, IdSet)> = None;
    let mut examined = 0;
    let mut sets: Vec<IdSet> = instance
        .universe()
        .subsets()
        .filter(|&s| instance.is_feasible(s))
        .collect();
    sets.sort_by_key(|s| s.mask());
    for s in sets {
        examined += 1;
        let (v, better): (Rational, fn(&Rational, &Rational) -> bool) = match target {
            NonAdaptiveTarget::Expectation(obj) => (set_expectation(instance, obj, s)?, |a, b| a < b),
            NonAdaptiveTarget::Threshold { t } => (
                s.iter()
                    .fold(Rational::one(), |acc, e| acc * instance.element(e).dist.above_prob(*t)),
                |a, b| a < b,
            ),
            NonAdaptiveTarget::Rank { t, i, kind } => (set_rank_probability(instance, s, *t, *i, kind)?, |a, b| a > b),
        };
        if best.as_ref().is_none_or(|(b, _)| better(&v, b)) {
            best = Some((v, s));
        }
    }
    let (value, set) = best.expect("the empty set is always feasible");
    Ok(NonAdaptiveOptimum {
        value,
        set,
        sets_examined: examined,
    })
}

/// Independent check of [`opt_adaptive_rank_knapsack`] for `n ≤ 5`: builds
/// every decision tree as the set of coin-outcome profiles on which it
/// succeeds (a bitmask over the `2^n` profiles) and takes the most likely
/// achievable set.
pub fn opt_rank_knapsack_by_trees(instance: &Instance, budget: &Rational, i: usize, t: u32) -> Result<Rational> {
    let n = instance.n();
    if n > TREE_MAX_N {
        return Err(too_large("decision-tree enumeration", n, TREE_MAX_N));
    }
    let probs = instance.below_probs(t);
    let admit = knapsack_admit(instance, budget);
    let profiles = 1usize << n;
    let all: u64 = if profiles == 64 { u64::MAX } else { (1u64 << profiles) - 1 };
    // profiles where coin e shows heads
    let heads_of: Vec<u64> = (0..n)
        .map(|e| (0..profiles).filter(|x| x >> e & 1 == 1).fold(0u64, |acc, x| acc | 1 << x))
        .collect();

    fn trees(
        probed: IdSet,
        heads: usize,
        target: usize,
        n: usize,
        admit: &Admit,
        heads_of: &[u64],
        all: u64,
    ) -> HashSet<u64> {
        let mut out = HashSet::new();
        if heads >= target {
            out.insert(all);
            return out;
        }
        // stopping succeeds nowhere
        out.insert(0);
        for e in 0..n {
            if probed.contains(e) || !admit.allows(probed, e) {
                continue;
            }
            let yes = trees(probed.with(e), heads + 1, target, n, admit, heads_of, all);
            let no = trees(probed.with(e), heads, target, n, admit, heads_of, all);
            for &y in &yes {
                for &z in &no {
                    out.insert((y & heads_of[e]) | (z & !heads_of[e] & all));
                }
            }
        }
        out
    }

    let profile_prob: Vec<Rational> = (0..profiles)
        .map(|x| {
            (0..n).fold(Rational::one(), |acc, e| {
                if x >> e & 1 == 1 {
                    acc * &probs[e]
                } else {
                    acc * (Rational::one() - &probs[e])
                }
            })
        })
        .collect();
    let achievable = trees(IdSet::EMPTY, 0, i, n, &admit, &heads_of, all);
    Ok(achievable
        .into_iter()
        .map(|set| {
            (0..profiles)
                .filter(|&x| set >> x & 1 == 1)
                .map(|x| profile_prob[x].clone())
                .sum::<Rational>()
        })
        .max()
        .unwrap_or_else(Rational::zero))
}

/// Knapsack or cardinality budget of the instance as a rational.
pub fn knapsack_budget(instance: &Instance) -> Result<Rational> {
    match &instance.constraint {
        ConstraintSpec::Matroid(_) => Err(Error::invalid("instance has a matroid constraint")),
        _ => Ok(instance.budget().expect("knapsack or cardinality")),
    }
}
