//! Adaptive policies, the probing executor, and policy evaluation.
//!
//! A policy never sees a [`Realization`]. It drives a [`Prober`], which
//! reveals a weight only when the policy probes the element, and keeps a
//! per-phase feasibility ledger. Composite policies (the threshold search
//! and the sum-of-`k` driver) run sub-policies as phases; an element probed
//! in an earlier phase may be selected again by a later phase, in which case
//! the cached weight is returned and its cost is charged to the later phase.

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::idset::IdSet;
use crate::matroid::Matroid;
use crate::model::{enumerate_realizations, sample_realization, ConstraintSpec, Instance, Realization};
use crate::objective::{Objective, RankKind};
use crate::rational::{self, ExactValue, Rational};

/// How much of the feasible family a phase may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseBudget {
    /// The phase selection must itself be feasible.
    Strict,
    /// The phase selection may use `β` times the resource: cost at most
    /// `β·B` for knapsacks, `β·B` elements for cardinality budgets, or a
    /// cover by `β` independent sets for matroids.
    Augmented(usize),
    /// Never probes directly; runs sub-policies as phases.
    Composite,
}

impl PhaseBudget {
    pub fn feasible_sets(self) -> usize {
        match self {
            PhaseBudget::Strict => 1,
            PhaseBudget::Augmented(b) => b,
            PhaseBudget::Composite => 0,
        }
    }
}

pub trait Policy: Sync {
    fn name(&self) -> String;

    fn budget(&self) -> PhaseBudget;

    /// Runs the policy to completion against `probe`.
    fn run(&self, probe: &mut Prober<'_>) -> Result<()>;
}

impl<P: Policy + ?Sized> Policy for &P {
    fn name(&self) -> String {
        (**self).name()
    }

    fn budget(&self) -> PhaseBudget {
        (**self).budget()
    }

    fn run(&self, probe: &mut Prober<'_>) -> Result<()> {
        (**self).run(probe)
    }
}

impl<P: Policy + ?Sized> Policy for Box<P> {
    fn name(&self) -> String {
        (**self).name()
    }

    fn budget(&self) -> PhaseBudget {
        (**self).budget()
    }

    fn run(&self, probe: &mut Prober<'_>) -> Result<()> {
        (**self).run(probe)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PhaseCost {
    pub label: String,
    pub budget: PhaseBudget,
    pub selection: IdSet,
    #[serde(serialize_with = "ser_rational")]
    pub cost: Rational,
    /// Selections answered from an earlier phase's observation.
    pub reused: usize,
}

/// One threshold test of the adaptive threshold search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ThresholdCall {
    /// Objective index `i` of the search (1 for single-term objectives).
    pub index: usize,
    pub t: u64,
    pub success: bool,
}

/// The executor a policy probes through.
pub struct Prober<'a> {
    instance: &'a Instance,
    weights: &'a [u32],
    revealed: IdSet,
    selection: IdSet,
    order: Vec<(usize, u32)>,
    phases: Vec<PhaseCost>,
    open: Option<usize>,
    phase_history: Vec<(usize, u32)>,
    calls: Vec<ThresholdCall>,
    ub: Option<u64>,
}

impl<'a> Prober<'a> {
    fn new(instance: &'a Instance, x: &'a Realization) -> Self {
        assert_eq!(x.len(), instance.n(), "realization length differs from the universe");
        Prober {
            instance,
            weights: x.weights(),
            revealed: IdSet::EMPTY,
            selection: IdSet::EMPTY,
            order: Vec::new(),
            phases: Vec::new(),
            open: None,
            phase_history: Vec::new(),
            calls: Vec::new(),
            ub: None,
        }
    }

    pub fn instance(&self) -> &'a Instance {
        self.instance
    }

    /// Selects `e` in the current phase and returns its weight.
    pub fn probe(&mut self, e: usize) -> Result<u32> {
        let Some(idx) = self.open else {
            return Err(Error::policy("probe outside of a phase"));
        };
        if e >= self.instance.n() {
            return Err(Error::policy(format!("element {e} is not in the universe")));
        }
        let phase = &mut self.phases[idx];
        if phase.selection.contains(e) {
            return Err(Error::policy(format!("element {e} probed twice in phase {}", phase.label)));
        }
        phase.selection.insert(e);
        phase.cost += self.instance.constraint_cost(e);
        if !within_budget(self.instance, phase.selection, &phase.cost, phase.budget) {
            return Err(Error::policy(format!(
                "phase {} exceeds its {:?} budget with selection {}",
                phase.label, phase.budget, phase.selection
            )));
        }
        let w = self.weights[e];
        if self.revealed.contains(e) {
            phase.reused += 1;
        } else {
            self.revealed.insert(e);
            self.order.push((e, w));
        }
        self.selection.insert(e);
        self.phase_history.push((e, w));
        Ok(w)
    }

    /// Observations of the current phase, in probe order.
    pub fn phase_history(&self) -> &[(usize, u32)] {
        &self.phase_history
    }

    pub fn selection(&self) -> IdSet {
        self.selection
    }

    /// Weight of an element revealed earlier in this run.
    pub fn revealed(&self, e: usize) -> Option<u32> {
        self.revealed.contains(e).then(|| self.weights[e])
    }

    /// Weights of revealed elements; unrevealed entries hold `m` and must
    /// not be read.
    pub fn revealed_weights(&self) -> Vec<u32> {
        (0..self.instance.n())
            .map(|e| self.revealed(e).unwrap_or(self.instance.m))
            .collect()
    }

    /// Runs `policy` as a phase (or, for composites, inline) and returns
    /// the set it selected.
    pub fn run_sub(&mut self, policy: &dyn Policy, label: &str) -> Result<IdSet> {
        match policy.budget() {
            PhaseBudget::Composite => {
                let first = self.phases.len();
                policy.run(self)?;
                Ok(self.phases[first..]
                    .iter()
                    .fold(IdSet::EMPTY, |acc, p| acc.union(p.selection)))
            }
            budget => {
                if self.open.is_some() {
                    return Err(Error::policy("nested leaf phases are not allowed"));
                }
                self.phases.push(PhaseCost {
                    label: label.to_string(),
                    budget,
                    selection: IdSet::EMPTY,
                    cost: Rational::zero(),
                    reused: 0,
                });
                self.open = Some(self.phases.len() - 1);
                self.phase_history.clear();
                let out = policy.run(self);
                self.open = None;
                self.phase_history.clear();
                out?;
                Ok(self.phases.last().expect("phase pushed above").selection)
            }
        }
    }

    pub fn log_threshold(&mut self, call: ThresholdCall) {
        self.calls.push(call);
    }

    pub fn report_ub(&mut self, ub: u64) {
        self.ub = Some(ub);
    }
}

fn within_budget(instance: &Instance, s: IdSet, cost: &Rational, budget: PhaseBudget) -> bool {
    match budget {
        PhaseBudget::Strict => instance.is_feasible(s),
        PhaseBudget::Composite => false,
        PhaseBudget::Augmented(beta) => match &instance.constraint {
            ConstraintSpec::Knapsack { budget } => {
                *cost <= budget * Rational::from_integer((beta as i64).into())
            }
            ConstraintSpec::Cardinality { budget } => s.len() <= budget * beta,
            ConstraintSpec::Matroid(_) => {
                let mat = instance.outer_matroid().expect("matroid constraint is built");
                s.is_subset(mat.ground()) && matroid_cover_number(mat, s) <= beta
            }
        },
    }
}

/// Fewest independent sets covering `s`: `max_{A ⊆ s} ceil(|A| / r(A))`.
pub fn matroid_cover_number(mat: &Matroid, s: IdSet) -> usize {
    assert!(s.len() <= 20, "cover number is computed by subset enumeration");
    let mut best = 0;
    for a in s.subsets().skip(1) {
        let r = mat.rank(a);
        if r == 0 {
            return usize::MAX;
        }
        best = best.max(a.len().div_ceil(r));
    }
    best
}

fn ser_rational<S: serde::Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    ExactValue::from(r).serialize(s)
}

/// Outcome of running a policy on one realization.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub policy: String,
    pub selection: IdSet,
    pub objective_value: u64,
    pub ub_value: Option<u64>,
    pub feasible_set_count: usize,
    pub cost_ledger: Vec<PhaseCost>,
    pub call_log: Vec<ThresholdCall>,
    /// First-time reveals in order.
    pub probes: Vec<(usize, u32)>,
}

impl RunReport {
    pub fn total_cost(&self) -> Rational {
        self.cost_ledger.iter().map(|p| p.cost.clone()).sum()
    }

    /// Number of distinct threshold searches recorded in the call log.
    pub fn search_count(&self) -> usize {
        let mut idx: Vec<usize> = self.call_log.iter().map(|c| c.index).collect();
        idx.sort_unstable();
        idx.dedup();
        idx.len()
    }
}

/// Runs `policy` on the fixed realization `x` and scores its selection.
pub fn execute(
    policy: &dyn Policy,
    instance: &Instance,
    x: &Realization,
    objective: &Objective,
) -> Result<RunReport> {
    let mut prober = Prober::new(instance, x);
    prober.run_sub(policy, &policy.name())?;
    let objective_value = objective.value(prober.selection, x.weights());
    if let Some(ub) = prober.ub {
        if ub < objective_value {
            return Err(Error::policy(format!(
                "reported upper bound {ub} is below the objective {objective_value}"
            )));
        }
    }
    Ok(RunReport {
        policy: policy.name(),
        selection: prober.selection,
        objective_value,
        ub_value: prober.ub,
        feasible_set_count: prober.phases.iter().map(|p| p.budget.feasible_sets()).sum(),
        cost_ledger: prober.phases,
        call_log: prober.calls,
        probes: prober.order,
    })
}

/// Exact expectation of a policy, with the tail vector `P(f > t)`.
#[derive(Debug, Clone)]
pub struct ExactEvaluation {
    pub expectation: Rational,
    /// `tail[t] = P(f > t)` for `t = 0..bound`.
    pub tail: Vec<Rational>,
    pub ub_expectation: Option<Rational>,
    pub outcomes: usize,
    /// Largest number of threshold calls in any single run.
    pub max_calls: usize,
    pub max_feasible_sets: usize,
}

impl ExactEvaluation {
    /// `Σ_t P(f > t)`.
    pub fn tail_sum(&self) -> Rational {
        self.tail.iter().cloned().sum()
    }

    /// `(Σ a_t, a_0 + Σ_j a_{2^j}·2^j)`: the condensed sum lies between the
    /// tail sum and twice the tail sum for non-increasing tails.
    pub fn condensation(&self) -> (Rational, Rational) {
        condensation(&self.tail)
    }
}

pub fn condensation(tail: &[Rational]) -> (Rational, Rational) {
    let plain: Rational = tail.iter().cloned().sum();
    let mut condensed = tail.first().cloned().unwrap_or_else(Rational::zero);
    let mut pow = 1usize;
    while pow < tail.len() {
        condensed += &tail[pow] * Rational::from_integer((pow as i64).into());
        pow *= 2;
    }
    (plain, condensed)
}

/// Enumerates every outcome profile and runs the policy on each.
pub fn exact_expected_objective(
    policy: &dyn Policy,
    instance: &Instance,
    objective: &Objective,
) -> Result<ExactEvaluation> {
    let bound = objective.bound() as usize;
    let mut tail = vec![Rational::zero(); bound];
    let mut expectation = Rational::zero();
    let mut ub_expectation: Option<Rational> = None;
    let mut outcomes = 0;
    let mut max_calls = 0;
    let mut max_feasible_sets = 0;
    for (x, p) in enumerate_realizations(instance)? {
        let report = execute(policy, instance, &x, objective)?;
        let v = report.objective_value as usize;
        expectation += &p * Rational::from_integer((v as i64).into());
        for a in tail.iter_mut().take(v.min(bound)) {
            *a += &p;
        }
        if let Some(ub) = report.ub_value {
            *ub_expectation.get_or_insert_with(Rational::zero) +=
                &p * Rational::from_integer((ub as i64).into());
        }
        outcomes += 1;
        max_calls = max_calls.max(report.call_log.len());
        max_feasible_sets = max_feasible_sets.max(report.feasible_set_count);
    }
    Ok(ExactEvaluation {
        expectation,
        tail,
        ub_expectation,
        outcomes,
        max_calls,
        max_feasible_sets,
    })
}

/// `P(rank(selection) >= i)` at threshold `t`, by enumeration.
pub fn exact_success_probability(
    policy: &dyn Policy,
    instance: &Instance,
    t: u32,
    i: usize,
    rank: &RankKind,
) -> Result<Rational> {
    if i == 0 {
        return Ok(Rational::one());
    }
    let dummy = Objective::MinElement { m: instance.m };
    let mut total = Rational::zero();
    for (x, p) in enumerate_realizations(instance)? {
        let report = execute(policy, instance, &x, &dummy)?;
        if rank.rank(report.selection, x.weights(), t) >= i {
            total += p;
        }
    }
    Ok(total)
}

#[derive(Debug, Clone, Serialize)]
pub struct TrialRow {
    pub trial: u64,
    pub objective: u64,
    pub cost: f64,
    pub feasible_set_count: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct MonteCarloEstimate {
    pub trials: u64,
    pub seed: u64,
    pub mean: f64,
    /// Normal-approximation 95% half width.
    pub half_width_95: f64,
}

/// Runs every trial (in parallel) and returns rows in trial order.
pub fn monte_carlo_trials(
    policy: &dyn Policy,
    instance: &Instance,
    objective: &Objective,
    trials: u64,
    seed: u64,
) -> Result<Vec<TrialRow>> {
    (0..trials)
        .into_par_iter()
        .map(|trial| {
            let x = sample_realization(instance, seed, trial);
            let r = execute(policy, instance, &x, objective)?;
            Ok(TrialRow {
                trial,
                objective: r.objective_value,
                cost: rational::to_f64(&r.total_cost()),
                feasible_set_count: r.feasible_set_count,
            })
        })
        .collect()
}

/// Pairwise summation; the result does not depend on thread scheduling.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        return xs.iter().sum();
    }
    let (a, b) = xs.split_at(xs.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

pub fn summarize(rows: &[TrialRow], seed: u64) -> MonteCarloEstimate {
    let n = rows.len() as f64;
    let values: Vec<f64> = rows.iter().map(|r| r.objective as f64).collect();
    let mean = pairwise_sum(&values) / n;
    let sq: Vec<f64> = values.iter().map(|v| (v - mean).powi(2)).collect();
    let var = if rows.len() > 1 { pairwise_sum(&sq) / (n - 1.0) } else { 0.0 };
    MonteCarloEstimate {
        trials: rows.len() as u64,
        seed,
        mean,
        half_width_95: 1.96 * (var / n).sqrt(),
    }
}

pub fn monte_carlo_estimate(
    policy: &dyn Policy,
    instance: &Instance,
    objective: &Objective,
    trials: u64,
    seed: u64,
) -> Result<MonteCarloEstimate> {
    if trials == 0 {
        return Err(Error::invalid("at least one trial is required"));
    }
    let rows = monte_carlo_trials(policy, instance, objective, trials, seed)?;
    Ok(summarize(&rows, seed))
}

/// Probes a fixed list of elements in order.
#[derive(Debug, Clone)]
pub struct SetPolicy {
    pub name: String,
    pub elements: Vec<usize>,
    pub budget: PhaseBudget,
}

impl SetPolicy {
    pub fn strict(elements: impl IntoIterator<Item = usize>) -> Self {
        SetPolicy {
            name: "set".into(),
            elements: elements.into_iter().collect(),
            budget: PhaseBudget::Strict,
        }
    }

    pub fn augmented(name: &str, elements: impl IntoIterator<Item = usize>, beta: usize) -> Self {
        SetPolicy {
            name: name.into(),
            elements: elements.into_iter().collect(),
            budget: PhaseBudget::Augmented(beta),
        }
    }
}

impl Policy for SetPolicy {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn budget(&self) -> PhaseBudget {
        self.budget
    }

    fn run(&self, probe: &mut Prober<'_>) -> Result<()> {
        for &e in &self.elements {
            probe.probe(e)?;
        }
        Ok(())
    }
}

/// The three-element adaptive policy of the gap instance: probe 0; if its
/// weight is 1 probe the risky element 1, otherwise the safe element 2.
#[derive(Debug, Clone, Copy, Default)]
pub struct GapPolicy;

impl Policy for GapPolicy {
    fn name(&self) -> String {
        "gap-adaptive".into()
    }

    fn budget(&self) -> PhaseBudget {
        PhaseBudget::Strict
    }

    fn run(&self, probe: &mut Prober<'_>) -> Result<()> {
        let first = probe.probe(0)?;
        probe.probe(if first == 1 { 1 } else { 2 })?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{gap_instance, Element, ObjectiveSpec, WeightDistribution};
    use crate::rational::ratio;

    fn coins(ps: &[Rational], budget: usize) -> Instance {
        let elements = ps
            .iter()
            .enumerate()
            .map(|(id, p)| Element {
                id,
                cost: Rational::one(),
                dist: WeightDistribution::two_point(0, p.clone(), 1),
            })
            .collect();
        Instance::new(
            elements,
            1,
            1,
            ConstraintSpec::Cardinality { budget },
            ObjectiveSpec::MinElement,
            None,
            None,
        )
        .unwrap()
    }

    #[test]
    fn set_policy_selects_its_set() {
        let inst = gap_instance(10);
        let obj = Objective::from_instance(&inst);
        let x = Realization(vec![1, 100, 10]);
        let r = execute(&SetPolicy::strict([0, 1]), &inst, &x, &obj).unwrap();
        assert_eq!(r.selection, [0, 1].iter().collect());
        assert_eq!(r.objective_value, 1);
        assert_eq!(r.feasible_set_count, 1);
    }

    #[test]
    fn gap_policy_branches() {
        let inst = gap_instance(10);
        let obj = Objective::from_instance(&inst);
        let r = execute(&GapPolicy, &inst, &Realization(vec![1, 0, 10]), &obj).unwrap();
        assert_eq!(r.selection, [0, 1].iter().collect());
        assert_eq!(r.objective_value, 0);
        let r = execute(&GapPolicy, &inst, &Realization(vec![100, 0, 10]), &obj).unwrap();
        assert_eq!(r.selection, [0, 2].iter().collect());
    }

    #[test]
    fn duplicate_and_overbudget_probes_fail() {
        let inst = gap_instance(4);
        let obj = Objective::from_instance(&inst);
        let x = Realization(vec![1, 0, 4]);
        assert!(matches!(
            execute(&SetPolicy::strict([0, 0]), &inst, &x, &obj),
            Err(Error::Policy(_))
        ));
        assert!(matches!(
            execute(&SetPolicy::strict([0, 1, 2]), &inst, &x, &obj),
            Err(Error::Policy(_))
        ));
        let relaxed = SetPolicy::augmented("two", [0, 1, 2], 2);
        assert_eq!(execute(&relaxed, &inst, &x, &obj).unwrap().feasible_set_count, 2);
    }

    #[test]
    fn gap_policy_exact_value() {
        let inst = gap_instance(10);
        let obj = Objective::from_instance(&inst);
        let ev = exact_expected_objective(&GapPolicy, &inst, &obj).unwrap();
        assert_eq!(ev.expectation, ratio(199, 1000));
        assert_eq!(ev.tail_sum(), ev.expectation);
        let nonadaptive = exact_expected_objective(&SetPolicy::strict([1, 2]), &inst, &obj).unwrap();
        assert_eq!(nonadaptive.expectation, Rational::one());
        let (plain, condensed) = ev.condensation();
        assert!(plain <= condensed && condensed <= &plain * rational::int(2));
    }

    #[test]
    fn point_mass_expectation_is_deterministic_value() {
        let elements = (0..2)
            .map(|id| Element {
                id,
                cost: Rational::one(),
                dist: WeightDistribution::point(3 + id as u32),
            })
            .collect();
        let inst = Instance::new(
            elements,
            9,
            1,
            ConstraintSpec::Cardinality { budget: 2 },
            ObjectiveSpec::MinElement,
            None,
            None,
        )
        .unwrap();
        let obj = Objective::from_instance(&inst);
        let ev = exact_expected_objective(&SetPolicy::strict([1, 0]), &inst, &obj).unwrap();
        assert_eq!(ev.expectation, rational::int(3));
        let mc = monte_carlo_estimate(&SetPolicy::strict([1]), &inst, &obj, 200, 1).unwrap();
        assert_eq!(mc.mean, 4.0);
        assert_eq!(mc.half_width_95, 0.0);
    }

    #[test]
    fn monte_carlo_is_deterministic_and_close() {
        let inst = gap_instance(10);
        let obj = Objective::from_instance(&inst);
        let a = monte_carlo_estimate(&GapPolicy, &inst, &obj, 100_000, 7).unwrap();
        let b = monte_carlo_estimate(&GapPolicy, &inst, &obj, 100_000, 7).unwrap();
        assert_eq!(a.mean, b.mean);
        assert_eq!(a.half_width_95, b.half_width_95);
        assert!((a.mean - 0.199).abs() < 0.02, "mean {}", a.mean);
    }

    #[test]
    fn success_probability_examples() {
        let one = coins(&[ratio(3, 10)], 1);
        let p = exact_success_probability(&SetPolicy::strict([0]), &one, 0, 1, &RankKind::Trank).unwrap();
        assert_eq!(p, ratio(3, 10));
        let two = coins(&[ratio(1, 2), ratio(1, 2)], 2);
        let p = exact_success_probability(&SetPolicy::strict([0, 1]), &two, 0, 2, &RankKind::Trank).unwrap();
        assert_eq!(p, ratio(1, 4));
        let p = exact_success_probability(&SetPolicy::strict([]), &two, 0, 0, &RankKind::Trank).unwrap();
        assert_eq!(p, Rational::one());
    }

    #[test]
    fn reuse_across_phases_charges_the_later_phase() {
        struct TwoPhases;
        impl Policy for TwoPhases {
            fn name(&self) -> String {
                "two".into()
            }
            fn budget(&self) -> PhaseBudget {
                PhaseBudget::Composite
            }
            fn run(&self, probe: &mut Prober<'_>) -> Result<()> {
                probe.run_sub(&SetPolicy::strict([0, 1]), "a")?;
                probe.run_sub(&SetPolicy::strict([1, 2]), "b")?;
                Ok(())
            }
        }
        let inst = gap_instance(4);
        let obj = Objective::from_instance(&inst);
        let r = execute(&TwoPhases, &inst, &Realization(vec![1, 0, 4]), &obj).unwrap();
        assert_eq!(r.probes.len(), 3);
        assert_eq!(r.feasible_set_count, 2);
        assert_eq!(r.cost_ledger[1].reused, 1);
        assert_eq!(r.cost_ledger[1].cost, rational::int(2));
    }

    #[test]
    fn cover_number() {
        let m = Matroid::uniform(IdSet::full(5), 2);
        assert_eq!(matroid_cover_number(&m, IdSet::full(5)), 3);
        assert_eq!(matroid_cover_number(&m, IdSet::EMPTY), 0);
    }

    #[test]
    fn pairwise_sum_matches_plain_sum_on_integers() {
        let xs: Vec<f64> = (0..1000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&xs), 499_500.0);
    }
}
