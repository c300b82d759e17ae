//! Randomized verification suites comparing algorithms against the exact
//! oracles.
//!
//! Every suite draws its cases from a ChaCha stream keyed by the seed (case
//! `j` uses stream `j`), runs cases in parallel and reports one line per
//! check in case order, so reports are reproducible.

use std::sync::Arc;

use num_traits::{One, Zero};
use rand::Rng;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::idset::IdSet;
use crate::metamin::{call_bound, threshold_grid, ub_interval_claim, pruning_is_monotone, MetaMin, SumOfK};
use crate::model::{enumerate_realizations, gap_instance, ObjectiveSpec};
use crate::objective::{prob_at_least, width, Objective, RankKind};
use crate::oracle::{
    knapsack_budget, opt_adaptive_expectation, opt_adaptive_mtrank_cardinality, opt_adaptive_rank_knapsack,
    opt_adaptive_rank_knapsack_within, opt_adaptive_rank_matroid, opt_nonadaptive, NonAdaptiveTarget,
    OptimalRankSolver,
};
use crate::policy::{exact_expected_objective, exact_success_probability, execute, monte_carlo_estimate, GapPolicy};
use crate::rational::{self, floor_log2, Rational};
use crate::solvers::{
    adap_mgreedy, cheap_universe, decomposition_check, density_greedy, ext_greedy, mgreedy,
    rank_knapsack_factor, rank_knapsack_solver,
};
use crate::gen;

pub const SUITES: [&str; 11] = [
    "no-gap",
    "extgreedy-dominance",
    "bin-value",
    "cost-bounds",
    "mgreedy-opt",
    "adapmgreedy-opt",
    "metamin-4x",
    "sumk-8x",
    "decomposition",
    "nesting",
    "gap-example",
];

/// Size and seed knobs of a suite run. Unset fields take the suite's
/// default desk-scale values.
#[derive(Debug, Clone, Default)]
pub struct SuiteOptions {
    pub trials: Option<usize>,
    /// Largest instance size.
    pub n: Option<usize>,
    pub seed: u64,
    /// `N` of the gap instance.
    pub big_n: Option<u32>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckLine {
    pub case: usize,
    pub check: String,
    pub passed: bool,
    pub detail: String,
    /// The property being certified.
    pub claim: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub checks: Vec<CheckLine>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckLine> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn count(&self, check: &str) -> (usize, usize) {
        let of: Vec<_> = self.checks.iter().filter(|c| c.check == check).collect();
        (of.iter().filter(|c| c.passed).count(), of.len())
    }
}

const NO_GAP: &str = "min-element threshold problems have no adaptivity gap";
const DENSITY: &str = "density greedy is a (1,2)-approximation of the strict non-adaptive optimum";
const EXT_DOM: &str = "extended greedy on cheap elements beats every strict adaptive policy";
const BIN_VALUE: &str = "G ∪ C beats every strict adaptive i-heads policy";
const COST: &str = "cost(G ∪ C) ≤ 3B + 2B·ceil(log2 i), each bin level ≤ 2B";
const MGREEDY: &str = "matroid greedy is optimal for every rank target";
const ADAP: &str = "adaptive matroid greedy is optimal for the matroid threshold rank";
const META: &str = "threshold search with an exact solver: E[UB] ≤ 4·E[OPT]";
const SUMK: &str = "sum-of-k driver with exact solvers: E[f] ≤ 8·E[OPT]";
const DECOMP: &str = "rectangle decomposition reproduces P(trank ≥ ℓ) for every ordering";
const NEST: &str = "extended greedy nesting under removal of one element";
const GAP: &str = "three-element instance has adaptivity gap at least N/2";
const GAP_MC: &str = "Monte Carlo estimate agrees with the exact policy value";

fn line(case: usize, check: &str, passed: bool, detail: String, claim: &'static str) -> CheckLine {
    CheckLine {
        case,
        check: check.to_string(),
        passed,
        detail,
        claim,
    }
}

fn case_rng(seed: u64, case: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(case as u64);
    rng
}

fn r(x: &Rational) -> String {
    rational::to_string(x)
}

fn run_cases<F>(trials: usize, seed: u64, f: F) -> Result<Vec<CheckLine>>
where
    F: Fn(usize, &mut ChaCha8Rng) -> Result<Vec<CheckLine>> + Sync,
{
    let per_case: Vec<Vec<CheckLine>> = (0..trials)
        .into_par_iter()
        .map(|case| f(case, &mut case_rng(seed, case)))
        .collect::<Result<_>>()?;
    Ok(per_case.into_iter().flatten().collect())
}

/// Runs the named suite.
pub fn run_suite(name: &str, opts: &SuiteOptions) -> Result<SuiteReport> {
    let checks = match name {
        "no-gap" => no_gap(opts.trials.unwrap_or(200), opts.n.unwrap_or(10), opts.seed)?,
        "extgreedy-dominance" => extgreedy_dominance(opts.trials.unwrap_or(100), opts.n.unwrap_or(12), opts.seed)?,
        "bin-value" => bin_value(opts.trials.unwrap_or(100), opts.n.unwrap_or(12), opts.seed)?,
        "cost-bounds" => cost_bounds(opts.trials.unwrap_or(500), opts.n.unwrap_or(12), opts.seed)?,
        "mgreedy-opt" => mgreedy_opt(opts.trials.unwrap_or(100), opts.n.unwrap_or(10), opts.seed)?,
        "adapmgreedy-opt" => adapmgreedy_opt(opts.trials.unwrap_or(100), opts.n.unwrap_or(7), opts.seed)?,
        "metamin-4x" => metamin_4x(opts.trials.unwrap_or(50), opts.n.unwrap_or(6), opts.seed)?,
        "sumk-8x" => sumk_8x(opts.trials.unwrap_or(20), opts.n.unwrap_or(6), opts.seed)?,
        "decomposition" => decomposition(opts.trials.unwrap_or(500), opts.n.unwrap_or(8), opts.seed)?,
        "nesting" => nesting(opts.trials.unwrap_or(1000), opts.n.unwrap_or(10), opts.seed)?,
        "gap-example" => gap_example(opts.big_n.unwrap_or(10))?,
        other => return Err(Error::invalid(format!("unknown suite {other:?}; known suites: {}", SUITES.join(", ")))),
    };
    Ok(SuiteReport {
        suite: name.to_string(),
        checks,
    })
}

/// Min-element knapsack thresholds: the best non-adaptive set is as good as
/// the best adaptive policy, and density greedy (two feasible sets) is at
/// least as good as the best strict set.
pub fn no_gap(trials: usize, max_n: usize, seed: u64) -> Result<Vec<CheckLine>> {
    run_cases(trials, seed, |case, rng| {
        let n = rng.gen_range(1..=max_n);
        let m = rng.gen_range(1..=4);
        let inst = gen::knapsack_instance(rng, n, m, ObjectiveSpec::MinElement);
        let t = rng.gen_range(0..m);
        let b = knapsack_budget(&inst)?;
        let na = opt_nonadaptive(&inst, &NonAdaptiveTarget::Threshold { t })?;
        let na_success = Rational::one() - &na.value;
        let ad = opt_adaptive_rank_knapsack(&inst, &b, 1, t)?.value;
        let g = density_greedy(&inst, &b, t);
        let set = g.set();
        let success = width(set, t, &inst);
        let split_ok = match g.order.split_last() {
            None => true,
            Some((&last, rest)) => {
                let rest: IdSet = rest.iter().collect();
                inst.set_cost(rest) <= b && *inst.cost(last) <= b
            }
        };
        Ok(vec![
            line(
                case,
                "no-gap",
                na_success == ad,
                format!("n={n} t={t} non-adaptive={} adaptive={}", r(&na_success), r(&ad)),
                NO_GAP,
            ),
            line(
                case,
                "density",
                success >= na_success && split_ok,
                format!(
                    "greedy={} optimum={} two-set split feasible={split_ok}",
                    r(&success),
                    r(&na_success)
                ),
                DENSITY,
            ),
        ])
    })
}

/// For cheap-element instances: `P(trank(G_ℓ) ≥ ℓ)` is at least the strict
/// adaptive optimum on the cheap universe, for every `ℓ ≤ i`.
pub fn extgreedy_dominance(trials: usize, max_n: usize, seed: u64) -> Result<Vec<CheckLine>> {
    run_cases(trials, seed, |case, rng| {
        let n = rng.gen_range(1..=max_n);
        let i = rng.gen_range(1..=4usize);
        let m = rng.gen_range(1..=4);
        let inst = gen::cheap_knapsack_instance(rng, n, m, i);
        let t = rng.gen_range(0..m);
        let b = knapsack_budget(&inst)?;
        let u = cheap_universe(&inst, &b, i);
        let probs = inst.below_probs(t);
        let mut out = Vec::new();
        for ell in 1..=i {
            let g = ext_greedy(&inst, u, &b, ell, t);
            let ours = prob_at_least(g.order.iter().map(|&e| &probs[e]), ell);
            let opt = opt_adaptive_rank_knapsack_within(&inst, u, &b, ell, t)?.value;
            out.push(line(
                case,
                "extgreedy-dominance",
                ours >= opt,
                format!("n={n} i={i} ell={ell} t={t} greedy={} optimum={}", r(&ours), r(&opt)),
                EXT_DOM,
            ));
        }
        Ok(out)
    })
}

/// Full cost range: value inequality against the strict adaptive optimum
/// plus the cost inequalities of `G ∪ C`.
pub fn bin_value(trials: usize, max_n: usize, seed: u64) -> Result<Vec<CheckLine>> {
    run_cases(trials, seed, |case, rng| {
        let n = rng.gen_range(1..=max_n);
        let i = rng.gen_range(1..=4usize);
        let m = rng.gen_range(1..=4);
        let inst = gen::knapsack_instance(rng, n, m, ObjectiveSpec::MinElement);
        let t = rng.gen_range(0..m);
        let b = knapsack_budget(&inst)?;
        let sel = rank_knapsack_solver(&inst, &b, i, t);
        let probs = inst.below_probs(t);
        let ours = prob_at_least(sel.union.iter().map(|e| &probs[e]), i);
        let opt = opt_adaptive_rank_knapsack(&inst, &b, i, t)?.value;
        let mut out = vec![line(
            case,
            "bin-value",
            ours >= opt,
            format!("n={n} i={i} t={t} G∪C={} optimum={}", r(&ours), r(&opt)),
            BIN_VALUE,
        )];
        out.extend(cost_lines(case, &inst, &b, i, t));
        Ok(out)
    })
}

fn cost_lines(case: usize, inst: &crate::model::Instance, b: &Rational, i: usize, t: u32) -> Vec<CheckLine> {
    let sel = rank_knapsack_solver(inst, b, i, t);
    let cap = b * rational::int(rank_knapsack_factor(i) as i64);
    let levels_ok = sel.bins.levels.iter().all(|l| l.cost <= b * rational::int(2) && l.chosen.len() <= 1 << l.level);
    let g_ok = sel.greedy.total_cost <= b + &sel.greedy.delta * rational::int(i as i64 + 1)
        && sel.greedy.total_cost <= b * rational::int(3);
    let ratio = if b.is_zero() {
        "-".to_string()
    } else {
        format!("{:.4}", rational::to_f64(&(&sel.cost / b)))
    };
    vec![line(
        case,
        "cost-bounds",
        sel.cost <= cap && levels_ok && g_ok,
        format!(
            "i={i} B={} cost={} ratio={ratio} bound={} levels≤2B={levels_ok} G≤3B={g_ok}",
            r(b),
            r(&sel.cost),
            rank_knapsack_factor(i)
        ),
        COST,
    )]
}

/// Cost inequalities alone, on many instances.
pub fn cost_bounds(trials: usize, max_n: usize, seed: u64) -> Result<Vec<CheckLine>> {
    run_cases(trials, seed, |case, rng| {
        let n = rng.gen_range(1..=max_n);
        let i = rng.gen_range(1..=8usize);
        let m = rng.gen_range(1..=4);
        let inst = gen::knapsack_instance(rng, n, m, ObjectiveSpec::MinElement);
        let t = rng.gen_range(0..m);
        Ok(cost_lines(case, &inst, &knapsack_budget(&inst)?, i, t))
    })
}

/// Matroid greedy equals the adaptive optimum for every target.
pub fn mgreedy_opt(trials: usize, max_n: usize, seed: u64) -> Result<Vec<CheckLine>> {
    run_cases(trials, seed, |case, rng| {
        let n = rng.gen_range(1..=max_n);
        let m = rng.gen_range(1..=4);
        let inst = gen::matroid_instance(rng, n, m, 4);
        let t = rng.gen_range(0..m);
        let mat = inst.outer_matroid().expect("matroid instance").clone();
        let basis: IdSet = mgreedy(&inst, &mat, t).into_iter().collect();
        let probs = inst.below_probs(t);
        let kind = match mat.spec() {
            crate::matroid::MatroidSpec::Uniform { .. } => "uniform",
            crate::matroid::MatroidSpec::Partition { .. } => "partition",
            crate::matroid::MatroidSpec::Explicit { .. } => "explicit",
        };
        let mut out = Vec::new();
        let rank = mat.full_rank();
        out.push(line(
            case,
            "mgreedy-basis",
            basis.len() == rank,
            format!("{kind} n={n} |basis|={} rank={rank}", basis.len()),
            MGREEDY,
        ));
        for i in 1..=rank {
            let ours = prob_at_least(basis.iter().map(|e| &probs[e]), i);
            let opt = opt_adaptive_rank_matroid(&inst, &mat, i, t)?.value;
            out.push(line(
                case,
                "mgreedy-opt",
                ours == opt,
                format!("{kind} n={n} rank={rank} i={i} t={t} greedy={} optimum={}", r(&ours), r(&opt)),
                MGREEDY,
            ));
        }
        Ok(out)
    })
}

/// Adaptive matroid greedy equals the contraction-DP optimum for every
/// target, and no policy succeeds when the budget is below the target.
pub fn adapmgreedy_opt(trials: usize, max_n: usize, seed: u64) -> Result<Vec<CheckLine>> {
    run_cases(trials, seed, |case, rng| {
        let n = rng.gen_range(1..=max_n);
        let budget = rng.gen_range(0..=5usize);
        let m = rng.gen_range(1..=4);
        let inst = gen::minbasis_instance(rng, n, m, budget, 4);
        let t = rng.gen_range(0..m);
        let inner = inst.inner_matroid().expect("min-basis instance").clone();
        // the greedy only looks at whether weights are at most t
        let coins = inst.collapse_to_bernoulli(t);
        let pol = adap_mgreedy(&coins, &inner, budget, t)?;
        let mut out = Vec::new();
        for i in 1..=inner.full_rank() {
            let ours = exact_success_probability(&pol, &coins, t, i, &RankKind::Mtrank(inner.clone()))?;
            let opt = opt_adaptive_mtrank_cardinality(&inst, &inner, budget, i, t)?.value;
            let zero_ok = budget >= i || (ours.is_zero() && opt.is_zero());
            out.push(line(
                case,
                "adapmgreedy-opt",
                ours == opt && zero_ok,
                format!("n={n} B={budget} i={i} t={t} greedy={} optimum={}", r(&ours), r(&opt)),
                ADAP,
            ));
        }
        Ok(out)
    })
}

/// Outcome-by-outcome audit of a threshold search.
struct SearchAudit {
    ub_expectation: Rational,
    objective_expectation: Rational,
    claim_ok: bool,
    pruning_ok: bool,
    max_calls: usize,
    max_searches: usize,
    min_searches: usize,
}

fn audit(
    policy: &dyn crate::policy::Policy,
    inst: &crate::model::Instance,
    objective: &Objective,
    grid_bound: u64,
) -> Result<SearchAudit> {
    let grid = threshold_grid(grid_bound)?;
    let mut a = SearchAudit {
        ub_expectation: Rational::zero(),
        objective_expectation: Rational::zero(),
        claim_ok: true,
        pruning_ok: true,
        max_calls: 0,
        max_searches: 0,
        min_searches: usize::MAX,
    };
    for (x, p) in enumerate_realizations(inst)? {
        let rep = execute(policy, inst, &x, objective)?;
        a.objective_expectation += &p * rational::int(rep.objective_value as i64);
        let mut indices: Vec<usize> = rep.call_log.iter().map(|c| c.index).collect();
        indices.sort_unstable();
        indices.dedup();
        for idx in indices {
            let calls: Vec<(u64, bool)> = rep
                .call_log
                .iter()
                .filter(|c| c.index == idx)
                .map(|c| (c.t, c.success))
                .collect();
            a.max_calls = a.max_calls.max(calls.len());
            a.pruning_ok &= pruning_is_monotone(&calls);
            if let Some(ub) = rep.ub_value {
                a.claim_ok &= ub_interval_claim(&grid, &calls, ub);
            }
        }
        if let Some(ub) = rep.ub_value {
            a.ub_expectation += &p * rational::int(ub as i64);
            a.claim_ok &= ub >= rep.objective_value;
        }
        a.max_searches = a.max_searches.max(rep.search_count());
        a.min_searches = a.min_searches.min(rep.search_count());
    }
    Ok(a)
}

/// Threshold search with the optimal i-heads policy as its solver on tiny
/// min-element knapsack instances.
pub fn metamin_4x(trials: usize, max_n: usize, seed: u64) -> Result<Vec<CheckLine>> {
    run_cases(trials, seed, |case, rng| {
        let n = rng.gen_range(1..=max_n);
        let m = *[3u32, 7, 15].choose(rng).expect("nonempty");
        let inst = gen::knapsack_instance(rng, n, m, ObjectiveSpec::MinElement);
        let obj = Objective::from_instance(&inst);
        let pol = MetaMin::new(Arc::new(OptimalRankSolver::new()), obj.clone(), obj.bound());
        let a = audit(&pol, &inst, &obj, obj.bound())?;
        let opt = opt_adaptive_expectation(&inst, &obj)?.value;
        let bound = call_bound(obj.bound());
        Ok(vec![
            line(
                case,
                "metamin-4x",
                a.ub_expectation <= rational::int(4) * &opt,
                format!("n={n} m={m} E[UB]={} E[OPT]={}", r(&a.ub_expectation), r(&opt)),
                META,
            ),
            line(
                case,
                "ub-interval",
                a.claim_ok && a.pruning_ok,
                format!("interval claim={} monotone pruning={}", a.claim_ok, a.pruning_ok),
                META,
            ),
            line(
                case,
                "call-count",
                a.max_calls <= bound,
                format!("max calls={} bound={bound}", a.max_calls),
                META,
            ),
        ])
    })
}

/// Sum-of-k driver with optimal i-heads solvers on tiny min-k knapsack
/// instances.
pub fn sumk_8x(trials: usize, max_n: usize, seed: u64) -> Result<Vec<CheckLine>> {
    run_cases(trials, seed, |case, rng| {
        let n = rng.gen_range(1..=max_n);
        let (m, k) = (3u32, 2usize);
        let inst = gen::mink_knapsack_instance(rng, n, m, k);
        let obj = Objective::from_instance(&inst);
        let pol = SumOfK::new(Arc::new(OptimalRankSolver::new()), obj.clone(), m as u64);
        let a = audit(&pol, &inst, &obj, m as u64)?;
        let opt = opt_adaptive_expectation(&inst, &obj)?.value;
        let runs = floor_log2(k as u64) as usize + 1;
        Ok(vec![
            line(
                case,
                "sumk-8x",
                a.objective_expectation <= rational::int(8) * &opt,
                format!("n={n} k={k} E[f]={} E[OPT]={}", r(&a.objective_expectation), r(&opt)),
                SUMK,
            ),
            line(
                case,
                "sumk-runs",
                a.min_searches == runs && a.max_searches == runs && a.pruning_ok,
                format!("searches per run in [{}, {}], expected {runs}", a.min_searches, a.max_searches),
                SUMK,
            ),
        ])
    })
}

/// Rectangle decomposition on random sets and orderings.
pub fn decomposition(trials: usize, max_n: usize, seed: u64) -> Result<Vec<CheckLine>> {
    run_cases(trials, seed, |case, rng| {
        let n = rng.gen_range(1..=max_n);
        let m = rng.gen_range(1..=4);
        let inst = gen::knapsack_instance(rng, n, m, ObjectiveSpec::MinElement);
        let t = rng.gen_range(0..m);
        let mut set = IdSet::from_mask(rng.gen::<u64>() & inst.universe().mask());
        if set.is_empty() {
            set.insert(rng.gen_range(0..n));
        }
        let ell = rng.gen_range(1..=set.len() + 1);
        let mut out = Vec::new();
        let mut order = set.to_vec();
        for o in 0..3 {
            if o > 0 {
                order.shuffle(rng);
            }
            let residual = decomposition_check(&inst, set, &order, t, ell)?;
            out.push(line(
                case,
                "decomposition",
                residual.is_zero(),
                format!("set={set} order={order:?} ell={ell} t={t} residual={}", r(&residual)),
                DECOMP,
            ));
        }
        Ok(out)
    })
}

/// `ExtGreedy(U − {e}, B − c_e, 0, t) ⊆ ExtGreedy(U, B, 0, t)`.
pub fn nesting(trials: usize, max_n: usize, seed: u64) -> Result<Vec<CheckLine>> {
    run_cases(trials, seed, |case, rng| {
        let n = rng.gen_range(1..=max_n);
        let m = rng.gen_range(1..=4);
        let inst = gen::knapsack_instance(rng, n, m, ObjectiveSpec::MinElement);
        let t = rng.gen_range(0..m);
        let mut u = IdSet::from_mask(rng.gen::<u64>() & inst.universe().mask());
        let e = rng.gen_range(0..n);
        u.insert(e);
        let b = rational::ratio(rng.gen_range(0..=24), 4);
        let outer = ext_greedy(&inst, u, &b, 0, t).set();
        let inner = ext_greedy(&inst, u.without(e), &(&b - inst.cost(e)), 0, t).set();
        Ok(vec![line(
            case,
            "nesting",
            inner.is_subset(outer),
            format!("U={u} e={e} B={} inner={inner} outer={outer}", r(&b)),
            NEST,
        )])
    })
}

/// Exact values on the three-element gap instance.
/// Monte Carlo estimate of the adaptive gap policy, accepted when the exact
/// value lies within three 95% half widths of the sample mean.
pub fn gap_monte_carlo(big_n: u32, trials: u64, seed: u64) -> Result<CheckLine> {
    if big_n < 2 {
        return Err(Error::invalid("the gap instance needs N >= 2"));
    }
    let inst = gap_instance(big_n);
    let obj = Objective::from_instance(&inst);
    let exact = exact_expected_objective(&GapPolicy, &inst, &obj)?.expectation;
    let exact = rational::to_f64(&exact);
    let est = monte_carlo_estimate(&GapPolicy, &inst, &obj, trials, seed)?;
    Ok(line(
        0,
        "gap-mc",
        (est.mean - exact).abs() <= 3.0 * est.half_width_95,
        format!(
            "N={big_n} trials={trials} seed={seed} mean={:.6} half_width={:.6} exact={exact:.6}",
            est.mean, est.half_width_95
        ),
        GAP_MC,
    ))
}

pub fn gap_example(big_n: u32) -> Result<Vec<CheckLine>> {
    if big_n < 2 {
        return Err(Error::invalid("the gap instance needs N >= 2"));
    }
    let inst = gap_instance(big_n);
    let obj = Objective::from_instance(&inst);
    let n = rational::int(big_n as i64);
    let adaptive = exact_expected_objective(&GapPolicy, &inst, &obj)?.expectation;
    let expected = (Rational::one() - (&n * &n).recip()) / &n + n.recip();
    let oracle = opt_adaptive_expectation(&inst, &obj)?.value;
    let na = opt_nonadaptive(&inst, &NonAdaptiveTarget::Expectation(obj))?;
    let ratio = &na.value / &adaptive;
    let half = &n / rational::int(2);
    Ok(vec![
        line(
            0,
            "gap-adaptive",
            adaptive == expected && adaptive <= rational::int(2) / &n && oracle <= adaptive,
            format!(
                "N={big_n} adaptive E={} ({:.6}) oracle={}",
                r(&adaptive),
                rational::to_f64(&adaptive),
                r(&oracle)
            ),
            GAP,
        ),
        line(
            0,
            "gap-nonadaptive",
            na.value == Rational::one(),
            format!("N={big_n} non-adaptive E={} set={}", r(&na.value), na.set),
            GAP,
        ),
        line(
            0,
            "gap-ratio",
            ratio >= half && &na.value / &oracle >= half,
            format!("N={big_n} ratio={} ({:.4}) ≥ N/2={}", r(&ratio), rational::to_f64(&ratio), r(&half)),
            GAP,
        ),
    ])
}
