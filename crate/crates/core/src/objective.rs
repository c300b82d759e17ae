//! Objective functions and threshold ranks.
//!
//! Every objective is non-increasing in the selection and takes values in
//! `[0, bound]`. Order statistics that do not exist (the minimum of the empty
//! set, the `i`-th smallest of fewer than `i` weights, the `i`-th basis
//! element of a rank-deficient selection) are padded with `m`.

use num_traits::{One, Zero};

use crate::idset::IdSet;
use crate::matroid::Matroid;
use crate::model::{Instance, ObjectiveSpec};
use crate::rational::{self, Rational};

pub fn f_min(s: IdSet, x: &[u32], m: u32) -> u64 {
    s.iter().map(|e| x[e]).min().unwrap_or(m) as u64
}

fn sorted_weights(s: IdSet, x: &[u32]) -> Vec<u32> {
    let mut w: Vec<u32> = s.iter().map(|e| x[e]).collect();
    w.sort_unstable();
    w
}

/// `i`-th smallest weight in `s` (1-based), `m` when `|s| < i`.
pub fn y_i(s: IdSet, x: &[u32], i: usize, m: u32) -> u64 {
    assert!(i >= 1, "order statistics are 1-based");
    sorted_weights(s, x).get(i - 1).copied().unwrap_or(m) as u64
}

/// Sum of the `k` smallest weights, padding missing ones with `m`.
pub fn f_mink(s: IdSet, x: &[u32], k: usize, m: u32) -> u64 {
    let w = sorted_weights(s, x);
    (0..k).map(|i| w.get(i).copied().unwrap_or(m) as u64).sum()
}

/// Weight of the `i`-th element of the greedy min-weight basis of `s`.
pub fn g_i(s: IdSet, x: &[u32], inner: &Matroid, i: usize, m: u32) -> u64 {
    assert!(i >= 1, "order statistics are 1-based");
    inner
        .min_weight_basis(x, s)
        .get(i - 1)
        .map(|&e| x[e])
        .unwrap_or(m) as u64
}

/// `Σ_{i=1..k} g_i` with `k` the rank of the inner matroid.
pub fn f_minbasis(s: IdSet, x: &[u32], inner: &Matroid, m: u32) -> u64 {
    let k = inner.full_rank();
    let basis = inner.min_weight_basis(x, s);
    (0..k)
        .map(|i| basis.get(i).map(|&e| x[e]).unwrap_or(m) as u64)
        .sum()
}

/// Number of below-threshold elements of `s`.
pub fn trank(s: IdSet, x: &[u32], t: u32) -> usize {
    s.iter().filter(|&e| x[e] <= t).count()
}

pub fn below_set(s: IdSet, x: &[u32], t: u32) -> IdSet {
    s.iter().filter(|&e| x[e] <= t).collect()
}

/// Largest independent set of below-threshold elements inside `s`.
pub fn mtrank(inner: &Matroid, s: IdSet, x: &[u32], t: u32) -> usize {
    inner.rank(below_set(s, x, t))
}

/// Probability that `s` holds at least one below-threshold element.
pub fn width(s: IdSet, t: u32, instance: &Instance) -> Rational {
    let miss = s
        .iter()
        .fold(Rational::one(), |acc, e| acc * instance.element(e).dist.above_prob(t));
    Rational::one() - miss
}

/// `-log2 P(X_e > t)`; infinite when `X_e <= t` surely.
pub fn reward(e: usize, t: u32, instance: &Instance) -> f64 {
    let q = instance.element(e).dist.above_prob(t);
    if q.is_zero() {
        f64::INFINITY
    } else {
        let r = -rational::to_f64(&q).log2();
        // -0.0 for q == 1
        r.max(0.0)
    }
}

/// `P(at least i successes)` for independent events with the given
/// probabilities (Poisson-binomial tail), exactly.
pub fn prob_at_least<'a>(probs: impl IntoIterator<Item = &'a Rational>, i: usize) -> Rational {
    if i == 0 {
        return Rational::one();
    }
    // dist[c] = P(exactly c successes) for c < i; dist[i] absorbs c >= i
    let mut dist = vec![Rational::zero(); i + 1];
    dist[0] = Rational::one();
    for p in probs {
        let q = Rational::one() - p;
        let carry = &dist[i - 1] * p;
        dist[i] += carry;
        for c in (1..i).rev() {
            dist[c] = &dist[c] * &q + &dist[c - 1] * p;
        }
        dist[0] = &dist[0] * &q;
    }
    dist[i].clone()
}

/// Which threshold rank an objective reduces to.
#[derive(Debug, Clone)]
pub enum RankKind {
    /// Count of below-threshold elements.
    Trank,
    /// Matroid threshold rank in the given inner matroid.
    Mtrank(Matroid),
}

impl RankKind {
    pub fn rank(&self, s: IdSet, x: &[u32], t: u32) -> usize {
        match self {
            RankKind::Trank => trank(s, x, t),
            RankKind::Mtrank(inner) => mtrank(inner, s, x, t),
        }
    }
}

#[derive(Debug, Clone)]
pub enum Objective {
    MinElement { m: u32 },
    MinK { k: usize, m: u32 },
    MinBasis { inner: Matroid, k: usize, m: u32 },
    /// `y_i`: the `i`-th smallest weight.
    KthSmallest { i: usize, m: u32 },
    /// `g_i`: the `i`-th element of the greedy min-weight basis.
    KthBasis { inner: Matroid, i: usize, m: u32 },
}

impl Objective {
    pub fn from_instance(instance: &Instance) -> Objective {
        let m = instance.m;
        match instance.objective {
            ObjectiveSpec::MinElement => Objective::MinElement { m },
            ObjectiveSpec::MinK { k } => Objective::MinK { k, m },
            ObjectiveSpec::MinBasis => {
                let inner = instance
                    .inner_matroid()
                    .expect("validated instance has an inner matroid")
                    .clone();
                Objective::MinBasis { k: inner.full_rank(), inner, m }
            }
        }
    }

    pub fn value(&self, s: IdSet, x: &[u32]) -> u64 {
        match self {
            Objective::MinElement { m } => f_min(s, x, *m),
            Objective::MinK { k, m } => f_mink(s, x, *k, *m),
            Objective::MinBasis { inner, m, .. } => f_minbasis(s, x, inner, *m),
            Objective::KthSmallest { i, m } => y_i(s, x, *i, *m),
            Objective::KthBasis { inner, i, m } => g_i(s, x, inner, *i, *m),
        }
    }

    /// Largest value the objective can take.
    pub fn bound(&self) -> u64 {
        match self {
            Objective::MinElement { m }
            | Objective::KthSmallest { m, .. }
            | Objective::KthBasis { m, .. } => *m as u64,
            Objective::MinK { k, m } | Objective::MinBasis { k, m, .. } => *k as u64 * *m as u64,
        }
    }

    /// Number of summands for sum-of-`k` objectives.
    pub fn k(&self) -> usize {
        match self {
            Objective::MinK { k, .. } | Objective::MinBasis { k, .. } => *k,
            _ => 1,
        }
    }

    /// `i`-th summand `y_i` or `g_i` of a sum-of-`k` objective. For the
    /// single-term objectives this is `self` at `i = 1`.
    pub fn component(&self, i: usize) -> Objective {
        match self {
            Objective::MinK { m, .. } => Objective::KthSmallest { i, m: *m },
            Objective::MinBasis { inner, m, .. } => Objective::KthBasis {
                inner: inner.clone(),
                i,
                m: *m,
            },
            Objective::MinElement { m } => Objective::KthSmallest { i, m: *m },
            other => other.clone(),
        }
    }

    /// For single-term objectives: `value(S) <= t` iff `rank(S) >= target`.
    pub fn threshold_rank(&self) -> Option<(RankKind, usize)> {
        match self {
            Objective::MinElement { .. } => Some((RankKind::Trank, 1)),
            Objective::KthSmallest { i, .. } => Some((RankKind::Trank, *i)),
            Objective::KthBasis { inner, i, .. } => Some((RankKind::Mtrank(inner.clone()), *i)),
            _ => None,
        }
    }

    pub fn name(&self) -> String {
        match self {
            Objective::MinElement { .. } => "min".into(),
            Objective::MinK { k, .. } => format!("min_k(k={k})"),
            Objective::MinBasis { k, .. } => format!("min_basis(k={k})"),
            Objective::KthSmallest { i, .. } => format!("y_{i}"),
            Objective::KthBasis { i, .. } => format!("g_{i}"),
        }
    }
}
