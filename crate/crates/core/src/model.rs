//! Instances, weight distributions and realizations.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::idset::{IdSet, MAX_IDS};
use crate::matroid::{Matroid, MatroidSpec};
use crate::rational::{self, Rational};

/// Env var overriding the enumeration / oracle state cap.
pub const STATE_CAP_ENV: &str = "PROBEMIN_STATE_CAP";
pub const DEFAULT_STATE_CAP: u128 = 1 << 22;

/// Tolerance on probability sums that are not exactly one.
pub const PROB_SUM_TOLERANCE: f64 = 1e-12;

pub fn state_cap() -> u128 {
    std::env::var(STATE_CAP_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_STATE_CAP)
}

/// Finite distribution on `{0, ..., m}` with exact probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightDistribution {
    support: Vec<(u32, Rational)>,
    /// `floor(P(X <= v_j) * 2^64)` per support point, for sampling.
    cutoffs: Vec<u128>,
}

impl WeightDistribution {
    /// Sorts the points, rejects duplicates and negative masses, and requires
    /// the masses to sum to one (exactly, or within 1e-12 in which case they
    /// are renormalized).
    pub fn new(points: Vec<(u32, Rational)>) -> std::result::Result<Self, String> {
        if points.is_empty() {
            return Err("empty support".into());
        }
        let mut points = points;
        points.sort_by_key(|(v, _)| *v);
        if points.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err("duplicate support value".into());
        }
        if points
            .iter()
            .any(|(_, p)| *p < Rational::zero() || *p > Rational::one())
        {
            return Err("probability outside [0, 1]".into());
        }
        let total: Rational = points.iter().map(|(_, p)| p.clone()).sum();
        if total != Rational::one() {
            let gap = (rational::to_f64(&total) - 1.0).abs();
            if gap > PROB_SUM_TOLERANCE || total.is_zero() {
                return Err(format!(
                    "probabilities sum to {} instead of 1",
                    rational::to_string(&total)
                ));
            }
            for (_, p) in points.iter_mut() {
                *p = &*p / &total;
            }
        }
        Ok(Self::from_sorted(points))
    }

    fn from_sorted(support: Vec<(u32, Rational)>) -> Self {
        let scale = Rational::from_integer(BigInt::from(1u128 << 64));
        let mut cum = Rational::zero();
        let mut cutoffs = Vec::with_capacity(support.len());
        for (j, (_, p)) in support.iter().enumerate() {
            cum += p;
            let c = if j + 1 == support.len() {
                1u128 << 64
            } else {
                (&cum * &scale).floor().to_integer().to_u128().unwrap_or(1 << 64)
            };
            cutoffs.push(c);
        }
        WeightDistribution { support, cutoffs }
    }

    pub fn point(value: u32) -> Self {
        Self::from_sorted(vec![(value, Rational::one())])
    }

    /// `low` with probability `p_low`, `high` otherwise. Zero-mass points are
    /// dropped.
    pub fn two_point(low: u32, p_low: Rational, high: u32) -> Self {
        assert!(low < high);
        let p_high = Rational::one() - &p_low;
        let pts: Vec<_> = [(low, p_low), (high, p_high)]
            .into_iter()
            .filter(|(_, p)| !p.is_zero())
            .collect();
        Self::from_sorted(pts)
    }

    pub fn support(&self) -> &[(u32, Rational)] {
        &self.support
    }

    pub fn max_value(&self) -> u32 {
        self.support.last().map(|(v, _)| *v).unwrap_or(0)
    }

    /// `P(X <= t)`.
    pub fn below_prob(&self, t: u32) -> Rational {
        self.support
            .iter()
            .take_while(|(v, _)| *v <= t)
            .map(|(_, p)| p.clone())
            .sum()
    }

    /// `P(X > t)`.
    pub fn above_prob(&self, t: u32) -> Rational {
        Rational::one() - self.below_prob(t)
    }

    pub fn mean(&self) -> Rational {
        self.support
            .iter()
            .map(|(v, p)| p * Rational::from_integer(BigInt::from(*v)))
            .sum()
    }

    pub fn contains(&self, value: u32) -> bool {
        self.support.iter().any(|(v, _)| *v == value)
    }

    fn draw(&self, u: u64) -> u32 {
        let u = u as u128;
        let j = self.cutoffs.iter().position(|&c| u < c).unwrap_or(self.support.len() - 1);
        self.support[j].0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Element {
    pub id: usize,
    pub cost: Rational,
    pub dist: WeightDistribution,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConstraintSpec {
    /// Total cost at most `budget`.
    Knapsack { budget: Rational },
    /// At most `budget` elements.
    Cardinality { budget: usize },
    /// Independent in the outer matroid.
    Matroid(MatroidSpec),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectiveSpec {
    /// Smallest weight in the selection.
    MinElement,
    /// Sum of the `k` smallest weights.
    MinK { k: usize },
    /// Weight of a minimum basis of the inner matroid inside the selection.
    MinBasis,
}

/// Fixed weight for every element.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Realization(pub Vec<u32>);

impl Realization {
    pub fn weights(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl std::ops::Index<usize> for Realization {
    type Output = u32;

    fn index(&self, e: usize) -> &u32 {
        &self.0[e]
    }
}

#[derive(Debug, Clone)]
pub struct Instance {
    pub elements: Vec<Element>,
    pub m: u32,
    pub k: usize,
    pub constraint: ConstraintSpec,
    pub objective: ObjectiveSpec,
    inner: Option<Matroid>,
    outer: Option<Matroid>,
}

impl Instance {
    /// Validates and assembles an instance. Elements must carry ids
    /// `0..n` (in any order).
    pub fn new(
        mut elements: Vec<Element>,
        m: u32,
        k: usize,
        constraint: ConstraintSpec,
        objective: ObjectiveSpec,
        inner_matroid: Option<MatroidSpec>,
        outer_matroid: Option<MatroidSpec>,
    ) -> Result<Self> {
        elements.sort_by_key(|e| e.id);
        for (pos, e) in elements.iter().enumerate() {
            if e.id != pos {
                return Err(if pos > 0 && elements[pos - 1].id == e.id {
                    Error::invalid(format!("duplicate element id {}", e.id))
                } else {
                    Error::invalid(format!("element ids must be 0..n; missing id {pos}"))
                });
            }
            if e.cost < Rational::zero() {
                return Err(Error::invalid(format!("element {} has negative cost", e.id)));
            }
            if e.dist.max_value() > m {
                return Err(Error::Distribution {
                    element: e.id,
                    reason: format!("value {} exceeds m = {m}", e.dist.max_value()),
                });
            }
        }
        if elements.len() > MAX_IDS {
            return Err(Error::invalid(format!(
                "{} elements exceed the supported {MAX_IDS}",
                elements.len()
            )));
        }
        if k < 1 {
            return Err(Error::invalid("k must be at least 1"));
        }
        if let ConstraintSpec::Knapsack { budget } = &constraint {
            if *budget < Rational::zero() {
                return Err(Error::invalid("knapsack budget must be non-negative"));
            }
        }
        if let ObjectiveSpec::MinK { k: kk } = objective {
            if kk < 1 {
                return Err(Error::invalid("min_k needs k >= 1"));
            }
        }
        let universe = IdSet::full(elements.len());
        let build = |spec: &MatroidSpec, what: &str| -> Result<Matroid> {
            let mat = Matroid::from_spec(spec)?;
            if !mat.ground().is_subset(universe) {
                return Err(Error::Matroid(format!(
                    "{what} matroid ground {} is not inside the universe",
                    mat.ground()
                )));
            }
            Ok(mat)
        };
        let inner = inner_matroid.as_ref().map(|s| build(s, "inner")).transpose()?;
        let outer_spec = match &constraint {
            ConstraintSpec::Matroid(spec) => Some(spec),
            _ => outer_matroid.as_ref(),
        };
        let outer = outer_spec.map(|s| build(s, "outer")).transpose()?;
        if objective == ObjectiveSpec::MinBasis {
            let Some(inner) = &inner else {
                return Err(Error::invalid("min_basis objective needs an inner matroid"));
            };
            if inner.full_rank() != k {
                return Err(Error::invalid(format!(
                    "inner matroid rank {} differs from k = {k}",
                    inner.full_rank()
                )));
            }
        }
        Ok(Instance {
            elements,
            m,
            k,
            constraint,
            objective,
            inner,
            outer,
        })
    }

    pub fn n(&self) -> usize {
        self.elements.len()
    }

    pub fn universe(&self) -> IdSet {
        IdSet::full(self.n())
    }

    pub fn element(&self, id: usize) -> &Element {
        &self.elements[id]
    }

    pub fn cost(&self, id: usize) -> &Rational {
        &self.elements[id].cost
    }

    pub fn set_cost(&self, s: IdSet) -> Rational {
        s.iter().map(|e| self.elements[e].cost.clone()).sum()
    }

    pub fn inner_matroid(&self) -> Option<&Matroid> {
        self.inner.as_ref()
    }

    /// The constraint matroid (or the declared outer matroid).
    pub fn outer_matroid(&self) -> Option<&Matroid> {
        self.outer.as_ref()
    }

    /// Knapsack budget, or the cardinality budget as a number.
    pub fn budget(&self) -> Option<Rational> {
        match &self.constraint {
            ConstraintSpec::Knapsack { budget } => Some(budget.clone()),
            ConstraintSpec::Cardinality { budget } => {
                Some(Rational::from_integer(BigInt::from(*budget)))
            }
            ConstraintSpec::Matroid(_) => None,
        }
    }

    /// Membership in the strict feasible family.
    pub fn is_feasible(&self, s: IdSet) -> bool {
        match &self.constraint {
            ConstraintSpec::Knapsack { budget } => self.set_cost(s) <= *budget,
            ConstraintSpec::Cardinality { budget } => s.len() <= *budget,
            ConstraintSpec::Matroid(_) => {
                let mat = self.outer.as_ref().expect("matroid constraint is built");
                s.is_subset(mat.ground()) && mat.independent_unchecked(s)
            }
        }
    }

    /// Per-element cost as seen by the constraint: `c_e` for knapsacks, one
    /// for cardinality budgets.
    pub fn constraint_cost(&self, id: usize) -> Rational {
        match &self.constraint {
            ConstraintSpec::Cardinality { .. } => Rational::one(),
            _ => self.elements[id].cost.clone(),
        }
    }

    /// Sum of [`Instance::constraint_cost`] over `s`.
    pub fn set_cost_for_constraint(&self, s: IdSet) -> Rational {
        s.iter().map(|e| self.constraint_cost(e)).sum()
    }

    pub fn below_prob(&self, id: usize, t: u32) -> Rational {
        self.elements[id].dist.below_prob(t)
    }

    pub fn below_probs(&self, t: u32) -> Vec<Rational> {
        self.elements.iter().map(|e| e.dist.below_prob(t)).collect()
    }

    /// Same instance with every weight replaced by the two-point
    /// distribution `{(0, p_e), (m, 1 - p_e)}`, `p_e = P(X_e <= t)`.
    pub fn collapse_to_bernoulli(&self, t: u32) -> Instance {
        let mut out = self.clone();
        for e in out.elements.iter_mut() {
            let p = e.dist.below_prob(t);
            e.dist = if self.m == 0 {
                WeightDistribution::point(0)
            } else {
                WeightDistribution::two_point(0, p, self.m)
            };
        }
        out
    }

    /// Product of support sizes over `subset`.
    pub fn outcome_count(&self, subset: IdSet) -> u128 {
        subset
            .iter()
            .map(|e| self.elements[e].dist.support.len() as u128)
            .fold(1u128, |acc, s| acc.saturating_mul(s))
    }
}

/// Draws one weight per element. Element `e` of trial `trial` uses its own
/// counter block of a ChaCha stream keyed by `seed`, so the result depends
/// only on `(seed, trial)` and elements are independent.
pub fn sample_realization(instance: &Instance, seed: u64, trial: u64) -> Realization {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    let weights = instance
        .elements
        .iter()
        .map(|e| {
            rng.set_word_pos(2 * e.id as u128);
            e.dist.draw(rng.next_u64())
        })
        .collect();
    Realization(weights)
}

/// All outcome profiles with their probabilities.
pub fn enumerate_realizations(instance: &Instance) -> Result<Outcomes<'_>> {
    enumerate_with_cap(instance, instance.universe(), state_cap())
}

/// Outcome profiles of the elements in `subset`; elements outside it are
/// pinned to their smallest support value and contribute probability one.
pub fn enumerate_with_cap(instance: &Instance, subset: IdSet, cap: u128) -> Result<Outcomes<'_>> {
    let needed = instance.outcome_count(subset);
    if needed > cap {
        return Err(Error::CapExceeded { needed, cap });
    }
    let digits = vec![0usize; instance.n()];
    Ok(Outcomes {
        instance,
        free: subset.to_vec(),
        digits,
        done: false,
    })
}

pub struct Outcomes<'a> {
    instance: &'a Instance,
    free: Vec<usize>,
    digits: Vec<usize>,
    done: bool,
}

impl Iterator for Outcomes<'_> {
    type Item = (Realization, Rational);

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let elems = &self.instance.elements;
        let weights = elems
            .iter()
            .map(|e| e.dist.support[self.digits[e.id]].0)
            .collect();
        let prob = self
            .free
            .iter()
            .fold(Rational::one(), |acc, &e| acc * &elems[e].dist.support[self.digits[e]].1);
        // mixed-radix increment over the free elements
        self.done = true;
        for &e in &self.free {
            self.digits[e] += 1;
            if self.digits[e] < elems[e].dist.support.len() {
                self.done = false;
                break;
            }
            self.digits[e] = 0;
        }
        Some((Realization(weights), prob))
    }
}

// ---------------------------------------------------------------------------
// JSON document format

fn parse_number(v: &Value, what: &str) -> Result<Rational> {
    let text = match v {
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        _ => return Err(Error::malformed(format!("{what}: expected a number or \"a/b\""))),
    };
    rational::parse(&text).ok_or_else(|| Error::malformed(format!("{what}: cannot parse {text:?}")))
}

fn parse_uint(v: Option<&Value>, what: &str) -> Result<u64> {
    v.and_then(Value::as_u64)
        .ok_or_else(|| Error::malformed(format!("{what}: expected a non-negative integer")))
}

fn parse_matroid(v: &Value, what: &str) -> Result<MatroidSpec> {
    serde_json::from_value(v.clone()).map_err(|e| Error::malformed(format!("{what}: {e}")))
}

/// Parses an instance document.
pub fn parse_instance(text: &str) -> Result<Instance> {
    let doc: Value = serde_json::from_str(text)?;
    let obj = doc
        .as_object()
        .ok_or_else(|| Error::malformed("top level must be an object"))?;
    let m = u32::try_from(parse_uint(obj.get("m"), "m")?)
        .map_err(|_| Error::malformed("m out of range"))?;
    let mut k = match obj.get("k") {
        Some(v) => parse_uint(Some(v), "k")? as usize,
        None => 1,
    };

    let inner = obj
        .get("inner_matroid")
        .filter(|v| !v.is_null())
        .map(|v| parse_matroid(v, "inner_matroid"))
        .transpose()?;
    let outer = obj
        .get("outer_matroid")
        .filter(|v| !v.is_null())
        .map(|v| parse_matroid(v, "outer_matroid"))
        .transpose()?;

    let constraint_doc = obj
        .get("constraint")
        .ok_or_else(|| Error::malformed("missing constraint"))?;
    let constraint = match constraint_doc.get("type").and_then(Value::as_str) {
        Some("knapsack") => ConstraintSpec::Knapsack {
            budget: parse_number(
                constraint_doc
                    .get("budget")
                    .ok_or_else(|| Error::malformed("knapsack constraint needs a budget"))?,
                "budget",
            )?,
        },
        Some("cardinality") => ConstraintSpec::Cardinality {
            budget: parse_uint(constraint_doc.get("budget"), "cardinality budget")? as usize,
        },
        Some("matroid") => {
            let spec = match constraint_doc.get("matroid") {
                Some(v) => parse_matroid(v, "constraint.matroid")?,
                None => outer
                    .clone()
                    .ok_or_else(|| Error::malformed("matroid constraint needs outer_matroid"))?,
            };
            ConstraintSpec::Matroid(spec)
        }
        other => return Err(Error::malformed(format!("unknown constraint type {other:?}"))),
    };

    let objective_doc = obj
        .get("objective")
        .cloned()
        .unwrap_or_else(|| json!({"type": "min"}));
    let objective = match objective_doc.get("type").and_then(Value::as_str) {
        Some("min") => ObjectiveSpec::MinElement,
        Some("min_k") => {
            if let Some(v) = objective_doc.get("k") {
                k = parse_uint(Some(v), "objective.k")? as usize;
            }
            ObjectiveSpec::MinK { k }
        }
        Some("min_basis") => ObjectiveSpec::MinBasis,
        other => return Err(Error::malformed(format!("unknown objective type {other:?}"))),
    };

    let elements_doc = obj
        .get("elements")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::malformed("elements must be an array"))?;
    let mut elements = Vec::with_capacity(elements_doc.len());
    let mut seen = BTreeMap::new();
    for (pos, e) in elements_doc.iter().enumerate() {
        let id = match e.get("id") {
            Some(v) => parse_uint(Some(v), "element id")? as usize,
            None => pos,
        };
        if seen.insert(id, ()).is_some() {
            return Err(Error::invalid(format!("duplicate element id {id}")));
        }
        let cost = match e.get("cost") {
            Some(v) => parse_number(v, "cost")?,
            None => Rational::one(),
        };
        let dist_doc = e
            .get("dist")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::malformed(format!("element {id}: dist must be an array")))?;
        let mut points = Vec::with_capacity(dist_doc.len());
        for p in dist_doc {
            let pair = p
                .as_array()
                .filter(|a| a.len() == 2)
                .ok_or_else(|| Error::malformed(format!("element {id}: dist entries are [value, prob]")))?;
            let value = u32::try_from(parse_uint(pair.first(), "dist value")?)
                .map_err(|_| Error::malformed("dist value out of range"))?;
            if value > m {
                return Err(Error::Distribution {
                    element: id,
                    reason: format!("value {value} exceeds m = {m}"),
                });
            }
            points.push((value, parse_number(&pair[1], "probability")?));
        }
        let dist = WeightDistribution::new(points)
            .map_err(|reason| Error::Distribution { element: id, reason })?;
        elements.push(Element { id, cost, dist });
    }
    Instance::new(elements, m, k, constraint, objective, inner, outer)
}

fn number_value(r: &Rational) -> Value {
    if r.is_integer() {
        if let Some(i) = r.to_integer().to_i64() {
            return json!(i);
        }
    }
    Value::String(rational::to_string(r))
}

/// Renders an instance in the document format; `parse_instance` inverts it.
pub fn instance_to_json(instance: &Instance) -> Value {
    let constraint = match &instance.constraint {
        ConstraintSpec::Knapsack { budget } => {
            json!({"type": "knapsack", "budget": number_value(budget)})
        }
        ConstraintSpec::Cardinality { budget } => json!({"type": "cardinality", "budget": budget}),
        ConstraintSpec::Matroid(spec) => json!({"type": "matroid", "matroid": spec}),
    };
    let objective = match instance.objective {
        ObjectiveSpec::MinElement => json!({"type": "min"}),
        ObjectiveSpec::MinK { k } => json!({"type": "min_k", "k": k}),
        ObjectiveSpec::MinBasis => json!({"type": "min_basis"}),
    };
    let elements: Vec<Value> = instance
        .elements
        .iter()
        .map(|e| {
            let dist: Vec<Value> = e
                .dist
                .support()
                .iter()
                .map(|(v, p)| json!([v, number_value(p)]))
                .collect();
            json!({"id": e.id, "cost": number_value(&e.cost), "dist": dist})
        })
        .collect();
    let mut doc = json!({
        "m": instance.m,
        "k": instance.k,
        "constraint": constraint,
        "objective": objective,
        "elements": elements,
    });
    if let Some(inner) = &instance.inner {
        doc["inner_matroid"] = serde_json::to_value(inner.spec()).expect("matroid spec serializes");
    }
    if let (Some(outer), false) = (
        &instance.outer,
        matches!(instance.constraint, ConstraintSpec::Matroid(_)),
    ) {
        doc["outer_matroid"] = serde_json::to_value(outer.spec()).expect("matroid spec serializes");
    }
    doc
}

/// The three-element instance with adaptivity gap at least `N/2`:
/// `X_0 = N^2` w.p. `1/N^2` else 1; `X_1 = N^2` w.p. `1/N` else 0;
/// `X_2 = N` surely. Pick two, minimize the smallest weight.
pub fn gap_instance(n: u32) -> Instance {
    assert!(n >= 2, "gap instance needs N >= 2");
    let nn = n * n;
    let r = |a: u32, b: u32| rational::ratio(a as i64, b as i64);
    let elements = vec![
        Element {
            id: 0,
            cost: Rational::one(),
            dist: WeightDistribution::new(vec![(1, r(nn - 1, nn)), (nn, r(1, nn))]).unwrap(),
        },
        Element {
            id: 1,
            cost: Rational::one(),
            dist: WeightDistribution::new(vec![(0, r(n - 1, n)), (nn, r(1, n))]).unwrap(),
        },
        Element {
            id: 2,
            cost: Rational::one(),
            dist: WeightDistribution::point(n),
        },
    ];
    Instance::new(
        elements,
        nn,
        1,
        ConstraintSpec::Cardinality { budget: 2 },
        ObjectiveSpec::MinElement,
        None,
        None,
    )
    .expect("gap instance is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn coin(p: Rational) -> WeightDistribution {
        WeightDistribution::two_point(0, p, 3)
    }

    fn simple(dists: Vec<WeightDistribution>) -> Instance {
        let elements = dists
            .into_iter()
            .enumerate()
            .map(|(id, dist)| Element { id, cost: Rational::one(), dist })
            .collect();
        Instance::new(
            elements,
            5,
            1,
            ConstraintSpec::Cardinality { budget: 2 },
            ObjectiveSpec::MinElement,
            None,
            None,
        )
        .unwrap()
    }

    const GAP10: &str = r#"{
        "m": 100, "k": 1,
        "constraint": {"type": "cardinality", "budget": 2},
        "objective": {"type": "min"},
        "elements": [
            {"id": 0, "cost": 1, "dist": [[1, "99/100"], [100, "1/100"]]},
            {"id": 1, "cost": 1, "dist": [[0, 0.9], [100, 0.1]]},
            {"id": 2, "cost": 1, "dist": [[10, 1]]}
        ]
    }"#;

    #[test]
    fn parses_gap_document() {
        let inst = parse_instance(GAP10).unwrap();
        assert_eq!(inst.m, 100);
        assert_eq!(inst.n(), 3);
        assert_eq!(inst.below_prob(1, 50), ratio(9, 10));
        assert_eq!(
            inst.elements.iter().map(|e| &e.dist).collect::<Vec<_>>(),
            gap_instance(10).elements.iter().map(|e| &e.dist).collect::<Vec<_>>()
        );
    }

    #[test]
    fn parses_singleton() {
        let doc = r#"{"m": 3, "constraint": {"type": "knapsack", "budget": "1/2"},
                      "elements": [{"id": 0, "cost": 1, "dist": [[0, 1.0]]}]}"#;
        let inst = parse_instance(doc).unwrap();
        assert_eq!(inst.n(), 1);
        assert_eq!(inst.budget(), Some(ratio(1, 2)));
    }

    #[test]
    fn rejects_bad_documents() {
        let short = r#"{"m": 3, "constraint": {"type": "cardinality", "budget": 1},
                        "elements": [{"id": 0, "dist": [[0, 0.5], [1, 0.4]]}]}"#;
        assert!(matches!(parse_instance(short), Err(Error::Distribution { .. })));
        let big = r#"{"m": 3, "constraint": {"type": "cardinality", "budget": 1},
                      "elements": [{"id": 0, "dist": [[4, 1]]}]}"#;
        assert!(matches!(parse_instance(big), Err(Error::Distribution { .. })));
        let dup = r#"{"m": 3, "constraint": {"type": "cardinality", "budget": 1},
                      "elements": [{"id": 0, "dist": [[0, 1]]}, {"id": 0, "dist": [[1, 1]]}]}"#;
        assert!(matches!(parse_instance(dup), Err(Error::Invalid(_))));
        let gap = r#"{"m": 3, "constraint": {"type": "cardinality", "budget": 1},
                      "elements": [{"id": 1, "dist": [[0, 1]]}]}"#;
        assert!(parse_instance(gap).is_err());
        assert!(parse_instance("[1,2]").is_err());
        assert!(parse_instance("{not json").is_err());
    }

    #[test]
    fn near_one_sums_are_renormalized() {
        let third = "0.333333333333333";
        let doc = format!(
            r#"{{"m": 3, "constraint": {{"type": "cardinality", "budget": 1}},
                "elements": [{{"id": 0, "dist": [[0, {third}], [1, {third}], [2, 0.333333333333334]]}}]}}"#
        );
        let inst = parse_instance(&doc).unwrap();
        let total: Rational = inst.elements[0].dist.support().iter().map(|(_, p)| p.clone()).sum();
        assert_eq!(total, Rational::one());
    }

    #[test]
    fn document_roundtrip() {
        let inst = gap_instance(4);
        let text = instance_to_json(&inst).to_string();
        let back = parse_instance(&text).unwrap();
        assert_eq!(back.elements, inst.elements);
        assert_eq!(back.m, inst.m);
        assert_eq!(back.constraint, inst.constraint);
    }

    #[test]
    fn below_prob_examples() {
        let d = WeightDistribution::new(vec![(0, ratio(1, 2)), (3, ratio(1, 2))]).unwrap();
        assert_eq!(d.below_prob(0), ratio(1, 2));
        assert_eq!(d.below_prob(2), ratio(1, 2));
        assert_eq!(d.below_prob(3), Rational::one());
        assert_eq!(d.below_prob(100), Rational::one());
    }

    #[test]
    fn sampling_is_deterministic_and_respects_point_masses() {
        let inst = simple(vec![WeightDistribution::point(5), coin(ratio(1, 2))]);
        for trial in 0..50 {
            let a = sample_realization(&inst, 11, trial);
            assert_eq!(a, sample_realization(&inst, 11, trial));
            assert_eq!(a[0], 5);
        }
    }

    #[test]
    fn sampling_mean_within_six_sigma() {
        let inst = simple(vec![WeightDistribution::two_point(0, ratio(1, 2), 1)]);
        let trials = 100_000u64;
        let ones: u64 = (0..trials).map(|t| sample_realization(&inst, 3, t)[0] as u64).sum();
        let mean = ones as f64 / trials as f64;
        assert!((mean - 0.5).abs() < 0.01, "mean {mean}");
    }

    #[test]
    fn sampling_marginals_pass_chi_square() {
        // three-point and two-point marginals, 10^5 draws each
        let d3 = WeightDistribution::new(vec![(0, ratio(1, 5)), (1, ratio(3, 10)), (4, ratio(1, 2))]).unwrap();
        let inst = simple(vec![d3, coin(ratio(7, 10))]);
        let trials = 100_000u64;
        let mut counts = vec![BTreeMap::<u32, u64>::new(); 2];
        for t in 0..trials {
            let x = sample_realization(&inst, 99, t);
            for e in 0..2 {
                *counts[e].entry(x[e]).or_default() += 1;
            }
        }
        // chi-square critical values at p = 0.001: df 1 -> 10.83, df 2 -> 13.82
        for (e, crit) in [(0usize, 13.82f64), (1, 10.83)] {
            let chi: f64 = inst.elements[e]
                .dist
                .support()
                .iter()
                .map(|(v, p)| {
                    let expect = rational::to_f64(p) * trials as f64;
                    let obs = *counts[e].get(v).unwrap_or(&0) as f64;
                    (obs - expect).powi(2) / expect
                })
                .sum();
            assert!(chi < crit, "element {e}: chi-square {chi}");
        }
    }

    #[test]
    fn enumeration_counts_and_mass() {
        let inst = simple(vec![coin(ratio(1, 3)), coin(ratio(1, 4))]);
        let outs: Vec<_> = enumerate_realizations(&inst).unwrap().collect();
        assert_eq!(outs.len(), 4);
        let total: Rational = outs.iter().map(|(_, p)| p.clone()).sum();
        assert_eq!(total, Rational::one());

        let gap = gap_instance(10);
        assert_eq!(enumerate_realizations(&gap).unwrap().count(), 4);

        let one = simple(vec![WeightDistribution::point(2)]);
        let outs: Vec<_> = enumerate_realizations(&one).unwrap().collect();
        assert_eq!(outs, vec![(Realization(vec![2]), Rational::one())]);
    }

    #[test]
    fn enumeration_cap() {
        let inst = simple(vec![coin(ratio(1, 3)); 5]);
        assert!(matches!(
            enumerate_with_cap(&inst, inst.universe(), 31),
            Err(Error::CapExceeded { needed: 32, cap: 31 })
        ));
    }

    #[test]
    fn collapse_keeps_below_probabilities() {
        let d = WeightDistribution::new(vec![(0, ratio(1, 5)), (2, ratio(3, 10)), (4, ratio(1, 2))]).unwrap();
        let inst = simple(vec![d]);
        let c = inst.collapse_to_bernoulli(2);
        assert_eq!(c.below_prob(0, 2), ratio(1, 2));
        assert_eq!(c.elements[0].dist.support().len(), 2);
    }

    proptest::proptest! {
        #[test]
        fn below_prob_is_monotone(masses in proptest::collection::vec(1u32..20, 1..6), t1 in 0u32..8, dt in 0u32..8) {
            let total: u32 = masses.iter().sum();
            let pts = masses.iter().enumerate()
                .map(|(v, &w)| (v as u32, ratio(w as i64, total as i64)))
                .collect();
            let d = WeightDistribution::new(pts).unwrap();
            proptest::prop_assert!(d.below_prob(t1) <= d.below_prob(t1 + dt));
            proptest::prop_assert_eq!(d.below_prob(d.max_value()), Rational::one());
        }
    }
}
