//! Seeded random instance generators for tests and verification suites.
//!
//! Probabilities are rationals with small denominators so that exact
//! arithmetic stays cheap.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::idset::IdSet;
use crate::matroid::{MatroidSpec, PartitionBlock};
use crate::model::{ConstraintSpec, Element, Instance, ObjectiveSpec, WeightDistribution};
use crate::rational::{self, Rational};

const DENOMINATORS: [i64; 7] = [2, 3, 4, 5, 6, 8, 10];

/// A probability `a/d` with `d` from a small set; includes 0 and 1.
pub fn probability<R: Rng + ?Sized>(rng: &mut R) -> Rational {
    let d = *DENOMINATORS.choose(rng).expect("nonempty");
    rational::ratio(rng.gen_range(0..=d), d)
}

/// Distribution on at most `max_support` distinct values in `0..=m`.
pub fn distribution<R: Rng + ?Sized>(rng: &mut R, m: u32, max_support: usize) -> WeightDistribution {
    let size = rng.gen_range(1..=max_support.min(m as usize + 1).max(1));
    let mut values: Vec<u32> = (0..=m).collect();
    values.shuffle(rng);
    values.truncate(size);
    // integer masses over a common denominator
    let den = *DENOMINATORS.choose(rng).expect("nonempty");
    let mut masses = vec![1i64; size];
    let total = den.max(size as i64);
    for _ in size as i64..total {
        let j = rng.gen_range(0..size);
        masses[j] += 1;
    }
    let points = values
        .into_iter()
        .zip(masses)
        .map(|(v, a)| (v, rational::ratio(a, total)))
        .collect();
    WeightDistribution::new(points).expect("masses sum to one")
}

/// A cost `a/2` with `a` in `1..=2·max`.
fn cost<R: Rng + ?Sized>(rng: &mut R, max: i64) -> Rational {
    rational::ratio(rng.gen_range(1..=2 * max), 2)
}

fn elements<R: Rng + ?Sized>(rng: &mut R, n: usize, m: u32, max_support: usize, costs: Vec<Rational>) -> Vec<Element> {
    costs
        .into_iter()
        .enumerate()
        .take(n)
        .map(|(id, cost)| Element {
            id,
            cost,
            dist: distribution(rng, m, max_support),
        })
        .collect()
}

/// Knapsack instance with integer budget in `1..=6` and half-integer
/// costs up to `budget + 1` (some elements may not fit at all).
pub fn knapsack_instance<R: Rng + ?Sized>(rng: &mut R, n: usize, m: u32, objective: ObjectiveSpec) -> Instance {
    let budget = rng.gen_range(1..=6);
    let costs = (0..n).map(|_| cost(rng, budget + 1)).collect();
    let els = elements(rng, n, m, 3, costs);
    let k = match objective {
        ObjectiveSpec::MinK { k } => k,
        _ => 1,
    };
    Instance::new(
        els,
        m,
        k,
        ConstraintSpec::Knapsack {
            budget: rational::int(budget),
        },
        objective,
        None,
        None,
    )
    .expect("generated instance is valid")
}

/// Knapsack instance whose costs are all at most `B / i`.
pub fn cheap_knapsack_instance<R: Rng + ?Sized>(rng: &mut R, n: usize, m: u32, i: usize) -> Instance {
    let budget = rng.gen_range(1..=6i64);
    let cap = rational::ratio(budget, i as i64);
    let costs = (0..n)
        .map(|_| &cap * rational::ratio(rng.gen_range(1..=4), 4))
        .collect();
    let els = elements(rng, n, m, 3, costs);
    Instance::new(
        els,
        m,
        1,
        ConstraintSpec::Knapsack {
            budget: rational::int(budget),
        },
        ObjectiveSpec::MinElement,
        None,
        None,
    )
    .expect("generated instance is valid")
}

/// Forests of a random multigraph on at most `max_rank + 1` vertices,
/// listed explicitly: loops are dependent, parallel edges are allowed.
pub fn graphic_matroid<R: Rng + ?Sized>(rng: &mut R, ground: &[usize], max_rank: usize) -> MatroidSpec {
    let vertices = rng.gen_range(2..=max_rank + 1);
    let edges: Vec<(usize, usize)> = ground
        .iter()
        .map(|_| (rng.gen_range(0..vertices), rng.gen_range(0..vertices)))
        .collect();
    let local = IdSet::full(ground.len());
    let independent = local
        .subsets()
        .filter(|s| {
            let mut parent: Vec<usize> = (0..vertices).collect();
            fn find(p: &mut [usize], mut v: usize) -> usize {
                while p[v] != v {
                    p[v] = p[p[v]];
                    v = p[v];
                }
                v
            }
            s.iter().all(|j| {
                let (a, b) = edges[j];
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                if ra == rb {
                    false
                } else {
                    parent[ra] = rb;
                    true
                }
            })
        })
        .map(|s| s.iter().map(|j| ground[j]).collect())
        .collect();
    MatroidSpec::Explicit {
        ground: ground.to_vec(),
        independent,
    }
}

/// Uniform, partition or explicit (graphic) matroid on `0..n` with rank at
/// most `max_rank`.
pub fn matroid_spec<R: Rng + ?Sized>(rng: &mut R, n: usize, max_rank: usize) -> MatroidSpec {
    let ground: Vec<usize> = (0..n).collect();
    match rng.gen_range(0..3) {
        0 => MatroidSpec::Uniform {
            rank: rng.gen_range(1..=max_rank.min(n).max(1)),
            ground,
        },
        1 => {
            let blocks = rng.gen_range(1..=max_rank.min(n).max(1));
            let mut ids: Vec<Vec<usize>> = vec![Vec::new(); blocks];
            for e in 0..n {
                ids[rng.gen_range(0..blocks)].push(e);
            }
            let blocks: Vec<PartitionBlock> = ids
                .into_iter()
                .filter(|b| !b.is_empty())
                .map(|b| PartitionBlock { ids: b, cap: 1 })
                .collect();
            // spend any remaining rank on larger caps
            let mut spare = max_rank.saturating_sub(blocks.len());
            let mut blocks = blocks;
            for b in blocks.iter_mut() {
                if spare > 0 && b.ids.len() > 1 && rng.gen_bool(0.5) {
                    b.cap += 1;
                    spare -= 1;
                }
            }
            MatroidSpec::Partition { blocks }
        }
        _ => graphic_matroid(rng, &ground, max_rank),
    }
}

/// Min-element instance constrained by a random matroid.
pub fn matroid_instance<R: Rng + ?Sized>(rng: &mut R, n: usize, m: u32, max_rank: usize) -> Instance {
    let spec = matroid_spec(rng, n, max_rank);
    let els = elements(rng, n, m, 3, vec![Rational::from_integer(1.into()); n]);
    Instance::new(
        els,
        m,
        1,
        ConstraintSpec::Matroid(spec),
        ObjectiveSpec::MinElement,
        None,
        None,
    )
    .expect("generated instance is valid")
}

/// Min-basis instance with an explicit (graphic) inner matroid and a
/// cardinality budget.
pub fn minbasis_instance<R: Rng + ?Sized>(rng: &mut R, n: usize, m: u32, budget: usize, max_rank: usize) -> Instance {
    let ground: Vec<usize> = (0..n).collect();
    let inner = graphic_matroid(rng, &ground, max_rank);
    let k = crate::matroid::Matroid::from_spec(&inner)
        .expect("forests form a matroid")
        .full_rank()
        .max(1);
    let els = elements(rng, n, m, 3, vec![Rational::from_integer(1.into()); n]);
    let inst = Instance::new(
        els.clone(),
        m,
        k,
        ConstraintSpec::Cardinality { budget },
        ObjectiveSpec::MinBasis,
        Some(inner.clone()),
        None,
    );
    match inst {
        Ok(i) => i,
        // a graph with only loops has rank 0; fall back to a single edge
        Err(_) => minbasis_instance(rng, n, m, budget, max_rank),
    }
}

/// Cardinality instance with `k` for min-k objectives.
pub fn mink_knapsack_instance<R: Rng + ?Sized>(rng: &mut R, n: usize, m: u32, k: usize) -> Instance {
    knapsack_instance(rng, n, m, ObjectiveSpec::MinK { k })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matroid::{check_axioms, Matroid};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_matroids_satisfy_axioms() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let n = rng.gen_range(1..=8);
            let spec = matroid_spec(&mut rng, n, 4);
            let m = Matroid::from_spec(&spec).unwrap();
            assert!(m.full_rank() <= 4);
            if let MatroidSpec::Explicit { .. } = spec {
                assert!(check_axioms(&spec).unwrap());
            }
        }
    }

    #[test]
    fn distributions_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..500 {
            let d = distribution(&mut rng, 7, 3);
            assert!(d.support().len() <= 3);
            assert!(d.max_value() <= 7);
        }
    }

    #[test]
    fn cheap_costs_respect_cap() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for i in 1..=4 {
            let inst = cheap_knapsack_instance(&mut rng, 8, 3, i);
            let cap = inst.budget().unwrap() / rational::int(i as i64);
            assert!((0..8).all(|e| *inst.cost(e) <= cap));
        }
    }

    #[test]
    fn minbasis_rank_matches_k() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..50 {
            let inst = minbasis_instance(&mut rng, 6, 3, 3, 4);
            assert_eq!(inst.inner_matroid().unwrap().full_rank(), inst.k);
        }
    }
}
