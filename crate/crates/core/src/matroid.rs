//! Matroids given by independence oracles.
//!
//! Three families are supported: uniform, partition and explicit (a listed
//! family of independent sets over at most 16 ground elements, stored as a
//! bit table). Contraction is lazy: a contracted matroid keeps the base
//! oracle and the contracted set, and answers `T` with `T ∪ S`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::idset::IdSet;

/// Ground-size cap for explicit matroids.
pub const EXPLICIT_MAX_GROUND: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionBlock {
    pub ids: Vec<usize>,
    pub cap: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum MatroidSpec {
    Uniform {
        rank: usize,
        ground: Vec<usize>,
    },
    Partition {
        blocks: Vec<PartitionBlock>,
    },
    Explicit {
        ground: Vec<usize>,
        independent: Vec<Vec<usize>>,
    },
}

#[derive(Debug)]
enum Base {
    Uniform { rank: usize },
    Partition { blocks: Vec<(IdSet, usize)> },
    Explicit(ExplicitTable),
}

/// Independence table indexed by the local bit pattern of a subset.
#[derive(Debug)]
struct ExplicitTable {
    ids: Vec<usize>,
    bits: Vec<u64>,
}

impl ExplicitTable {
    fn local(&self, s: IdSet) -> usize {
        self.ids
            .iter()
            .enumerate()
            .filter(|&(_, &id)| s.contains(id))
            .fold(0usize, |acc, (pos, _)| acc | 1 << pos)
    }

    fn get(&self, local: usize) -> bool {
        self.bits[local / 64] >> (local % 64) & 1 == 1
    }

    fn set(&mut self, local: usize) {
        self.bits[local / 64] |= 1 << (local % 64);
    }
}

#[derive(Debug, Clone)]
pub struct Matroid {
    base: Arc<Base>,
    spec: Arc<MatroidSpec>,
    ground: IdSet,
    contracted: IdSet,
}

impl Matroid {
    /// Builds a matroid from its description. Explicit families are closed
    /// downward first and must then satisfy the matroid axioms.
    pub fn from_spec(spec: &MatroidSpec) -> Result<Self> {
        let (base, ground) = match spec {
            MatroidSpec::Uniform { rank, ground } => {
                (Base::Uniform { rank: *rank }, ids_to_set(ground)?)
            }
            MatroidSpec::Partition { blocks } => {
                let mut ground = IdSet::EMPTY;
                let mut out = Vec::with_capacity(blocks.len());
                for block in blocks {
                    let ids = ids_to_set(&block.ids)?;
                    if !ground.intersection(ids).is_empty() {
                        return Err(Error::Matroid(format!(
                            "partition blocks overlap on {}",
                            ground.intersection(ids)
                        )));
                    }
                    ground = ground.union(ids);
                    out.push((ids, block.cap));
                }
                (Base::Partition { blocks: out }, ground)
            }
            MatroidSpec::Explicit { ground, independent } => {
                let ground_set = ids_to_set(ground)?;
                let table = explicit_table(ground, independent, true)?;
                if !table_satisfies_axioms(&table) {
                    return Err(Error::Matroid(
                        "independent family violates the exchange axiom".into(),
                    ));
                }
                (Base::Explicit(table), ground_set)
            }
        };
        Ok(Matroid {
            base: Arc::new(base),
            spec: Arc::new(spec.clone()),
            ground,
            contracted: IdSet::EMPTY,
        })
    }

    pub fn uniform(ground: IdSet, rank: usize) -> Self {
        Self::from_spec(&MatroidSpec::Uniform {
            rank,
            ground: ground.to_vec(),
        })
        .expect("uniform matroid is always valid")
    }

    pub fn ground(&self) -> IdSet {
        self.ground
    }

    /// Elements this matroid has been contracted by.
    pub fn contracted(&self) -> IdSet {
        self.contracted
    }

    pub fn spec(&self) -> &MatroidSpec {
        &self.spec
    }

    fn base_independent(&self, s: IdSet) -> bool {
        match &*self.base {
            Base::Uniform { rank } => s.len() <= *rank,
            Base::Partition { blocks } => blocks
                .iter()
                .all(|(ids, cap)| s.intersection(*ids).len() <= *cap),
            Base::Explicit(table) => table.get(table.local(s)),
        }
    }

    /// Independence test without the ground-set check. Elements outside the
    /// ground set make the answer meaningless.
    pub fn independent_unchecked(&self, s: IdSet) -> bool {
        self.base_independent(s.union(self.contracted))
    }

    pub fn is_independent(&self, s: IdSet) -> Result<bool> {
        self.check_ground(s)?;
        Ok(self.independent_unchecked(s))
    }

    fn check_ground(&self, s: IdSet) -> Result<()> {
        if s.is_subset(self.ground) {
            Ok(())
        } else {
            Err(Error::NotInGround {
                set: s.to_string(),
                ground: self.ground.to_string(),
            })
        }
    }

    /// `M / S`: ground `ground − S`, independent sets `T` with `T ∪ S`
    /// independent in `M`.
    pub fn contract(&self, s: IdSet) -> Result<Matroid> {
        self.check_ground(s)?;
        if !self.independent_unchecked(s) {
            return Err(Error::NotIndependent(s.to_string()));
        }
        Ok(Matroid {
            base: Arc::clone(&self.base),
            spec: Arc::clone(&self.spec),
            ground: self.ground.difference(s),
            contracted: self.contracted.union(s),
        })
    }

    /// `M \ S`: the restriction to `ground − S`.
    pub fn delete(&self, s: IdSet) -> Matroid {
        Matroid {
            base: Arc::clone(&self.base),
            spec: Arc::clone(&self.spec),
            ground: self.ground.difference(s),
            contracted: self.contracted,
        }
    }

    /// Size of a maximum independent subset of `s`, by greedy augmentation.
    pub fn rank(&self, s: IdSet) -> usize {
        let mut acc = IdSet::EMPTY;
        for e in s.intersection(self.ground) {
            if self.independent_unchecked(acc.with(e)) {
                acc.insert(e);
            }
        }
        acc.len()
    }

    pub fn full_rank(&self) -> usize {
        self.rank(self.ground)
    }

    /// Greedy min-weight basis of `s`: scan in ascending `(weight, id)` order
    /// and keep each element that preserves independence. The result is in
    /// order of addition, which is also ascending weight.
    pub fn min_weight_basis(&self, weights: &[u32], s: IdSet) -> Vec<usize> {
        let mut order: Vec<usize> = s.intersection(self.ground).to_vec();
        order.sort_by_key(|&e| (weights[e], e));
        let mut acc = IdSet::EMPTY;
        let mut out = Vec::new();
        for e in order {
            if self.independent_unchecked(acc.with(e)) {
                acc.insert(e);
                out.push(e);
            }
        }
        out
    }

    /// Every independent subset of the ground set, for small grounds.
    pub fn independent_sets(&self) -> Vec<IdSet> {
        self.ground
            .subsets()
            .filter(|&s| self.independent_unchecked(s))
            .collect()
    }
}

fn ids_to_set(ids: &[usize]) -> Result<IdSet> {
    let mut s = IdSet::EMPTY;
    for &id in ids {
        if id >= crate::idset::MAX_IDS {
            return Err(Error::Matroid(format!("id {id} out of range")));
        }
        if !s.insert(id) {
            return Err(Error::Matroid(format!("duplicate id {id}")));
        }
    }
    Ok(s)
}

fn explicit_table(
    ground: &[usize],
    independent: &[Vec<usize>],
    close_downward: bool,
) -> Result<ExplicitTable> {
    if ground.len() > EXPLICIT_MAX_GROUND {
        return Err(Error::Matroid(format!(
            "explicit ground of {} elements exceeds {EXPLICIT_MAX_GROUND}",
            ground.len()
        )));
    }
    let ground_set = ids_to_set(ground)?;
    let size = 1usize << ground.len();
    let mut table = ExplicitTable {
        ids: ground.to_vec(),
        bits: vec![0; size.div_ceil(64)],
    };
    for set in independent {
        let s = ids_to_set(set)?;
        if !s.is_subset(ground_set) {
            return Err(Error::Matroid(format!(
                "independent set {s} is not inside the ground {ground_set}"
            )));
        }
        table.set(table.local(s));
    }
    if close_downward {
        // walk from large to small patterns so closure propagates in one pass
        for local in (0..size).rev() {
            if table.get(local) {
                let mut rest = local;
                while rest != 0 {
                    let bit = rest & rest.wrapping_neg();
                    table.set(local & !bit);
                    rest &= rest - 1;
                }
            }
        }
    }
    Ok(table)
}

fn table_satisfies_axioms(table: &ExplicitTable) -> bool {
    let n = table.ids.len();
    let size = 1usize << n;
    if !table.get(0) {
        return false;
    }
    for a in 0..size {
        if !table.get(a) {
            continue;
        }
        // downward closure: every one-smaller subset is independent
        let mut rest = a;
        while rest != 0 {
            let bit = rest & rest.wrapping_neg();
            if !table.get(a & !bit) {
                return false;
            }
            rest &= rest - 1;
        }
    }
    // exchange; with downward closure it suffices to check |B| = |A| + 1
    for a in 0..size {
        if !table.get(a) {
            continue;
        }
        let a_len = a.count_ones();
        for b in 0..size {
            if b.count_ones() != a_len + 1 || !table.get(b) {
                continue;
            }
            let mut candidates = b & !a;
            let mut found = false;
            while candidates != 0 {
                let bit = candidates & candidates.wrapping_neg();
                if table.get(a | bit) {
                    found = true;
                    break;
                }
                candidates &= candidates - 1;
            }
            if !found {
                return false;
            }
        }
    }
    true
}

/// Axiom check on an explicit family as listed (no downward closure):
/// contains the empty set, is downward closed, and satisfies exchange.
/// Uniform and partition descriptions always describe matroids.
pub fn check_axioms(spec: &MatroidSpec) -> Result<bool> {
    match spec {
        MatroidSpec::Explicit { ground, independent } => {
            let table = explicit_table(ground, independent, false)?;
            Ok(table_satisfies_axioms(&table))
        }
        _ => Ok(true),
    }
}
