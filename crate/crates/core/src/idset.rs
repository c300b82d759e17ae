//! Small dense sets of element ids backed by a 64-bit mask.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Largest universe an [`IdSet`] can address.
pub const MAX_IDS: usize = 64;

#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IdSet(u64);

impl IdSet {
    pub const EMPTY: IdSet = IdSet(0);

    pub const fn from_mask(mask: u64) -> Self {
        IdSet(mask)
    }

    /// `{0, 1, ..., n-1}`.
    pub fn full(n: usize) -> Self {
        assert!(n <= MAX_IDS, "universe of {n} ids exceeds {MAX_IDS}");
        if n == MAX_IDS {
            IdSet(u64::MAX)
        } else {
            IdSet((1u64 << n) - 1)
        }
    }

    pub fn singleton(id: usize) -> Self {
        assert!(id < MAX_IDS, "id {id} out of range");
        IdSet(1u64 << id)
    }

    pub const fn mask(self) -> u64 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, id: usize) -> bool {
        id < MAX_IDS && self.0 >> id & 1 == 1
    }

    pub fn insert(&mut self, id: usize) -> bool {
        let had = self.contains(id);
        self.0 |= Self::singleton(id).0;
        !had
    }

    pub fn remove(&mut self, id: usize) -> bool {
        let had = self.contains(id);
        if had {
            self.0 &= !(1u64 << id);
        }
        had
    }

    pub fn with(self, id: usize) -> Self {
        IdSet(self.0 | Self::singleton(id).0)
    }

    pub fn without(self, id: usize) -> Self {
        if id < MAX_IDS {
            IdSet(self.0 & !(1u64 << id))
        } else {
            self
        }
    }

    pub fn union(self, other: IdSet) -> Self {
        IdSet(self.0 | other.0)
    }

    pub fn intersection(self, other: IdSet) -> Self {
        IdSet(self.0 & other.0)
    }

    pub fn difference(self, other: IdSet) -> Self {
        IdSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: IdSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn iter(self) -> Iter {
        Iter(self.0)
    }

    /// Every subset of `self`, starting from the empty set.
    pub fn subsets(self) -> Subsets {
        Subsets {
            base: self.0,
            next: Some(0),
        }
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }
}

impl fmt::Debug for IdSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl fmt::Display for IdSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (n, id) in self.iter().enumerate() {
            if n > 0 {
                write!(f, ",")?;
            }
            write!(f, "{id}")?;
        }
        write!(f, "}}")
    }
}

impl FromIterator<usize> for IdSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut s = IdSet::EMPTY;
        for id in iter {
            s.insert(id);
        }
        s
    }
}

impl<'a> FromIterator<&'a usize> for IdSet {
    fn from_iter<I: IntoIterator<Item = &'a usize>>(iter: I) -> Self {
        iter.into_iter().copied().collect()
    }
}

impl IntoIterator for IdSet {
    type Item = usize;
    type IntoIter = Iter;

    fn into_iter(self) -> Iter {
        self.iter()
    }
}

/// Ascending ids of a set.
pub struct Iter(u64);

impl Iterator for Iter {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let id = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(id)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for Iter {}

pub struct Subsets {
    base: u64,
    next: Option<u64>,
}

impl Iterator for Subsets {
    type Item = IdSet;

    fn next(&mut self) -> Option<IdSet> {
        let cur = self.next?;
        // standard submask walk in increasing order
        let nxt = cur.wrapping_sub(self.base) & self.base;
        self.next = if nxt == 0 { None } else { Some(nxt) };
        Some(IdSet(cur))
    }
}

impl Serialize for IdSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter())
    }
}

impl<'de> Deserialize<'de> for IdSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let ids = Vec::<usize>::deserialize(deserializer)?;
        if let Some(bad) = ids.iter().find(|&&id| id >= MAX_IDS) {
            return Err(serde::de::Error::custom(format!("id {bad} out of range")));
        }
        Ok(ids.into_iter().collect())
    }
}
