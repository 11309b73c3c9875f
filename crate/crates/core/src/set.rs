//! Subsets of a finite algebra, addressed by element index.

use fixedbitset::FixedBitSet;
use serde::{Serialize, Serializer};

use crate::error::{input, Result};

/// A subset of `{0, .., universe-1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ElementSet {
    bits: FixedBitSet,
}

impl ElementSet {
    pub fn empty(universe: usize) -> Self {
        ElementSet { bits: FixedBitSet::with_capacity(universe) }
    }

    pub fn full(universe: usize) -> Self {
        let mut bits = FixedBitSet::with_capacity(universe);
        bits.insert_range(..);
        ElementSet { bits }
    }

    /// Builds a set from indices, rejecting anything outside the universe.
    pub fn from_indices<I: IntoIterator<Item = usize>>(universe: usize, items: I) -> Result<Self> {
        let mut set = Self::empty(universe);
        for x in items {
            if x >= universe {
                return input(format!("element {x} out of range (size {universe})"));
            }
            set.bits.insert(x);
        }
        Ok(set)
    }

    pub fn from_predicate(universe: usize, mut pred: impl FnMut(usize) -> bool) -> Self {
        let mut set = Self::empty(universe);
        for x in 0..universe {
            if pred(x) {
                set.bits.insert(x);
            }
        }
        set
    }

    /// The set whose membership bits are the low `universe` bits of `mask`.
    /// Elements from 64 on are absent.
    pub fn from_mask(universe: usize, mask: u64) -> Self {
        Self::from_predicate(universe, |x| x < 64 && mask >> x & 1 == 1)
    }

    pub fn universe(&self) -> usize {
        self.bits.len()
    }

    #[inline]
    pub fn contains(&self, x: usize) -> bool {
        self.bits.contains(x)
    }

    pub fn insert(&mut self, x: usize) {
        self.bits.insert(x);
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_clear()
    }

    pub fn is_full(&self) -> bool {
        self.len() == self.universe()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.ones()
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn is_subset(&self, other: &ElementSet) -> bool {
        self.bits.is_subset(&other.bits)
    }

    pub fn complement(&self) -> ElementSet {
        let mut bits = self.bits.clone();
        bits.toggle_range(..);
        ElementSet { bits }
    }

    pub fn union(&self, other: &ElementSet) -> ElementSet {
        let mut bits = self.bits.clone();
        bits.union_with(&other.bits);
        ElementSet { bits }
    }

    pub fn intersection(&self, other: &ElementSet) -> ElementSet {
        let mut bits = self.bits.clone();
        bits.intersect_with(&other.bits);
        ElementSet { bits }
    }

    pub(crate) fn check_universe(&self, size: usize, what: &str) -> Result<()> {
        if self.universe() != size {
            return input(format!("{what}: set over {} elements used with an algebra of size {size}", self.universe()));
        }
        Ok(())
    }
}

impl Serialize for ElementSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter())
    }
}

impl std::fmt::Display for ElementSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{{")?;
        for (k, x) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "}}")
    }
}
