//! Equivalence relations stored as partitions.

use std::collections::HashMap;
use std::hash::Hash;

use serde::Serialize;

use crate::algebra::BinaryRelation;
use crate::error::{input, Error, Result};
use crate::set::ElementSet;

/// A partition of `0..size`. Classes are numbered by their least element.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EquivalenceRelation {
    class_of: Vec<usize>,
    classes: Vec<Vec<usize>>,
}

impl EquivalenceRelation {
    /// Groups elements with equal keys.
    pub fn from_signature<K: Hash + Eq>(keys: impl IntoIterator<Item = K>) -> Self {
        let mut ids: HashMap<K, usize> = HashMap::new();
        let mut class_of = Vec::new();
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for (x, k) in keys.into_iter().enumerate() {
            let next = classes.len();
            let id = *ids.entry(k).or_insert(next);
            if id == next {
                classes.push(Vec::new());
            }
            classes[id].push(x);
            class_of.push(id);
        }
        EquivalenceRelation { class_of, classes }
    }

    pub fn identity(size: usize) -> Self {
        Self::from_signature(0..size)
    }

    pub fn total(size: usize) -> Self {
        Self::from_signature((0..size).map(|_| ()))
    }

    /// Fails unless `rel` is reflexive, symmetric and transitive.
    pub fn from_relation(rel: &BinaryRelation) -> Result<Self> {
        let g = rel.size();
        if let Some(x) = (0..g).find(|&x| !rel.contains(x, x)) {
            return input(format!("relation is not reflexive at {x}"));
        }
        if let Some((x, y)) = rel.pairs().into_iter().find(|&(x, y)| !rel.contains(y, x)) {
            return input(format!("relation is not symmetric at ({x}, {y})"));
        }
        for x in 0..g {
            for y in 0..g {
                if !rel.contains(x, y) {
                    continue;
                }
                for z in 0..g {
                    if rel.contains(y, z) && !rel.contains(x, z) {
                        return Err(Error::NotTransitive(x, y, z));
                    }
                }
            }
        }
        Ok(Self::from_signature((0..g).map(|x| (0..g).position(|y| rel.contains(x, y)).unwrap())))
    }

    pub fn to_relation(&self) -> BinaryRelation {
        BinaryRelation::from_fn(self.size(), |x, y| self.class_of[x] == self.class_of[y])
    }

    pub fn size(&self) -> usize {
        self.class_of.len()
    }

    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    #[inline]
    pub fn class_of(&self, x: usize) -> usize {
        self.class_of[x]
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn class(&self, id: usize) -> &[usize] {
        &self.classes[id]
    }

    pub fn class_set(&self, id: usize) -> ElementSet {
        ElementSet::from_predicate(self.size(), |x| self.class_of[x] == id)
    }

    pub fn related(&self, x: usize, y: usize) -> bool {
        self.class_of[x] == self.class_of[y]
    }

    /// The class id when `set` is exactly one class.
    pub fn class_id_of_set(&self, set: &ElementSet) -> Option<usize> {
        let first = set.iter().next()?;
        let id = self.class_of[first];
        (self.classes[id].len() == set.len() && set.iter().all(|x| self.class_of[x] == id)).then_some(id)
    }

    /// True when every class lies inside or outside `set`.
    pub fn saturates(&self, set: &ElementSet) -> bool {
        self.classes.iter().all(|c| c.iter().all(|&x| set.contains(x)) || c.iter().all(|&x| !set.contains(x)))
    }
}

/// Common refinement of two partitions.
pub fn intersect_equivalences(a: &EquivalenceRelation, b: &EquivalenceRelation) -> Result<EquivalenceRelation> {
    if a.size() != b.size() {
        return input(format!("cannot intersect equivalences on {} and {} elements", a.size(), b.size()));
    }
    Ok(EquivalenceRelation::from_signature((0..a.size()).map(|x| (a.class_of(x), b.class_of(x)))))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn signature_classes_are_ordered_by_least_element() {
        let e = EquivalenceRelation::from_signature([5, 3, 5, 7, 3]);
        assert_eq!(e.classes(), &[vec![0, 2], vec![1, 4], vec![3]]);
        assert_eq!(e.class_of(4), 1);
    }

    #[test]
    fn relation_round_trip() {
        let e = EquivalenceRelation::from_signature([0, 1, 0, 1, 2]);
        assert_eq!(EquivalenceRelation::from_relation(&e.to_relation()).unwrap(), e);
    }

    #[test]
    fn non_transitive_relation_names_a_triple() {
        let rel = BinaryRelation::from_fn(3, |x, y| x == y || x + y == 1 || x + y == 3);
        assert!(matches!(EquivalenceRelation::from_relation(&rel), Err(Error::NotTransitive(0, 1, 2))));
    }

    #[test]
    fn intersection_laws() {
        let e = EquivalenceRelation::from_signature([0, 0, 1, 1]);
        let f = EquivalenceRelation::from_signature([0, 1, 1, 1]);
        assert_eq!(intersect_equivalences(&e, &e).unwrap(), e);
        assert_eq!(
            intersect_equivalences(&e, &EquivalenceRelation::identity(4)).unwrap(),
            EquivalenceRelation::identity(4)
        );
        assert_eq!(intersect_equivalences(&e, &EquivalenceRelation::total(4)).unwrap(), e);
        assert_eq!(intersect_equivalences(&e, &f).unwrap().classes(), &[vec![0], vec![1], vec![2, 3]]);
        assert!(intersect_equivalences(&e, &EquivalenceRelation::total(3)).is_err());
    }

    #[test]
    fn set_helpers() {
        let e = EquivalenceRelation::from_signature([0, 0, 1]);
        let s = ElementSet::from_indices(3, [0, 1]).unwrap();
        assert_eq!(e.class_id_of_set(&s), Some(0));
        assert!(e.saturates(&s));
        assert!(!e.saturates(&ElementSet::from_indices(3, [0]).unwrap()));
        assert_eq!(e.class_id_of_set(&ElementSet::from_indices(3, [0]).unwrap()), None);
    }
}
