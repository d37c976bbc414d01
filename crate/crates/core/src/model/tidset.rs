use std::cmp::Ordering;
use std::fmt;

use super::ObjectId;

const WORD_BITS: usize = 64;

/// A set of objects stored as a fixed-width bitmap over the object universe.
///
/// Intersections and containment tests work word by word; the sorted id
/// list is produced on demand by [`Tidset::ids`].
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Tidset {
    universe: u32,
    words: Box<[u64]>,
}

impl Tidset {
    pub fn empty(universe: u32) -> Self {
        let n_words = (universe as usize).div_ceil(WORD_BITS);
        Tidset { universe, words: vec![0; n_words].into_boxed_slice() }
    }

    pub fn full(universe: u32) -> Self {
        let mut set = Tidset::empty(universe);
        for w in set.words.iter_mut() {
            *w = u64::MAX;
        }
        set.clear_tail();
        set
    }

    pub fn from_ids<I>(universe: u32, ids: I) -> Self
    where
        I: IntoIterator<Item = u32>,
    {
        let mut set = Tidset::empty(universe);
        for id in ids {
            set.insert(ObjectId(id));
        }
        set
    }

    fn clear_tail(&mut self) {
        let rem = self.universe as usize % WORD_BITS;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    pub fn universe(&self) -> u32 {
        self.universe
    }

    /// Panics when `id` lies outside the universe.
    pub fn insert(&mut self, id: ObjectId) {
        assert!(id.0 < self.universe, "object {} outside universe of {}", id.0, self.universe);
        let i = id.0 as usize;
        self.words[i / WORD_BITS] |= 1u64 << (i % WORD_BITS);
    }

    pub fn contains(&self, id: ObjectId) -> bool {
        let i = id.0 as usize;
        id.0 < self.universe && self.words[i / WORD_BITS] & (1u64 << (i % WORD_BITS)) != 0
    }

    /// Cardinality; the support of an itemset carrying this tidset.
    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn intersect(&self, other: &Tidset) -> Tidset {
        debug_assert_eq!(self.universe, other.universe);
        let words = self.words.iter().zip(other.words.iter()).map(|(a, b)| a & b).collect();
        Tidset { universe: self.universe, words }
    }

    pub fn intersect_with(&mut self, other: &Tidset) {
        debug_assert_eq!(self.universe, other.universe);
        for (a, b) in self.words.iter_mut().zip(other.words.iter()) {
            *a &= b;
        }
    }

    pub fn union(&self, other: &Tidset) -> Tidset {
        debug_assert_eq!(self.universe, other.universe);
        let words = self.words.iter().zip(other.words.iter()).map(|(a, b)| a | b).collect();
        Tidset { universe: self.universe, words }
    }

    pub fn intersection_len(&self, other: &Tidset) -> usize {
        self.words.iter().zip(other.words.iter()).map(|(a, b)| (a & b).count_ones() as usize).sum()
    }

    pub fn is_subset(&self, other: &Tidset) -> bool {
        self.words.iter().zip(other.words.iter()).all(|(a, b)| a & !b == 0)
    }

    pub fn is_disjoint(&self, other: &Tidset) -> bool {
        self.words.iter().zip(other.words.iter()).all(|(a, b)| a & b == 0)
    }

    pub fn first(&self) -> Option<ObjectId> {
        self.ids().next()
    }

    /// Members in ascending order.
    pub fn ids(&self) -> impl Iterator<Item = ObjectId> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &word)| {
            let mut w = word;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let bit = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(ObjectId((wi * WORD_BITS + bit) as u32))
            })
        })
    }

    pub fn to_vec(&self) -> Vec<ObjectId> {
        self.ids().collect()
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }
}

/// Sorted intersection of two tidsets.
pub fn tidset_intersect(a: &Tidset, b: &Tidset) -> Tidset {
    a.intersect(b)
}

impl Ord for Tidset {
    /// Lexicographic order of the ascending id lists.
    fn cmp(&self, other: &Self) -> Ordering {
        self.ids().cmp(other.ids()).then(self.universe.cmp(&other.universe))
    }
}

impl PartialOrd for Tidset {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Tidset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.ids().map(|o| o.0)).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    fn set(universe: u32, ids: &[u32]) -> Tidset {
        Tidset::from_ids(universe, ids.iter().copied())
    }

    #[test]
    fn intersect_drops_the_missing_member() {
        // o3 is not in the convoy: {o1,o2,o3} ∩ {o1,o2}
        let a = set(5, &[0, 1, 2]);
        let b = set(5, &[0, 1]);
        assert_eq!(tidset_intersect(&a, &b), set(5, &[0, 1]));
    }

    #[test]
    fn intersect_is_idempotent() {
        let a = set(70, &[1, 3, 64, 69]);
        assert_eq!(tidset_intersect(&a, &a), a);
    }

    #[test]
    fn disjoint_intersection_is_empty() {
        let r = tidset_intersect(&set(3, &[0]), &set(3, &[1]));
        assert!(r.is_empty());
        assert_eq!(r.len(), 0);
    }

    #[test]
    fn full_respects_universe_width() {
        let full = Tidset::full(65);
        assert_eq!(full.len(), 65);
        assert_eq!(full.ids().last(), Some(ObjectId(64)));
        assert_eq!(Tidset::full(0).len(), 0);
    }

    #[test]
    fn lexicographic_order_on_id_lists() {
        // [0,5] < [1]; [0] < [0,3]
        assert!(set(8, &[0, 5]) < set(8, &[1]));
        assert!(set(8, &[0]) < set(8, &[0, 3]));
        assert!(set(8, &[0, 3]) < set(8, &[0, 4]));
    }

    proptest! {
        #[test]
        fn matches_btreeset_algebra(
            a in proptest::collection::btree_set(0u32..130, 0..40),
            b in proptest::collection::btree_set(0u32..130, 0..40),
        ) {
            let ta = Tidset::from_ids(130, a.iter().copied());
            let tb = Tidset::from_ids(130, b.iter().copied());
            let inter: BTreeSet<u32> = a.intersection(&b).copied().collect();
            let got: Vec<u32> = ta.intersect(&tb).ids().map(|o| o.0).collect();
            prop_assert_eq!(got, inter.iter().copied().collect::<Vec<_>>());
            prop_assert_eq!(ta.intersection_len(&tb), inter.len());
            prop_assert!(ta.intersect(&tb).len() <= a.len().min(b.len()));
            prop_assert_eq!(ta.is_subset(&tb), a.is_subset(&b));
            prop_assert_eq!(ta.cmp(&tb), a.iter().cmp(b.iter()));
        }
    }
}
