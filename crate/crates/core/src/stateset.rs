//! Fixed-universe bitsets over the states of a structure.

use std::fmt;

/// A subset of `0..universe`, ordered by state index.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct StateSet {
    universe: usize,
    words: Vec<u64>,
}

impl StateSet {
    pub fn empty(universe: usize) -> Self {
        StateSet { universe, words: vec![0; universe.div_ceil(64)] }
    }

    pub fn full(universe: usize) -> Self {
        let mut set = Self::empty(universe);
        for word in &mut set.words {
            *word = u64::MAX;
        }
        set.trim();
        set
    }

    pub fn from_indices(universe: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut set = Self::empty(universe);
        for i in indices {
            set.insert(i);
        }
        set
    }

    pub fn from_predicate(universe: usize, mut pred: impl FnMut(usize) -> bool) -> Self {
        Self::from_indices(universe, (0..universe).filter(|&i| pred(i)))
    }

    fn trim(&mut self) {
        let rem = self.universe % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn insert(&mut self, i: usize) {
        assert!(i < self.universe, "state index {i} out of range {}", self.universe);
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn remove(&mut self, i: usize) {
        if i < self.universe {
            self.words[i / 64] &= !(1 << (i % 64));
        }
    }

    pub fn contains(&self, i: usize) -> bool {
        i < self.universe && self.words[i / 64] & (1 << (i % 64)) != 0
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_full(&self) -> bool {
        self.len() == self.universe
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.universe).filter(move |&i| self.contains(i))
    }

    pub fn complement(&self) -> Self {
        let mut out = StateSet { universe: self.universe, words: self.words.iter().map(|w| !w).collect() };
        out.trim();
        out
    }

    pub fn intersection(&self, other: &Self) -> Self {
        debug_assert_eq!(self.universe, other.universe);
        StateSet { universe: self.universe, words: self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect() }
    }

    pub fn union(&self, other: &Self) -> Self {
        debug_assert_eq!(self.universe, other.universe);
        StateSet { universe: self.universe, words: self.words.iter().zip(&other.words).map(|(a, b)| a | b).collect() }
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & b == 0)
    }
}

impl fmt::Debug for StateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_algebra() {
        let a = StateSet::from_indices(70, [0, 5, 69]);
        let b = StateSet::from_indices(70, [5, 6]);
        assert_eq!(a.intersection(&b), StateSet::from_indices(70, [5]));
        assert_eq!(a.union(&b).len(), 4);
        assert_eq!(a.complement().len(), 67);
        assert!(!a.complement().contains(69));
        assert!(StateSet::full(70).is_full());
        assert!(StateSet::from_indices(70, [5]).is_subset(&a));
        assert!(a.complement().is_disjoint(&a));
    }
}
