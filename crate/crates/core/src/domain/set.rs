use fixedbitset::FixedBitSet;

/// A subset of an enumerated input domain, as a bitset over input indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct InputSet(FixedBitSet);

impl InputSet {
    pub fn empty(universe: usize) -> InputSet {
        InputSet(FixedBitSet::with_capacity(universe))
    }

    pub fn full(universe: usize) -> InputSet {
        let mut b = FixedBitSet::with_capacity(universe);
        b.insert_range(..);
        InputSet(b)
    }

    pub fn from_indices(universe: usize, indices: impl IntoIterator<Item = usize>) -> InputSet {
        let mut s = InputSet::empty(universe);
        for i in indices {
            s.insert(i);
        }
        s
    }

    /// Size of the universe this set lives in.
    pub fn universe(&self) -> usize {
        self.0.len()
    }

    /// Number of members.
    pub fn count(&self) -> usize {
        self.0.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_clear()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.contains(i)
    }

    pub fn insert(&mut self, i: usize) {
        self.0.insert(i);
    }

    pub fn remove(&mut self, i: usize) {
        self.0.set(i, false);
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.ones()
    }

    pub fn union(&self, other: &InputSet) -> InputSet {
        let mut b = self.0.clone();
        b.union_with(&other.0);
        InputSet(b)
    }

    pub fn union_with(&mut self, other: &InputSet) {
        self.0.union_with(&other.0);
    }

    pub fn intersection(&self, other: &InputSet) -> InputSet {
        let mut b = self.0.clone();
        b.intersect_with(&other.0);
        InputSet(b)
    }

    pub fn intersect_with(&mut self, other: &InputSet) {
        self.0.intersect_with(&other.0);
    }

    pub fn intersection_count(&self, other: &InputSet) -> usize {
        self.0.intersection_count(&other.0)
    }

    pub fn difference(&self, other: &InputSet) -> InputSet {
        let mut b = self.0.clone();
        b.difference_with(&other.0);
        InputSet(b)
    }

    pub fn symmetric_difference(&self, other: &InputSet) -> InputSet {
        let mut b = self.0.clone();
        b.symmetric_difference_with(&other.0);
        InputSet(b)
    }

    pub fn is_subset(&self, other: &InputSet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn is_disjoint(&self, other: &InputSet) -> bool {
        self.0.is_disjoint(&other.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_algebra() {
        let a = InputSet::from_indices(10, [1, 2, 3]);
        let b = InputSet::from_indices(10, [3, 4]);
        assert_eq!(a.union(&b).count(), 4);
        assert_eq!(a.intersection(&b).ones().collect::<Vec<_>>(), vec![3]);
        assert_eq!(a.symmetric_difference(&b).count(), 3);
        assert_eq!(a.difference(&b).count(), 2);
        assert!(InputSet::empty(10).is_subset(&a));
        assert_eq!(InputSet::full(10).count(), 10);
        assert_eq!(a.intersection_count(&b), 1);
    }
}
