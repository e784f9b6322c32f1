use std::cmp::Ordering;
use std::fmt;

/// Largest supported ambient dimension.
pub const MAX_DIM: usize = 62;

/// A subset of `{1, …, n}` stored as a bitmask (bit `i` ↔ element `i + 1`).
///
/// Indices passed to and returned from methods are 0-based; the 1-based
/// convention only appears in [`IndexSet::from_one_based`],
/// [`IndexSet::to_one_based`] and `Display`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct IndexSet(u64);

impl IndexSet {
    pub const EMPTY: IndexSet = IndexSet(0);

    pub const fn from_bits(bits: u64) -> Self {
        IndexSet(bits)
    }

    pub const fn bits(self) -> u64 {
        self.0
    }

    /// `{1, …, n}`.
    pub fn full(n: usize) -> Self {
        debug_assert!(n <= MAX_DIM);
        if n == 0 {
            IndexSet(0)
        } else {
            IndexSet(u64::MAX >> (64 - n))
        }
    }

    pub fn singleton(i: usize) -> Self {
        IndexSet(1 << i)
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Self {
        indices.into_iter().fold(IndexSet::EMPTY, |s, i| s.with(i))
    }

    /// Builds a set from 1-based elements; `None` if any element is outside `1..=n`.
    pub fn from_one_based(elements: &[u64], n: usize) -> Option<Self> {
        let mut set = IndexSet::EMPTY;
        for &e in elements {
            if e == 0 || e as usize > n {
                return None;
            }
            set = set.with(e as usize - 1);
        }
        Some(set)
    }

    pub fn to_one_based(self) -> Vec<u64> {
        self.iter().map(|i| i as u64 + 1).collect()
    }

    pub fn contains(self, i: usize) -> bool {
        i < 64 && self.0 >> i & 1 == 1
    }

    #[must_use]
    pub fn with(self, i: usize) -> Self {
        IndexSet(self.0 | 1 << i)
    }

    pub fn union(self, other: Self) -> Self {
        IndexSet(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        IndexSet(self.0 & other.0)
    }

    pub fn difference(self, other: Self) -> Self {
        IndexSet(self.0 & !other.0)
    }

    /// Complement within `{1, …, n}`.
    pub fn complement(self, n: usize) -> Self {
        IndexSet(!self.0 & IndexSet::full(n).0)
    }

    pub fn is_subset(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(self, other: Self) -> bool {
        self.0 & other.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    /// Least element, 0-based.
    pub fn first(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    pub fn iter(self) -> Iter {
        Iter(self.0)
    }

    /// The canonical total order: cardinality, then lexicographic on the
    /// sorted elements.
    pub fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| self.iter().cmp(other.iter()))
    }

    /// Order for "nonincreasing" traversals: larger sets first, ties broken
    /// by ascending sorted elements.
    pub fn descending_cmp(&self, other: &Self) -> Ordering {
        other.len().cmp(&self.len()).then_with(|| self.iter().cmp(other.iter()))
    }
}

impl Ord for IndexSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.canonical_cmp(other)
    }
}

impl PartialOrd for IndexSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub struct Iter(u64);

impl Iterator for Iter {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let i = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(i)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let k = self.0.count_ones() as usize;
        (k, Some(k))
    }
}

impl ExactSizeIterator for Iter {}

impl IntoIterator for IndexSet {
    type Item = usize;
    type IntoIter = Iter;
    fn into_iter(self) -> Iter {
        self.iter()
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, e) in self.to_one_based().into_iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
