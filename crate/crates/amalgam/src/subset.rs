//! Bitmask subsets of a ground set of at most [`MAX_POINTS`] points.
//!
//! Masks are plain `u32` bit patterns; bit `i` stands for point `i`. All
//! enumeration helpers yield masks in ascending numeric order, which every
//! caller relies on for deterministic output.

/// Ground sets are capped so that full subset tables stay enumerable.
pub const MAX_POINTS: usize = 16;

/// A subset of ground-set indices `0..n`, encoded as a bitmask.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct SubsetMask(pub u32);

impl SubsetMask {
    pub const EMPTY: SubsetMask = SubsetMask(0);

    pub fn full(n: usize) -> SubsetMask {
        debug_assert!(n <= MAX_POINTS);
        SubsetMask(((1u64 << n) - 1) as u32)
    }

    pub fn singleton(i: usize) -> SubsetMask {
        SubsetMask(1 << i)
    }

    pub fn from_indices(indices: &[usize]) -> SubsetMask {
        let mut m = 0u32;
        for &i in indices {
            m |= 1 << i;
        }
        SubsetMask(m)
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn insert(self, i: usize) -> SubsetMask {
        SubsetMask(self.0 | 1 << i)
    }

    pub fn remove(self, i: usize) -> SubsetMask {
        SubsetMask(self.0 & !(1 << i))
    }

    pub fn union(self, other: SubsetMask) -> SubsetMask {
        SubsetMask(self.0 | other.0)
    }

    pub fn intersect(self, other: SubsetMask) -> SubsetMask {
        SubsetMask(self.0 & other.0)
    }

    pub fn minus(self, other: SubsetMask) -> SubsetMask {
        SubsetMask(self.0 & !other.0)
    }

    pub fn is_subset_of(self, other: SubsetMask) -> bool {
        self.0 & !other.0 == 0
    }

    /// Indices of the members, ascending.
    pub fn indices(self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.len());
        let mut m = self.0;
        while m != 0 {
            let i = m.trailing_zeros() as usize;
            out.push(i);
            m &= m - 1;
        }
        out
    }
}

/// All subsets of `{0..n}` in ascending mask order (starts with the empty set).
pub fn all_subsets(n: usize) -> impl Iterator<Item = SubsetMask> {
    debug_assert!(n <= MAX_POINTS);
    (0u64..1u64 << n).map(|m| SubsetMask(m as u32))
}

/// All subsets of `sup` in ascending mask order (starts with the empty set).
pub fn subsets_of(sup: SubsetMask) -> SubsetsOf {
    SubsetsOf {
        sup: sup.0,
        cur: 0,
        done: false,
    }
}

pub struct SubsetsOf {
    sup: u32,
    cur: u32,
    done: bool,
}

impl Iterator for SubsetsOf {
    type Item = SubsetMask;

    fn next(&mut self) -> Option<SubsetMask> {
        if self.done {
            return None;
        }
        let out = SubsetMask(self.cur);
        // (cur - sup) & sup steps through the subsets of sup in ascending
        // order, wrapping to 0 after the full set.
        self.cur = self.cur.wrapping_sub(self.sup) & self.sup;
        if self.cur == 0 {
            self.done = true;
        }
        Some(out)
    }
}
