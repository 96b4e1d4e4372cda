//! Enumerated tuples and the `d_infty` comparison.
//!
//! An [`EnumeratedTuple`] is an ordered list of point indices into one
//! structure; repeats are allowed. Two equal-length tuples of the same kind
//! are compared with [`d_infty`]: the maximum, over every nonempty subset of
//! positions and every predicate of the structure kind, of the absolute
//! difference of the predicate values on the corresponding sub-tuples.
//!
//! Position subsets of the two tuples are paired positionally; predicates
//! evaluate tuples with repeated entries on the deduplicated point set.

use crate::error::{Error, Result};
use crate::rational::{rat_int, Rat};
use crate::subset::{all_subsets, SubsetMask};

/// A structure kind whose tuples `d_infty` can compare.
///
/// `predicate_values` must return, for an ordered sub-tuple of points, the
/// values of every predicate of the kind on that sub-tuple, in an order that
/// is fixed for all structures that pass `check_comparable`.
pub trait RelationalStructure {
    fn point_count(&self) -> usize;

    fn point_label(&self, i: usize) -> &str;

    /// Err when tuples of `self` and `other` cannot be compared (e.g.
    /// processes over different state sets).
    fn check_comparable(&self, other: &Self) -> Result<()>;

    /// All predicate values on the ordered sub-tuple `points` (indices into
    /// this structure; repeats allowed).
    fn predicate_values(&self, points: &[usize]) -> Vec<Rat>;

    fn index_of_label(&self, label: &str) -> Option<usize> {
        (0..self.point_count()).find(|&i| self.point_label(i) == label)
    }
}

/// An ordered tuple of points of one structure.
#[derive(Clone, Debug)]
pub struct EnumeratedTuple<'a, S: RelationalStructure> {
    structure: &'a S,
    entries: Vec<usize>,
}

impl<'a, S: RelationalStructure> EnumeratedTuple<'a, S> {
    pub fn new(structure: &'a S, entries: Vec<usize>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::EmptyTuple);
        }
        for &i in &entries {
            if i >= structure.point_count() {
                return Err(Error::Internal(format!(
                    "tuple entry {i} out of range (structure has {} points)",
                    structure.point_count()
                )));
            }
        }
        Ok(EnumeratedTuple { structure, entries })
    }

    pub fn from_labels(structure: &'a S, labels: &[&str]) -> Result<Self> {
        let entries = labels
            .iter()
            .map(|l| {
                structure
                    .index_of_label(l)
                    .ok_or_else(|| Error::UnknownLabel(l.to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(structure, entries)
    }

    pub fn structure(&self) -> &'a S {
        self.structure
    }

    pub fn entries(&self) -> &[usize] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Sub-tuple of the positions in `mask`, ascending.
    fn select(&self, mask: SubsetMask) -> Vec<usize> {
        mask.indices().iter().map(|&p| self.entries[p]).collect()
    }
}

/// Predicate values of one tuple, indexed by nonempty position subsets.
///
/// This is the table `d_infty` compares; it is exposed for tests and reports.
pub struct PredicateTable {
    pub rows: Vec<(SubsetMask, Vec<Rat>)>,
}

pub fn predicate_table<S: RelationalStructure>(tuple: &EnumeratedTuple<S>) -> PredicateTable {
    let n = tuple.len();
    let mut rows = Vec::with_capacity((1usize << n) - 1);
    for mask in all_subsets(n).skip(1) {
        let sub = tuple.select(mask);
        rows.push((mask, tuple.structure.predicate_values(&sub)));
    }
    PredicateTable { rows }
}

/// Max absolute predicate difference over corresponding position subsets.
///
/// A pseudometric on equal-length tuples of comparable structures.
pub fn d_infty<S: RelationalStructure>(
    a: &EnumeratedTuple<S>,
    b: &EnumeratedTuple<S>,
) -> Result<Rat> {
    if a.len() != b.len() {
        return Err(Error::TupleLengthMismatch {
            a: a.len(),
            b: b.len(),
        });
    }
    a.structure.check_comparable(b.structure)?;
    let n = a.len();
    let mut best = rat_int(0);
    for mask in all_subsets(n).skip(1) {
        let va = a.structure.predicate_values(&a.select(mask));
        let vb = b.structure.predicate_values(&b.select(mask));
        debug_assert_eq!(va.len(), vb.len());
        for (x, y) in va.iter().zip(vb.iter()) {
            let d = if x >= y { x - y } else { y - x };
            if d > best {
                best = d;
            }
        }
    }
    Ok(best)
}

/// `d_infty(a, b) / n`: a certified lower bound on the embedding distance
/// `d_K` (each predicate is 1-Lipschitz in every argument, so any joint
/// embedding keeps all predicate differences within `n` times the largest
/// pointwise distance).
pub fn dk_lower_bound<S: RelationalStructure>(
    a: &EnumeratedTuple<S>,
    b: &EnumeratedTuple<S>,
) -> Result<Rat> {
    let d = d_infty(a, b)?;
    Ok(d / rat_int(a.len() as i64))
}
