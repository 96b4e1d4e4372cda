//! Finite diversities: nonnegative set functions generalizing metrics.
//!
//! A diversity assigns a rational value to every subset of the ground set,
//! vanishing on singletons, monotone under inclusion, and satisfying the
//! triangle inequality `delta(A u B) + delta(B u C) >= delta(A u C)` for
//! nonempty `B`. A semidiversity relaxes the zero pattern: values on larger
//! sets may be zero.
//!
//! Validation uses a reduced certificate: one-element monotonicity plus
//! subadditivity over a single bridge point,
//! `delta(A u {b} u C) <= delta(A u {b}) + delta({b} u C)`.
//! Together with monotonicity this implies the full triangle inequality
//! (pick `b` in `B` and widen both sides), and it cuts the check to
//! `O(4^n * n)`.

use num::Zero;

use crate::error::{Error, Result};
use crate::metric::{check_labels, FiniteMetric};
use crate::rational::{rat_int, Rat};
use crate::subset::{all_subsets, subsets_of, SubsetMask};
use crate::tuples::{EnumeratedTuple, RelationalStructure};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteDiversity {
    points: Vec<String>,
    /// Value per subset mask; entries for masks of size <= 1 are zero.
    delta: Vec<Rat>,
    semi: bool,
}

impl FiniteDiversity {
    /// Builds and fully validates a diversity from a complete value table
    /// (`delta[mask]` for every subset mask; sizes <= 1 must be zero).
    ///
    /// With `allow_semi` the strict zero pattern is relaxed to a
    /// semidiversity; the flag on the result reports which one was built.
    pub fn new(points: Vec<String>, delta: Vec<Rat>, allow_semi: bool) -> Result<Self> {
        check_labels(&points)?;
        let d = Self::assemble(points, delta);
        d.validate(allow_semi)?;
        Ok(d)
    }

    /// One-point diversity.
    pub fn single(label: &str) -> Self {
        FiniteDiversity {
            points: vec![label.to_string()],
            delta: vec![rat_int(0), rat_int(0)],
            semi: false,
        }
    }

    /// No validation beyond shape; the semidiversity flag is derived from
    /// the table. For outputs that are valid by construction.
    pub(crate) fn new_unchecked(points: Vec<String>, delta: Vec<Rat>) -> Self {
        Self::assemble(points, delta)
    }

    fn assemble(points: Vec<String>, delta: Vec<Rat>) -> Self {
        let n = points.len();
        assert_eq!(delta.len(), 1usize << n, "value table has wrong size");
        for mask in all_subsets(n) {
            if mask.len() <= 1 {
                assert!(delta[mask.0 as usize].is_zero(), "nonzero value on a set of size <= 1");
            }
        }
        let semi = all_subsets(n)
            .any(|m| m.len() >= 2 && delta[m.0 as usize].is_zero());
        FiniteDiversity {
            points,
            delta,
            semi,
        }
    }

    /// Checks nonnegativity, the zero pattern, one-element monotonicity and
    /// bridge subadditivity. Errors carry exact witnesses.
    pub fn validate(&self, allow_semi: bool) -> Result<()> {
        let n = self.points.len();
        let zero = Rat::zero();
        for mask in all_subsets(n) {
            let v = self.value(mask);
            if *v < zero {
                return Err(Error::NegativeValue {
                    set: self.labels_of(mask),
                    value: v.clone(),
                });
            }
            if !allow_semi && mask.len() >= 2 && v.is_zero() {
                return Err(Error::ZeroOnLargeSet {
                    set: self.labels_of(mask),
                });
            }
        }
        // One-element monotonicity; full monotonicity follows by chaining.
        for mask in all_subsets(n) {
            if mask.len() < 2 {
                continue;
            }
            for x in 0..n {
                if mask.contains(x) {
                    continue;
                }
                let inner = self.value(mask);
                let outer = self.value(mask.insert(x));
                if inner > outer {
                    return Err(Error::MonotonicityViolation {
                        set: self.labels_of(mask),
                        point: self.points[x].clone(),
                        inner_value: inner.clone(),
                        outer_value: outer.clone(),
                    });
                }
            }
        }
        // Bridge subadditivity: delta(A u C u {b}) <= delta(A u {b}) + delta(C u {b}).
        // By symmetry only pairs with A <= C are checked.
        for a in all_subsets(n) {
            for b in 0..n {
                if a.contains(b) {
                    continue;
                }
                let bbit = SubsetMask::singleton(b);
                let va = self.value(a.union(bbit));
                for c in subsets_of(SubsetMask::full(n).remove(b)) {
                    if c.0 < a.0 {
                        continue;
                    }
                    let lhs = self.value(a.union(c).union(bbit));
                    if *lhs > va + self.value(c.union(bbit)) {
                        return Err(Error::TriangleViolation {
                            a: self.labels_of(a),
                            bridge: self.points[b].clone(),
                            c: self.labels_of(c),
                            lhs: lhs.clone(),
                            rhs_a: va.clone(),
                            rhs_c: self.value(c.union(bbit)).clone(),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn is_semidiversity(&self) -> bool {
        self.semi
    }

    pub fn value(&self, mask: SubsetMask) -> &Rat {
        &self.delta[mask.0 as usize]
    }

    /// Value on the deduplicated point set of an ordered tuple.
    pub fn value_of_tuple(&self, entries: &[usize]) -> &Rat {
        self.value(SubsetMask::from_indices(entries))
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.points.iter().position(|p| p == label)
    }

    fn labels_of(&self, mask: SubsetMask) -> Vec<String> {
        mask.indices()
            .iter()
            .map(|&i| self.points[i].clone())
            .collect()
    }

    /// Induced metric: `d(a, b) = delta({a, b})`. A semimetric when the
    /// diversity is a semidiversity.
    pub fn induced_metric(&self) -> FiniteMetric {
        let n = self.points.len();
        let mut dist = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    dist.push(rat_int(0));
                } else {
                    dist.push(
                        self.value(SubsetMask::singleton(i).insert(j))
                            .clone(),
                    );
                }
            }
        }
        FiniteMetric::from_parts_unchecked(self.points.clone(), dist)
    }

    /// Restriction to a nonempty subset of points; always a valid
    /// (semi)diversity (the axioms are universally quantified).
    pub fn restrict(&self, subset: SubsetMask) -> Result<FiniteDiversity> {
        if subset.is_empty() {
            return Err(Error::EmptySubset);
        }
        let kept = subset.indices();
        let points = kept.iter().map(|&i| self.points[i].clone()).collect();
        let k = kept.len();
        let mut delta = Vec::with_capacity(1 << k);
        for small in all_subsets(k) {
            let mut big = SubsetMask::EMPTY;
            for (pos, &orig) in kept.iter().enumerate() {
                if small.contains(pos) {
                    big = big.insert(orig);
                }
            }
            delta.push(self.value(big).clone());
        }
        Ok(FiniteDiversity::new_unchecked(points, delta))
    }

    pub fn restrict_to_labels(&self, labels: &[&str]) -> Result<FiniteDiversity> {
        let mut mask = SubsetMask::EMPTY;
        for l in labels {
            let i = self
                .index_of(l)
                .ok_or_else(|| Error::UnknownLabel(l.to_string()))?;
            mask = mask.insert(i);
        }
        self.restrict(mask)
    }

    /// Reorders points to the given label permutation.
    pub(crate) fn reorder_points(&self, order: &[String]) -> Result<FiniteDiversity> {
        let n = self.points.len();
        if order.len() != n {
            return Err(Error::Internal("reorder length mismatch".into()));
        }
        let map: Vec<usize> = order
            .iter()
            .map(|l| {
                self.index_of(l)
                    .ok_or_else(|| Error::UnknownLabel(l.clone()))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut delta = vec![rat_int(0); 1 << n];
        for mask in all_subsets(n) {
            let mut orig = SubsetMask::EMPTY;
            for (new_pos, &old_pos) in map.iter().enumerate() {
                if mask.contains(new_pos) {
                    orig = orig.insert(old_pos);
                }
            }
            delta[mask.0 as usize] = self.value(orig).clone();
        }
        Ok(FiniteDiversity::new_unchecked(order.to_vec(), delta))
    }

    /// Largest value in the table (zero for a single point).
    pub fn max_value(&self) -> Rat {
        let mut best = rat_int(0);
        for mask in all_subsets(self.points.len()) {
            let v = self.value(mask);
            if *v > best {
                best = v.clone();
            }
        }
        best
    }
}

/// How the two inputs of a one-point amalgamation line up: the common part
/// and the two glued points, all by label.
struct ExtensionPair {
    common: Vec<String>,
    z1: String,
    z2: String,
}

/// Label-level view of [`match_extension_pair`] for sibling modules.
pub(crate) fn match_extension_labels(
    d1: &FiniteDiversity,
    d2: &FiniteDiversity,
) -> Result<(Vec<String>, String, String)> {
    let pair = match_extension_pair(d1, d2)?;
    Ok((pair.common, pair.z1, pair.z2))
}

pub(crate) fn check_common_agreement(
    d1: &FiniteDiversity,
    d2: &FiniteDiversity,
    common: &[String],
) -> Result<()> {
    check_agreement(d1, d2, common)
}

fn match_extension_pair(d1: &FiniteDiversity, d2: &FiniteDiversity) -> Result<ExtensionPair> {
    let common: Vec<String> = d1
        .points()
        .iter()
        .filter(|p| d2.index_of(p).is_some())
        .cloned()
        .collect();
    let extra1: Vec<&String> = d1
        .points()
        .iter()
        .filter(|p| d2.index_of(p).is_none())
        .collect();
    let extra2: Vec<&String> = d2
        .points()
        .iter()
        .filter(|p| d1.index_of(p).is_none())
        .collect();
    if extra1.len() != 1 || extra2.len() != 1 {
        return Err(Error::BadExtensionPair(format!(
            "each input must extend the common part by exactly one point \
             (left adds {:?}, right adds {:?})",
            extra1, extra2
        )));
    }
    Ok(ExtensionPair {
        common,
        z1: extra1[0].clone(),
        z2: extra2[0].clone(),
    })
}

/// Exact table agreement on the common part, by label.
fn check_agreement(
    d1: &FiniteDiversity,
    d2: &FiniteDiversity,
    common: &[String],
) -> Result<()> {
    let idx1: Vec<usize> = common.iter().map(|l| d1.index_of(l).unwrap()).collect();
    let idx2: Vec<usize> = common.iter().map(|l| d2.index_of(l).unwrap()).collect();
    let k = common.len();
    for mask in all_subsets(k) {
        if mask.len() < 2 {
            continue;
        }
        let m1 = mask_through(&idx1, mask);
        let m2 = mask_through(&idx2, mask);
        if d1.value(m1) != d2.value(m2) {
            return Err(Error::AgreementMismatch {
                set: mask.indices().iter().map(|&i| common[i].clone()).collect(),
                left: d1.value(m1).clone(),
                right: d2.value(m2).clone(),
            });
        }
    }
    Ok(())
}

fn mask_through(index_map: &[usize], mask: SubsetMask) -> SubsetMask {
    let mut out = SubsetMask::EMPTY;
    for (pos, &target) in index_map.iter().enumerate() {
        if mask.contains(pos) {
            out = out.insert(target);
        }
    }
    out
}

/// Minimal one-point amalgamation of two diversities agreeing on a common
/// part `X`: glues `X u {z1}` and `X u {z2}` into `X u {z1, z2}`, where
///
/// ```text
/// delta(A u {z1,z2}) = max( max_B delta(A u B u {z1}) - delta(B u {z2}),
///                           max_C delta(A u C u {z2}) - delta(C u {z1}) )
/// ```
///
/// with `B`, `C` over subsets of `X`. This is the smallest table extending
/// both inputs, and `d(z1, z2)` equals the largest one-point extension gap
/// `max_A |delta(A u {z1}) - delta(A u {z2})|`, so the construction realizes
/// the bounded amalgamation property with constant 1.
///
/// The output restricts exactly to both inputs. It may be a semidiversity
/// (isomorphic extensions force `d(z1, z2) = 0`); the flag on the result
/// says so, and [`quotient`] recovers a strict diversity.
///
/// When both new points carry the same label the right one is renamed by
/// appending `'`.
pub fn amalgamate_one_point(
    d1: &FiniteDiversity,
    d2: &FiniteDiversity,
) -> Result<FiniteDiversity> {
    let pair = match_extension_pair(d1, d2)?;
    check_agreement(d1, d2, &pair.common)?;
    let k = pair.common.len();
    let n = k + 2;
    if n > crate::subset::MAX_POINTS {
        return Err(Error::TooManyPoints {
            n,
            max: crate::subset::MAX_POINTS,
        });
    }
    let mut z2_label = pair.z2.clone();
    while z2_label == pair.z1 || pair.common.contains(&z2_label) {
        z2_label.push('\'');
    }

    // Output index layout: common part 0..k, z1 at k, z2 at k+1.
    let idx1: Vec<usize> = pair.common.iter().map(|l| d1.index_of(l).unwrap()).collect();
    let idx2: Vec<usize> = pair.common.iter().map(|l| d2.index_of(l).unwrap()).collect();
    let z1_in_1 = d1.index_of(&pair.z1).unwrap();
    let z2_in_2 = d2.index_of(&pair.z2).unwrap();

    // Value tables keyed by common-part masks.
    let card = 1usize << k;
    let mut base = vec![rat_int(0); card]; // delta(A)
    let mut with_z1 = vec![rat_int(0); card]; // delta(A u {z1})
    let mut with_z2 = vec![rat_int(0); card]; // delta(A u {z2})
    for a in all_subsets(k) {
        base[a.0 as usize] = d1.value(mask_through(&idx1, a)).clone();
        with_z1[a.0 as usize] = d1
            .value(mask_through(&idx1, a).insert(z1_in_1))
            .clone();
        with_z2[a.0 as usize] = d2
            .value(mask_through(&idx2, a).insert(z2_in_2))
            .clone();
    }

    let full = SubsetMask::full(k);
    let mut both = vec![rat_int(0); card]; // delta(A u {z1, z2})
    for a in all_subsets(k) {
        // By monotonicity the inner maxima may restrict to B, C disjoint
        // from A, cutting the double loop to O(3^k) overall.
        let mut best: Option<Rat> = None;
        for b in subsets_of(full.minus(a)) {
            let t1 = &with_z1[a.union(b).0 as usize] - &with_z2[b.0 as usize];
            if best.as_ref().is_none_or(|cur| t1 > *cur) {
                best = Some(t1);
            }
            let t2 = &with_z2[a.union(b).0 as usize] - &with_z1[b.0 as usize];
            if best.as_ref().is_none_or(|cur| t2 > *cur) {
                best = Some(t2);
            }
        }
        both[a.0 as usize] = best.expect("nonempty subset family");
    }

    let mut points = pair.common.clone();
    points.push(pair.z1.clone());
    points.push(z2_label);
    let mut delta = vec![rat_int(0); 1 << n];
    for mask in all_subsets(n) {
        let a = mask.intersect(full);
        let has_z1 = mask.contains(k);
        let has_z2 = mask.contains(k + 1);
        let v = match (has_z1, has_z2) {
            (false, false) => base[a.0 as usize].clone(),
            (true, false) => with_z1[a.0 as usize].clone(),
            (false, true) => with_z2[a.0 as usize].clone(),
            (true, true) => both[a.0 as usize].clone(),
        };
        delta[mask.0 as usize] = v;
    }
    Ok(FiniteDiversity::new_unchecked(points, delta))
}

/// Adds the patch's new point `z` to all of `base` by induction: starting
/// from the patch's ground `X`, each remaining point of `base` is absorbed
/// with a one-point amalgamation. The result restricts exactly to `base`
/// and to the patch.
pub fn extend_over_base(
    base: &FiniteDiversity,
    patch: &FiniteDiversity,
) -> Result<FiniteDiversity> {
    let x_labels: Vec<String> = patch
        .points()
        .iter()
        .filter(|p| base.index_of(p).is_some())
        .cloned()
        .collect();
    let extra: Vec<&String> = patch
        .points()
        .iter()
        .filter(|p| base.index_of(p).is_none())
        .collect();
    if extra.len() != 1 {
        return Err(Error::BadExtensionPair(format!(
            "patch must add exactly one point over the base (adds {extra:?})"
        )));
    }
    let z = extra[0].clone();
    if base.len() + 1 > crate::subset::MAX_POINTS {
        return Err(Error::TooManyPoints {
            n: base.len() + 1,
            max: crate::subset::MAX_POINTS,
        });
    }

    let mut cur_labels = x_labels.clone();
    let mut cur = {
        // Canonical patch orientation: common part first, z last.
        let mut order = x_labels.clone();
        order.push(z.clone());
        patch.reorder_points(&order)?
    };
    // Agreement of the patch with the base on X is checked by the first
    // amalgamation; when X = base there is nothing to absorb, so check here.
    {
        let base_x = if cur_labels.is_empty() {
            None
        } else {
            Some(base.restrict_to_labels(
                &cur_labels.iter().map(|s| s.as_str()).collect::<Vec<_>>(),
            )?)
        };
        if let Some(bx) = base_x {
            check_agreement(&bx, &cur, &cur_labels)?;
        }
    }

    for y in base.points() {
        if cur_labels.contains(y) {
            continue;
        }
        let mut side_labels: Vec<&str> = cur_labels.iter().map(|s| s.as_str()).collect();
        side_labels.push(y.as_str());
        let side = base.restrict_to_labels(&side_labels)?;
        cur = amalgamate_one_point(&side, &cur)?;
        cur_labels.push(y.clone());
    }

    let mut order: Vec<String> = base.points().to_vec();
    order.push(z);
    cur.reorder_points(&order)
}

/// Joint embedding by disjoint union: any set meeting both sides takes the
/// value `k`, the largest value of either input. Labels of the right input
/// are renamed with `'` on collision.
pub fn join(d1: &FiniteDiversity, d2: &FiniteDiversity) -> Result<FiniteDiversity> {
    let n1 = d1.len();
    let n2 = d2.len();
    if n1 == 0 || n2 == 0 {
        return Err(Error::EmptySubset);
    }
    if n1 + n2 > crate::subset::MAX_POINTS {
        return Err(Error::TooManyPoints {
            n: n1 + n2,
            max: crate::subset::MAX_POINTS,
        });
    }
    let mut points = d1.points().to_vec();
    for p in d2.points() {
        let mut label = p.clone();
        while points.contains(&label) {
            label.push('\'');
        }
        points.push(label);
    }
    let k1 = d1.max_value();
    let k2 = d2.max_value();
    let k = if k1 >= k2 { k1 } else { k2 };

    let n = n1 + n2;
    let left = SubsetMask::full(n1);
    let mut delta = vec![rat_int(0); 1 << n];
    for mask in all_subsets(n) {
        let a = mask.intersect(left);
        let b = SubsetMask(mask.0 >> n1);
        delta[mask.0 as usize] = if b.is_empty() {
            d1.value(a).clone()
        } else if a.is_empty() {
            d2.value(b).clone()
        } else {
            k.clone()
        };
    }
    Ok(FiniteDiversity::new_unchecked(points, delta))
}

/// Collapses points at induced distance zero (an equivalence relation by the
/// triangle inequality) onto their first-listed representatives. The result
/// is a strict diversity; the classes are reported alongside.
pub fn quotient(d: &FiniteDiversity) -> Result<(FiniteDiversity, Vec<Vec<String>>)> {
    let n = d.len();
    let mut class_of: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for j in 0..i {
            if d
                .value(SubsetMask::singleton(i).insert(j))
                .is_zero()
            {
                class_of[i] = class_of[j];
                break;
            }
        }
    }
    let mut reps = SubsetMask::EMPTY;
    let mut classes: Vec<Vec<String>> = Vec::new();
    for i in 0..n {
        if class_of[i] == i {
            reps = reps.insert(i);
            classes.push(vec![d.points()[i].clone()]);
        } else {
            let rep = class_of[i];
            let pos = reps.indices().iter().position(|&r| r == rep).unwrap();
            classes[pos].push(d.points()[i].clone());
        }
    }
    let q = d.restrict(reps)?;
    Ok((q, classes))
}

/// A joint embedding of two equal-length tuples plus the embedding bound:
/// the largest distance between corresponding images inside `joint`. By the
/// definition of the embedding distance `d_K` as an infimum over joint
/// embeddings, `d_K(a, b) <= bound`.
pub struct DkEmbedding {
    pub joint: FiniteDiversity,
    pub bound: Rat,
    /// Image of each tuple entry in `joint`.
    pub a_images: Vec<usize>,
    pub b_images: Vec<usize>,
}

/// Builds a joint embedding by gluing the first entries at distance zero and
/// then alternately adding `a_k`, `b_k`: each is pushed over the common part
/// with [`extend_over_base`] (patched from its own tuple's values) and the
/// two one-point extensions are merged with [`amalgamate_one_point`]. The
/// absorption order is fixed, so outputs are reproducible.
pub fn dk_upper_embedding(
    a: &EnumeratedTuple<FiniteDiversity>,
    b: &EnumeratedTuple<FiniteDiversity>,
) -> Result<DkEmbedding> {
    if a.len() != b.len() {
        return Err(Error::TupleLengthMismatch {
            a: a.len(),
            b: b.len(),
        });
    }
    let n = a.len();
    let da = a.structure();
    let db = b.structure();

    let mut joint = FiniteDiversity::single("p1");
    let mut a_images = vec![0usize];
    let mut b_images = vec![0usize];

    for k in 1..n {
        let patch_a = prefix_patch(da, a.entries(), &a_images, &joint, k, &format!("a{}", k + 1));
        let patch_b = prefix_patch(db, b.entries(), &b_images, &joint, k, &format!("b{}", k + 1));
        let side_a = extend_over_base(&joint, &patch_a)?;
        let side_b = extend_over_base(&joint, &patch_b)?;
        let merged = amalgamate_one_point(&side_a, &side_b)?;
        a_images.push(joint.len());
        b_images.push(joint.len() + 1);
        joint = merged;
    }

    let mut bound = rat_int(0);
    for i in 0..n {
        if a_images[i] == b_images[i] {
            continue;
        }
        let d = joint.value(SubsetMask::singleton(a_images[i]).insert(b_images[i]));
        if *d > bound {
            bound = d.clone();
        }
    }
    Ok(DkEmbedding {
        joint,
        bound,
        a_images,
        b_images,
    })
}

/// One-point extension of the images of a tuple prefix by entry `k`,
/// valued from the tuple's own structure (deduplicated sets).
fn prefix_patch(
    structure: &FiniteDiversity,
    entries: &[usize],
    images: &[usize],
    joint: &FiniteDiversity,
    k: usize,
    new_label: &str,
) -> FiniteDiversity {
    let mut points: Vec<String> = images
        .iter()
        .take(k)
        .map(|&i| joint.points()[i].clone())
        .collect();
    points.push(new_label.to_string());
    let mut delta = vec![rat_int(0); 1 << (k + 1)];
    for mask in all_subsets(k + 1) {
        if mask.len() < 2 {
            continue;
        }
        let selected: Vec<usize> = mask.indices().iter().map(|&pos| entries[pos]).collect();
        delta[mask.0 as usize] = structure.value_of_tuple(&selected).clone();
    }
    FiniteDiversity::new_unchecked(points, delta)
}

impl RelationalStructure for FiniteDiversity {
    fn point_count(&self) -> usize {
        self.points.len()
    }

    fn point_label(&self, i: usize) -> &str {
        &self.points[i]
    }

    fn check_comparable(&self, _other: &Self) -> Result<()> {
        Ok(())
    }

    fn predicate_values(&self, points: &[usize]) -> Vec<Rat> {
        vec![self.value_of_tuple(points).clone()]
    }

    fn index_of_label(&self, label: &str) -> Option<usize> {
        self.index_of(label)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use crate::tuples::dk_lower_bound;

    fn lbl(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    /// Builds a diversity from (set-of-labels, value) entries; unlisted
    /// sets of size >= 2 must not exist.
    fn div(points: &[&str], entries: &[(&[&str], Rat)], allow_semi: bool) -> FiniteDiversity {
        try_div(points, entries, allow_semi).unwrap()
    }

    fn try_div(
        points: &[&str],
        entries: &[(&[&str], Rat)],
        allow_semi: bool,
    ) -> Result<FiniteDiversity> {
        let n = points.len();
        let mut delta = vec![rat_int(0); 1 << n];
        for (set, v) in entries {
            let mut mask = SubsetMask::EMPTY;
            for l in *set {
                mask = mask.insert(points.iter().position(|p| p == l).unwrap());
            }
            delta[mask.0 as usize] = v.clone();
        }
        FiniteDiversity::new(lbl(points), delta, allow_semi)
    }

    /// Independent oracle: the raw axioms checked literally — nonnegativity,
    /// the zero pattern, full monotonicity, and delta(A u B) + delta(B u C)
    /// >= delta(A u C) over every triple with B nonempty.
    fn raw_axioms_hold(d: &FiniteDiversity, allow_semi: bool) -> bool {
        let n = d.len();
        for m in all_subsets(n) {
            if *d.value(m) < Rat::zero() {
                return false;
            }
            if m.len() <= 1 && !d.value(m).is_zero() {
                return false;
            }
            if !allow_semi && m.len() >= 2 && d.value(m).is_zero() {
                return false;
            }
        }
        for a in all_subsets(n) {
            for b in all_subsets(n) {
                if a.is_subset_of(b) && d.value(a) > d.value(b) {
                    return false;
                }
            }
        }
        for a in all_subsets(n) {
            for b in all_subsets(n) {
                if b.is_empty() {
                    continue;
                }
                for c in all_subsets(n) {
                    if d.value(a.union(b)) + d.value(b.union(c)) < *d.value(a.union(c)) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// The two inputs of the worked one-point amalgamation example.
    fn example_pair() -> (FiniteDiversity, FiniteDiversity) {
        let d1 = div(
            &["x", "y", "z1"],
            &[
                (&["x", "y"], rat_int(2)),
                (&["x", "z1"], rat_int(1)),
                (&["y", "z1"], rat_int(1)),
                (&["x", "y", "z1"], rat_int(2)),
            ],
            false,
        );
        let d2 = div(
            &["x", "y", "z2"],
            &[
                (&["x", "y"], rat_int(2)),
                (&["x", "z2"], rat_int(2)),
                (&["y", "z2"], rat_int(2)),
                (&["x", "y", "z2"], rat_int(3)),
            ],
            false,
        );
        (d1, d2)
    }

    /// Diameter diversity of the bipartite shortest-path metric on
    /// {a, b, c} x {z1, z2}.
    fn k23_diameter() -> FiniteDiversity {
        let points = ["a", "b", "c", "z1", "z2"];
        let d = |i: usize, j: usize| -> i64 {
            if i == j {
                0
            } else if (i < 3) == (j < 3) {
                2
            } else {
                1
            }
        };
        let mut delta = vec![rat_int(0); 1 << 5];
        for mask in all_subsets(5) {
            if mask.len() < 2 {
                continue;
            }
            let idx = mask.indices();
            let mut diam = 0;
            for (p, &i) in idx.iter().enumerate() {
                for &j in idx.iter().skip(p + 1) {
                    diam = diam.max(d(i, j));
                }
            }
            delta[mask.0 as usize] = rat_int(diam);
        }
        FiniteDiversity::new(lbl(&points), delta, false).unwrap()
    }

    #[test]
    fn validate_accepts_two_point_diversity() {
        let d = div(&["x", "y"], &[(&["x", "y"], rat_int(1))], false);
        assert!(!d.is_semidiversity());
        assert!(raw_axioms_hold(&d, false));
    }

    #[test]
    fn validate_rejects_oversized_triple_with_witness() {
        let err = try_div(
            &["x", "y", "z"],
            &[
                (&["x", "y"], rat_int(1)),
                (&["x", "z"], rat_int(1)),
                (&["y", "z"], rat_int(1)),
                (&["x", "y", "z"], rat_int(3)),
            ],
            false,
        )
        .unwrap_err();
        match err {
            Error::TriangleViolation {
                a,
                bridge,
                c,
                lhs,
                rhs_a,
                rhs_c,
            } => {
                assert_eq!(a, lbl(&["x"]));
                assert_eq!(bridge, "y");
                assert_eq!(c, lbl(&["z"]));
                assert_eq!(lhs, rat_int(3));
                assert_eq!(rhs_a + rhs_c, rat_int(2));
            }
            other => panic!("expected triangle witness, got {other:?}"),
        }
    }

    #[test]
    fn validate_accepts_k23_diameter_diversity() {
        let d = k23_diameter();
        assert!(raw_axioms_hold(&d, false));
    }

    #[test]
    fn reduced_certificate_matches_raw_axioms_on_seeded_instances() {
        for seed in 0..60u64 {
            let mut rng = crate::sample::rng_from_seed(seed);
            let d = crate::sample::random_diversity(&mut rng, crate::sample::labels("p", 4));
            assert!(d.validate(false).is_ok());
            assert!(raw_axioms_hold(&d, false));
        }
    }

    #[test]
    fn induced_metric_of_two_point_diversity() {
        let d = div(&["x", "y"], &[(&["x", "y"], rat_int(1))], false);
        let m = d.induced_metric();
        assert_eq!(m.d(0, 1), &rat_int(1));
        assert_eq!(m.d(0, 0), &rat_int(0));
    }

    #[test]
    fn induced_metric_of_k23_diameter_recovers_the_table() {
        let m = k23_diameter().induced_metric();
        for i in 0..5 {
            for j in 0..5 {
                let expected = if i == j {
                    0
                } else if (i < 3) == (j < 3) {
                    2
                } else {
                    1
                };
                assert_eq!(m.d(i, j), &rat_int(expected));
            }
        }
    }

    #[test]
    fn restrict_identity_and_singleton() {
        let d = k23_diameter();
        assert_eq!(d.restrict(SubsetMask::full(5)).unwrap(), d);
        let single = d.restrict(SubsetMask::singleton(2)).unwrap();
        assert_eq!(single.len(), 1);
        assert_eq!(single.points()[0], "c");
        assert!(d.restrict(SubsetMask::EMPTY).is_err());
    }

    #[test]
    fn amalgamate_example_instance_matches_brute_force() {
        let (d1, d2) = example_pair();
        let out = amalgamate_one_point(&d1, &d2).unwrap();
        assert_eq!(out.points(), &lbl(&["x", "y", "z1", "z2"]));

        // Frozen values, re-derived by the unreduced sup formula below.
        let z1z2 = SubsetMask::from_indices(&[2, 3]);
        assert_eq!(out.value(z1z2), &rat_int(1));
        assert_eq!(out.value(z1z2.insert(0)), &rat_int(2));
        assert_eq!(out.value(z1z2.insert(1)), &rat_int(2));
        assert_eq!(out.value(z1z2.insert(0).insert(1)), &rat_int(3));

        // Independent oracle: evaluate the defining max over every B and C
        // (no disjointness reduction).
        let val1 = |m: SubsetMask| d1.value(m).clone();
        let val2 = |m: SubsetMask| d2.value(m).clone();
        let z1 = SubsetMask::singleton(2); // in d1
        let z2 = SubsetMask::singleton(2); // in d2
        for a in all_subsets(2) {
            let mut best: Option<Rat> = None;
            for b in all_subsets(2) {
                let t1 = val1(a.union(b).union(z1)) - val2(b.union(z2));
                let t2 = val2(a.union(b).union(z2)) - val1(b.union(z1));
                for t in [t1, t2] {
                    if best.as_ref().is_none_or(|cur| t > *cur) {
                        best = Some(t);
                    }
                }
            }
            assert_eq!(out.value(a.union(z1z2)), &best.unwrap());
        }

        assert!(out.validate(true).is_ok());
        assert!(raw_axioms_hold(&out, true));

        // Extension property: exact restriction to both inputs.
        assert_eq!(
            out.restrict_to_labels(&["x", "y", "z1"]).unwrap(),
            d1
        );
        assert_eq!(
            out.restrict_to_labels(&["x", "y", "z2"]).unwrap(),
            d2
        );
    }

    #[test]
    fn amalgamate_identical_extensions_is_degenerate() {
        let (d1, _) = example_pair();
        let copy = {
            let mut points = d1.points().to_vec();
            points[2] = "z2".into();
            FiniteDiversity::new_unchecked(
                points,
                (0..8)
                    .map(|m| d1.value(SubsetMask(m as u32)).clone())
                    .collect(),
            )
        };
        let out = amalgamate_one_point(&d1, &copy).unwrap();
        assert!(out.is_semidiversity());
        let z1 = out.index_of("z1").unwrap();
        let z2 = out.index_of("z2").unwrap();
        assert!(out
            .value(SubsetMask::singleton(z1).insert(z2))
            .is_zero());
    }

    #[test]
    fn amalgamate_respects_the_one_point_gap_bound() {
        // d(z1, z2) <= d_infty((x, y, z1), (x, y, z2)); here both equal 1.
        let (d1, d2) = example_pair();
        let out = amalgamate_one_point(&d1, &d2).unwrap();
        let ta = EnumeratedTuple::from_labels(&d1, &["x", "y", "z1"]).unwrap();
        let tb = EnumeratedTuple::from_labels(&d2, &["x", "y", "z2"]).unwrap();
        let gap = crate::tuples::d_infty(&ta, &tb).unwrap();
        assert_eq!(gap, rat_int(1));
        assert!(*out.value(SubsetMask::from_indices(&[2, 3])) <= gap);
    }

    #[test]
    fn amalgamate_rejects_disagreement_with_witness() {
        let (d1, _) = example_pair();
        let d2 = div(
            &["x", "y", "z2"],
            &[
                (&["x", "y"], rat_int(1)), // disagrees with d1's 2
                (&["x", "z2"], rat_int(1)),
                (&["y", "z2"], rat_int(1)),
                (&["x", "y", "z2"], rat_int(1)),
            ],
            false,
        );
        match amalgamate_one_point(&d1, &d2).unwrap_err() {
            Error::AgreementMismatch { set, left, right } => {
                assert_eq!(set, lbl(&["x", "y"]));
                assert_eq!(left, rat_int(2));
                assert_eq!(right, rat_int(1));
            }
            other => panic!("expected agreement witness, got {other:?}"),
        }
    }

    #[test]
    fn extend_over_base_with_full_common_part_is_the_patch() {
        let (d1, _) = example_pair();
        let base = d1.restrict_to_labels(&["x", "y"]).unwrap();
        let out = extend_over_base(&base, &d1).unwrap();
        assert_eq!(out, d1);
    }

    #[test]
    fn two_extends_reproduce_the_one_point_amalgam() {
        let (d1, d2) = example_pair();
        let base = d1.restrict_to_labels(&["x", "y"]).unwrap();
        let step1 = extend_over_base(&base, &d1).unwrap();
        let step2 = extend_over_base(&step1, &d2).unwrap();
        let direct = amalgamate_one_point(&d1, &d2).unwrap();
        assert_eq!(step2, direct);
    }

    #[test]
    fn extend_over_base_restricts_to_both_sides_on_seeded_instances() {
        for seed in 100..140u64 {
            let mut rng = crate::sample::rng_from_seed(seed);
            let big = crate::sample::random_diversity(&mut rng, crate::sample::labels("p", 4));
            // Patch: restriction to {p1, p2, p4} with p4 playing the new
            // point over base {p1, p2, p3}.
            let base = big.restrict_to_labels(&["p1", "p2", "p3"]).unwrap();
            let patch = big.restrict_to_labels(&["p1", "p2", "p4"]).unwrap();
            let out = extend_over_base(&base, &patch).unwrap();
            assert_eq!(out.restrict_to_labels(&["p1", "p2", "p3"]).unwrap(), base);
            assert_eq!(out.restrict_to_labels(&["p1", "p2", "p4"]).unwrap(), patch);
            assert!(out.validate(true).is_ok());
        }
    }

    #[test]
    fn join_of_singletons_is_a_semidiversity_point_pair() {
        let out = join(
            &FiniteDiversity::single("x"),
            &FiniteDiversity::single("y"),
        )
        .unwrap();
        assert!(out.is_semidiversity());
        assert!(out.value(SubsetMask::full(2)).is_zero());
    }

    #[test]
    fn join_of_two_copies_uses_the_max_value_and_renames() {
        let d = div(&["x", "y"], &[(&["x", "y"], rat_int(1))], false);
        let out = join(&d, &d).unwrap();
        assert_eq!(out.points(), &lbl(&["x", "y", "x'", "y'"]));
        assert!(raw_axioms_hold(&out, false));
        // Cross sets take the max value 1.
        assert_eq!(
            out.value(SubsetMask::from_indices(&[0, 2])),
            &rat_int(1)
        );
        assert_eq!(
            out.value(SubsetMask::from_indices(&[0, 1, 2, 3])),
            &rat_int(1)
        );
        // Restriction to either side recovers the inputs.
        assert_eq!(out.restrict(SubsetMask::from_indices(&[0, 1])).unwrap(), d);
    }

    #[test]
    fn quotient_merges_zero_distance_points() {
        let (d1, _) = example_pair();
        let copy = {
            let mut points = d1.points().to_vec();
            points[2] = "z2".into();
            FiniteDiversity::new_unchecked(
                points,
                (0..8)
                    .map(|m| d1.value(SubsetMask(m as u32)).clone())
                    .collect(),
            )
        };
        let degenerate = amalgamate_one_point(&d1, &copy).unwrap();
        let (q, classes) = quotient(&degenerate).unwrap();
        assert_eq!(q.len(), 3);
        assert!(!q.is_semidiversity());
        assert_eq!(classes, vec![
            vec!["x".to_string()],
            vec!["y".to_string()],
            vec!["z1".to_string(), "z2".to_string()],
        ]);
        assert_eq!(q, d1);

        // A strict diversity is unchanged.
        let (same, classes) = quotient(&d1).unwrap();
        assert_eq!(same, d1);
        assert!(classes.iter().all(|c| c.len() == 1));

        // Two joined singletons collapse to one point.
        let pair = join(
            &FiniteDiversity::single("x"),
            &FiniteDiversity::single("y"),
        )
        .unwrap();
        let (q, _) = quotient(&pair).unwrap();
        assert_eq!(q.len(), 1);
    }

    #[test]
    fn dk_embedding_of_equal_tuples_has_zero_bound() {
        let d = k23_diameter();
        let t = EnumeratedTuple::from_labels(&d, &["a", "b", "z1"]).unwrap();
        let out = dk_upper_embedding(&t, &t).unwrap();
        assert!(out.bound.is_zero());
    }

    #[test]
    fn dk_embedding_bound_on_the_worked_example() {
        let (d1, d2) = example_pair();
        let ta = EnumeratedTuple::from_labels(&d1, &["x", "y", "z1"]).unwrap();
        let tb = EnumeratedTuple::from_labels(&d2, &["x", "y", "z2"]).unwrap();
        let d_inf = crate::tuples::d_infty(&ta, &tb).unwrap();
        assert_eq!(d_inf, rat_int(1));
        assert_eq!(dk_lower_bound(&ta, &tb).unwrap(), rat(1, 3));

        let out = dk_upper_embedding(&ta, &tb).unwrap();
        assert!(out.bound <= d_inf);
        assert!(out.joint.validate(true).is_ok());
        // The joint embeds both tuples: their value tables transfer.
        for mask in all_subsets(3) {
            if mask.len() < 2 {
                continue;
            }
            let sel: Vec<usize> = mask.indices();
            let ja: Vec<usize> = sel.iter().map(|&i| out.a_images[i]).collect();
            let jb: Vec<usize> = sel.iter().map(|&i| out.b_images[i]).collect();
            let da: Vec<usize> = sel.iter().map(|&i| ta.entries()[i]).collect();
            let db: Vec<usize> = sel.iter().map(|&i| tb.entries()[i]).collect();
            assert_eq!(out.joint.value_of_tuple(&ja), d1.value_of_tuple(&da));
            assert_eq!(out.joint.value_of_tuple(&jb), d2.value_of_tuple(&db));
        }
    }
}
