//! Finite-state processes as metric structures.
//!
//! A [`FiniteProcess`] is a finite index set together with an exact joint
//! probability table over all outcome tuples. The predicates of the
//! structure are the finite-dimensional probabilities
//! `R_s(t_1, .., t_k) = P(X(t_1) = s_1, .., X(t_k) = s_k)`, and the induced
//! metric is the disagreement probability
//! `d(t_1, t_2) = P(X(t_1) != X(t_2))`.
//!
//! Non-degeneracy (no two index points agree almost surely) makes `d` a
//! metric; degenerate tables are accepted with the `semi` flag set, and
//! [`FiniteProcess::quotient`] merges almost-surely-equal points.

use num::{One, Zero};

use crate::error::{Error, Result};
use crate::metric::{check_labels, FiniteMetric};
use crate::rational::{rat_int, Rat};
use crate::subset::{all_subsets, SubsetMask};
use crate::tuples::{EnumeratedTuple, RelationalStructure};

/// Hard cap on joint-table sizes (`|S|^n` entries).
pub const MAX_PMF_ENTRIES: u64 = 1 << 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteProcess {
    index_points: Vec<String>,
    /// State labels, sorted at construction so tables from different sources
    /// are comparable.
    states: Vec<String>,
    /// Joint pmf, big-endian over index positions: the outcome
    /// `(s_0, .., s_{n-1})` sits at `sum_i s_i * |S|^(n-1-i)`.
    pmf: Vec<Rat>,
    semi: bool,
}

fn table_len(num_states: usize, num_points: usize) -> Result<usize> {
    let mut len: u64 = 1;
    for _ in 0..num_points {
        len = len
            .checked_mul(num_states as u64)
            .filter(|&l| l <= MAX_PMF_ENTRIES)
            .ok_or(Error::TableTooLarge {
                entries: u64::MAX,
                max: MAX_PMF_ENTRIES,
            })?;
    }
    Ok(len as usize)
}

impl FiniteProcess {
    /// Builds a process from a joint table indexed by the given state order;
    /// states are then sorted internally. Checks nonnegativity, exact total
    /// mass 1, and (unless `allow_semi`) non-degeneracy of every index pair.
    pub fn new(
        index_points: Vec<String>,
        states: Vec<String>,
        pmf: Vec<Rat>,
        allow_semi: bool,
    ) -> Result<Self> {
        check_labels(&index_points)?;
        if states.is_empty() {
            return Err(Error::Parse("state set must be nonempty".into()));
        }
        for (i, s) in states.iter().enumerate() {
            if states[..i].contains(s) {
                return Err(Error::DuplicateLabel(s.clone()));
            }
        }
        let expected = table_len(states.len(), index_points.len())?;
        if pmf.len() != expected {
            return Err(Error::Parse(format!(
                "joint table has {} entries, expected {}",
                pmf.len(),
                expected
            )));
        }

        // Canonicalize state order.
        let mut sorted: Vec<String> = states.clone();
        sorted.sort();
        let perm: Vec<usize> = sorted
            .iter()
            .map(|s| states.iter().position(|t| t == s).unwrap())
            .collect();
        let n = index_points.len();
        let k = states.len();
        let mut canon = vec![rat_int(0); pmf.len()];
        for (idx, canon_slot) in canon.iter_mut().enumerate() {
            // Decode the canonical index, map each digit back to the
            // caller's state order, re-encode.
            let mut digits = vec![0usize; n];
            let mut rem = idx;
            for pos in (0..n).rev() {
                digits[pos] = rem % k;
                rem /= k;
            }
            let mut orig = 0usize;
            for &d in &digits {
                orig = orig * k + perm[d];
            }
            *canon_slot = pmf[orig].clone();
        }

        let mut sum = Rat::zero();
        for (idx, p) in canon.iter().enumerate() {
            if *p < Rat::zero() {
                let proc_tmp = FiniteProcess {
                    index_points: index_points.clone(),
                    states: sorted.clone(),
                    pmf: canon.clone(),
                    semi: false,
                };
                return Err(Error::NegativeProbability {
                    outcome: proc_tmp.outcome_labels(idx),
                    value: p.clone(),
                });
            }
            sum += p;
        }
        if !sum.is_one() {
            return Err(Error::PmfSumNotOne { sum });
        }

        let out = Self::from_parts(index_points, sorted, canon);
        if !allow_semi && out.semi {
            for i in 0..out.len() {
                for j in i + 1..out.len() {
                    if out.agreement_probability(i, j).is_one() {
                        return Err(Error::DegeneratePair {
                            t1: out.index_points[i].clone(),
                            t2: out.index_points[j].clone(),
                        });
                    }
                }
            }
        }
        Ok(out)
    }

    /// Shape-checked assembly; the table is trusted to be a pmf and states
    /// to be sorted. The semi flag is derived.
    pub(crate) fn from_parts(
        index_points: Vec<String>,
        states: Vec<String>,
        pmf: Vec<Rat>,
    ) -> Self {
        let mut out = FiniteProcess {
            index_points,
            states,
            pmf,
            semi: false,
        };
        let n = out.len();
        'outer: for i in 0..n {
            for j in i + 1..n {
                if out.agreement_probability(i, j).is_one() {
                    out.semi = true;
                    break 'outer;
                }
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        self.index_points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index_points.is_empty()
    }

    pub fn index_points(&self) -> &[String] {
        &self.index_points
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn pmf(&self) -> &[Rat] {
        &self.pmf
    }

    /// True when some pair of index points agrees almost surely.
    pub fn is_semi(&self) -> bool {
        self.semi
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index_points.iter().position(|p| p == label)
    }

    pub fn outcome_count(&self) -> usize {
        self.pmf.len()
    }

    fn decode(&self, mut idx: usize) -> Vec<usize> {
        let n = self.len();
        let k = self.states.len();
        let mut out = vec![0usize; n];
        for pos in (0..n).rev() {
            out[pos] = idx % k;
            idx /= k;
        }
        out
    }

    fn outcome_labels(&self, idx: usize) -> Vec<String> {
        self.decode(idx)
            .iter()
            .map(|&s| self.states[s].clone())
            .collect()
    }

    /// `P(X(t_1) = s_1, .., X(t_k) = s_k)` for an ordered tuple of index
    /// points (repeats allowed) and state indices.
    pub fn tuple_probability(&self, entries: &[usize], states: &[usize]) -> Rat {
        assert_eq!(entries.len(), states.len());
        let law = self.vector_law(entries);
        let k = self.states.len();
        let mut idx = 0usize;
        for &s in states {
            idx = idx * k + s;
        }
        law[idx].clone()
    }

    /// Joint law of an ordered tuple of index points (repeats allowed), as a
    /// table over `S^len` in big-endian state order.
    pub fn vector_law(&self, entries: &[usize]) -> Vec<Rat> {
        let k = self.states.len();
        let m = entries.len();
        let mut len = 1usize;
        for _ in 0..m {
            len *= k;
        }
        let mut law = vec![rat_int(0); len];
        for (idx, p) in self.pmf.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            let outcome = self.decode(idx);
            let mut sub = 0usize;
            for &e in entries {
                sub = sub * k + outcome[e];
            }
            law[sub] += p;
        }
        law
    }

    /// Marginal onto a nonempty subset of index points (original relative
    /// order is kept); exact summation.
    pub fn marginal(&self, subset: SubsetMask) -> Result<FiniteProcess> {
        if subset.is_empty() {
            return Err(Error::EmptySubset);
        }
        let kept = subset.indices();
        let points: Vec<String> = kept
            .iter()
            .map(|&i| self.index_points[i].clone())
            .collect();
        let law = self.vector_law(&kept);
        Ok(FiniteProcess::from_parts(
            points,
            self.states.clone(),
            law,
        ))
    }

    pub fn marginal_to_labels(&self, labels: &[&str]) -> Result<FiniteProcess> {
        let entries: Vec<usize> = labels
            .iter()
            .map(|l| {
                self.index_of(l)
                    .ok_or_else(|| Error::UnknownLabel(l.to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        let law = self.vector_law(&entries);
        Ok(FiniteProcess::from_parts(
            labels.iter().map(|s| s.to_string()).collect(),
            self.states.clone(),
            law,
        ))
    }

    fn agreement_probability(&self, i: usize, j: usize) -> Rat {
        let mut acc = Rat::zero();
        for (idx, p) in self.pmf.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            let outcome = self.decode(idx);
            if outcome[i] == outcome[j] {
                acc += p;
            }
        }
        acc
    }

    /// Induced metric `d(t_1, t_2) = P(X(t_1) != X(t_2))`; a semimetric when
    /// the process has degenerate pairs.
    pub fn induced_metric(&self) -> FiniteMetric {
        let n = self.len();
        let mut dist = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    dist.push(rat_int(0));
                } else {
                    dist.push(rat_int(1) - self.agreement_probability(i, j));
                }
            }
        }
        FiniteMetric::from_parts_unchecked(self.index_points.clone(), dist)
    }

    pub fn distance(&self, i: usize, j: usize) -> Rat {
        if i == j {
            rat_int(0)
        } else {
            rat_int(1) - self.agreement_probability(i, j)
        }
    }

    /// Re-derives the defining identities from the joint table: total mass
    /// one, marginal consistency under summing out one point, and
    /// permutation invariance of the finite-dimensional probabilities.
    pub fn self_check(&self) -> Result<()> {
        let mut sum = Rat::zero();
        for p in &self.pmf {
            if *p < Rat::zero() {
                return Err(Error::Internal("negative mass".into()));
            }
            sum += p;
        }
        if !sum.is_one() {
            return Err(Error::PmfSumNotOne { sum });
        }
        let n = self.len();
        for mask in all_subsets(n) {
            if mask.is_empty() || mask.len() == n {
                continue;
            }
            let small = self.vector_law(&mask.indices());
            for t in 0..n {
                if mask.contains(t) {
                    continue;
                }
                let mut ext = mask.indices();
                ext.push(t);
                let big = self.vector_law(&ext);
                let k = self.states.len();
                for (idx, target) in small.iter().enumerate() {
                    let mut acc = Rat::zero();
                    for s in 0..k {
                        acc += &big[idx * k + s];
                    }
                    if acc != *target {
                        return Err(Error::Internal(format!(
                            "marginal consistency failed at subset {:?}",
                            mask.indices()
                        )));
                    }
                }
            }
        }
        // Permutation invariance on the full tuple under all transpositions.
        let ident: Vec<usize> = (0..n).collect();
        let base = self.vector_law(&ident);
        let k = self.states.len();
        for i in 0..n {
            for j in i + 1..n {
                let mut swapped = ident.clone();
                swapped.swap(i, j);
                let law = self.vector_law(&swapped);
                for (idx, v) in base.iter().enumerate() {
                    let mut digits = vec![0usize; n];
                    let mut rem = idx;
                    for pos in (0..n).rev() {
                        digits[pos] = rem % k;
                        rem /= k;
                    }
                    digits.swap(i, j);
                    let mut jdx = 0usize;
                    for &d in &digits {
                        jdx = jdx * k + d;
                    }
                    if law[jdx] != *v {
                        return Err(Error::Internal(
                            "permutation invariance failed".into(),
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    /// Merges index points that agree almost surely (the paper-side reading
    /// of degenerate pairs) onto their first-listed representatives.
    pub fn quotient(&self) -> Result<(FiniteProcess, Vec<Vec<String>>)> {
        let n = self.len();
        let mut class_of: Vec<usize> = (0..n).collect();
        for i in 0..n {
            for j in 0..i {
                if self.agreement_probability(i, j).is_one() {
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
                classes.push(vec![self.index_points[i].clone()]);
            } else {
                let rep = class_of[i];
                let pos = reps.indices().iter().position(|&r| r == rep).unwrap();
                classes[pos].push(self.index_points[i].clone());
            }
        }
        Ok((self.marginal(reps)?, classes))
    }

    pub(crate) fn reorder_points(&self, order: &[String]) -> Result<FiniteProcess> {
        let entries: Vec<usize> = order
            .iter()
            .map(|l| {
                self.index_of(l)
                    .ok_or_else(|| Error::UnknownLabel(l.clone()))
            })
            .collect::<Result<Vec<_>>>()?;
        if entries.len() != self.len() {
            return Err(Error::Internal("reorder length mismatch".into()));
        }
        let law = self.vector_law(&entries);
        Ok(FiniteProcess::from_parts(
            order.to_vec(),
            self.states.clone(),
            law,
        ))
    }
}

impl RelationalStructure for FiniteProcess {
    fn point_count(&self) -> usize {
        self.len()
    }

    fn point_label(&self, i: usize) -> &str {
        &self.index_points[i]
    }

    fn check_comparable(&self, other: &Self) -> Result<()> {
        if self.states != other.states {
            return Err(Error::StateSetMismatch {
                a: self.states.clone(),
                b: other.states.clone(),
            });
        }
        Ok(())
    }

    /// The predicate family on a sub-tuple is the family of
    /// finite-dimensional probabilities, one value per state tuple. The
    /// induced metric is determined by these (`d = 1 - sum of the diagonal
    /// pair probabilities`), so it adds no separate predicate.
    fn predicate_values(&self, points: &[usize]) -> Vec<Rat> {
        self.vector_law(points)
    }

    fn index_of_label(&self, label: &str) -> Option<usize> {
        self.index_of(label)
    }
}

/// A pmf over an abstract finite outcome space `0..len`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Distribution {
    probs: Vec<Rat>,
}

impl Distribution {
    pub fn new(probs: Vec<Rat>) -> Result<Self> {
        let mut sum = Rat::zero();
        for p in &probs {
            if *p < Rat::zero() {
                return Err(Error::NegativeProbability {
                    outcome: vec![],
                    value: p.clone(),
                });
            }
            sum += p;
        }
        if !sum.is_one() {
            return Err(Error::PmfSumNotOne { sum });
        }
        Ok(Distribution { probs })
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn probs(&self) -> &[Rat] {
        &self.probs
    }
}

/// Total variation distance: half the L1 distance between the tables.
pub fn total_variation(p: &Distribution, q: &Distribution) -> Result<Rat> {
    if p.len() != q.len() {
        return Err(Error::OutcomeSpaceMismatch {
            a: p.len(),
            b: q.len(),
        });
    }
    let mut acc = Rat::zero();
    for (a, b) in p.probs.iter().zip(q.probs.iter()) {
        acc += if a >= b { a - b } else { b - a };
    }
    Ok(acc / rat_int(2))
}

/// A joint pmf on pairs of outcomes with prescribed marginals.
#[derive(Clone, Debug)]
pub struct Coupling {
    size: usize,
    joint: Vec<Rat>, // row-major (left, right)
}

impl Coupling {
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn prob(&self, left: usize, right: usize) -> &Rat {
        &self.joint[left * self.size + right]
    }

    pub fn left_marginal(&self) -> Distribution {
        let mut probs = vec![rat_int(0); self.size];
        for i in 0..self.size {
            for j in 0..self.size {
                probs[i] += self.prob(i, j);
            }
        }
        Distribution { probs }
    }

    pub fn right_marginal(&self) -> Distribution {
        let mut probs = vec![rat_int(0); self.size];
        for i in 0..self.size {
            for j in 0..self.size {
                probs[j] += self.prob(i, j);
            }
        }
        Distribution { probs }
    }

    /// `P(left != right)`.
    pub fn mismatch_probability(&self) -> Rat {
        let mut acc = Rat::zero();
        for i in 0..self.size {
            for j in 0..self.size {
                if i != j {
                    acc += self.prob(i, j);
                }
            }
        }
        acc
    }
}

/// Optimal coupling: the overlap `min(p(u), q(u))` sits on the diagonal and
/// the residuals are coupled as the product of their normalizations, so the
/// mismatch probability equals the total variation distance exactly.
pub fn optimal_coupling(p: &Distribution, q: &Distribution) -> Result<Coupling> {
    if p.len() != q.len() {
        return Err(Error::OutcomeSpaceMismatch {
            a: p.len(),
            b: q.len(),
        });
    }
    let m = p.len();
    let mut joint = vec![rat_int(0); m * m];
    let mut rp = Vec::with_capacity(m);
    let mut rq = Vec::with_capacity(m);
    let mut tv = Rat::zero();
    for u in 0..m {
        let overlap = if p.probs[u] <= q.probs[u] {
            p.probs[u].clone()
        } else {
            q.probs[u].clone()
        };
        joint[u * m + u] = overlap.clone();
        rp.push(&p.probs[u] - &overlap);
        rq.push(&q.probs[u] - &overlap);
        tv += &p.probs[u] - &overlap;
    }
    if !tv.is_zero() {
        for u in 0..m {
            if rp[u].is_zero() {
                continue;
            }
            for v in 0..m {
                if rq[v].is_zero() {
                    continue;
                }
                joint[u * m + v] = &rp[u] * &rq[v] / &tv;
            }
        }
    }
    Ok(Coupling { size: m, joint })
}

fn match_process_pair(
    p1: &FiniteProcess,
    p2: &FiniteProcess,
) -> Result<(Vec<String>, String, String)> {
    p1.check_comparable(p2)?;
    let common: Vec<String> = p1
        .index_points
        .iter()
        .filter(|p| p2.index_of(p).is_some())
        .cloned()
        .collect();
    let extra1: Vec<&String> = p1
        .index_points
        .iter()
        .filter(|p| p2.index_of(p).is_none())
        .collect();
    let extra2: Vec<&String> = p2
        .index_points
        .iter()
        .filter(|p| p1.index_of(p).is_none())
        .collect();
    if extra1.len() != 1 || extra2.len() != 1 {
        return Err(Error::BadExtensionPair(format!(
            "each input must extend the common part by exactly one point \
             (left adds {:?}, right adds {:?})",
            extra1, extra2
        )));
    }
    Ok((common, extra1[0].clone(), extra2[0].clone()))
}

/// Conditional-coupling amalgamation: for every common outcome of positive
/// mass, optimally couples the conditional laws of the two new points and
/// reassembles `P[(s, s1, s2)] = P[s] * coupling_s(s1, s2)`.
///
/// The marginals onto `(common, w)` and `(common, z)` reproduce the inputs
/// exactly, and
/// `d(w, z) = sum_s P[s] * d_TV(conditionals) <= 1/2 |S|^(n+1) d_infty`.
pub fn amalgamate(p1: &FiniteProcess, p2: &FiniteProcess) -> Result<FiniteProcess> {
    let (common, w, z) = match_process_pair(p1, p2)?;
    let mut z_label = z.clone();
    while z_label == w || common.contains(&z_label) {
        z_label.push('\'');
    }
    let n = common.len();
    let k = p1.states.len();
    table_len(k, n + 2)?;

    // Reindex both inputs to (common.., new point last).
    let mut order1 = common.clone();
    order1.push(w.clone());
    let a1 = p1.reorder_points(&order1)?;
    let mut order2 = common.clone();
    order2.push(z.clone());
    let a2 = p2.reorder_points(&order2)?;

    // Exact marginal agreement on the common part.
    let base_len = a1.pmf.len() / k;
    let mut base = vec![rat_int(0); base_len];
    for sbar in 0..base_len {
        let mut m1 = Rat::zero();
        let mut m2 = Rat::zero();
        for s in 0..k {
            m1 += &a1.pmf[sbar * k + s];
            m2 += &a2.pmf[sbar * k + s];
        }
        if m1 != m2 {
            let labels = a1
                .decode(sbar * k)
                .iter()
                .take(n)
                .map(|&s| a1.states[s].clone())
                .collect();
            return Err(Error::MarginalMismatch {
                outcome: labels,
                left: m1,
                right: m2,
            });
        }
        base[sbar] = m1;
    }

    let mut pmf = vec![rat_int(0); base_len * k * k];
    for sbar in 0..base_len {
        if base[sbar].is_zero() {
            continue; // nothing to assemble at zero-mass conditionals
        }
        let cond1 = Distribution::new(
            (0..k)
                .map(|s| &a1.pmf[sbar * k + s] / &base[sbar])
                .collect(),
        )?;
        let cond2 = Distribution::new(
            (0..k)
                .map(|s| &a2.pmf[sbar * k + s] / &base[sbar])
                .collect(),
        )?;
        let coupling = optimal_coupling(&cond1, &cond2)?;
        for s1 in 0..k {
            for s2 in 0..k {
                let c = coupling.prob(s1, s2);
                if !c.is_zero() {
                    pmf[(sbar * k + s1) * k + s2] = &base[sbar] * c;
                }
            }
        }
    }

    let mut points = common;
    points.push(w);
    points.push(z_label);
    Ok(FiniteProcess::from_parts(points, p1.states.clone(), pmf))
}

/// Joint embedding as the independent product on the disjoint union of the
/// index sets. Labels of the right input are renamed with `'` on collision.
pub fn join_independent(p1: &FiniteProcess, p2: &FiniteProcess) -> Result<FiniteProcess> {
    p1.check_comparable(p2)?;
    check_labels(&{
        let mut v = p1.index_points.clone();
        v.extend(p2.index_points.iter().cloned());
        let mut seen: Vec<String> = Vec::new();
        let mut out = Vec::new();
        for l in v {
            let mut label = l;
            while seen.contains(&label) {
                label.push('\'');
            }
            seen.push(label.clone());
            out.push(label);
        }
        out
    })?;
    table_len(p1.states.len(), p1.len() + p2.len())?;
    let mut points = p1.index_points.clone();
    for p in &p2.index_points {
        let mut label = p.clone();
        while points.contains(&label) {
            label.push('\'');
        }
        points.push(label);
    }
    let mut pmf = Vec::with_capacity(p1.pmf.len() * p2.pmf.len());
    for a in &p1.pmf {
        for b in &p2.pmf {
            pmf.push(a * b);
        }
    }
    Ok(FiniteProcess::from_parts(points, p1.states.clone(), pmf))
}

/// Adds the patch's new point over all of `base` by absorbing the remaining
/// base points one at a time with [`amalgamate`]. The result's marginal onto
/// the base is exactly `base`, and onto the patch's ground exactly the patch.
pub fn extend_over_base(
    base: &FiniteProcess,
    patch: &FiniteProcess,
) -> Result<FiniteProcess> {
    base.check_comparable(patch)?;
    let x_labels: Vec<String> = patch
        .index_points
        .iter()
        .filter(|p| base.index_of(p).is_some())
        .cloned()
        .collect();
    let extra: Vec<&String> = patch
        .index_points
        .iter()
        .filter(|p| base.index_of(p).is_none())
        .collect();
    if extra.len() != 1 {
        return Err(Error::BadExtensionPair(format!(
            "patch must add exactly one point over the base (adds {extra:?})"
        )));
    }
    let z = extra[0].clone();
    table_len(base.states().len(), base.len() + 1)?;

    let mut cur_labels = x_labels.clone();
    let mut cur = {
        let mut order = x_labels.clone();
        order.push(z.clone());
        patch.reorder_points(&order)?
    };
    if cur_labels.is_empty() {
        // Nothing shared: grow by independent product instead.
        let first = base
            .index_points
            .first()
            .ok_or(Error::EmptySubset)?
            .clone();
        let side = base.marginal_to_labels(&[first.as_str()])?;
        cur = join_independent(&side, &cur)?;
        cur_labels.push(first);
    }
    for y in &base.index_points {
        if cur_labels.contains(y) {
            continue;
        }
        let mut side_labels: Vec<&str> = cur_labels.iter().map(|s| s.as_str()).collect();
        side_labels.push(y.as_str());
        let side = base.marginal_to_labels(&side_labels)?;
        cur = amalgamate(&side, &cur)?;
        cur_labels.push(y.clone());
    }
    let mut order = base.index_points.clone();
    order.push(z);
    cur.reorder_points(&order)
}

/// A coupled joint process containing images of both tuples, plus the
/// embedding bound `max_i d(a_i, b_i)` certified inside it.
pub struct DkProcessEmbedding {
    pub joint: FiniteProcess,
    pub bound: Rat,
    pub a_images: Vec<usize>,
    pub b_images: Vec<usize>,
}

/// Optimally couples the whole outcome vectors of the two tuples. In the
/// resulting process on `2n` points,
/// `max_i d(a_i, b_i) <= P(vectors differ) = d_TV <= |S|^n * d_infty`.
pub fn dk_upper_embedding(
    a: &EnumeratedTuple<FiniteProcess>,
    b: &EnumeratedTuple<FiniteProcess>,
) -> Result<DkProcessEmbedding> {
    if a.len() != b.len() {
        return Err(Error::TupleLengthMismatch {
            a: a.len(),
            b: b.len(),
        });
    }
    a.structure().check_comparable(b.structure())?;
    let n = a.len();
    let k = a.structure().states.len();
    table_len(k, 2 * n)?;

    let law_a = Distribution::new(a.structure().vector_law(a.entries()))?;
    let law_b = Distribution::new(b.structure().vector_law(b.entries()))?;
    let coupling = optimal_coupling(&law_a, &law_b)?;

    let m = law_a.len();
    let mut pmf = vec![rat_int(0); m * m];
    for u in 0..m {
        for v in 0..m {
            let p = coupling.prob(u, v);
            if !p.is_zero() {
                // Outcome index of (u over a-points, v over b-points): the
                // joint layout is a-points first, so the combined index is
                // u * |S|^n + v.
                pmf[u * m + v] = p.clone();
            }
        }
    }
    let mut points: Vec<String> = (1..=n).map(|i| format!("a{i}")).collect();
    points.extend((1..=n).map(|i| format!("b{i}")));
    let joint = FiniteProcess::from_parts(points, a.structure().states.clone(), pmf);

    let mut bound = rat_int(0);
    for i in 0..n {
        let d = joint.distance(i, n + i);
        if d > bound {
            bound = d;
        }
    }
    Ok(DkProcessEmbedding {
        joint,
        bound,
        a_images: (0..n).collect(),
        b_images: (n..2 * n).collect(),
    })
}
