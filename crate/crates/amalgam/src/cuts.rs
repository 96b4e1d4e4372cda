//! Cut weights and exact cut decomposition of diversities.
//!
//! A split of the ground set is keyed by its side not containing a fixed
//! anchor point. A nonnegative weight per split defines a semidiversity
//! `delta(A) = sum_U w(U) * [A meets both U and its complement]`; evaluated
//! on pairs this is the matching combination of cut semimetrics.
//!
//! [`decompose`] inverts the map exactly: the split indicators are linearly
//! independent as functions on subsets, so a diversity has at most one
//! representation, found here by incremental rational elimination over the
//! subset equations in ascending size order. A failure is reported with the
//! first inconsistent equation (reconstructed vs required value) or the
//! first negative weight.

use num::Zero;

use crate::diversity::FiniteDiversity;
use crate::error::{Error, Result};
use crate::rational::{rat_int, Rat};
use crate::subset::{all_subsets, subsets_of, SubsetMask};

/// Nonnegative weights on the splits of a ground set, keyed by the side not
/// containing the anchor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CutWeights {
    points: Vec<String>,
    anchor: usize,
    /// Indexed by compressed mask over the non-anchor points, ascending;
    /// entry 0 (the empty side) is unused and stays zero.
    weights: Vec<Rat>,
}

impl CutWeights {
    pub fn new(points: Vec<String>, anchor: usize, weights: Vec<Rat>) -> Result<Self> {
        crate::metric::check_labels(&points)?;
        if anchor >= points.len() {
            return Err(Error::AnchorNotFound(format!("index {anchor}")));
        }
        let m = points.len() - 1;
        if weights.len() != 1 << m {
            return Err(Error::Internal("weight table has wrong size".into()));
        }
        if !weights[0].is_zero() {
            return Err(Error::Internal("empty side cannot carry weight".into()));
        }
        for w in &weights {
            if *w < Rat::zero() {
                return Err(Error::NegativeValue {
                    set: vec![],
                    value: w.clone(),
                });
            }
        }
        Ok(CutWeights {
            points,
            anchor,
            weights,
        })
    }

    pub fn zero(points: Vec<String>, anchor: usize) -> Result<Self> {
        let m = points.len() - 1;
        Self::new(points, anchor, vec![rat_int(0); 1 << m])
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn anchor(&self) -> usize {
        self.anchor
    }

    pub fn anchor_label(&self) -> &str {
        &self.points[self.anchor]
    }

    /// Non-anchor point indices, ascending; compressed-mask bit `i` stands
    /// for `side_order()[i]`.
    pub fn side_order(&self) -> Vec<usize> {
        (0..self.points.len())
            .filter(|&i| i != self.anchor)
            .collect()
    }

    pub fn weights(&self) -> &[Rat] {
        &self.weights
    }

    pub fn weight(&self, side: SubsetMask) -> &Rat {
        &self.weights[side.0 as usize]
    }

    pub fn set_weight(&mut self, side: SubsetMask, w: Rat) {
        assert!(!side.is_empty(), "empty side cannot carry weight");
        self.weights[side.0 as usize] = w;
    }

    /// Expands a compressed side mask to a mask over the full point set.
    pub fn expand_side(&self, side: SubsetMask) -> SubsetMask {
        let order = self.side_order();
        let mut out = SubsetMask::EMPTY;
        for (bit, &idx) in order.iter().enumerate() {
            if side.contains(bit) {
                out = out.insert(idx);
            }
        }
        out
    }

    /// Compresses a full mask (not containing the anchor) to a side mask.
    pub fn compress_side(&self, full: SubsetMask) -> SubsetMask {
        let order = self.side_order();
        let mut out = SubsetMask::EMPTY;
        for (bit, &idx) in order.iter().enumerate() {
            if full.contains(idx) {
                out = out.insert(bit);
            }
        }
        out
    }

    pub fn side_labels(&self, side: SubsetMask) -> Vec<String> {
        self.expand_side(side)
            .indices()
            .iter()
            .map(|&i| self.points[i].clone())
            .collect()
    }

    /// `sum_U w(U) * [A meets both U and its complement]`, exactly.
    pub fn evaluate(&self, subset: SubsetMask) -> Rat {
        let n = self.points.len();
        let full = SubsetMask::full(n);
        let mut acc = Rat::zero();
        let m = self.points.len() - 1;
        for side in all_subsets(m).skip(1) {
            let w = &self.weights[side.0 as usize];
            if w.is_zero() {
                continue;
            }
            let u = self.expand_side(side);
            let comp = full.minus(u);
            if !subset.intersect(u).is_empty() && !subset.intersect(comp).is_empty() {
                acc += w;
            }
        }
        acc
    }

    /// Materializes the full value table as a (semi)diversity.
    pub fn to_diversity(&self) -> FiniteDiversity {
        let n = self.points.len();
        let mut delta = vec![rat_int(0); 1 << n];
        for mask in all_subsets(n) {
            if mask.len() >= 2 {
                delta[mask.0 as usize] = self.evaluate(mask);
            }
        }
        FiniteDiversity::new_unchecked(self.points.clone(), delta)
    }
}

/// Why a diversity admits no nonnegative cut decomposition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NotL1 {
    /// The unique solution of the earlier equations reconstructs this set
    /// with a different value.
    Reconstruction {
        set: Vec<String>,
        required: Rat,
        reconstructed: Rat,
    },
    /// The system is solvable but forces a negative weight on this side.
    NegativeWeight { side: Vec<String>, weight: Rat },
}

impl NotL1 {
    pub fn to_json(&self) -> serde_json::Value {
        use crate::rational::fmt_rat;
        use serde_json::json;
        match self {
            NotL1::Reconstruction {
                set,
                required,
                reconstructed,
            } => json!({
                "kind": "reconstruction-mismatch",
                "set": set,
                "required": fmt_rat(required),
                "reconstructed": fmt_rat(reconstructed),
            }),
            NotL1::NegativeWeight { side, weight } => json!({
                "kind": "negative-weight",
                "side": side,
                "weight": fmt_rat(weight),
            }),
        }
    }
}

pub type DecomposeOutcome = std::result::Result<CutWeights, NotL1>;

/// Exact cut decomposition of a diversity, anchored at `anchor`.
///
/// Solves `sum_U w(U) * cut_U(A) = delta(A)` over all subsets `A` of size
/// >= 2 by rational elimination, taking equations in ascending size (then
/// mask) order. The solution, if any, is unique; it is returned when all
/// weights are nonnegative, otherwise a [`NotL1`] witness names the first
/// inconsistent equation or negative weight.
pub fn decompose(d: &FiniteDiversity, anchor: usize) -> Result<DecomposeOutcome> {
    let n = d.len();
    if anchor >= n {
        return Err(Error::AnchorNotFound(format!("index {anchor}")));
    }
    let template = CutWeights::zero(d.points().to_vec(), anchor)?;
    let nvars = (1usize << (n - 1)) - 1; // nonempty sides
    let full = SubsetMask::full(n);

    // Incremental reduced row system: pivot_of[v] = row index with leading
    // variable v. Rows are (coefficients over sides 1.., rhs).
    let mut rows: Vec<(Vec<Rat>, Rat)> = Vec::new();
    let mut pivot_of: Vec<Option<usize>> = vec![None; nvars + 1];

    let mut masks: Vec<SubsetMask> = all_subsets(n).filter(|m| m.len() >= 2).collect();
    masks.sort_by_key(|m| (m.len(), m.0));

    for a in masks {
        // Coefficient of side U is the cut indicator on A.
        let mut coeffs = vec![rat_int(0); nvars + 1];
        for side in all_subsets(n - 1).skip(1) {
            let u = template.expand_side(side);
            if !a.intersect(u).is_empty() && !a.intersect(full.minus(u)).is_empty() {
                coeffs[side.0 as usize] = rat_int(1);
            }
        }
        let mut rhs = d.value(a).clone();

        // Reduce against the current basis.
        for v in 1..=nvars {
            if coeffs[v].is_zero() {
                continue;
            }
            if let Some(r) = pivot_of[v] {
                let factor = coeffs[v].clone();
                let (prow, prhs) = &rows[r];
                for (c, pc) in coeffs.iter_mut().zip(prow.iter()) {
                    if !pc.is_zero() {
                        *c -= &factor * pc;
                    }
                }
                rhs -= &factor * prhs;
            }
        }
        match coeffs.iter().position(|c| !c.is_zero()) {
            Some(lead) => {
                let inv = coeffs[lead].clone();
                for c in coeffs.iter_mut() {
                    if !c.is_zero() {
                        *c /= &inv;
                    }
                }
                rhs /= &inv;
                pivot_of[lead] = Some(rows.len());
                rows.push((coeffs, rhs));
            }
            None => {
                if !rhs.is_zero() {
                    // The equation is a combination of earlier ones with a
                    // different right-hand side: delta(A) - rhs is what the
                    // earlier equations force.
                    let required = d.value(a).clone();
                    let reconstructed = &required - &rhs;
                    return Ok(Err(NotL1::Reconstruction {
                        set: a
                            .indices()
                            .iter()
                            .map(|&i| d.points()[i].clone())
                            .collect(),
                        required,
                        reconstructed,
                    }));
                }
            }
        }
    }

    // Back-substitute: the cut indicators have full column rank, so every
    // variable is pivoted once all equations are processed.
    let mut solution = vec![rat_int(0); nvars + 1];
    for v in (1..=nvars).rev() {
        let r = pivot_of[v].ok_or_else(|| {
            Error::Internal("cut system unexpectedly rank-deficient".into())
        })?;
        let (coeffs, rhs) = &rows[r];
        let mut val = rhs.clone();
        for u in v + 1..=nvars {
            if !coeffs[u].is_zero() {
                val -= &coeffs[u] * &solution[u];
            }
        }
        debug_assert!(coeffs[v] == rat_int(1));
        solution[v] = val;
    }

    for side in all_subsets(n - 1).skip(1) {
        let w = &solution[side.0 as usize];
        if *w < Rat::zero() {
            return Ok(Err(NotL1::NegativeWeight {
                side: template.side_labels(side),
                weight: w.clone(),
            }));
        }
    }
    let cw = CutWeights::new(d.points().to_vec(), anchor, solution)?;
    // Exact reconstruction check; elimination guarantees it, this asserts it.
    for mask in all_subsets(n) {
        if mask.len() >= 2 && cw.evaluate(mask) != *d.value(mask) {
            return Err(Error::Internal(
                "cut decomposition failed to reconstruct its input".into(),
            ));
        }
    }
    Ok(Ok(cw))
}

/// The closed-form weight of the split `U | rest` in a diversity, from the
/// subset values alone:
/// `w(U) = sum_{T subset of U} (-1)^(|U|-|T|+1) delta(X minus T)`.
///
/// This is the Moebius inverse of the constraint system and doubles as an
/// independent cross-check on [`decompose`].
pub fn moebius_weight(d: &FiniteDiversity, side_full: SubsetMask) -> Rat {
    let n = d.len();
    let full = SubsetMask::full(n);
    let mut acc = Rat::zero();
    for t in subsets_of(side_full) {
        let v = d.value(full.minus(t));
        if (side_full.len() - t.len()) % 2 == 0 {
            acc -= v;
        } else {
            acc += v;
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn lbl(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    /// Ground set {1,2,3}, anchor 1, weight 2 on split {2}|{1,3} and
    /// weight 1 on split {3}|{1,2}.
    fn three_point_weights() -> CutWeights {
        let mut w = CutWeights::zero(lbl(&["1", "2", "3"]), 0).unwrap();
        w.set_weight(SubsetMask(0b01), rat(2, 1)); // side {2}
        w.set_weight(SubsetMask(0b10), rat(1, 1)); // side {3}
        w
    }

    #[test]
    fn evaluate_three_point_instance() {
        let w = three_point_weights();
        // points 1,2,3 at indices 0,1,2
        assert_eq!(w.evaluate(SubsetMask(0b011)), rat(2, 1)); // {1,2}
        assert_eq!(w.evaluate(SubsetMask(0b101)), rat(1, 1)); // {1,3}
        assert_eq!(w.evaluate(SubsetMask(0b110)), rat(3, 1)); // {2,3}
        assert_eq!(w.evaluate(SubsetMask(0b111)), rat(3, 1)); // {1,2,3}
        assert_eq!(w.evaluate(SubsetMask(0b001)), rat(0, 1)); // singleton
    }

    #[test]
    fn zero_weights_evaluate_to_zero() {
        let w = CutWeights::zero(lbl(&["a", "b", "c"]), 0).unwrap();
        for mask in all_subsets(3) {
            assert!(w.evaluate(mask).is_zero());
        }
    }

    #[test]
    fn decompose_recovers_three_point_weights() {
        let w = three_point_weights();
        let d = w.to_diversity();
        let got = decompose(&d, 0).unwrap().unwrap();
        assert_eq!(got, w);
    }

    #[test]
    fn decompose_rejects_equilateral_with_flat_triple() {
        // All pairs 2, triple also 2: the pair equations force weight 1 on
        // each of the three splits, which reconstructs the triple as 3.
        let mut delta = vec![rat_int(0); 8];
        for m in [0b011u32, 0b101, 0b110] {
            delta[m as usize] = rat(2, 1);
        }
        delta[0b111] = rat(2, 1);
        let d = FiniteDiversity::new(lbl(&["1", "2", "3"]), delta, false).unwrap();
        match decompose(&d, 0).unwrap() {
            Err(NotL1::Reconstruction {
                set,
                required,
                reconstructed,
            }) => {
                assert_eq!(set, lbl(&["1", "2", "3"]));
                assert_eq!(required, rat(2, 1));
                assert_eq!(reconstructed, rat(3, 1));
            }
            other => panic!("expected reconstruction witness, got {other:?}"),
        }
    }

    #[test]
    fn moebius_matches_decompose() {
        let w = three_point_weights();
        let d = w.to_diversity();
        for side in all_subsets(2).skip(1) {
            let full_side = w.expand_side(side);
            assert_eq!(moebius_weight(&d, full_side), *w.weight(side));
        }
    }
}
