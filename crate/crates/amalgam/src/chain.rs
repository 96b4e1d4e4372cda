//! Certified extension chains.
//!
//! Given an ambient structure, a base tuple, and a one-point extension
//! target `(base, z)`, the chain repeatedly asks an approximate oracle for a
//! point `w_p` realizing the target within a halving tolerance and
//! amalgamates it against the target. Every bound is recomputed in exact
//! arithmetic:
//!
//! - condition I: `d_infty((base, z), (base, w_p)) <= 2^-p`,
//! - condition II: `d(w_p, z) <= 2^-p` inside the amalgam `M_p`,
//! - successor bound: `d(w_{p-1}, w_p) <= 3 * 2^-p`.
//!
//! The oracle tolerance at step `p` is `min(1/c, 1) * 2^-p`, where `c` is
//! the amalgamation constant of the structure class; a class whose one-point
//! amalgams satisfy `d(w, z) <= c * d_infty` then meets condition II
//! automatically, and the bounds certify it.

use num::Zero;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::diversity::{self, FiniteDiversity};
use crate::error::{Error, Result};
use crate::process::{self, FiniteProcess};
use crate::rational::{pow2_neg, rat_int, Rat};
use crate::subset::{all_subsets, SubsetMask};
use crate::tuples::{d_infty, EnumeratedTuple, RelationalStructure};

/// A structure class supporting one-point amalgamation, restriction, and a
/// validity-preserving value perturbation (for the noise oracle).
pub trait BapClass {
    type Structure: RelationalStructure + Clone + PartialEq;

    /// One-point amalgamation over the shared part, matched by label.
    fn amalgamate(left: &Self::Structure, right: &Self::Structure)
        -> Result<Self::Structure>;

    /// Restriction to the given labels, in the given order.
    fn restrict_ordered(s: &Self::Structure, labels: &[String]) -> Result<Self::Structure>;

    /// Induced distance between two points.
    fn distance(s: &Self::Structure, i: usize, j: usize) -> Rat;

    /// Adds the patch's one new point over all of `base` by iterated
    /// amalgamation; the result restricts exactly to `base`.
    fn extend(base: &Self::Structure, patch: &Self::Structure) -> Result<Self::Structure>;

    /// Renames one point.
    fn relabel(s: &Self::Structure, old: &str, new: &str) -> Result<Self::Structure>;

    /// A valid perturbation of the patch moving only the new point's
    /// values, keeping the recomputed `d_infty` to the original at most
    /// `eps` (and equal to `eps` whenever the class allows it).
    fn perturb(
        patch: &Self::Structure,
        z_label: &str,
        eps: &Rat,
        rng: &mut ChaCha8Rng,
    ) -> Result<Self::Structure>;
}

pub struct DiversityClass;

impl BapClass for DiversityClass {
    type Structure = FiniteDiversity;

    fn amalgamate(left: &FiniteDiversity, right: &FiniteDiversity) -> Result<FiniteDiversity> {
        diversity::amalgamate_one_point(left, right)
    }

    fn restrict_ordered(s: &FiniteDiversity, labels: &[String]) -> Result<FiniteDiversity> {
        let refs: Vec<&str> = labels.iter().map(|s| s.as_str()).collect();
        s.restrict_to_labels(&refs)?.reorder_points(labels)
    }

    fn distance(s: &FiniteDiversity, i: usize, j: usize) -> Rat {
        if i == j {
            rat_int(0)
        } else {
            s.value(SubsetMask::singleton(i).insert(j)).clone()
        }
    }

    fn extend(base: &FiniteDiversity, patch: &FiniteDiversity) -> Result<FiniteDiversity> {
        diversity::extend_over_base(base, patch)
    }

    fn relabel(s: &FiniteDiversity, old: &str, new: &str) -> Result<FiniteDiversity> {
        let mut points = s.points().to_vec();
        let idx = s
            .index_of(old)
            .ok_or_else(|| Error::UnknownLabel(old.to_string()))?;
        points[idx] = new.to_string();
        crate::metric::check_labels(&points)?;
        let delta = (0..1usize << s.len())
            .map(|m| s.value(SubsetMask(m as u32)).clone())
            .collect();
        Ok(FiniteDiversity::new_unchecked(points, delta))
    }

    /// Two validity-preserving moves, chosen at random: a uniform upward
    /// shift of all new-point values by exactly `eps`, or a blend toward
    /// the constant extension at a level above every base value. Both stay
    /// inside the diversity cone and fix the base, so no clamping loop is
    /// needed; the blend is capped at the full step, which keeps the
    /// recomputed gap at `min(eps, gap to the reference)`.
    fn perturb(
        patch: &FiniteDiversity,
        z_label: &str,
        eps: &Rat,
        rng: &mut ChaCha8Rng,
    ) -> Result<FiniteDiversity> {
        let z = patch
            .index_of(z_label)
            .ok_or_else(|| Error::UnknownLabel(z_label.to_string()))?;
        let n = patch.len();
        let mut delta: Vec<Rat> = (0..1usize << n)
            .map(|m| patch.value(SubsetMask(m as u32)).clone())
            .collect();

        if rng.gen_bool(0.5) {
            // Uniform shift on every set containing z and something else.
            for mask in all_subsets(n) {
                if mask.contains(z) && mask.len() >= 2 {
                    delta[mask.0 as usize] += eps;
                }
            }
        } else {
            // Blend toward the constant extension at level rho.
            let mut base_max = rat_int(0);
            for mask in all_subsets(n) {
                if !mask.contains(z) && *patch.value(mask) > base_max {
                    base_max = patch.value(mask).clone();
                }
            }
            let offsets = [rat_int(0), Rat::new(1.into(), 2.into()), rat_int(1), rat_int(2)];
            let rho = &base_max + &offsets[rng.gen_range(0..offsets.len())];
            let mut gap = rat_int(0);
            for mask in all_subsets(n) {
                if mask.contains(z) && mask.len() >= 2 {
                    let diff = crate::rational::abs(&(&rho - patch.value(mask)));
                    if diff > gap {
                        gap = diff;
                    }
                }
            }
            if gap.is_zero() {
                return Ok(patch.clone());
            }
            let t = if *eps >= gap {
                rat_int(1)
            } else {
                eps / &gap
            };
            for mask in all_subsets(n) {
                if mask.contains(z) && mask.len() >= 2 {
                    let cur = delta[mask.0 as usize].clone();
                    delta[mask.0 as usize] = &cur + &t * (&rho - &cur);
                }
            }
        }
        Ok(FiniteDiversity::new_unchecked(patch.points().to_vec(), delta))
    }
}

pub struct ProcessClass;

impl BapClass for ProcessClass {
    type Structure = FiniteProcess;

    fn amalgamate(left: &FiniteProcess, right: &FiniteProcess) -> Result<FiniteProcess> {
        process::amalgamate(left, right)
    }

    fn restrict_ordered(s: &FiniteProcess, labels: &[String]) -> Result<FiniteProcess> {
        let refs: Vec<&str> = labels.iter().map(|s| s.as_str()).collect();
        s.marginal_to_labels(&refs)
    }

    fn distance(s: &FiniteProcess, i: usize, j: usize) -> Rat {
        s.distance(i, j)
    }

    fn extend(base: &FiniteProcess, patch: &FiniteProcess) -> Result<FiniteProcess> {
        process::extend_over_base(base, patch)
    }

    fn relabel(s: &FiniteProcess, old: &str, new: &str) -> Result<FiniteProcess> {
        let mut points = s.index_points().to_vec();
        let idx = s
            .index_of(old)
            .ok_or_else(|| Error::UnknownLabel(old.to_string()))?;
        points[idx] = new.to_string();
        crate::metric::check_labels(&points)?;
        Ok(FiniteProcess::from_parts(
            points,
            s.states().to_vec(),
            s.pmf().to_vec(),
        ))
    }

    /// Moves mass `min(eps, available)` between two outcomes that differ
    /// only in the new point's state. Every marginal not involving the new
    /// point is untouched, so the base stays exact and the recomputed gap
    /// equals the moved mass.
    fn perturb(
        patch: &FiniteProcess,
        z_label: &str,
        eps: &Rat,
        rng: &mut ChaCha8Rng,
    ) -> Result<FiniteProcess> {
        use num::Zero;
        let k = patch.states().len();
        if k < 2 {
            return Ok(patch.clone());
        }
        // Reindex with z last so outcomes split as (base outcome, z state).
        let mut order: Vec<String> = patch
            .index_points()
            .iter()
            .filter(|l| l.as_str() != z_label)
            .cloned()
            .collect();
        order.push(z_label.to_string());
        let zlast = patch.reorder_points(&order)?;
        let mut pmf = zlast.pmf().to_vec();
        let positive: Vec<usize> = (0..pmf.len()).filter(|&i| !pmf[i].is_zero()).collect();
        if positive.is_empty() {
            return Ok(patch.clone());
        }
        let from = positive[rng.gen_range(0..positive.len())];
        let s2 = from % k;
        let mut s1 = rng.gen_range(0..k - 1);
        if s1 >= s2 {
            s1 += 1;
        }
        let to = from - s2 + s1;
        let m = if *eps <= pmf[from] {
            eps.clone()
        } else {
            pmf[from].clone()
        };
        pmf[from] -= &m;
        pmf[to] += &m;
        FiniteProcess::from_parts(order, zlast.states().to_vec(), pmf)
            .reorder_points(patch.index_points())
    }
}

/// Amalgamation constant for finite diversities (the minimal amalgam makes
/// `d(z1, z2)` equal to the largest extension gap).
pub fn diversity_bap_constant() -> Rat {
    rat_int(1)
}

/// Amalgamation constant for processes over `|S|` states with a base tuple
/// of length `n`: `|S|^(n+1) / 2`.
pub fn process_bap_constant(num_states: usize, base_len: usize) -> Rat {
    let mut v = rat_int(1);
    for _ in 0..base_len + 1 {
        v *= rat_int(num_states as i64);
    }
    v / rat_int(2)
}

/// Amalgamation constant for L1 diversities over a base of `n` points:
/// `2^(2n)`.
pub fn l1_bap_constant(base_len: usize) -> Rat {
    Rat::from_integer(num::BigInt::from(1) << (2 * base_len))
}

/// The target of a chain: a base tuple inside the ambient structure and a
/// one-point extension of its deduplicated point set.
pub struct ExtensionTarget<C: BapClass> {
    /// Entries of the base tuple, as indices into the ambient structure.
    pub base_entries: Vec<usize>,
    /// A structure on the deduplicated base points plus `z_label`.
    pub patch: C::Structure,
    pub z_label: String,
}

/// Supplies approximate realizations: a new point `w` in a grown ambient
/// structure with `d_infty((base, z), (base, w)) <= eps`. The chain
/// recomputes that gap and rejects violations, so oracles need not be
/// trusted.
pub trait ApproxOracle<C: BapClass> {
    fn realize(
        &mut self,
        ambient: &C::Structure,
        patch: &C::Structure,
        z_label: &str,
        eps: &Rat,
    ) -> Result<(C::Structure, usize)>;
}

fn fresh_label<S: RelationalStructure>(s: &S, counter: &mut usize) -> String {
    loop {
        let candidate = format!("w{}", *counter);
        *counter += 1;
        if s.index_of_label(&candidate).is_none() {
            return candidate;
        }
    }
}

/// Realizes every request exactly: the patch is adjoined verbatim.
pub struct ExactOracle {
    counter: usize,
}

impl ExactOracle {
    pub fn new() -> Self {
        ExactOracle { counter: 0 }
    }
}

impl Default for ExactOracle {
    fn default() -> Self {
        Self::new()
    }
}

impl<C: BapClass> ApproxOracle<C> for ExactOracle {
    fn realize(
        &mut self,
        ambient: &C::Structure,
        patch: &C::Structure,
        z_label: &str,
        _eps: &Rat,
    ) -> Result<(C::Structure, usize)> {
        let w = fresh_label(ambient, &mut self.counter);
        let renamed = C::relabel(patch, z_label, &w)?;
        let grown = C::extend(ambient, &renamed)?;
        let idx = grown
            .index_of_label(&w)
            .ok_or_else(|| Error::Internal("extension lost the new point".into()))?;
        Ok((grown, idx))
    }
}

/// Perturbs the exact extension by a seeded, validity-preserving noise of
/// magnitude exactly the requested tolerance (when the class allows it),
/// then adjoins the noisy point.
pub struct NoisyOracle {
    rng: ChaCha8Rng,
    counter: usize,
}

impl NoisyOracle {
    pub fn from_seed(seed: u64) -> Self {
        use rand::SeedableRng;
        NoisyOracle {
            rng: ChaCha8Rng::seed_from_u64(seed),
            counter: 0,
        }
    }
}

impl<C: BapClass> ApproxOracle<C> for NoisyOracle {
    fn realize(
        &mut self,
        ambient: &C::Structure,
        patch: &C::Structure,
        z_label: &str,
        eps: &Rat,
    ) -> Result<(C::Structure, usize)> {
        let noisy = C::perturb(patch, z_label, eps, &mut self.rng)?;
        let w = fresh_label(ambient, &mut self.counter);
        let renamed = C::relabel(&noisy, z_label, &w)?;
        let grown = C::extend(ambient, &renamed)?;
        let idx = grown
            .index_of_label(&w)
            .ok_or_else(|| Error::Internal("extension lost the new point".into()))?;
        Ok((grown, idx))
    }
}

/// One certified step of the chain.
#[derive(Clone, Debug)]
pub struct ChainStep {
    pub p: usize,
    pub w_label: String,
    /// Recomputed `d_infty((base, z), (base, w_p))`; bounded by `2^-p`.
    pub d_inf: Rat,
    /// `d(w_p, z)` inside the amalgam `M_p`; bounded by `2^-p`.
    pub d_wz: Rat,
    /// `d(w_{p-1}, w_p)`; bounded by `3 * 2^-p`. Filled at the next step.
    pub d_succ: Option<Rat>,
    pub ok: bool,
}

pub struct ChainOutcome<C: BapClass> {
    pub steps: Vec<ChainStep>,
    /// The grown ambient structure containing every `w_p`.
    pub ambient: C::Structure,
    /// The final amalgam, containing the base, every `w_p`, and `z`.
    pub final_amalgam: C::Structure,
    pub w_labels: Vec<String>,
}

/// Runs the halving schedule for `steps` oracle calls, aborting with a
/// certified violation if any recomputed bound fails.
pub fn extension_chain<C: BapClass, O: ApproxOracle<C>>(
    ambient: &C::Structure,
    target: &ExtensionTarget<C>,
    c: &Rat,
    steps: usize,
    oracle: &mut O,
) -> Result<ChainOutcome<C>> {
    if target.base_entries.is_empty() {
        return Err(Error::EmptyTuple);
    }
    if *c <= rat_int(0) {
        return Err(Error::Parse("amalgamation constant must be positive".into()));
    }
    let inv_c = rat_int(1) / c;
    let slack = if inv_c < rat_int(1) { inv_c } else { rat_int(1) };

    // Deduplicated base labels, in first-occurrence order.
    let mut x_labels: Vec<String> = Vec::new();
    for &e in &target.base_entries {
        let l = ambient.point_label(e).to_string();
        if !x_labels.contains(&l) {
            x_labels.push(l);
        }
    }
    {
        let mut expected = x_labels.clone();
        expected.push(target.z_label.clone());
        let mut got: Vec<String> = (0..target.patch.point_count())
            .map(|i| target.patch.point_label(i).to_string())
            .collect();
        expected.sort();
        got.sort();
        if expected != got {
            return Err(Error::BadExtensionPair(
                "patch must live on the deduplicated base points plus the new point".into(),
            ));
        }
        if ambient.index_of_label(&target.z_label).is_some() {
            return Err(Error::DuplicateLabel(target.z_label.clone()));
        }
    }

    let base_labels: Vec<String> = target
        .base_entries
        .iter()
        .map(|&e| ambient.point_label(e).to_string())
        .collect();

    let mut steps_out: Vec<ChainStep> = Vec::with_capacity(steps);
    let mut w_labels: Vec<String> = Vec::new();
    let mut ambient_cur = ambient.clone();
    let mut m_prev = target.patch.clone();

    for p in 0..steps {
        let tol = &slack * pow2_neg(p as u32);
        let (ambient_next, w_idx) = oracle.realize(&ambient_cur, &m_prev, &target.z_label, &tol)?;
        let w_label = ambient_next.point_label(w_idx).to_string();

        // Certify the oracle: d_infty over the full request tuples.
        let mut prefix = base_labels.clone();
        prefix.extend(w_labels.iter().cloned());
        let cert = {
            let mut t_target = prefix.clone();
            t_target.push(target.z_label.clone());
            let mut t_real = prefix.clone();
            t_real.push(w_label.clone());
            tuple_d_infty::<C>(&m_prev, &t_target, &ambient_next, &t_real)?
        };
        if cert > tol {
            return Err(Error::OracleToleranceViolation {
                step: p,
                requested: tol,
                achieved: cert,
            });
        }

        // Condition I on the bare base tuple.
        let d_inf = {
            let mut t_target = base_labels.clone();
            t_target.push(target.z_label.clone());
            let mut t_real = base_labels.clone();
            t_real.push(w_label.clone());
            tuple_d_infty::<C>(&m_prev, &t_target, &ambient_next, &t_real)?
        };
        let bound_i = pow2_neg(p as u32);
        if d_inf > bound_i {
            return Err(Error::ChainBoundViolation {
                step: p,
                which: "condition I",
                actual: d_inf,
                bound: bound_i,
            });
        }

        // Amalgamate (base, w_0..w_p) with (base, w_0..w_{p-1}, z).
        let mut left_labels: Vec<String> = x_labels.clone();
        left_labels.extend(w_labels.iter().cloned());
        left_labels.push(w_label.clone());
        let left = C::restrict_ordered(&ambient_next, &left_labels)?;
        let m_cur = C::amalgamate(&left, &m_prev)?;

        // The amalgam must still extend the original target exactly.
        {
            let mut t = x_labels.clone();
            t.push(target.z_label.clone());
            let a = C::restrict_ordered(&m_cur, &t)?;
            let b = C::restrict_ordered(&target.patch, &t)?;
            if a != b {
                return Err(Error::Internal(
                    "amalgam no longer extends the target patch".into(),
                ));
            }
        }

        let w_in_m = m_cur
            .index_of_label(&w_label)
            .ok_or_else(|| Error::Internal("amalgam lost the new point".into()))?;
        let z_in_m = m_cur
            .index_of_label(&target.z_label)
            .ok_or_else(|| Error::Internal("amalgam lost the target point".into()))?;
        let d_wz = C::distance(&m_cur, w_in_m, z_in_m);
        if d_wz > bound_i {
            return Err(Error::ChainBoundViolation {
                step: p,
                which: "condition II",
                actual: d_wz,
                bound: bound_i,
            });
        }

        if p >= 1 {
            let prev_label = &w_labels[p - 1];
            let prev_in_m = m_cur
                .index_of_label(prev_label)
                .ok_or_else(|| Error::Internal("amalgam lost a chain point".into()))?;
            let d_succ = C::distance(&m_cur, prev_in_m, w_in_m);
            let bound_succ = rat_int(3) * pow2_neg(p as u32);
            if d_succ > bound_succ {
                return Err(Error::ChainBoundViolation {
                    step: p,
                    which: "successor",
                    actual: d_succ,
                    bound: bound_succ,
                });
            }
            steps_out[p - 1].d_succ = Some(d_succ);
        }

        steps_out.push(ChainStep {
            p,
            w_label: w_label.clone(),
            d_inf,
            d_wz,
            d_succ: None,
            ok: true,
        });
        w_labels.push(w_label);
        ambient_cur = ambient_next;
        m_prev = m_cur;
    }

    Ok(ChainOutcome {
        steps: steps_out,
        ambient: ambient_cur,
        final_amalgam: m_prev,
        w_labels,
    })
}

fn tuple_d_infty<C: BapClass>(
    sa: &C::Structure,
    labels_a: &[String],
    sb: &C::Structure,
    labels_b: &[String],
) -> Result<Rat> {
    let ea: Vec<usize> = labels_a
        .iter()
        .map(|l| {
            sa.index_of_label(l)
                .ok_or_else(|| Error::UnknownLabel(l.clone()))
        })
        .collect::<Result<Vec<_>>>()?;
    let eb: Vec<usize> = labels_b
        .iter()
        .map(|l| {
            sb.index_of_label(l)
                .ok_or_else(|| Error::UnknownLabel(l.clone()))
        })
        .collect::<Result<Vec<_>>>()?;
    let ta = EnumeratedTuple::new(sa, ea)?;
    let tb = EnumeratedTuple::new(sb, eb)?;
    d_infty(&ta, &tb)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use crate::sample;

    /// Target: extend a diversity ambient by one point z with given values.
    fn diversity_target(
        ambient: &FiniteDiversity,
        base_labels: &[&str],
    ) -> ExtensionTarget<DiversityClass> {
        let base_entries: Vec<usize> = base_labels
            .iter()
            .map(|l| ambient.index_of(l).unwrap())
            .collect();
        // The patch realizes z at distance 1 from everything, with set
        // values following the diameter rule; always a valid extension of
        // a [1, 2]-banded structure.
        let mut dedup: Vec<usize> = Vec::new();
        for &e in &base_entries {
            if !dedup.contains(&e) {
                dedup.push(e);
            }
        }
        let k = dedup.len();
        let mut points: Vec<String> = dedup
            .iter()
            .map(|&i| ambient.points()[i].clone())
            .collect();
        points.push("z*".into());
        let mut delta = vec![rat_int(0); 1 << (k + 1)];
        for mask in all_subsets(k + 1) {
            if mask.len() < 2 {
                continue;
            }
            let base_part: Vec<usize> = mask
                .indices()
                .iter()
                .filter(|&&p| p < k)
                .map(|&p| dedup[p])
                .collect();
            let base_val = ambient.value_of_tuple(&base_part).clone();
            delta[mask.0 as usize] = if mask.contains(k) {
                // max(base value, 1): distance-1 diameter extension.
                if base_val < rat_int(1) {
                    rat_int(1)
                } else {
                    base_val
                }
            } else {
                base_val
            };
        }
        ExtensionTarget {
            base_entries,
            patch: FiniteDiversity::new(points, delta, true).unwrap(),
            z_label: "z*".into(),
        }
    }

    #[test]
    fn exact_oracle_keeps_every_bound_at_zero() {
        let mut rng = sample::rng_from_seed(11);
        let ambient = sample::random_diversity(&mut rng, sample::labels("p", 2));
        let target = diversity_target(&ambient, &["p1", "p2"]);
        let mut oracle = ExactOracle::new();
        let out = extension_chain::<DiversityClass, _>(
            &ambient,
            &target,
            &diversity_bap_constant(),
            5,
            &mut oracle,
        )
        .unwrap();
        assert_eq!(out.steps.len(), 5);
        for step in &out.steps {
            assert!(step.d_inf.is_zero());
            assert!(step.d_wz.is_zero());
            if let Some(s) = &step.d_succ {
                assert!(s.is_zero());
            }
        }
    }

    #[test]
    fn noisy_diversity_chain_meets_the_schedule_for_ten_steps() {
        let mut rng = sample::rng_from_seed(21);
        let ambient = sample::random_diversity(&mut rng, sample::labels("p", 2));
        let target = diversity_target(&ambient, &["p1", "p2"]);
        let mut oracle = NoisyOracle::from_seed(77);
        let out = extension_chain::<DiversityClass, _>(
            &ambient,
            &target,
            &diversity_bap_constant(),
            10,
            &mut oracle,
        )
        .unwrap();
        for (p, step) in out.steps.iter().enumerate() {
            assert_eq!(step.p, p);
            assert!(step.d_inf <= pow2_neg(p as u32));
            assert!(step.d_wz <= pow2_neg(p as u32));
            if let Some(s) = &step.d_succ {
                assert!(*s <= rat_int(3) * pow2_neg(p as u32 + 1));
            }
        }
        // Cauchy tail in the grown ambient: d(w_p, w_q) <= 3 * 2^-p.
        for p in 0..out.w_labels.len() {
            for q in p + 1..out.w_labels.len() {
                let i = out.ambient.index_of(&out.w_labels[p]).unwrap();
                let j = out.ambient.index_of(&out.w_labels[q]).unwrap();
                let d = DiversityClass::distance(&out.ambient, i, j);
                assert!(d <= rat_int(3) * pow2_neg(p as u32));
            }
        }
        // Full validation of a 12-point table is quartic-exponential, so
        // check a restriction here; a short chain below validates fully.
        let some_points: Vec<&str> = out
            .ambient
            .points()
            .iter()
            .take(8)
            .map(|s| s.as_str())
            .collect();
        assert!(out
            .ambient
            .restrict_to_labels(&some_points)
            .unwrap()
            .validate(true)
            .is_ok());
    }

    #[test]
    fn short_noisy_chain_grows_a_fully_valid_ambient() {
        let mut rng = sample::rng_from_seed(31);
        let ambient = sample::random_diversity(&mut rng, sample::labels("p", 2));
        let target = diversity_target(&ambient, &["p1", "p2"]);
        let mut oracle = NoisyOracle::from_seed(3);
        let out = extension_chain::<DiversityClass, _>(
            &ambient,
            &target,
            &diversity_bap_constant(),
            5,
            &mut oracle,
        )
        .unwrap();
        assert!(out.ambient.validate(true).is_ok());
        assert!(out.final_amalgam.validate(true).is_ok());
    }

    #[test]
    fn noisy_process_chain_meets_the_schedule_for_eight_steps() {
        let mut rng = sample::rng_from_seed(5);
        let big = sample::random_process(
            &mut rng,
            vec!["t1".into(), "t2".into(), "zsrc".into()],
            sample::labels("s", 2),
        );
        let ambient = big.marginal_to_labels(&["t1", "t2"]).unwrap();
        let patch = {
            let renamed = ProcessClass::relabel(&big, "zsrc", "z*").unwrap();
            renamed
        };
        let target = ExtensionTarget::<ProcessClass> {
            base_entries: vec![0, 1],
            patch,
            z_label: "z*".into(),
        };
        let c = process_bap_constant(2, 2);
        assert_eq!(c, rat_int(4));
        let mut oracle = NoisyOracle::from_seed(123);
        let out =
            extension_chain::<ProcessClass, _>(&ambient, &target, &c, 8, &mut oracle).unwrap();
        for (p, step) in out.steps.iter().enumerate() {
            assert!(step.d_inf <= pow2_neg(p as u32));
            assert!(step.d_wz <= pow2_neg(p as u32));
            if let Some(s) = &step.d_succ {
                assert!(*s <= rat_int(3) * pow2_neg(p as u32 + 1));
            }
        }
        out.ambient.self_check().unwrap();
    }

    #[test]
    fn chain_rejects_a_lying_oracle() {
        // An oracle that ignores the tolerance and perturbs by a constant.
        struct Liar(NoisyOracle);
        impl ApproxOracle<DiversityClass> for Liar {
            fn realize(
                &mut self,
                ambient: &FiniteDiversity,
                patch: &FiniteDiversity,
                z_label: &str,
                _eps: &Rat,
            ) -> Result<(FiniteDiversity, usize)> {
                <NoisyOracle as ApproxOracle<DiversityClass>>::realize(
                    &mut self.0,
                    ambient,
                    patch,
                    z_label,
                    &rat(3, 1),
                )
            }
        }
        let mut rng = sample::rng_from_seed(2);
        let ambient = sample::random_diversity(&mut rng, sample::labels("p", 2));
        let target = diversity_target(&ambient, &["p1", "p2"]);
        let mut oracle = Liar(NoisyOracle::from_seed(9));
        let out = extension_chain::<DiversityClass, _>(
            &ambient,
            &target,
            &diversity_bap_constant(),
            6,
            &mut oracle,
        );
        match out {
            Err(Error::OracleToleranceViolation { .. }) => {}
            Err(other) => panic!("expected tolerance violation, got {other:?}"),
            Ok(_) => panic!("expected tolerance violation"),
        }
    }

    #[test]
    fn perturbations_respect_the_requested_magnitude() {
        for seed in 0..30u64 {
            let mut rng = sample::rng_from_seed(seed);
            let big = sample::random_diversity(&mut rng, sample::labels("p", 4));
            let patch = big.restrict_to_labels(&["p1", "p2", "p4"]).unwrap();
            let eps = rat(1, 8);
            let noisy =
                DiversityClass::perturb(&patch, "p4", &eps, &mut rng).unwrap();
            assert!(noisy.validate(true).is_ok());
            let gap = tuple_d_infty::<DiversityClass>(
                &patch,
                &["p1".into(), "p2".into(), "p4".into()],
                &noisy,
                &["p1".into(), "p2".into(), "p4".into()],
            )
            .unwrap();
            assert!(gap <= eps);
        }
    }
}
