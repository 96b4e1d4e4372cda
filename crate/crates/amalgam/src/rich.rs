//! Randomized growth of a structure rich against a catalog of one-point
//! extension templates.
//!
//! Each round samples a template and a base tuple, adapts the template's
//! new-point values so the patch agrees with the current structure on the
//! base, and adjoins the point by amalgamation. The report records, per
//! sampled round, the distance from the template to the best matching
//! realized point. Runs are a pure function of the seed.

use num::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chain::{BapClass, DiversityClass, ProcessClass};
use crate::diversity::FiniteDiversity;
use crate::error::{Error, Result};
use crate::process::FiniteProcess;
use crate::rational::{rat_int, Rat};
use crate::subset::{all_subsets, SubsetMask, MAX_POINTS};
use crate::tuples::{d_infty, EnumeratedTuple, RelationalStructure};

/// A structure class whose templates can be re-based onto a live structure.
/// The last point of a template is its new point.
pub trait RichClass: BapClass {
    /// A patch on the base points plus `new_label`, agreeing with the
    /// structure on the base and tracking the template's new-point values
    /// as closely as the axioms allow. `None` when no valid adaptation
    /// exists for this base.
    fn adapt_template(
        structure: &Self::Structure,
        base: &[usize],
        template: &Self::Structure,
        new_label: &str,
    ) -> Result<Option<Self::Structure>>;

    /// Rejects templates that cannot be compared with the structure at all.
    fn check_catalog(structure: &Self::Structure, template: &Self::Structure) -> Result<()>;
}

impl RichClass for DiversityClass {
    fn adapt_template(
        structure: &FiniteDiversity,
        base: &[usize],
        template: &FiniteDiversity,
        new_label: &str,
    ) -> Result<Option<FiniteDiversity>> {
        let k = base.len();
        debug_assert_eq!(k + 1, template.len());
        let mut points: Vec<String> = base
            .iter()
            .map(|&i| structure.points()[i].to_string())
            .collect();
        points.push(new_label.to_string());

        let card = 1usize << k;
        let mut delta = vec![rat_int(0); 1 << (k + 1)];
        // Base-only sets come from the structure itself.
        for s in all_subsets(k) {
            let orig: Vec<usize> = s.indices().iter().map(|&p| base[p]).collect();
            delta[s.0 as usize] = structure.value_of_tuple(&orig).clone();
        }
        // New-point sets: template values projected into the admissible
        // interval, in ascending (size, mask) order.
        let mut order: Vec<SubsetMask> = all_subsets(k).collect();
        order.sort_by_key(|m| (m.len(), m.0));
        let mut processed: Vec<SubsetMask> = Vec::new();
        for s in order {
            if s.is_empty() {
                processed.push(s);
                continue; // the singleton {z} stays zero
            }
            let target = template.value(SubsetMask(s.0).insert(k)).clone();
            let mut lo = delta[s.0 as usize].clone(); // monotone over the base value
            let mut hi: Option<Rat> = None;
            let cap = |hi: &mut Option<Rat>, v: Rat| {
                if hi.as_ref().is_none_or(|h| v < *h) {
                    *hi = Some(v);
                }
            };
            for &t in &processed {
                let zt = &delta[(t.0 as usize) | card];
                if t.is_subset_of(s) && *zt > lo {
                    lo = zt.clone(); // monotone among new-point sets
                }
                // Triangle through z: v(S u z) >= delta(S u T) - v(T u z).
                let lower = &delta[s.union(t).0 as usize] - zt;
                if lower > lo {
                    lo = lower;
                }
                if !t.is_empty() && t.is_subset_of(s) && t != s {
                    // Subadditivity over the overlap z.
                    cap(&mut hi, zt + &delta[(s.minus(t).0 as usize) | card]);
                }
                if s.len() == 1 && t.len() == 1 && t != s {
                    // Metric triangle through the processed pair.
                    cap(&mut hi, &delta[s.union(t).0 as usize] + zt);
                }
            }
            if s.len() >= 2 {
                // Subadditivity over an overlap point of the set itself.
                for b in s.indices() {
                    let pair = &delta[(SubsetMask::singleton(b).0 as usize) | card];
                    cap(&mut hi, &delta[s.0 as usize] + pair);
                }
            }
            let mut v = target;
            if v < lo {
                v = lo.clone();
            }
            if let Some(h) = &hi {
                if v > *h {
                    v = h.clone();
                }
            }
            if v < lo {
                return Ok(None); // empty admissible interval
            }
            delta[(s.0 as usize) | card] = v;
            processed.push(s);
        }
        let patch = FiniteDiversity::new_unchecked(points, delta);
        // The interval families above are necessary conditions only; gate
        // the result with a full validation.
        if patch.validate(true).is_err() {
            return Ok(None);
        }
        Ok(Some(patch))
    }

    fn check_catalog(_structure: &FiniteDiversity, template: &FiniteDiversity) -> Result<()> {
        if template.is_empty() {
            return Err(Error::EmptySubset);
        }
        Ok(())
    }
}

impl RichClass for ProcessClass {
    fn adapt_template(
        structure: &FiniteProcess,
        base: &[usize],
        template: &FiniteProcess,
        new_label: &str,
    ) -> Result<Option<FiniteProcess>> {
        let k = base.len();
        debug_assert_eq!(k + 1, template.len());
        let ns = structure.states().len();
        let mut points: Vec<String> = base
            .iter()
            .map(|&i| structure.index_points()[i].to_string())
            .collect();
        points.push(new_label.to_string());

        let base_law = structure.vector_law(base);
        let template_ident: Vec<usize> = (0..k + 1).collect();
        let template_law = template.vector_law(&template_ident);
        let template_base: Vec<usize> = (0..k).collect();
        let template_base_law = template.vector_law(&template_base);

        let mut pmf = vec![rat_int(0); base_law.len() * ns];
        let uniform = rat_int(1) / rat_int(ns as i64);
        for (sbar, mass) in base_law.iter().enumerate() {
            if mass.is_zero() {
                continue;
            }
            for s in 0..ns {
                let cond = if template_base_law[sbar].is_zero() {
                    uniform.clone()
                } else {
                    &template_law[sbar * ns + s] / &template_base_law[sbar]
                };
                pmf[sbar * ns + s] = mass * &cond;
            }
        }
        Ok(Some(FiniteProcess::from_parts(
            points,
            structure.states().to_vec(),
            pmf,
        )))
    }

    fn check_catalog(structure: &FiniteProcess, template: &FiniteProcess) -> Result<()> {
        structure.check_comparable(template)
    }
}

#[derive(Clone, Debug)]
pub struct RichRound {
    pub round: usize,
    pub template: usize,
    pub base: Vec<usize>,
    pub base_labels: Vec<String>,
    /// Label of the point adjoined this round, when one was.
    pub realized: Option<String>,
    /// `d_infty` from the template tuple to the realized point's tuple.
    pub achieved_d_inf: Option<Rat>,
    /// `d_infty` to the best matching point of the final structure,
    /// computed in a post-pass.
    pub best_d_inf: Option<Rat>,
    pub note: Option<&'static str>,
}

#[derive(Clone, Debug)]
pub struct RichReport {
    pub rounds: Vec<RichRound>,
    /// Per catalog template: the best final-structure match over every
    /// sampled round; `None` when the template was never realized.
    pub per_template_best: Vec<Option<Rat>>,
    /// Whether the best match is within the requested tolerance.
    pub satisfied: Vec<bool>,
}

/// Grows `start` for `rounds` seeded rounds against the catalog. The
/// structure is capped at [`MAX_POINTS`] points; once full, later rounds
/// are recorded without growing.
pub fn build_rich<C: RichClass>(
    start: &C::Structure,
    catalog: &[C::Structure],
    rounds: usize,
    epsilon: &Rat,
    seed: u64,
) -> Result<(C::Structure, RichReport)> {
    for t in catalog {
        C::check_catalog(start, t)?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cur = start.clone();
    let mut log: Vec<RichRound> = Vec::new();
    let mut fresh = 0usize;

    for round in 0..rounds {
        if catalog.is_empty() {
            break;
        }
        let t_idx = rng.gen_range(0..catalog.len());
        let template = &catalog[t_idx];
        let k = template.point_count() - 1;
        let n = cur.point_count();

        let mut entry = RichRound {
            round,
            template: t_idx,
            base: Vec::new(),
            base_labels: Vec::new(),
            realized: None,
            achieved_d_inf: None,
            best_d_inf: None,
            note: None,
        };
        if n < k {
            entry.note = Some("too few points for this template");
            log.push(entry);
            continue;
        }
        // Ordered sample of k distinct base points.
        let mut pool: Vec<usize> = (0..n).collect();
        let mut base = Vec::with_capacity(k);
        for _ in 0..k {
            let i = rng.gen_range(0..pool.len());
            base.push(pool.swap_remove(i));
        }
        entry.base = base.clone();
        entry.base_labels = base
            .iter()
            .map(|&i| cur.point_label(i).to_string())
            .collect();

        if n + 1 > MAX_POINTS {
            entry.note = Some("size cap reached");
            log.push(entry);
            continue;
        }
        let label = loop {
            let candidate = format!("q{fresh}");
            fresh += 1;
            if cur.index_of_label(&candidate).is_none() {
                break candidate;
            }
        };
        match C::adapt_template(&cur, &base, template, &label)? {
            None => {
                entry.note = Some("no admissible adaptation");
                log.push(entry);
            }
            Some(patch) => {
                let grown = C::extend(&cur, &patch)?;
                let w = grown
                    .index_of_label(&label)
                    .ok_or_else(|| Error::Internal("extension lost the new point".into()))?;
                entry.achieved_d_inf =
                    Some(template_gap::<C>(template, &grown, &base, w)?);
                entry.realized = Some(label);
                cur = grown;
                log.push(entry);
            }
        }
    }

    // Post-pass: best match over every point of the final structure.
    let mut per_template_best: Vec<Option<Rat>> = vec![None; catalog.len()];
    for entry in log.iter_mut() {
        if entry.note.is_some() && entry.base.is_empty() {
            continue;
        }
        let template = &catalog[entry.template];
        if template.point_count() - 1 != entry.base.len() {
            continue;
        }
        let mut best: Option<Rat> = None;
        for w in 0..cur.point_count() {
            let gap = template_gap::<C>(template, &cur, &entry.base, w)?;
            if best.as_ref().is_none_or(|b| gap < *b) {
                best = Some(gap);
            }
        }
        entry.best_d_inf = best.clone();
        if let Some(b) = best {
            let slot = &mut per_template_best[entry.template];
            if slot.as_ref().is_none_or(|cur_best| b < *cur_best) {
                *slot = Some(b);
            }
        }
    }
    let satisfied = per_template_best
        .iter()
        .map(|b| b.as_ref().map(|v| v <= epsilon).unwrap_or(false))
        .collect();

    Ok((
        cur,
        RichReport {
            rounds: log,
            per_template_best,
            satisfied,
        },
    ))
}

fn template_gap<C: RichClass>(
    template: &C::Structure,
    structure: &C::Structure,
    base: &[usize],
    w: usize,
) -> Result<Rat> {
    let k = template.point_count() - 1;
    let t_entries: Vec<usize> = (0..=k).collect();
    let mut s_entries: Vec<usize> = base.to_vec();
    s_entries.push(w);
    let t_tuple = EnumeratedTuple::new(template, t_entries)?;
    let s_tuple = EnumeratedTuple::new(structure, s_entries)?;
    d_infty(&t_tuple, &s_tuple)
}
