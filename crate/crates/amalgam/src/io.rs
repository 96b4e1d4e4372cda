//! JSON wire formats.
//!
//! Rationals travel as `"p/q"` strings (`"p"` for integers); sets as arrays
//! of point labels, emitted in ground-set order. Each structure kind has one
//! document shape, recognized by its distinguishing field:
//!
//! ```json
//! {"points": [..], "delta": [{"set": [..], "value": "p/q"}, ..]}
//! {"index": [..], "states": [..], "pmf": [{"outcome": [..], "prob": "p/q"}, ..]}
//! {"points": [..], "anchor": "a", "cuts": [{"side": [..], "weight": "p/q"}, ..]}
//! {"points": [..], "d": [["0", ..], ..]}
//! ```
//!
//! A diversity document must list every subset of size >= 2 exactly once;
//! singletons are implicitly zero and rejected if present. A process
//! document may omit zero-probability outcomes; probabilities must sum to
//! exactly 1.

use serde::{Deserialize, Serialize};

use crate::cuts::CutWeights;
use crate::diversity::FiniteDiversity;
use crate::error::{Error, Result};
use crate::metric::FiniteMetric;
use crate::process::FiniteProcess;
use crate::rational::{fmt_rat, parse_rat, rat_int};
use crate::subset::{all_subsets, SubsetMask, MAX_POINTS};

#[derive(Serialize, Deserialize)]
struct DiversityDoc {
    points: Vec<String>,
    delta: Vec<DeltaEntry>,
}

#[derive(Serialize, Deserialize)]
struct DeltaEntry {
    set: Vec<String>,
    value: String,
}

#[derive(Serialize, Deserialize)]
struct ProcessDoc {
    index: Vec<String>,
    states: Vec<String>,
    pmf: Vec<PmfEntry>,
}

#[derive(Serialize, Deserialize)]
struct PmfEntry {
    outcome: Vec<String>,
    prob: String,
}

#[derive(Serialize, Deserialize)]
struct CutsDoc {
    points: Vec<String>,
    anchor: String,
    cuts: Vec<CutEntry>,
}

#[derive(Serialize, Deserialize)]
struct CutEntry {
    side: Vec<String>,
    weight: String,
}

#[derive(Serialize, Deserialize)]
struct MetricDoc {
    points: Vec<String>,
    d: Vec<Vec<String>>,
}

/// Which document shape a JSON value carries.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum FileKind {
    Diversity,
    Process,
    CutWeights,
    Metric,
}

pub fn sniff_kind(value: &serde_json::Value) -> Result<FileKind> {
    let obj = value
        .as_object()
        .ok_or_else(|| Error::Parse("expected a JSON object".into()))?;
    if obj.contains_key("delta") {
        Ok(FileKind::Diversity)
    } else if obj.contains_key("pmf") {
        Ok(FileKind::Process)
    } else if obj.contains_key("cuts") {
        Ok(FileKind::CutWeights)
    } else if obj.contains_key("d") {
        Ok(FileKind::Metric)
    } else {
        Err(Error::Parse(
            "unrecognized document: expected one of the fields \
             \"delta\", \"pmf\", \"cuts\", \"d\""
                .into(),
        ))
    }
}

fn from_json<T: for<'de> Deserialize<'de>>(value: serde_json::Value) -> Result<T> {
    serde_json::from_value(value).map_err(|e| Error::Parse(e.to_string()))
}

fn resolve_set(points: &[String], labels: &[String]) -> Result<SubsetMask> {
    let mut mask = SubsetMask::EMPTY;
    for l in labels {
        let i = points
            .iter()
            .position(|p| p == l)
            .ok_or_else(|| Error::UnknownLabel(l.clone()))?;
        if mask.contains(i) {
            return Err(Error::DuplicateLabel(l.clone()));
        }
        mask = mask.insert(i);
    }
    Ok(mask)
}

pub fn parse_diversity(value: serde_json::Value, allow_semi: bool) -> Result<FiniteDiversity> {
    let doc: DiversityDoc = from_json(value)?;
    let n = doc.points.len();
    if n > MAX_POINTS {
        return Err(Error::TooManyPoints {
            n,
            max: MAX_POINTS,
        });
    }
    crate::metric::check_labels(&doc.points)?;
    let mut delta = vec![None; 1usize << n];
    for entry in &doc.delta {
        let mask = resolve_set(&doc.points, &entry.set)?;
        if mask.len() < 2 {
            return Err(Error::UndersizedSubset {
                set: entry.set.clone(),
            });
        }
        if delta[mask.0 as usize].is_some() {
            return Err(Error::DuplicateSubset {
                set: entry.set.clone(),
            });
        }
        delta[mask.0 as usize] = Some(parse_rat(&entry.value)?);
    }
    let mut table = Vec::with_capacity(1 << n);
    for mask in all_subsets(n) {
        match (mask.len() >= 2, delta[mask.0 as usize].take()) {
            (true, Some(v)) => table.push(v),
            (true, None) => {
                return Err(Error::MissingSubset {
                    set: mask
                        .indices()
                        .iter()
                        .map(|&i| doc.points[i].clone())
                        .collect(),
                })
            }
            (false, _) => table.push(rat_int(0)),
        }
    }
    FiniteDiversity::new(doc.points, table, allow_semi)
}

pub fn diversity_to_json(d: &FiniteDiversity) -> serde_json::Value {
    let n = d.len();
    let mut entries = Vec::new();
    for mask in all_subsets(n) {
        if mask.len() < 2 {
            continue;
        }
        entries.push(DeltaEntry {
            set: mask
                .indices()
                .iter()
                .map(|&i| d.points()[i].clone())
                .collect(),
            value: fmt_rat(d.value(mask)),
        });
    }
    serde_json::to_value(DiversityDoc {
        points: d.points().to_vec(),
        delta: entries,
    })
    .expect("serialization cannot fail")
}

pub fn parse_process(value: serde_json::Value, allow_semi: bool) -> Result<FiniteProcess> {
    let doc: ProcessDoc = from_json(value)?;
    if doc.index.is_empty() {
        return Err(Error::Parse("index set must be nonempty".into()));
    }
    let n = doc.index.len();
    let k = doc.states.len();
    if k == 0 {
        return Err(Error::Parse("state set must be nonempty".into()));
    }
    let mut len = 1usize;
    for _ in 0..n {
        len = len
            .checked_mul(k)
            .filter(|&l| l as u64 <= crate::process::MAX_PMF_ENTRIES)
            .ok_or(Error::TableTooLarge {
                entries: u64::MAX,
                max: crate::process::MAX_PMF_ENTRIES,
            })?;
    }
    let mut pmf = vec![None; len];
    for entry in &doc.pmf {
        if entry.outcome.len() != n {
            return Err(Error::Parse(format!(
                "outcome ({}) has {} states, expected {}",
                entry.outcome.join(", "),
                entry.outcome.len(),
                n
            )));
        }
        let mut idx = 0usize;
        for s in &entry.outcome {
            let si = doc
                .states
                .iter()
                .position(|t| t == s)
                .ok_or_else(|| Error::UnknownLabel(s.clone()))?;
            idx = idx * k + si;
        }
        if pmf[idx].is_some() {
            return Err(Error::Parse(format!(
                "outcome ({}) listed more than once",
                entry.outcome.join(", ")
            )));
        }
        pmf[idx] = Some(parse_rat(&entry.prob)?);
    }
    let table: Vec<_> = pmf
        .into_iter()
        .map(|p| p.unwrap_or_else(|| rat_int(0)))
        .collect();
    FiniteProcess::new(doc.index, doc.states, table, allow_semi)
}

pub fn process_to_json(p: &FiniteProcess) -> serde_json::Value {
    use num::Zero;
    let k = p.states().len();
    let n = p.len();
    let mut entries = Vec::new();
    for (idx, prob) in p.pmf().iter().enumerate() {
        if prob.is_zero() {
            continue;
        }
        let mut outcome = vec![String::new(); n];
        let mut rem = idx;
        for pos in (0..n).rev() {
            outcome[pos] = p.states()[rem % k].clone();
            rem /= k;
        }
        entries.push(PmfEntry {
            outcome,
            prob: fmt_rat(prob),
        });
    }
    serde_json::to_value(ProcessDoc {
        index: p.index_points().to_vec(),
        states: p.states().to_vec(),
        pmf: entries,
    })
    .expect("serialization cannot fail")
}

pub fn parse_cuts(value: serde_json::Value) -> Result<CutWeights> {
    let doc: CutsDoc = from_json(value)?;
    crate::metric::check_labels(&doc.points)?;
    let anchor = doc
        .points
        .iter()
        .position(|p| *p == doc.anchor)
        .ok_or_else(|| Error::AnchorNotFound(doc.anchor.clone()))?;
    let mut out = CutWeights::zero(doc.points.clone(), anchor)?;
    for entry in &doc.cuts {
        if entry.side.iter().any(|l| *l == doc.anchor) {
            return Err(Error::AnchorOnSide(doc.anchor.clone()));
        }
        let full = resolve_set(&doc.points, &entry.side)?;
        if full.is_empty() {
            return Err(Error::EmptySubset);
        }
        let side = out.compress_side(full);
        let w = parse_rat(&entry.weight)?;
        if w < rat_int(0) {
            return Err(Error::NegativeValue {
                set: entry.side.clone(),
                value: w,
            });
        }
        let total = out.weight(side) + &w;
        out.set_weight(side, total);
    }
    Ok(out)
}

pub fn cuts_to_json(w: &CutWeights) -> serde_json::Value {
    use num::Zero;
    let m = w.points().len() - 1;
    let mut entries = Vec::new();
    for side in all_subsets(m) {
        if side.is_empty() || w.weight(side).is_zero() {
            continue;
        }
        entries.push(CutEntry {
            side: w.side_labels(side),
            weight: fmt_rat(w.weight(side)),
        });
    }
    serde_json::to_value(CutsDoc {
        points: w.points().to_vec(),
        anchor: w.anchor_label().to_string(),
        cuts: entries,
    })
    .expect("serialization cannot fail")
}

pub fn parse_metric(value: serde_json::Value, allow_semi: bool) -> Result<FiniteMetric> {
    let doc: MetricDoc = from_json(value)?;
    let rows = doc
        .d
        .iter()
        .map(|row| row.iter().map(|s| parse_rat(s)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    if allow_semi {
        FiniteMetric::new(doc.points, rows)
    } else {
        FiniteMetric::new_strict(doc.points, rows)
    }
}

pub fn metric_to_json(m: &FiniteMetric) -> serde_json::Value {
    serde_json::to_value(MetricDoc {
        points: m.points().to_vec(),
        d: m.rows()
            .iter()
            .map(|row| row.iter().map(fmt_rat).collect())
            .collect(),
    })
    .expect("serialization cannot fail")
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn diversity_document_round_trip() {
        let doc = json!({
            "points": ["x", "y", "z"],
            "delta": [
                {"set": ["x", "y"], "value": "1"},
                {"set": ["x", "z"], "value": "1"},
                {"set": ["y", "z"], "value": "1"},
                {"set": ["x", "y", "z"], "value": "3/2"},
            ],
        });
        let d = parse_diversity(doc, false).unwrap();
        let back = parse_diversity(diversity_to_json(&d), false).unwrap();
        assert_eq!(d, back);
    }

    #[test]
    fn diversity_document_rejects_singletons_and_gaps() {
        let with_singleton = json!({
            "points": ["x", "y"],
            "delta": [
                {"set": ["x"], "value": "0"},
                {"set": ["x", "y"], "value": "1"},
            ],
        });
        assert!(matches!(
            parse_diversity(with_singleton, false),
            Err(Error::UndersizedSubset { .. })
        ));
        let missing = json!({
            "points": ["x", "y", "z"],
            "delta": [{"set": ["x", "y"], "value": "1"}],
        });
        assert!(matches!(
            parse_diversity(missing, false),
            Err(Error::MissingSubset { .. })
        ));
        let unknown = json!({
            "points": ["x", "y"],
            "delta": [{"set": ["x", "w"], "value": "1"}],
        });
        assert!(matches!(
            parse_diversity(unknown, false),
            Err(Error::UnknownLabel(_))
        ));
    }

    #[test]
    fn process_document_round_trip_with_omitted_outcomes() {
        let doc = json!({
            "index": ["s", "t"],
            "states": ["0", "1"],
            "pmf": [
                {"outcome": ["0", "0"], "prob": "1/2"},
                {"outcome": ["1", "1"], "prob": "1/2"},
            ],
        });
        let p = parse_process(doc, true).unwrap();
        assert!(p.is_semi());
        let back = parse_process(process_to_json(&p), true).unwrap();
        assert_eq!(p, back);
    }

    #[test]
    fn process_document_requires_unit_mass() {
        let doc = json!({
            "index": ["s"],
            "states": ["0", "1"],
            "pmf": [{"outcome": ["0"], "prob": "1/3"}],
        });
        assert!(matches!(
            parse_process(doc, false),
            Err(Error::PmfSumNotOne { .. })
        ));
    }

    #[test]
    fn cuts_document_round_trip() {
        let doc = json!({
            "points": ["1", "2", "3"],
            "anchor": "1",
            "cuts": [
                {"side": ["2"], "weight": "2"},
                {"side": ["3"], "weight": "1"},
            ],
        });
        let w = parse_cuts(doc).unwrap();
        let back = parse_cuts(cuts_to_json(&w)).unwrap();
        assert_eq!(w, back);
    }

    #[test]
    fn metric_document_round_trip() {
        let doc = json!({
            "points": ["x", "y"],
            "d": [["0", "1"], ["1", "0"]],
        });
        let m = parse_metric(doc, false).unwrap();
        let back = parse_metric(metric_to_json(&m), false).unwrap();
        assert_eq!(m, back);
    }
}
