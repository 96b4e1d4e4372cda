//! Error type shared by the whole kernel.
//!
//! Structural violations carry exact witnesses (the offending sets, points,
//! and values) so callers can report them verbatim.

use thiserror::Error;

use crate::rational::{fmt_rat, Rat};

pub type Result<T> = std::result::Result<T, Error>;

fn set_str(labels: &[String]) -> String {
    format!("{{{}}}", labels.join(", "))
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("cannot parse rational {0:?} (expected \"p/q\" with q > 0, or \"p\")")]
    BadRational(String),

    #[error("{0}")]
    Parse(String),

    #[error("ground set has {n} points; at most {max} supported")]
    TooManyPoints { n: usize, max: usize },

    #[error("probability table would have {entries} entries; at most {max} supported")]
    TableTooLarge { entries: u64, max: u64 },

    #[error("unknown point label {0:?}")]
    UnknownLabel(String),

    #[error("duplicate point label {0:?}")]
    DuplicateLabel(String),

    #[error("empty tuple")]
    EmptyTuple,

    #[error("tuple lengths differ: {a} vs {b}")]
    TupleLengthMismatch { a: usize, b: usize },

    #[error("state sets differ: {a:?} vs {b:?}")]
    StateSetMismatch { a: Vec<String>, b: Vec<String> },

    #[error("value table is missing the subset {}", set_str(.set))]
    MissingSubset { set: Vec<String> },

    #[error("value table lists the subset {} more than once", set_str(.set))]
    DuplicateSubset { set: Vec<String> },

    #[error("value table must not list sets of size < 2 (got {})", set_str(.set))]
    UndersizedSubset { set: Vec<String> },

    #[error("negative value {} on {}", fmt_rat(.value), set_str(.set))]
    NegativeValue { set: Vec<String>, value: Rat },

    #[error("zero value on {} of size > 1 (not a strict diversity)", set_str(.set))]
    ZeroOnLargeSet { set: Vec<String> },

    #[error(
        "monotonicity violation: value {} on {} exceeds value {} on {} + {point}",
        fmt_rat(.inner_value), set_str(.set), fmt_rat(.outer_value), set_str(.set)
    )]
    MonotonicityViolation {
        set: Vec<String>,
        point: String,
        inner_value: Rat,
        outer_value: Rat,
    },

    #[error(
        "triangle violation at (A={}, b={bridge}, C={}): {} > {} + {}",
        set_str(.a), set_str(.c), fmt_rat(.lhs), fmt_rat(.rhs_a), fmt_rat(.rhs_c)
    )]
    TriangleViolation {
        a: Vec<String>,
        bridge: String,
        c: Vec<String>,
        lhs: Rat,
        rhs_a: Rat,
        rhs_c: Rat,
    },

    #[error(
        "inputs disagree on the common part: value {} vs {} on {}",
        fmt_rat(.left), fmt_rat(.right), set_str(.set)
    )]
    AgreementMismatch {
        set: Vec<String>,
        left: Rat,
        right: Rat,
    },

    #[error("inputs do not form one-point extensions of a common part: {0}")]
    BadExtensionPair(String),

    #[error("probabilities sum to {} instead of 1", fmt_rat(.sum))]
    PmfSumNotOne { sum: Rat },

    #[error("negative probability {} on outcome ({})", fmt_rat(.value), .outcome.join(", "))]
    NegativeProbability { outcome: Vec<String>, value: Rat },

    #[error("degenerate pair ({t1}, {t2}): the two coordinates agree almost surely")]
    DegeneratePair { t1: String, t2: String },

    #[error(
        "marginals on the common part differ at outcome ({}): {} vs {}",
        .outcome.join(", "), fmt_rat(.left), fmt_rat(.right)
    )]
    MarginalMismatch {
        outcome: Vec<String>,
        left: Rat,
        right: Rat,
    },

    #[error("distributions live on different outcome spaces ({a} vs {b} outcomes)")]
    OutcomeSpaceMismatch { a: usize, b: usize },

    #[error("matrix is not square or row lengths differ")]
    BadMatrixShape,

    #[error("metric has nonzero diagonal at {0}")]
    NonzeroDiagonal(String),

    #[error("metric is not symmetric at ({0}, {1})")]
    AsymmetricMetric(String, String),

    #[error("negative distance at ({0}, {1})")]
    NegativeDistance(String, String),

    #[error("zero distance between distinct points {0} and {1} (not a strict metric)")]
    ZeroDistance(String, String),

    #[error(
        "metric triangle violation: d({x}, {z}) = {} > d({x}, {y}) + d({y}, {z}) = {} + {}",
        fmt_rat(.lhs), fmt_rat(.rhs_a), fmt_rat(.rhs_b)
    )]
    MetricTriangleViolation {
        x: String,
        y: String,
        z: String,
        lhs: Rat,
        rhs_a: Rat,
        rhs_b: Rat,
    },

    #[error("anchor {0:?} is not a point of the ground set")]
    AnchorNotFound(String),

    #[error("cut side contains the anchor {0:?}")]
    AnchorOnSide(String),

    #[error("input is not an L1 diversity: {0}")]
    NotL1Input(String),

    #[error("empty subset not allowed here")]
    EmptySubset,

    #[error("expected sets of size {expected}, got {got}")]
    WrongSetSize { expected: usize, got: usize },

    #[error("sets must be disjoint; {0:?} appears in both")]
    NotDisjoint(String),

    #[error(
        "oracle tolerance violation at step {step}: requested {}, recomputed d_infty {}",
        fmt_rat(.requested), fmt_rat(.achieved)
    )]
    OracleToleranceViolation {
        step: usize,
        requested: Rat,
        achieved: Rat,
    },

    #[error(
        "chain bound violation at step {step} ({which}): {} > {}",
        fmt_rat(.actual), fmt_rat(.bound)
    )]
    ChainBoundViolation {
        step: usize,
        which: &'static str,
        actual: Rat,
        bound: Rat,
    },

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    /// Machine-readable rendering for reports: a `kind` tag plus the display text.
    pub fn to_json(&self) -> serde_json::Value {
        let kind = match self {
            Error::BadRational(_) => "bad-rational",
            Error::Parse(_) => "parse",
            Error::TooManyPoints { .. } => "too-many-points",
            Error::TableTooLarge { .. } => "table-too-large",
            Error::UnknownLabel(_) => "unknown-label",
            Error::DuplicateLabel(_) => "duplicate-label",
            Error::EmptyTuple => "empty-tuple",
            Error::TupleLengthMismatch { .. } => "tuple-length-mismatch",
            Error::StateSetMismatch { .. } => "state-set-mismatch",
            Error::MissingSubset { .. } => "missing-subset",
            Error::DuplicateSubset { .. } => "duplicate-subset",
            Error::UndersizedSubset { .. } => "undersized-subset",
            Error::NegativeValue { .. } => "negative-value",
            Error::ZeroOnLargeSet { .. } => "d1-violation",
            Error::MonotonicityViolation { .. } => "monotonicity-violation",
            Error::TriangleViolation { .. } => "triangle-violation",
            Error::AgreementMismatch { .. } => "agreement-mismatch",
            Error::BadExtensionPair(_) => "bad-extension-pair",
            Error::PmfSumNotOne { .. } => "pmf-sum-not-one",
            Error::NegativeProbability { .. } => "negative-probability",
            Error::DegeneratePair { .. } => "degenerate-pair",
            Error::MarginalMismatch { .. } => "marginal-mismatch",
            Error::OutcomeSpaceMismatch { .. } => "outcome-space-mismatch",
            Error::BadMatrixShape => "bad-matrix-shape",
            Error::NonzeroDiagonal(_) => "nonzero-diagonal",
            Error::AsymmetricMetric(_, _) => "asymmetric-metric",
            Error::NegativeDistance(_, _) => "negative-distance",
            Error::ZeroDistance(_, _) => "zero-distance",
            Error::MetricTriangleViolation { .. } => "metric-triangle-violation",
            Error::AnchorNotFound(_) => "anchor-not-found",
            Error::AnchorOnSide(_) => "anchor-on-side",
            Error::NotL1Input(_) => "not-l1-input",
            Error::EmptySubset => "empty-subset",
            Error::WrongSetSize { .. } => "wrong-set-size",
            Error::NotDisjoint(_) => "not-disjoint",
            Error::OracleToleranceViolation { .. } => "oracle-tolerance-violation",
            Error::ChainBoundViolation { .. } => "chain-bound-violation",
            Error::Internal(_) => "internal",
        };
        let mut obj = serde_json::Map::new();
        obj.insert("kind".into(), kind.into());
        obj.insert("message".into(), self.to_string().into());
        if let Some(w) = self.witness_json() {
            obj.insert("witness".into(), w);
        }
        serde_json::Value::Object(obj)
    }

    /// Structured witness payload where one exists.
    fn witness_json(&self) -> Option<serde_json::Value> {
        use serde_json::json;
        match self {
            Error::TriangleViolation {
                a,
                bridge,
                c,
                lhs,
                rhs_a,
                rhs_c,
            } => Some(json!({
                "A": a, "b": bridge, "C": c,
                "lhs": fmt_rat(lhs), "rhs": [fmt_rat(rhs_a), fmt_rat(rhs_c)],
            })),
            Error::MonotonicityViolation {
                set,
                point,
                inner_value,
                outer_value,
            } => Some(json!({
                "A": set, "x": point,
                "value": fmt_rat(inner_value), "extended_value": fmt_rat(outer_value),
            })),
            Error::AgreementMismatch { set, left, right } => Some(json!({
                "set": set, "left": fmt_rat(left), "right": fmt_rat(right),
            })),
            Error::MarginalMismatch {
                outcome,
                left,
                right,
            } => Some(json!({
                "outcome": outcome, "left": fmt_rat(left), "right": fmt_rat(right),
            })),
            Error::NegativeValue { set, value } => Some(json!({
                "set": set, "value": fmt_rat(value),
            })),
            Error::ZeroOnLargeSet { set } => Some(json!({ "set": set })),
            Error::MetricTriangleViolation {
                x,
                y,
                z,
                lhs,
                rhs_a,
                rhs_b,
            } => Some(json!({
                "x": x, "y": y, "z": z,
                "lhs": fmt_rat(lhs), "rhs": [fmt_rat(rhs_a), fmt_rat(rhs_b)],
            })),
            Error::OracleToleranceViolation {
                step,
                requested,
                achieved,
            } => Some(json!({
                "step": step, "requested": fmt_rat(requested), "recomputed": fmt_rat(achieved),
            })),
            Error::ChainBoundViolation {
                step,
                which,
                actual,
                bound,
            } => Some(json!({
                "step": step, "condition": which,
                "actual": fmt_rat(actual), "bound": fmt_rat(bound),
            })),
            _ => None,
        }
    }
}
