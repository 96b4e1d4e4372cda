//! Exact-arithmetic toolkit for finite relational metric structures.
//!
//! Three kinds of structures share one comparison framework:
//!
//! - **Diversities** ([`diversity`]): nonnegative functions on finite point
//!   sets generalizing metrics, with a minimal one-point amalgamation that
//!   glues two extensions of a common part as tightly as the axioms allow.
//! - **Finite-state processes** ([`process`]): exact joint probability
//!   tables whose index points carry the disagreement metric; amalgamation
//!   couples conditional laws optimally.
//! - **L1 diversities and metrics** ([`cuts`], [`l1`]): nonnegative
//!   combinations of cut structures, with exact decomposition, a cut-cone
//!   feasibility test, the pentagonal inequality, and the five-point
//!   certificate that L1 metrics do not amalgamate.
//!
//! Tuples of points are compared with [`tuples::d_infty`] — the largest
//! predicate gap over corresponding position subsets — and every kind ships
//! a joint-embedding construction turning that gap into certified two-sided
//! bounds on the embedding distance. [`chain`] runs the halving extension
//! schedule that upgrades approximate realizations to exact ones, and
//! [`rich`] grows seeded structures rich against a catalog of extensions.
//!
//! All values are exact rationals ([`rational::Rat`]); nothing in the
//! kernel rounds. Every operation is a pure function of its inputs, so any
//! value is safe to share across threads.

pub mod chain;
pub mod cuts;
pub mod diversity;
pub mod error;
pub mod io;
pub mod l1;
pub mod metric;
pub mod process;
pub mod rational;
pub mod rich;
pub mod sample;
mod simplex;
pub mod subset;
pub mod tuples;

pub use error::{Error, Result};
pub use rational::Rat;
