//! Reachability of configurations in finite non-uniform elementary
//! cellular automata under null boundary.
//!
//! The crate builds the reachability tree one level at a time, keeps per-RMT
//! predecessor links between edges of a level, prunes edges that lie on no
//! walk from the destination's edge to the source's edge, and reads the
//! answer off the last level. A brute-force [`oracle`] and the average-case
//! [`experiment`] harness sit alongside.

pub mod ca;
pub mod decider;
pub mod error;
pub mod experiment;
pub mod oracle;
pub mod tree;

pub use ca::{Configuration, MinSteps, Rmt, RmtSequence, Rule, RuleVector};
pub use decider::{decide, decide_traced, DecideOptions, Decision, Outcome, Reason};
pub use error::{Error, Result};
pub use experiment::{ExperimentReport, SamplingParams};
pub use tree::{Anchors, EdgeId, Label, Level};
