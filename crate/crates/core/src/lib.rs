//! Non-local games and noise-tolerant entanglement certification.
//!
//! The crate is organised around five layers:
//!
//! - [`games`]: finite two-player games, exact classical values and threshold games.
//! - [`quantum`]: small dense complex linear algebra, entropic quantities and
//!   entanglement measures, all in bits.
//! - [`strategies`]: quantum strategies, their behaviors, noise channels and a
//!   seesaw optimizer for quantum-value lower bounds.
//! - [`repetition`]: threshold-game probabilities (exact and Monte Carlo), the exact
//!   joint-distribution engine with dependency-breaking variables, the inequality
//!   audits, classical correlated sampling and the classical extraction protocol.
//! - [`certifier`]: closed-form soundness constants, entanglement lower bounds and
//!   the proof-parameter ledger.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod certifier;
pub mod error;
pub mod games;
pub mod quantum;
pub mod repetition;
pub mod strategies;

pub use error::{Error, Result};
pub use games::{Game, ThresholdGameSpec};
pub use strategies::{Behavior, QuantumStrategy};

/// Tolerance used when comparing a threshold fraction against an integer count.
pub const THRESHOLD_SLACK: f64 = 1e-12;

/// Minimum number of wins among `count` rounds so that the win fraction is at
/// least `threshold`.
pub fn min_wins(threshold: f64, count: usize) -> usize {
    let raw = (threshold * count as f64 - THRESHOLD_SLACK).ceil();
    if raw <= 0.0 {
        0
    } else {
        raw as usize
    }
}
