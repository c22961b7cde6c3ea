//! A laboratory for tail probabilities of sums of bounded random variables.
//!
//! The crate has five layers, each usable on its own:
//!
//! * [`oracle`] — exact (big-rational) and log-space ground-truth
//!   probabilities for small instances: binomial tails, fair-walk tails,
//!   prefix-maximum tails, mean hitting times, composition counts, witness
//!   encodings, and truncated geometric-sum convolutions.
//! * [`bounds`] — a catalog of closed-form tail bounds with explicit
//!   constants, covering a fair-coin sandwich, large-deviation binomial
//!   bounds, and Bennett/Hoeffding-style bounds for adaptively chosen
//!   variance budgets.
//! * [`adversary`] — a referee-enforced game in which a strategy picks a
//!   mean-zero two-point step law each round subject to a variance budget;
//!   the bounds above hold against every such strategy.
//! * [`montecarlo`] — deterministic, parallel-safe Monte Carlo estimators
//!   with exact (Clopper–Pearson) confidence intervals.
//! * [`verify`] — sweeps that compare every bound against oracle or
//!   empirical truth and emit byte-stable CSV/JSON reports.
//!
//! Shared scalar types ([`Prob2`], [`Error`]) are re-exported at the root.

pub mod adversary;
pub mod bounds;
mod error;
pub mod montecarlo;
pub mod oracle;
pub mod prob;
pub mod verify;

pub use error::{Error, Result};
pub use prob::Prob2;
