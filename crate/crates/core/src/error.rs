//! Error taxonomy shared by every module in the crate.

use thiserror::Error;

/// Crate-wide error type.
///
/// The variants mirror the distinct failure surfaces of the library:
/// parameters outside a documented range, exact computations past their
/// size cap, mathematically meaningless inputs, a game strategy breaking
/// the referee's rules, an unknown name, and an internal contract breach.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A parameter lies outside the documented range for the operation.
    #[error("range error: {0}")]
    Range(String),

    /// An exact computation was requested beyond its supported size cap.
    #[error("capacity error: {0}")]
    Capacity(String),

    /// The inputs make the requested quantity meaningless.
    #[error("domain error: {0}")]
    Domain(String),

    /// A game strategy violated the referee's protocol at a specific step
    /// (budget overspend, unspent budget in exact mode, malformed step law).
    #[error("protocol violation at step {step}: {reason}")]
    ProtocolViolation { step: u64, reason: String },

    /// A name (bound family, strategy id, suite, kind) is not recognized.
    #[error("lookup error: {0}")]
    Lookup(String),

    /// Two pieces of data that must agree do not (e.g. a verification case
    /// declaring a direction that contradicts the bound it compares against).
    #[error("contract error: {0}")]
    Contract(String),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
