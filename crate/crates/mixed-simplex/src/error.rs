//! Crate-wide error type.
//!
//! Every `Display` message begins with the error's name so command-line
//! consumers can print `{error}` to stderr and keep a stable, grep-able
//! prefix per failure class.

use thiserror::Error;

/// Errors produced by simplex, sampler, information, and automata operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Every coordinate of a point sits at or below the face tolerance, so
    /// no face can be assigned.
    #[error("DegeneratePoint: all coordinates are <= the face tolerance {tol}")]
    DegeneratePoint { tol: f64 },

    /// A vector could not be accepted as a point on the simplex.
    #[error("InvalidPoint: {0}")]
    InvalidPoint(String),

    /// A sampler specification is inconsistent (non-positive scale, empty
    /// parameter vector, non-finite entry, ...).
    #[error("BadSpec: {0}")]
    BadSpec(String),

    /// A density with no finite value on the boundary was evaluated at a
    /// boundary point.
    #[error("BoundaryEvaluation: density is undefined where coordinate {index} is zero")]
    BoundaryEvaluation { index: usize },

    /// The operation needs a closed-form density but the conditional is
    /// empirical.
    #[error("NoDensityForm: empirical conditionals carry no closed-form density")]
    NoDensityForm,

    /// Too few samples for the nearest-neighbor entropy estimator.
    #[error("InsufficientSamples: need at least {needed} empirical samples, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    /// A joint distribution over (Z, Y) is malformed.
    #[error("BadJoint: {0}")]
    BadJoint(String),

    /// A value left the representable floating-point range.
    #[error("Overflow: {0}")]
    Overflow(String),

    /// Two objects that must share an alphabet size K disagree.
    #[error("AlphabetMismatch: expected K={expected}, got K={got}")]
    AlphabetMismatch { expected: usize, got: usize },

    /// Determinization is only defined for Boolean-mode automata.
    #[error(
        "NotDeterminizable: probability-semiring automata cannot be determinized; \
         only Boolean-mode automata (all weights 1) can"
    )]
    NotDeterminizable,

    /// Weight pushing requires every state to reach a final state.
    #[error("NotTrim: state {state} cannot reach a final state")]
    NotTrim { state: usize },

    /// A mixed string has more pure projections than the enumeration limit.
    #[error("TooManyProjections: {count} pure projections exceed the limit {limit}")]
    TooManyProjections { count: u128, limit: u64 },

    /// K exceeds the cap that applies to this operation.
    #[error("KTooLarge: K={k} exceeds the cap {cap} for {operation}")]
    KTooLarge {
        k: usize,
        cap: usize,
        operation: &'static str,
    },

    /// A precondition on an argument was violated.
    #[error("InvalidArgument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// The stable name this error's `Display` output starts with.
    pub fn name(&self) -> &'static str {
        match self {
            Error::DegeneratePoint { .. } => "DegeneratePoint",
            Error::InvalidPoint(_) => "InvalidPoint",
            Error::BadSpec(_) => "BadSpec",
            Error::BoundaryEvaluation { .. } => "BoundaryEvaluation",
            Error::NoDensityForm => "NoDensityForm",
            Error::InsufficientSamples { .. } => "InsufficientSamples",
            Error::BadJoint(_) => "BadJoint",
            Error::Overflow(_) => "Overflow",
            Error::AlphabetMismatch { .. } => "AlphabetMismatch",
            Error::NotDeterminizable => "NotDeterminizable",
            Error::NotTrim { .. } => "NotTrim",
            Error::TooManyProjections { .. } => "TooManyProjections",
            Error::KTooLarge { .. } => "KTooLarge",
            Error::InvalidArgument(_) => "InvalidArgument",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
