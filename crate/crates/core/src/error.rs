//! Error vocabulary shared by all operations.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    /// Operands live on different spaces or on incomparable σ-algebras.
    #[error("incompatible operands: {0}")]
    IncompatibleOperands(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// esssup/essinf of an empty family; no ±∞ convention is applied.
    #[error("empty family")]
    EmptyFamily,

    #[error("empty set")]
    EmptySet,

    /// A caller-supplied oracle returned a value violating its contract.
    #[error("oracle violation: {0}")]
    OracleViolation(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("arity mismatch: expected {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },

    /// ε must be strictly positive everywhere.
    #[error("epsilon is not strictly positive")]
    InvalidEpsilon,

    /// An enumerator or selection ran out of realized material before the
    /// construction covered every cell.
    #[error("realized prefix insufficient: {0}")]
    PrefixInsufficient(String),

    /// No positive scaling absorbed the element within the search bound.
    #[error("absorbency failure: {0}")]
    AbsorbencyFailure(String),

    /// A dyadic block is not subdivided finely enough for the requested
    /// pattern; `required` names the subdivision depth that would suffice.
    #[error("insufficient fine depth on block {block}: have {have}, need {required}")]
    DepthError { block: u32, have: u32, required: u32 },

    #[error("precondition violation: {0}")]
    PreconditionViolation(String),

    /// The point lies in the closure of the set on every cell, so no
    /// separating functional exists.
    #[error("not separable: {0}")]
    NotSeparable(String),

    #[error("invalid multi-indices: {0}")]
    InvalidIndices(String),

    #[error("invalid battery: {0}")]
    InvalidBattery(String),

    /// A comparison or combination would need to evaluate the lazy tail and
    /// no symbolic rule covers it.
    #[error("tail rule cannot be handled symbolically: {0}")]
    TailUndecidable(String),

    /// An iterative exact solver exceeded its pivot budget.
    #[error("solver iteration budget exhausted: {0}")]
    SolverStalled(String),

    #[error("unknown scenario: {0}")]
    UnknownScenario(String),
}
