use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("cyclotomic order {order} exceeds the configured cap {cap}")]
    OrderOverflow { order: u64, cap: u32 },
    #[error("malformed scalar: {0}")]
    MalformedScalar(String),
    #[error("malformed table: {0}")]
    MalformedTable(String),
    #[error("table is not associative at ({0}, {1}, {2})")]
    NotAssociative(usize, usize, usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("bad semigroup expression: {0}")]
    UnknownSemigroup(String),
    #[error("enumeration of order {0} requires the explicit n = 4 flag")]
    EnumerationCap(usize),
    #[error("function has {got} values but the semigroup has {expected} elements")]
    LengthMismatch { expected: usize, got: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("not a sine pair: {0}")]
    NotSinePair(String),
    #[error("linear system is inconsistent: {0}")]
    Inconsistent(String),
    #[error("no admissible conjugation constant: {0}")]
    NoAdmissibleDelta(String),
    #[error("constraint violated: {0}")]
    Constraint(String),
    #[error("triple does not solve the equation (residual {0:e})")]
    NotASolution(f64),
    #[error("unclassifiable: {0}")]
    Unclassifiable(String),
}
