use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoreError {
    #[error("scalar is not a unit: {0}")]
    NonUnit(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("generator {0} is not divisible by the requested power")]
    NotDivisible(usize),
    #[error("ideal is zero at the requested level; its order is infinite")]
    InfiniteOrder,
    #[error("center is not a coordinate center: {0}")]
    UnsupportedCenter(String),
    #[error("substitution is not a coordinate change: {0}")]
    NotACoordinateChange(String),
    #[error("center is not permissible: {0}")]
    PermissibilityError(String),
    #[error("internal invariant violated: {0}")]
    InvariantBreach(String),
    #[error("point is outside the singular locus")]
    OutOfDomain,
    #[error("object is not monomial: {0}")]
    NotMonomial(String),
    #[error("guard exceeded: {0}")]
    GuardExceeded(String),
    #[error("inductive restriction is zero: {0}")]
    A3Breach(String),
    #[error("algorithm stuck: {0}")]
    AlgorithmStuck(String),
    #[error("bad input: {0}")]
    BadInput(String),
    #[error("parse error at line {line}, column {column}: {msg}")]
    Parse { msg: String, line: usize, column: usize },
}

pub type Result<T> = std::result::Result<T, CoreError>;
