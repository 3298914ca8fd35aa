//! Error types shared across the crate.

use std::fmt;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Malformed expression source; `offset` is a byte offset into the input.
    Syntax { offset: usize, message: String },
    /// Identifier that is not a variable, constant, or known function.
    UnknownIdentifier { offset: usize, name: String },
    /// Evaluation left the real domain of a function.
    Domain(DomainError),
    /// An estimator or operation precondition was violated.
    Precondition(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainError {
    LogNonpositive,
    SqrtNegative,
    SqrtDerivativeAtZero,
    DivisionByZero,
    AbsDerivativeAtZero,
    PowBranch,
    NonFinite,
}

impl fmt::Display for DomainError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let msg = match self {
            DomainError::LogNonpositive => "log of a nonpositive value",
            DomainError::SqrtNegative => "sqrt of a negative value",
            DomainError::SqrtDerivativeAtZero => "sqrt is not differentiable at 0",
            DomainError::DivisionByZero => "division by zero",
            DomainError::AbsDerivativeAtZero => "abs is not differentiable at 0",
            DomainError::PowBranch => "power with negative base and non-integer exponent",
            DomainError::NonFinite => "evaluation produced a non-finite value",
        };
        f.write_str(msg)
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Syntax { offset, message } => {
                write!(f, "syntax error at byte {offset}: {message}")
            }
            Error::UnknownIdentifier { offset, name } => {
                write!(f, "unknown identifier `{name}` at byte {offset}")
            }
            Error::Domain(d) => write!(f, "domain error: {d}"),
            Error::Precondition(msg) => write!(f, "precondition violated: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

impl From<DomainError> for Error {
    fn from(d: DomainError) -> Self {
        Error::Domain(d)
    }
}
