use std::fmt;

use thiserror::Error;

/// Position inside a parsed document, 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Position {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("{pos}: syntax error: {message}")]
    Syntax { pos: Position, message: String },
    #[error("{pos}: element {value} out of range for domain of size {size}")]
    OutOfRange {
        pos: Position,
        value: u64,
        size: u32,
    },
    #[error("{pos}: tuple of length {found} in relation `{relation}` of arity {arity}")]
    ArityMismatch {
        pos: Position,
        relation: String,
        arity: usize,
        found: usize,
    },
    #[error("{pos}: duplicate relation `{name}`")]
    DuplicateRelation { pos: Position, name: String },
    #[error("{pos}: unknown relation `{name}`")]
    UnknownRelation { pos: Position, name: String },
    #[error("{pos}: variable `{name}` is not quantified")]
    Unquantified { pos: Position, name: String },
    #[error("{pos}: variable `{name}` is quantified more than once")]
    RepeatedQuantifier { pos: Position, name: String },
    #[error("{pos}: identifier `{name}` uses the reserved character `$`")]
    ReservedName { pos: Position, name: String },
    #[error("json: {0}")]
    Json(String),
}

/// A materialization that would exceed a configured limit.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("budget exceeded: {what} requires {required}, limit is {limit}")]
pub struct BudgetExceeded {
    pub what: String,
    pub required: u128,
    pub limit: u128,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Budget(#[from] BudgetExceeded),
    #[error("invalid sentence: {0}")]
    InvalidSentence(String),
    #[error("invalid model: {0}")]
    Model(String),
    #[error("domain mismatch: {0}")]
    DomainMismatch(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("no switchability witness for r = {r}; pass an explicit override to run a conditional reduction")]
    MissingWitness { r: usize },
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
