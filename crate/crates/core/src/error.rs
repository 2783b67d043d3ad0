use thiserror::Error;

/// Errors raised by the geometry, metric and scan routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("point {point} is not in the domain {domain}")]
    DomainMembership { point: String, domain: String },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("discretization failed: {0}")]
    Discretization(String),

    #[error("node {to} is unreachable from node {from}")]
    Unreachable { from: usize, to: usize },

    #[error("unsupported configuration: {0}")]
    UnsupportedConfiguration(String),

    #[error("degenerate triple: first and third points coincide")]
    DegenerateTriple,

    #[error("degenerate quadruple: {0}")]
    DegenerateQuadruple(String),

    #[error("inverse not bracketed: {0}")]
    Range(String),

    #[error("scan produced no qualifying tuples: {0}")]
    EmptyScan(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("i/o: {0}")]
    Io(String),

    #[error("parse: {0}")]
    Parse(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
