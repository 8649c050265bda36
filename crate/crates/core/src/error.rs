use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("shape error: {0}")]
    Shape(String),
    #[error("matrix is singular")]
    Singular,
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("index out of range: {0}")]
    Range(String),
    #[error("point is not a member of the lattice: {0}")]
    Membership(String),
    #[error("inconsistent lattice data: {0}")]
    Inconsistency(String),
    #[error("structure error: {0}")]
    Structure(String),
    #[error("corrupted index computation: {0}")]
    Corruption(String),
    #[error("resource guard exceeded: {0}")]
    Resource(String),
    #[error("rank deficient: {0}")]
    Rank(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("basis change failed: {0}")]
    BasisChange(String),
    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit status: 2 for bad input, 4 for resource guards, 3 for
    /// mathematical inconsistencies.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Parameter(_) | Error::Shape(_) | Error::Range(_) | Error::Membership(_) => 2,
            Error::Resource(_) => 4,
            _ => 3,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Error::Shape(_) => "shape",
            Error::Singular => "singular",
            Error::Degenerate(_) => "degenerate",
            Error::Range(_) => "range",
            Error::Membership(_) => "membership",
            Error::Inconsistency(_) => "inconsistency",
            Error::Structure(_) => "structure",
            Error::Corruption(_) => "corruption",
            Error::Resource(_) => "resource",
            Error::Rank(_) => "rank",
            Error::Parameter(_) => "parameter",
            Error::BasisChange(_) => "basis-change",
            Error::Config(_) => "config",
        }
    }
}
