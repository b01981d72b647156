//! Shared error type for the toolkit.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("dictionary of {entries} entries exceeds the {cap}-entry cap")]
    DictionaryTooLarge { entries: usize, cap: usize },

    #[error("zero-norm atom at grid index {0}")]
    ZeroNormAtom(usize),

    #[error("parameter {value} outside the grid range [{min}, {max}]")]
    ParameterOutOfRange { value: f64, min: f64, max: f64 },

    #[error("invalid coefficient vector: {0}")]
    InvalidCoefVector(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("supports of unequal cardinality: {0} vs {1}")]
    CardinalityMismatch(usize, usize),

    #[error("support of {0} exceeds the oracle cap of {1}")]
    OracleSupportTooLarge(usize, usize),

    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("requested {k} clusters but only {nnz} indices carry mass")]
    SparsityExceedsMass { k: usize, nnz: usize },

    #[error("invalid measurement operator: {0}")]
    InvalidOperator(String),

    #[error("only {found} admissible atoms for {needed} requested selections")]
    AdmissibilityExhausted { needed: usize, found: usize },

    #[error("infeasible scene constraints: {0}")]
    InfeasibleScene(String),

    #[error("cumulative value {value} outside [0, {total}]")]
    CumulativeValueOutOfRange { value: f64, total: f64 },

    #[error("infeasible bound inputs: {0}")]
    InfeasibleBound(String),

    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("empty record table")]
    EmptyTable,

    #[error("sweep did not bracket the target: {0}")]
    Unbracketed(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
