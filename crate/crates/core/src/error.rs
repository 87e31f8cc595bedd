use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("adjacency matrix is not square ({rows} rows, row {row} has {len} entries)")]
    NonSquare { rows: usize, row: usize, len: usize },
    #[error("adjacency entry ({row}, {col}) is {value}, expected 0 or 1")]
    BadEntry { row: usize, col: usize, value: i64 },
    #[error("symbol `{0}` has an all-zero row or column")]
    StrandedSymbol(String),
    #[error("at least two symbols are required, got {0}")]
    TooFewSymbols(usize),
    #[error("duplicate symbol label `{0}`")]
    DuplicateSymbol(String),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("empty word")]
    EmptyWord,
    #[error("word `{0}` is not allowed in the shift")]
    NotAllowed(String),
    #[error("words `{0}` and `{1}` do not overlap progressively")]
    NoProgressiveOverlap(String, String),
    #[error("language of length {length} has more than {cap} words")]
    LanguageTooLarge { length: usize, cap: usize },
    #[error("stochastic matrix is incompatible with the adjacency at ({row}, {col})")]
    Incompatible { row: usize, col: usize },
    #[error("row {row} of the stochastic matrix sums to {sum}, not 1")]
    NotStochastic { row: usize, sum: String },
    #[error("the adjacency matrix is not irreducible")]
    NotIrreducible,
    #[error("matrix dimensions do not match: {0}")]
    Dimension(String),
    #[error("negative entry at ({row}, {col})")]
    NegativeEntry { row: usize, col: usize },
    #[error("operation requires exact arithmetic; the measure is in float mode")]
    FloatModeUnsupported,
    #[error("polynomial division is not exact")]
    DivisionNotExact,
    #[error("linear system is singular")]
    SingularSystem,
    #[error("hole collection is empty")]
    EmptyCollection,
    #[error("hole collection is not reduced")]
    NotReduced,
    #[error("correlation polynomials need words of length at least 2")]
    LengthOne,
    #[error("no real pole found in (1, {0}]")]
    NoPoleFound(String),
    #[error("enumeration would exceed the configured cap ({0} words)")]
    TooLarge(usize),
    #[error("cannot parse scalar `{0}`")]
    ParseScalar(String),
    #[error("{0}")]
    Inapplicable(String),
}

pub type Result<T> = std::result::Result<T, Error>;
