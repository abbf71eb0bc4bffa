use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed table document: {0}")]
    MalformedTable(String),
    #[error("table has {got} values, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("invalid table symbol {0:?}")]
    InvalidSymbol(char),
    #[error("table size {alphabet}^{n_vars} exceeds the 2^24 entry cap")]
    TableTooLarge { n_vars: usize, alphabet: usize },
    #[error("word has {got} symbols, expected {expected}")]
    WordLength { expected: usize, got: usize },
    #[error("symbol {symbol} at position {position} is outside alphabet of size {alphabet}")]
    SymbolOutOfRange {
        position: usize,
        symbol: u32,
        alphabet: usize,
    },
    #[error("function is undefined at input {0}")]
    UndefinedInput(usize),
    #[error("function is constant")]
    ConstantFunction,
    #[error("operation requires a total function")]
    PartialFunction,
    #[error("function is not symmetric")]
    NotSymmetric,
    #[error("search cap exceeded: {0}")]
    CapExceeded(String),
    #[error("relation is empty")]
    EmptyRelation,
    #[error("invalid relation: {0}")]
    InvalidRelation(String),
    #[error("invalid weight scheme: {0}")]
    InvalidScheme(String),
    #[error("position set is not a certificate for input {0}")]
    InvalidCertificate(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("zero denominator realized at pair ({x}, {y}), position {position}")]
    ZeroDenominator { x: usize, y: usize, position: usize },
    #[error("construction check failed: {0}")]
    ConstructionCheck(String),
    #[error("self-check failed: {0}")]
    SelfCheck(String),
    #[error("rational parse error: {0:?}")]
    RationalParse(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
