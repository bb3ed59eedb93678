use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty dataset")]
    EmptyDataset,

    #[error("point {point}: expected {expected} coordinates, found {found}")]
    RaggedPoint {
        point: usize,
        expected: usize,
        found: usize,
    },

    #[error("point {point}, dimension {dim}: coordinate is not finite")]
    NonFinite { point: usize, dim: usize },

    #[error("point {point}, dimension {dim}: coordinate {value} is outside [0, 1]")]
    OutOfUnitRange {
        point: usize,
        dim: usize,
        value: f64,
    },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid radius schedule: {0}")]
    InvalidSchedule(String),

    #[error("invalid fit range {j_min}..{j_max} for {levels} levels")]
    InvalidFitRange { j_min: u32, j_max: u32, levels: u32 },

    #[error("regression needs at least 2 points, got {0}")]
    TooFewPoints(usize),

    #[error("integer overflow in {0}")]
    Overflow(&'static str),

    #[error("invalid delimiter {0:?}")]
    InvalidDelimiter(char),

    #[error("line {line}: expected {expected} fields, found {found}")]
    RaggedRow {
        line: usize,
        expected: usize,
        found: usize,
    },

    #[error("line {line}, column {column}: cannot parse {field:?} as a number")]
    ParseNumber {
        line: usize,
        column: usize,
        field: String,
    },

    #[error("line {line}, column {column}: coordinate is not finite")]
    NonFiniteField { line: usize, column: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
