use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed cycle notation: {0}")]
    MalformedCycle(String),
    #[error("element {elem} out of range 1..={n}")]
    ElementOutOfRange { elem: usize, n: usize },
    #[error("element {0} appears more than once")]
    DuplicateElement(usize),
    #[error("not a permutation of [{0}]")]
    NotAPermutation(usize),
    #[error("invalid cycle structure: {0}")]
    InvalidStructure(String),

    #[error("entry {value} at row {row}, column {col} is out of range")]
    EntryOutOfRange { row: usize, col: usize, value: usize },
    #[error("symbol {symbol} repeated in row {row}")]
    RowDuplicate { row: usize, symbol: usize },
    #[error("symbol {symbol} repeated in column {col}")]
    ColumnDuplicate { col: usize, symbol: usize },
    #[error("array is not {0}x{0}")]
    NotSquare(usize),
    #[error("vector is not the image of a Latin square: {0}")]
    NotFeasible(String),
    #[error("vector is not symmetric under the autotopism: {0}")]
    NotSymmetric(String),

    #[error("degree mismatch: expected {expected}, found {found}")]
    DegreeMismatch { expected: usize, found: usize },
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("cycle structures differ: {0}")]
    StructureMismatch(String),
    #[error("order {n} exceeds the supported maximum {max}")]
    OrderTooLarge { n: usize, max: usize },
    #[error("affine dimension of an empty vertex set")]
    EmptyStream,
    #[error("vertex sink failed: {0}")]
    Sink(Box<dyn std::error::Error + Send + Sync>),

    #[error("table data: {0}")]
    TableData(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
