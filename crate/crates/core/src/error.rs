use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid schema: {0}")]
    InvalidSchema(String),
    #[error("unknown column `{0}`")]
    UnknownColumn(String),
    #[error("column `{0}` is not discrete")]
    NotDiscrete(String),
    #[error("unknown category `{category}` in column `{column}`")]
    UnknownCategory { column: String, category: String },
    #[error("bad cell at row {row}, column `{column}`: {reason}")]
    BadCell {
        row: usize,
        column: String,
        reason: String,
    },
    #[error("row {row} has {found} cells, expected {expected}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("too few rows: {0}")]
    TooFewRows(String),
    #[error("table is empty")]
    EmptyTable,
    #[error("column is degenerate (all values identical)")]
    DegenerateColumn,
    #[error("encoded layout mismatch: expected width {expected}, found {found}")]
    LayoutMismatch { expected: usize, found: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("training diverged at epoch {epoch}: non-finite loss")]
    TrainingDiverged { epoch: usize },
    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),
    #[error("label column must have exactly two categories, `{0}` does not")]
    NotBinary(String),
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("total support is zero")]
    ZeroSupport,
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("no power lines given")]
    NoLines,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
