use thiserror::Error;

/// Errors raised by fitting procedures.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum FitError {
    #[error("candidate {candidate}: singular or ill-conditioned design (condition estimate {condition:.3e})")]
    Singular { candidate: usize, condition: f64 },
    #[error("candidate {candidate}: {rows} training rows cannot support {params} parameters")]
    TooFewRows {
        candidate: usize,
        rows: usize,
        params: usize,
    },
    #[error("candidate {candidate}: feature index {index} out of range for {p} columns")]
    FeatureOutOfRange {
        candidate: usize,
        index: usize,
        p: usize,
    },
    #[error("candidate {candidate}: fitter does not support this candidate kind")]
    UnsupportedCandidate { candidate: usize },
    #[error("candidate {candidate}: negative penalty {lambda}")]
    NegativePenalty { candidate: usize, lambda: f64 },
}

impl FitError {
    pub fn candidate(&self) -> usize {
        match *self {
            FitError::Singular { candidate, .. }
            | FitError::TooFewRows { candidate, .. }
            | FitError::FeatureOutOfRange { candidate, .. }
            | FitError::UnsupportedCandidate { candidate }
            | FitError::NegativePenalty { candidate, .. } => candidate,
        }
    }
}

/// Top-level error type of the library.
#[derive(Debug, Error)]
pub enum CvcError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("focal candidate has no competitors")]
    NoCompetitors,
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("confidence set is empty")]
    EmptyConfidenceSet,
    #[error("fit failed in fold {fold}: {source}")]
    Fit {
        fold: usize,
        #[source]
        source: FitError,
    },
    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// Errors produced while decoding user-supplied input files.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("empty input: no header row")]
    MissingHeader,
    #[error("no data rows")]
    NoRows,
    #[error("row {row}: expected {expected} fields, found {found}")]
    Ragged {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("row {row}, column {column}: cannot parse {value:?} as a number")]
    NotNumeric {
        row: usize,
        column: usize,
        value: String,
    },
    #[error("row {row}, column {column}: non-finite value")]
    NonFinite { row: usize, column: usize },
    #[error("unknown response column {0:?}")]
    UnknownResponse(String),
    #[error("line {line}: unknown column {name:?}")]
    UnknownColumn { line: usize, name: String },
    #[error("line {line}: column {name:?} listed twice")]
    DuplicateColumn { line: usize, name: String },
    #[error("line {line}: the response column cannot be a predictor")]
    ResponseAsPredictor { line: usize },
    #[error("malformed csv: {0}")]
    Csv(String),
}

pub type Result<T, E = CvcError> = std::result::Result<T, E>;
