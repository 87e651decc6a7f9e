use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("no ATOM records")]
    NoAtomRecords,

    #[error("row {row}: {message}")]
    DomainTable { row: usize, message: String },

    #[error("terminal endpoint has no LPR (boundary {boundary})")]
    TerminalEndpoint { boundary: i32 },

    #[error("boundary {boundary} is not an endpoint of {structure_id}:{chain_id}")]
    NotAnEndpoint {
        structure_id: String,
        chain_id: char,
        boundary: i32,
    },

    #[error("residue {seq_pos} missing from validated window")]
    MissingResidue { seq_pos: i32 },

    #[error("zero variance in column {column} ({label})")]
    ZeroVariance { column: usize, label: String },

    #[error("need at least {needed} rows, got {got}")]
    TooFewRows { needed: usize, got: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("component count {m} outside 1..={max}")]
    ComponentRange { m: usize, max: usize },

    #[error("variance threshold {0} not in (0, 1]")]
    VarianceThreshold(f64),

    #[error("non-finite value at row {row}, column {column}")]
    NonFinite { row: usize, column: usize },

    #[error("internal error: {0}")]
    Internal(String),

    #[error("degenerate clustering: all cluster e-values are identical")]
    DegenerateClustering,

    #[error("tetrapeptide stretch ({start}, {end}) outside 1..={max}")]
    StretchRange { start: usize, end: usize, max: usize },

    #[error("chain mismatch: {left} vs {right}")]
    ChainMismatch { left: String, right: String },

    #[error("duplicate gold linkers for {structure_id}:{chain_id} boundary {boundary}")]
    DuplicateGold {
        structure_id: String,
        chain_id: char,
        boundary: i32,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{stage} failed for {entry}: {source}")]
    Stage {
        stage: &'static str,
        entry: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    pub(crate) fn at_stage(self, stage: &'static str, entry: impl Into<String>) -> Self {
        Error::Stage {
            stage,
            entry: entry.into(),
            source: Box::new(self),
        }
    }
}
