use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("point id {id} out of range for a space of {len} points")]
    IdOutOfRange { id: usize, len: usize },

    #[error("dimension mismatch: expected {expected} coordinates, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("coordinate queries are not available for an explicit distance matrix")]
    CoordinatesUnavailable,

    #[error("operation requires a Euclidean (L2) space")]
    NotEuclidean,

    #[error("invalid distance matrix: {0}")]
    InvalidMatrix(String),

    #[error("empty point set")]
    EmptySet,

    #[error("neighbor count {count} out of range 1..={len}")]
    CountOutOfRange { count: f64, len: usize },

    #[error("invalid mass parameter: {0}")]
    InvalidMass(String),

    #[error("integer neighbor count required, got {0}")]
    NonIntegerCount(f64),

    #[error("invalid weight: {0}")]
    InvalidWeight(String),

    #[error("measure total masses differ: {0} vs {1}")]
    MassMismatch(f64, f64),

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("negative input to {what}: {value}")]
    NegativeInput { what: &'static str, value: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("malformed filtration: {0}")]
    MalformedFiltration(String),

    #[error("log scale undefined for diagram point ({birth}, {death})")]
    Scale { birth: f64, death: f64 },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn at_stage(stage: &'static str) -> impl FnOnce(Error) -> Error {
        move |source| Error::Stage {
            stage,
            source: Box::new(source),
        }
    }
}
