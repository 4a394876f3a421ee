use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("empty input")]
    Empty,

    #[error("not a binary task: found {0} distinct label(s), expected exactly 2")]
    NotBinary(usize),

    #[error("non-numeric value {value:?} in row {row}, column {column:?}")]
    NonNumeric {
        row: usize,
        column: String,
        value: String,
    },

    #[error("label column {0:?} not found in header")]
    MissingColumn(String),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("singular covariance matrix{}", context_suffix(.0))]
    SingularCovariance(Option<String>),

    #[error("matrix is not positive definite (eigenvalue {0:e})")]
    NotPositiveDefinite(f64),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("MCD failed: every candidate subset was degenerate")]
    DegenerateSubsets,

    #[error("all training points map to the origin of the depth space; use more directions or a non-vanishing depth")]
    AllAtOrigin,

    #[error("the tukey depth needs an outsider treatment (--treatment lda|knn|mah-moment|mah-mcd|svms)")]
    MissingTreatment,

    #[error("outsider reached classification without a trained treatment")]
    NoTreatment,

    #[error("class {0} is empty")]
    EmptyClass(u8),

    #[error("no kernel width in the grid separates the retained points")]
    NoSeparatingGamma,

    #[error("QP solver hit the iteration cap ({0}) without a verdict")]
    IterationCap(usize),

    #[error("fold {fold}: {source}")]
    Fold {
        fold: usize,
        #[source]
        source: Box<Error>,
    },
}

fn context_suffix(ctx: &Option<String>) -> String {
    match ctx {
        Some(c) => format!(" ({c})"),
        None => String::new(),
    }
}

pub type Result<T> = std::result::Result<T, Error>;
