use std::path::PathBuf;

/// Errors produced by the factorization, clustering and retrieval routines.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch in {op}: {detail}")]
    DimensionMismatch { op: &'static str, detail: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("negative entry in {0}")]
    NegativeEntry(&'static str),

    #[error("row {0} has zero degree")]
    ZeroDegree(usize),

    #[error("column {0} is identically zero")]
    ZeroColumn(usize),

    #[error("matrix is not symmetric")]
    NotSymmetric,

    #[error("matrix is singular or not positive definite")]
    Singular,

    #[error("k-means: only {distinct} distinct rows for {k} clusters")]
    TooFewDistinctRows { distinct: usize, k: usize },

    #[error("vocabulary is empty after preprocessing")]
    EmptyVocabulary,

    #[error("no judged relevant documents")]
    NoRelevantDocuments,

    #[error("unknown document id `{0}`")]
    UnknownDocument(String),

    #[error("parse error in {path}: {msg}")]
    Parse { path: PathBuf, msg: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn dims(op: &'static str, detail: impl Into<String>) -> Self {
        Error::DimensionMismatch { op, detail: detail.into() }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, msg: impl Into<String>) -> Self {
        Error::Parse { path: path.into(), msg: msg.into() }
    }
}
