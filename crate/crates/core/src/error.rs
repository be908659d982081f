use std::path::PathBuf;

use thiserror::Error;

use crate::knn::Label;
use crate::linalg::EstimationMode;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("{mode} covariance needs at least {required} samples, got {found}")]
    TooFewSamples {
        mode: EstimationMode,
        required: usize,
        found: usize,
    },

    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix has a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is not symmetric (max |m_ij - m_ji| = {max_asymmetry:e})")]
    NotSymmetric { max_asymmetry: f64 },

    #[error("matrix has a nonzero entry above the diagonal at ({row}, {col})")]
    NotLowerTriangular { row: usize, col: usize },

    #[error("matrix is not positive definite: pivot {index} is {pivot:e}")]
    NotPositiveDefinite { index: usize, pivot: f64 },

    #[error("triangular matrix has non-positive diagonal entry at {index}")]
    NonPositiveDiagonal { index: usize },

    #[error("vector norm is zero")]
    ZeroVector,

    #[error("class prior {0} is outside [0, 1]")]
    InvalidPrior(f64),

    #[error("class counts are both zero")]
    NoClassCounts,

    #[error("k = {k} is invalid for a training set of {n} points")]
    InvalidK { k: usize, n: usize },

    #[error("training set has no points of class {0}")]
    MissingClass(Label),

    #[error("per-class whitened metric requires the query's class label")]
    HintRequired,

    #[error("only the per-class whitened metric accepts a class label hint")]
    HintForbidden,

    #[error("covariance of class {class} could not be factorized: {source}")]
    ClassCovariance {
        class: String,
        #[source]
        source: Box<Error>,
    },

    #[error("fold {fold}: {source}")]
    Fold {
        fold: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid split: {0}")]
    InvalidSplit(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("{path}, row {row}: {message}")]
    Parse {
        path: PathBuf,
        row: usize,
        message: String,
    },

    #[error("{path}, row {row}, column {column}: missing value")]
    MissingValue {
        path: PathBuf,
        row: usize,
        column: String,
    },

    #[error("{path}: label column must hold exactly two classes, found {found:?}")]
    LabelCount { path: PathBuf, found: Vec<String> },

    #[error("{path}: no column named {name:?}")]
    UnknownColumn { path: PathBuf, name: String },

    #[error("{path}: label {name:?} does not occur in the label column")]
    UnknownLabel { path: PathBuf, name: String },

    #[error("no counterexample found after {attempts} attempts")]
    CounterexampleNotFound { attempts: usize },

    #[error("covariance is isotropic; whitening cannot change cosine rankings")]
    CounterexampleInapplicable,

    #[error("k range is empty")]
    EmptyRange,
}

impl Error {
    /// True for failures caused by the numbers themselves (non-PD covariance,
    /// degenerate vectors) rather than by malformed input.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::NotPositiveDefinite { .. }
            | Error::NonPositiveDiagonal { .. }
            | Error::ZeroVector
            | Error::CounterexampleNotFound { .. } => true,
            Error::ClassCovariance { .. } => true,
            Error::Fold { source, .. } => source.is_numerical(),
            _ => false,
        }
    }

    pub(crate) fn in_fold(self, fold: usize) -> Error {
        Error::Fold {
            fold,
            source: Box::new(self),
        }
    }
}
