use alloc::boxed::Box;
use alloc::string::String;
use thiserror::Error;

/// Errors raised anywhere in the core crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{name} = {value} is outside the domain (must be finite and > 0)")]
    Domain { name: &'static str, value: f64 },

    #[error("{term} overflowed (exponent {exponent})")]
    Range { term: &'static str, exponent: f64 },

    #[error("invalid parameter {name} = {value}")]
    InvalidParameter { name: &'static str, value: f64 },

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("negative density value {value} at atom {index}")]
    NegativeValue { index: usize, value: f64 },

    #[error("non-positive weight {value} at atom {index}")]
    NonPositiveWeight { index: usize, value: f64 },

    #[error("non-finite entry at index {index}")]
    NonFinite { index: usize },

    #[error("dominating-measure weights differ at atom {index}")]
    WeightMismatch { index: usize },

    #[error("zero density at atom {index} hits a singular branch (smooth the density first)")]
    SingularAtom { index: usize },

    #[error("unknown divergence name `{0}`")]
    UnknownName(String),

    #[error("unsupported divergence for this construction: {0}")]
    UnsupportedSpec(&'static str),

    #[error("at pair ({row}, {col}): {source}")]
    AtPair {
        row: usize,
        col: usize,
        source: Box<Error>,
    },

    #[error("matrix is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },

    #[error("divergence matrix has non-zero diagonal {value} at {index}")]
    NonZeroDiagonal { index: usize, value: f64 },

    #[error("empty input")]
    EmptyInput,

    #[error("all training labels belong to one class")]
    SingleClass,

    #[error("class {label} has no samples in the training part")]
    EmptyClass { label: i8 },

    #[error("fold {fold} does not contain both classes")]
    DegenerateFold { fold: usize },

    #[error("invalid image: {0}")]
    InvalidImage(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;
