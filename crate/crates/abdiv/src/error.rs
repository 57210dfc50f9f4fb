use std::io;
use std::path::PathBuf;

use thiserror::Error;

/// Failures while reading or preparing data.
#[derive(Debug, Error)]
pub enum DataError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },

    #[error("line {line}: expected {expected} fields, found {found}")]
    Ragged {
        line: u64,
        expected: u64,
        found: u64,
    },

    #[error("line {line}, column `{column}`: cannot parse `{value}` as a finite number")]
    NotNumeric {
        line: u64,
        column: String,
        value: String,
    },

    #[error("label column `{0}` not found in header")]
    MissingLabelColumn(String),

    #[error("no feature columns")]
    NoFeatures,

    #[error("no data rows")]
    Empty,

    #[error("labels are required for this operation")]
    Unlabeled,

    #[error("row {row}: negative feature {value} in column {column}")]
    NegativeFeature {
        row: usize,
        column: usize,
        value: f64,
    },

    #[error("row {row} sums to zero and cannot be normalized")]
    ZeroRow { row: usize },

    #[error("malformed CSV: {0}")]
    Csv(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Image(#[from] ImageError),

    #[error(transparent)]
    Core(#[from] abdiv_core::Error),
}

/// Failures while decoding or encoding rasters.
#[derive(Debug, Error)]
pub enum ImageError {
    #[error("malformed header: {0}")]
    Header(&'static str),

    #[error("pixel data truncated at byte offset {offset}: expected {expected} bytes of pixels, found {found}")]
    Truncated {
        offset: usize,
        expected: usize,
        found: usize,
    },

    #[error("unsupported bit depth (maxval {0}); only 8-bit images are handled")]
    UnsupportedDepth(u32),

    #[error("unsupported image format: {0}")]
    UnsupportedFormat(String),

    #[error("image dimensions do not fit in memory")]
    TooLarge,

    #[error(transparent)]
    Core(#[from] abdiv_core::Error),

    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },

    #[cfg(feature = "png")]
    #[error("png: {0}")]
    Png(String),
}

pub type Result<T, E = DataError> = std::result::Result<T, E>;
