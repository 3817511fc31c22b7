//! Crate-wide error type.
//!
//! All fallible operations return [`Result`]. Variants are grouped by
//! origin: random-source plumbing, numerical failures, and data ingestion.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Entropy file holds fewer 32-bit words than the caller requires.
    #[error("entropy file too short: {found} words available, at least {needed} required")]
    FileTooShort { found: u64, needed: u64 },

    /// Entropy file byte length is not a multiple of 4.
    #[error("entropy file length {len} bytes is not a whole number of 32-bit words")]
    TruncatedWord { len: u64 },

    /// A bounded random source ran out of words.
    #[error("random source exhausted: {requested} words requested, {remaining} remain")]
    Exhausted { requested: u64, remaining: u64 },

    /// Circulant embedding produced an eigenvalue below tolerance.
    #[error("circulant eigenvalue {value:e} at index {index} is negative beyond tolerance")]
    NegativeEigenvalue { index: usize, value: f64 },

    /// Cholesky factorization hit a non-positive pivot.
    #[error("covariance matrix is not positive definite: pivot {pivot:e} at index {index}")]
    NotPositiveDefinite { index: usize, pivot: f64 },

    /// Hypergeometric series failed to reach tolerance.
    #[error("hypergeometric series did not converge within {max_terms} terms")]
    NoConvergence { max_terms: usize },

    /// Molchan-Golosov kernel evaluated at its singular point.
    #[error("kernel is singular at s = t for H < 1/2")]
    SingularPoint,

    #[error("ensemble needs at least 2 paths, got {0}")]
    TooFewPaths(usize),

    #[error("price {value} at data row {row} is not positive")]
    NonPositivePrice { row: usize, value: f64 },

    #[error("window of {window} returns exceeds series length {len}")]
    WindowTooLong { window: usize, len: usize },

    #[error("column '{0}' missing from CSV header")]
    MissingColumn(String),

    #[error("cannot parse '{value}' as a number at line {line}")]
    UnparsableNumber { line: usize, value: String },

    #[error("CSV file contains no data rows")]
    EmptyFile,

    /// Every lagged difference of the input series is zero.
    #[error("degenerate series: all lagged differences are zero")]
    DegenerateSeries,

    #[error("block size {block} leaves {blocks} blocks, need at least {min_blocks}")]
    BlocksTooSmall {
        block: usize,
        blocks: usize,
        min_blocks: usize,
    },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("realized variance sum is zero on a nonempty path")]
    ZeroRealizedVariance,

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
