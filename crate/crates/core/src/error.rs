//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("tensor order must be >= 2, got {0}")]
    BadOrder(usize),

    #[error("tensor dimension must be >= 1, got {0}")]
    BadDimension(usize),

    #[error(
        "dense storage for order {m}, dimension {n} needs {bytes} bytes, above the cap of {cap}"
    )]
    StorageCap {
        m: usize,
        n: usize,
        bytes: u128,
        cap: u64,
    },

    #[error("entry index {index} out of range 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("entry indices must be sorted nondecreasing: {0:?}")]
    UnsortedIndex(Vec<usize>),

    #[error("duplicate entry for index tuple {0:?}")]
    DuplicateEntry(Vec<usize>),

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("matrix is not symmetric: max asymmetry {0:.3e}")]
    NotSymmetric(f64),

    #[error("eigensolver did not converge in {sweeps} sweeps; off-diagonal mass {off:.3e}")]
    EighNoConvergence { sweeps: usize, off: f64 },

    #[error("vector is not unit length: |x| = {0}")]
    NotUnit(f64),

    #[error("invalid solver configuration: {0}")]
    BadConfig(String),

    #[error("degenerate shift: |lambda + alpha| = {0:.3e}")]
    DegenerateShift(f64),

    #[error("spectral radius {0} outside (0, 1); no convergent base rate")]
    RhoOutOfRange(f64),

    #[error("eigenpair residual {0:.3e} violates the 1e-10 contract")]
    ResidualContract(f64),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("graph edge ({0}, {1}) is invalid: {2}")]
    BadEdge(usize, usize, &'static str),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
