use std::path::PathBuf;

use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid point: {0}")]
    InvalidPoint(String),

    #[error("point {0:?} is not part of the tabulated point list")]
    UnknownPoint(Vec<f64>),

    #[error("invalid kernel: {0}")]
    InvalidKernel(String),

    #[error("cannot parse kernel spec `{input}`: {reason}")]
    Parse { input: String, reason: String },

    #[error("matrix is not Hermitian (max asymmetry {asymmetry:e})")]
    NotHermitian { asymmetry: f64 },

    #[error("matrix is not positive semidefinite (smallest eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("range of T is not contained in range of S (projection residual {residual:e})")]
    RangeNotIncluded { residual: f64 },

    #[error("TT* and SS* differ by {gap:e}")]
    GramMismatch { gap: f64 },

    #[error("Jacobi iteration did not converge after {sweeps} sweeps (off-diagonal mass {off:e})")]
    NoConvergence { sweeps: usize, off: f64 },

    #[error("index {index} out of range (bound {bound})")]
    IndexOutOfRange { index: usize, bound: usize },

    #[error("elements belong to different hosts")]
    HostMismatch,

    #[error("point lists differ")]
    PointListMismatch,

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("degree mismatch: basis has degree {expected}, multi-index has {found}")]
    DegreeMismatch { expected: u32, found: u32 },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {reason}")]
    Csv {
        path: PathBuf,
        line: usize,
        reason: String,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
