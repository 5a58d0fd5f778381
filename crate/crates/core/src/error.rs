use thiserror::Error;

/// Errors produced by the matrix kernel, the map machinery and the file loaders.
#[derive(Debug, Error)]
pub enum Error {
    #[error("pauli index must be 1, 2 or 3, got {0}")]
    InvalidPauliIndex(usize),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("point is outside the compatibility domain")]
    OutsideDomain,

    #[error("seed matrices are linearly dependent (residual norm {0:e})")]
    LinearlyDependent(f64),

    #[error("not a density matrix: {0}")]
    NotDensityMatrix(String),

    #[error("vectors are not orthonormal (max deviation {0:e})")]
    NotOrthonormal(f64),

    #[error("Jacobi eigensolver did not converge after {0} sweeps")]
    NoConvergence(usize),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
