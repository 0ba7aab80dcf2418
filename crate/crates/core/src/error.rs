use thiserror::Error;

#[derive(Debug, Error)]
pub enum CoreError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("degree error: {0}")]
    Degree(String),
    #[error("matrix is not skew-symmetric (defect {defect:.3e}, tolerance {tol:.3e})")]
    NotSkew { defect: f64, tol: f64 },
    #[error("degenerate dimension n = {0}")]
    DegenerateDimension(usize),
    #[error("structure constants violate the Jacobi identity (defect {0:.3e})")]
    InvalidAlgebra(f64),
    #[error("inner product is not ad-invariant or Killing form has wrong signature")]
    UnsupportedSignature,
    #[error("3-form does not induce a Lie bracket (tau-Jacobi defect {0:.3e})")]
    NotALieStructure(f64),
    #[error("singular map: {0}")]
    Singular(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("internal consistency: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;
