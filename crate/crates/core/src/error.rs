use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("grid resolution too low: {0}")]
    Resolution(String),
    #[error("box size {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("length mismatch: expected {expected}, got {got}")]
    Length { expected: usize, got: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("potential is not axisymmetric (longitude spread {0:.3e})")]
    NotAxisymmetric(f64),
    #[error("support of the scaled potential leaves the box interior: {0}")]
    SupportOverflow(String),
    #[error("matrix is not Hermitian (defect {0:.3e})")]
    NotHermitian(f64),
    #[error("dense block of size {size} exceeds the cap {cap}")]
    BlockTooLarge { size: usize, cap: usize },
    #[error("eigen-solver failure: {0}")]
    Eigen(String),
    #[error("Krylov propagation did not converge after {steps} restarts (residual {residual:.3e})")]
    KrylovNonConvergence { steps: usize, residual: f64 },
}
