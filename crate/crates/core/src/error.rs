use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate state: total weight is zero")]
    DegenerateState,

    #[error("state is not normalized (norm = {norm:.3e})")]
    NotNormalized { norm: f64 },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("linearly dependent input at index {index} (pivot norm {pivot:.3e})")]
    LinearlyDependent { index: usize, pivot: f64 },

    #[error("functions are not orthonormal (max deviation {deviation:.3e})")]
    NotOrthonormal { deviation: f64 },

    #[error("operator is not Hermitian (max |H - H^dagger| = {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("expectation value has imaginary part {imag:.3e}")]
    ComplexExpectation { imag: f64 },

    #[error("unsupported boundary: {0}")]
    UnsupportedBoundary(String),

    #[error("kernel is not particle-like: {0}")]
    NotParticleLike(String),

    #[error("mass not constant: relative spread of Q is {spread:.3e}")]
    MassNotConstant { spread: f64 },

    #[error("time step {dt:.3e} violates stability bound {bound:.3e}")]
    Unstable { dt: f64, bound: f64 },

    #[error("non-finite value encountered at step {step}")]
    NonFinite { step: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("least-action descent did not converge (residual {residual:.3e} after {iterations} iterations)")]
    NoConvergence { residual: f64, iterations: usize },

    #[error("size guard exceeded: {0}")]
    TooLarge(String),

    #[error("generator index {index} out of range for algebra with {n} generators")]
    BadGenerator { index: usize, n: usize },

    #[error("algebra mismatch: {left} vs {right} generators")]
    AlgebraMismatch { left: usize, right: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
