use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix has {0} non-finite entries")]
    NonFinite(usize),

    #[error("not Hermitian: max deviation {deviation:e} exceeds {tol:e}")]
    NotHermitian { deviation: f64, tol: f64 },

    #[error("trace is {trace}, expected 1 within {tol:e}")]
    InvalidTrace { trace: f64, tol: f64 },

    #[error("negative eigenvalue {min_eigenvalue:e} below -{tol:e}")]
    NegativeEigenvalue { min_eigenvalue: f64, tol: f64 },

    #[error("state vector has norm {norm}, expected 1")]
    NotNormalized { norm: f64 },

    #[error("eigensolver failed for dimension {dim} (residual {residual:e})")]
    EigenNoConvergence { dim: usize, residual: f64 },

    #[error("constraint observable has negative eigenvalue {0:e}")]
    NotPositive(f64),

    #[error("constraint observable is constant (spectral spread {0:e})")]
    ConstantObservable(f64),

    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("no weight on the leading {0} eigenvectors")]
    ZeroMass(usize),

    #[error("Gibbs weights underflow at beta = {beta}; use a smaller beta")]
    GibbsUnderflow { beta: f64 },

    #[error("dimension {dim} exceeds cap {cap} (set QCAP_DIM_CAP to raise it)")]
    DimensionCap { dim: usize, cap: usize },

    #[error("Kraus family is not trace preserving: defect {defect:e} exceeds {tol:e}")]
    NotTracePreserving { defect: f64, tol: f64 },

    #[error(
        "Gaussian channel defect {defect:e} exceeds 1e-6; increase buffer or quadrature nodes"
    )]
    GaussianDefect { defect: f64 },

    #[error("channel has no Kraus operators")]
    EmptyChannel,

    #[error(
        "infeasible constraint: E = {energy} is below the minimal eigenvalue {min_eigenvalue}"
    )]
    Infeasible { energy: f64, min_eigenvalue: f64 },

    #[error("bisection could not bracket: {0}")]
    Bracketing(String),

    #[error("cross-check {what} failed: routes differ by {difference:e} (tol {tol:e})")]
    CrossCheck {
        what: &'static str,
        difference: f64,
        tol: f64,
    },

    #[error("ensemble has no members")]
    EmptyEnsemble,

    #[error("invalid ensemble probabilities: {0}")]
    InvalidProbabilities(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for failures caused by the inputs (bad shapes, infeasible
    /// constraints, out-of-range parameters), false for numerical or
    /// internal-consistency failures.
    pub fn is_input_error(&self) -> bool {
        !matches!(
            self,
            Error::EigenNoConvergence { .. } | Error::Bracketing(_) | Error::CrossCheck { .. }
        )
    }
}
