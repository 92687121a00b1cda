use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("input error: {0}")]
    Input(String),
    #[error("Gram matrix is not positive definite (smallest pivot {min_pivot:e}, threshold {threshold:e})")]
    NotPositiveDefinite { min_pivot: f64, threshold: f64 },
    #[error("Gram matrix is not block Toeplitz (structure residual {0:e})")]
    NotToeplitz(f64),
    #[error("Gram matrix is not block Hankel (structure residual {0:e})")]
    NotHankel(f64),
    #[error("point {0} lies outside the admissible region")]
    AlphaOutOfRegion(String),
    #[error("disc reflection evaluated at zero")]
    EvalAtZero,
    #[error("matrix is singular at {0}")]
    SingularAtPoint(String),
    #[error("point {0} is not in the open region")]
    OutOfRegion(String),
    #[error("kind mismatch: {0}")]
    KindMismatch(String),
    #[error("inconsistent inputs: {0}")]
    InconsistentInputs(String),
    #[error("denominator Theta21*S+Theta22 is singular at {0}")]
    SingularDenominator(String),
    #[error("boundary density undefined at {0}: parameter has unit norm there")]
    BoundaryDegenerate(String),
    #[error("quadrature did not converge: last difference {last_diff:e} after {nodes} nodes")]
    Nonconvergence { last_diff: f64, nodes: usize },
    #[error("Schur parameter is not contractive (norm {0})")]
    NotContractive(f64),
    #[error("parameter violates the growth condition at infinity: {0}")]
    RestrictedClass(String),
    #[error("log-determinant integrand is singular at {0}")]
    IntegrandSingular(String),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::ShapeMismatch(_) | Error::Input(_) | Error::KindMismatch(_) => 1,
            Error::Nonconvergence { .. } => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
