use periods::PeriodError;
use phigamma::PhiGammaError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TriangError {
    #[error("Frobenius has a repeated eigenvalue")]
    RepeatedEigenvalues,
    #[error("value at position {0} is not an eigenvalue of the Frobenius")]
    NotEigenvalue(usize),
    #[error("ordering has {got} eigenvalues, dimension is {d}")]
    OrderingLength { got: usize, d: usize },
    #[error("invalid filtered module: {0}")]
    BadFiltration(String),
    #[error("filtration is not spanned by Frobenius eigenvectors: {0}")]
    NotSplit(String),
    #[error("m_{index} is not an eigenvector (residual floor {floor})")]
    NotEigenvector { index: usize, floor: String },
    #[error("chain expected: {0}")]
    ChainFailed(String),
    #[error(transparent)]
    Period(#[from] PeriodError),
}

impl From<PhiGammaError> for TriangError {
    fn from(e: PhiGammaError) -> Self {
        TriangError::Period(e.into())
    }
}

impl From<padic_core::PadicError> for TriangError {
    fn from(e: padic_core::PadicError) -> Self {
        TriangError::Period(e.into())
    }
}
