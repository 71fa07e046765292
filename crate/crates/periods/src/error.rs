use padic_core::PadicError;
use phigamma::PhiGammaError;
use robba::RobbaError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PeriodError {
    #[error("window {window} too small: residual floor {floor} below {required}")]
    WindowTooSmall { window: i64, floor: String, required: i64 },
    #[error("level {n} is not admissible: r_n = {r} lies outside the annulus")]
    LevelOutOfRange { n: u32, r: String },
    #[error("t-order {k} is below the injectivity threshold {k_min}")]
    BelowThreshold { k: usize, k_min: usize },
    #[error("period solving needs a power-series presentation (pole order {0})")]
    NotPowerSeries(i64),
    #[error("the constant term of the Frobenius matrix is singular")]
    SingularFrobenius,
    #[error("vector is not an eigenvector: {0}")]
    NotEigenvector(String),
    #[error("query needs an artinian base Q_p[z]/(z^m) with m >= 1")]
    BadBase,
    #[error(transparent)]
    PhiGamma(PhiGammaError),
    #[error(transparent)]
    Padic(#[from] PadicError),
}

impl From<PhiGammaError> for PeriodError {
    fn from(e: PhiGammaError) -> Self {
        match e {
            PhiGammaError::LevelOutOfRange { n, r } => PeriodError::LevelOutOfRange { n, r },
            e => PeriodError::PhiGamma(e),
        }
    }
}

impl From<RobbaError> for PeriodError {
    fn from(e: RobbaError) -> Self {
        PhiGammaError::from(e).into()
    }
}
