use padic_core::PadicError;
use robba::RobbaError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PhiGammaError {
    #[error("exterior power {i} of a rank-{d} module")]
    RankOutOfRange { i: usize, d: usize },
    #[error("matrix is not invertible: {0}")]
    NotInvertible(String),
    #[error("level {n} is not admissible: r_n = {r} lies outside the annulus")]
    LevelOutOfRange { n: u32, r: String },
    #[error("log of the Gamma-matrix does not converge (|G - 1| >= 1 after {powers} p-th powers)")]
    NonConvergent { powers: u32 },
    #[error("0 is not a root of the Sen polynomial (constant term has valuation {valuation:?})")]
    ZeroNotARoot { valuation: Option<i64> },
    #[error("no torsion generator of Gamma is representable over this scalar type")]
    NoTorsionGenerator,
    #[error("operation needs a logarithm, which this scalar type cannot represent")]
    NoLogarithm,
    #[error("incompatible modules: {0}")]
    Incompatible(String),
    #[error("window {window} too small: {what}")]
    WindowTooSmall { window: i64, what: String },
    #[error(transparent)]
    Robba(RobbaError),
    #[error(transparent)]
    Padic(#[from] PadicError),
}

impl From<RobbaError> for PhiGammaError {
    fn from(e: RobbaError) -> Self {
        match e {
            RobbaError::LevelOutOfRange { n, r } => PhiGammaError::LevelOutOfRange { n, r },
            RobbaError::WindowTooSmall { window, what } => PhiGammaError::WindowTooSmall { window, what },
            e => PhiGammaError::Robba(e),
        }
    }
}
