use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RobbaError {
    #[error("s = {s} lies outside the annulus")]
    OutOfAnnulus { s: String },
    #[error("level {n} is not admissible: r_n = {r} lies outside the annulus")]
    LevelOutOfRange { n: u32, r: String },
    #[error("window {window} too small: {what}")]
    WindowTooSmall { window: i64, what: String },
    #[error("element is not invertible on the annulus")]
    NotInvertible,
    #[error("Gamma action needs a p-adic unit exponent")]
    NonUnitExponent,
}
