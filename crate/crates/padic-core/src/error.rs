use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PadicError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("precision exhausted (result precision {prec})")]
    PrecisionExhausted { prec: i64 },
    #[error("argument is not a p-adic unit")]
    NonUnitArgument,
    #[error("cannot parse p-adic literal `{0}`")]
    Parse(String),
    #[error("operation needs a logarithm, which this scalar type cannot represent")]
    NoLogarithm,
}
