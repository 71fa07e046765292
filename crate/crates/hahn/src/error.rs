use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HahnError {
    #[error("exponent {exponent} needs a denominator beyond p^{bound}")]
    DenominatorOverflow { exponent: String, bound: u32 },
    #[error("|alpha^-1| must be < 1 (got Gauss valuation {valuation:?} for alpha^-1)")]
    SlopeViolation { valuation: Option<i64> },
    #[error("equation has no solution; obstructions at {}", .obstructions.iter().map(|(i, v)| format!("{i} -> {v}")).collect::<Vec<_>>().join(", "))]
    NoSolution { obstructions: Vec<(String, String)> },
    #[error("s = {s} is outside (0, r]")]
    OutOfRange { s: String },
    #[error("parse error: {0}")]
    Parse(String),
}
