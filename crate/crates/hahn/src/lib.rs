//! Finite-support rational-exponent series over S with the Frobenius
//! u ↦ u^p, and the certified solver for φ(b) − α·b = a.

pub mod element;
pub mod error;
pub mod solver;

pub use element::{parse_rational, rat, Coefficient, HahnElement, Unramified};
pub use error::HahnError;
pub use solver::{check_slope, criterion_check, frobenius_constants, solve_frobenius, CriterionReport, FrobeniusCertificate, SlopeData};

pub type HahnQp = HahnElement<padic_core::Trunc<padic_core::Padic>>;
