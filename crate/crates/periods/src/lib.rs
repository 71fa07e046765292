//! Frobenius eigenvectors ("periods") of (φ, Γ)-modules with certified
//! dimension brackets, saturation tests and the finite-slope test over
//! artinian bases.

pub mod error;
pub mod finite_slope;
mod formal;
pub mod solve;
pub mod threshold;

pub use error::PeriodError;
pub use finite_slope::{finite_slope_test, FiniteSlopeVerdict};
pub use solve::{eigen_residual, order_at, rank_at, saturation_test, solve_period, solve_period_at, PeriodSolution, DEFAULT_TARGET, SLACK};
pub use threshold::{frobenius_slopes, min_slope, slope_threshold};

pub type PeriodSolutionQp = PeriodSolution<padic_core::Padic>;
