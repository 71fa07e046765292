//! Overconvergent Laurent series on closed annuli, their Frobenius and
//! Γ actions, and the localization maps into K_n[[t]] ⊗ S.

pub mod actions;
pub mod dif;
pub mod element;
pub mod error;
pub mod special;

pub use actions::{chi_gamma0, chi_omega, gamma, gamma0, gamma_int, omega, phi, phi_iter};
pub use dif::{iota, t_order, DifElement, KnS, Localizer, TOrderReport};
pub use element::{add_bound, min_bound, Annulus, RobbaElement, W};
pub use error::RobbaError;
pub use special::{log_tail_bound, phi_q, q_element, t_element, t_partial_product};

pub type RobbaQp = RobbaElement<padic_core::Padic>;
pub type DifQp = DifElement<padic_core::Padic>;
