//! (φ, Γ)-modules over the truncated Robba ring: constructors, localization
//! to D_dif^{+,n}/(t^k), the Sen operator and Γ-invariants.

pub mod dif;
pub mod error;
pub mod module;
pub mod sen;

pub use dif::{DescentReport, DifModule, Invariants};
pub use error::PhiGammaError;
pub use module::{
    base_text, compare, invert_matrix, scalar_matrix, Agreement, CommutationReport, Frame, InvertibilityReport,
    PhiGammaModule, Provenance,
};
pub use sen::{SenData, SLACK};

pub type PhiGammaQp = PhiGammaModule<padic_core::Padic>;
pub type DifModuleQp = DifModule<padic_core::Padic>;
