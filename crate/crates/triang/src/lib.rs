//! Refinements, chains of wedge eigenvectors and triangulations of
//! (φ, Γ)-modules over the Robba ring.

mod build;
mod chain;
mod error;
mod filtered;
mod locus;

pub use build::{build_trianguline, transport, unimodular, Chain, Scramble};
pub use chain::{chain_test, extract_triangulation, ChainFailure, ChainReport, Triangulation, EIGEN_FLOOR};
pub use error::TriangError;
pub use filtered::{
    family_parameters, permutations, refinement_parameters, wedge_characters, Classification, FilteredPhiModule, Refinement,
};
pub use locus::{default_cutoff, locus_scan, scan_point, solve_chain, Criterion, PointReport, ScanPoint};

pub type FilteredPhiModuleQp = FilteredPhiModule<padic_core::Padic>;
pub type RefinementQp = Refinement<padic_core::Padic>;
pub type ChainQp = Chain<padic_core::Padic>;
