//! Exact p-adic arithmetic: fixed-precision scalars, exact rational oracles,
//! cyclotomic residue rings K_n, truncated base algebras Q_p[z]/(z^m),
//! dense matrices, and continuous characters of Q_p^×.

pub mod character;
pub mod cyclo;
pub mod error;
pub mod linalg;
pub mod matrix;
pub mod newton;
pub mod padic;
pub mod rational;
pub mod ring;
pub mod trunc;

pub use character::Character;
pub use cyclo::{cyclo_degree, Cyclo};
pub use error::PadicError;
pub use matrix::Matrix;
pub use padic::{parse_padic, Padic, Qp};
pub use rational::Rat;
pub use ring::{prec_add, v_p_int, Ring, Scalar, EXACT};
pub use trunc::Trunc;

/// Base algebra S = Q[z]/(z^m) over a scalar field.
pub type Base<Q> = Trunc<Q>;
/// K_n ⊗ S, stored as z-polynomials with K_n coefficients.
pub type CycloBase<Q> = Trunc<Cyclo<Q>>;

pub type BaseQp = Base<Padic>;
pub type CharacterQp = Character<Padic>;
pub type Q3 = Rat<3>;
pub type Q5 = Rat<5>;
