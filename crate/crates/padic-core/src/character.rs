//! Continuous characters δ: Q_p^× → S^× of the form
//! δ(p) = p_value, δ(u) = u^k · exp(ν · log u) for u ∈ Z_p^×,
//! with ν nilpotent (ν ∈ zS). Taking ν = 0 gives the integer-weight
//! characters; ν lets a weight vary infinitesimally over Q_p[z]/(z^m).

use num_bigint::BigInt;

use crate::error::PadicError;
use crate::ring::{Ring, Scalar};
use crate::trunc::Trunc;

#[derive(Clone, Debug, PartialEq)]
pub struct Character<Q: Scalar> {
    pub p_value: Trunc<Q>,
    pub weight: i64,
    /// Nilpotent weight deformation; `None` means zero.
    pub nu: Option<Trunc<Q>>,
}

impl<Q: Scalar> Character<Q> {
    pub fn new(p_value: Trunc<Q>, weight: i64) -> Self {
        assert!(p_value.is_unit(), "δ(p) must be a unit of the base");
        Character { p_value, weight, nu: None }
    }

    /// Adds a nilpotent weight deformation `ν` (constant term must vanish).
    pub fn with_nu(mut self, nu: Trunc<Q>) -> Self {
        assert!(nu.constant_term().vanishes(), "weight deformation must be nilpotent");
        self.nu = if nu.vanishes() { None } else { Some(nu) };
        self
    }

    /// Unramified character with δ(p) = α.
    pub fn unramified(alpha: Trunc<Q>) -> Self {
        Character::new(alpha, 0)
    }

    pub fn trivial(like: &Trunc<Q>) -> Self {
        Character::new(like.one_like(), 0)
    }

    /// δ(p) = 1, δ(u) = u^j.
    pub fn weight_only(like: &Trunc<Q>, j: i64) -> Self {
        Character::new(like.one_like(), j)
    }

    pub fn base_order(&self) -> usize {
        self.p_value.order()
    }

    pub fn mul(&self, o: &Self) -> Self {
        let nu = match (&self.nu, &o.nu) {
            (None, None) => None,
            (Some(a), None) | (None, Some(a)) => Some(a.clone()),
            (Some(a), Some(b)) => Some(a.clone() + b.clone()).filter(|x| !x.vanishes()),
        };
        Character { p_value: self.p_value.clone() * o.p_value.clone(), weight: self.weight + o.weight, nu }
    }

    pub fn inv(&self) -> Self {
        Character {
            p_value: self.p_value.try_inv().expect("δ(p) is a unit"),
            weight: -self.weight,
            nu: self.nu.clone().map(|x| -x),
        }
    }

    pub fn div(&self, o: &Self) -> Self {
        self.mul(&o.inv())
    }

    pub fn pow(&self, e: i64) -> Self {
        let base = if e < 0 { self.inv() } else { self.clone() };
        let mut acc = Character::trivial(&self.p_value);
        for _ in 0..e.unsigned_abs() {
            acc = acc.mul(&base);
        }
        acc
    }

    pub fn is_trivial(&self) -> bool {
        self.weight == 0 && self.nu.is_none() && self.p_value.is_one()
    }

    /// Gauss valuation of δ(p).
    pub fn slope(&self) -> i64 {
        self.p_value.valuation().unwrap_or(0)
    }

    /// The generalized Hodge–Tate weight k + ν ∈ S.
    pub fn sen_weight(&self) -> Trunc<Q> {
        let k = self.p_value.int_like(self.weight);
        match &self.nu {
            None => k,
            Some(nu) => k + nu.clone(),
        }
    }

    /// δ(u) for a unit u of Z_p.
    pub fn eval_unit(&self, u: &Q) -> Result<Trunc<Q>, PadicError> {
        if u.valuation() != Some(0) {
            return Err(PadicError::NonUnitArgument);
        }
        let uk = if self.weight >= 0 {
            u.pow_u(self.weight as u64)
        } else {
            u.try_inv().ok_or(PadicError::DivisionByZero)?.pow_u(self.weight.unsigned_abs())
        };
        let m = self.base_order();
        let base = Trunc::constant(uk, m);
        match &self.nu {
            None => Ok(base),
            Some(nu) => {
                let l = u.log_unit().ok_or(PadicError::NoLogarithm)?;
                Ok(base * trunc_exp(&nu_scaled(nu, &l)))
            }
        }
    }

    /// δ(p^e · u).
    pub fn eval(&self, u: &Q, e: i64) -> Result<Trunc<Q>, PadicError> {
        let pv = if e >= 0 {
            self.p_value.pow_u(e as u64)
        } else {
            self.p_value.try_inv().ok_or(PadicError::DivisionByZero)?.pow_u(e.unsigned_abs())
        };
        Ok(pv * self.eval_unit(u)?)
    }
}

fn nu_scaled<Q: Scalar>(nu: &Trunc<Q>, l: &Q) -> Trunc<Q> {
    nu.map(|a| a.clone() * l.clone())
}

/// exp of a nilpotent element of a truncated ring.
pub fn trunc_exp<Q: Ring>(x: &Trunc<Q>) -> Trunc<Q> {
    let m = x.order();
    let mut acc = x.one_like();
    let mut term = x.one_like();
    for j in 1..m {
        term = (term * x.clone()).div_int(&BigInt::from(j));
        acc = acc + term.clone();
    }
    acc
}
