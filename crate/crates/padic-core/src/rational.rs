//! Exact rationals carrying a p-adic valuation.
//!
//! `Rat<P>` is the exact oracle scalar: every identity that holds over Q_p
//! for rational data can be checked with no precision loss. Logarithms are
//! not representable, so Sen computations need [`crate::Padic`].

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::ring::{v_p_big, Ring, Scalar, EXACT};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Rat<const P: u32>(pub BigRational);

impl<const P: u32> Rat<P> {
    pub fn new(n: i64, d: i64) -> Self {
        Rat(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }
    pub fn int(n: i64) -> Self {
        Rat(BigRational::from_integer(BigInt::from(n)))
    }
    pub fn value(&self) -> &BigRational {
        &self.0
    }
}

impl<const P: u32> fmt::Debug for Rat<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl<const P: u32> fmt::Display for Rat<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl<const P: u32> Add for Rat<P> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Rat(self.0 + o.0)
    }
}
impl<const P: u32> Sub for Rat<P> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Rat(self.0 - o.0)
    }
}
impl<const P: u32> Mul for Rat<P> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Rat(self.0 * o.0)
    }
}
impl<const P: u32> Neg for Rat<P> {
    type Output = Self;
    fn neg(self) -> Self {
        Rat(-self.0)
    }
}
impl<const P: u32> Zero for Rat<P> {
    fn zero() -> Self {
        Rat(BigRational::zero())
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}
impl<const P: u32> One for Rat<P> {
    fn one() -> Self {
        Rat(BigRational::one())
    }
}

impl<const P: u32> Ring for Rat<P> {
    fn zero_like(&self) -> Self {
        Self::zero()
    }
    fn one_like(&self) -> Self {
        Self::one()
    }
    fn vanishes(&self) -> bool {
        self.0.is_zero()
    }
    fn is_unit(&self) -> bool {
        !self.0.is_zero()
    }
    fn try_inv(&self) -> Option<Self> {
        if self.0.is_zero() {
            None
        } else {
            Some(Rat(self.0.recip()))
        }
    }
    fn valuation(&self) -> Option<i64> {
        if self.0.is_zero() {
            return None;
        }
        Some(v_p_big(self.0.numer(), P).0 - v_p_big(self.0.denom(), P).0)
    }
    fn val_floor(&self) -> i64 {
        self.valuation().unwrap_or(EXACT)
    }
    fn abs_prec(&self) -> i64 {
        EXACT
    }
    fn cap_prec(&self, _n: i64) -> Self {
        self.clone()
    }
    fn mul_int(&self, c: &BigInt) -> Self {
        Rat(&self.0 * BigRational::from_integer(c.clone()))
    }
    fn div_int(&self, c: &BigInt) -> Self {
        Rat(&self.0 / BigRational::from_integer(c.clone()))
    }
}

impl<const P: u32> Scalar for Rat<P> {
    fn prime(&self) -> u32 {
        P
    }
    fn ratio_like(&self, n: &BigInt, d: &BigInt) -> Self {
        Rat(BigRational::new(n.clone(), d.clone()))
    }
    fn log_unit(&self) -> Option<Self> {
        if self.0.abs().is_one() {
            Some(Self::zero())
        } else {
            None
        }
    }
    fn teichmuller_generator(&self) -> Option<Self> {
        // The only rational roots of unity are ±1.
        if P == 3 {
            Some(Rat::int(-1))
        } else {
            None
        }
    }
    fn residue_mod_ppow(&self, e: u32) -> Option<BigInt> {
        if self.valuation().map_or(false, |v| v < 0) {
            return None;
        }
        let m = BigInt::from(P).pow(e);
        let d = self.0.denom().mod_floor(&m);
        let g = d.extended_gcd(&m);
        Some((self.0.numer() * g.x).mod_floor(&m))
    }
    fn to_rational(&self) -> Option<BigRational> {
        Some(self.0.clone())
    }
}
