//! Ring abstractions shared by every layer of the toolkit.
//!
//! `Ring` is the minimal interface the generic containers (truncated series,
//! cyclotomic residues, matrices) need. `Scalar` adds the field-level
//! operations that only make sense for the base coefficients.

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Absolute precision marker for exact values.
pub const EXACT: i64 = i64::MAX;

/// Adds two precision/valuation bounds, keeping `EXACT` absorbing.
pub fn prec_add(a: i64, b: i64) -> i64 {
    if a == EXACT || b == EXACT {
        EXACT
    } else {
        a.saturating_add(b)
    }
}

/// Commutative ring with enough precision bookkeeping for p-adic work.
pub trait Ring:
    Clone
    + Debug
    + PartialEq
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    /// Additive identity in the same ambient ring as `self`.
    fn zero_like(&self) -> Self;
    /// Multiplicative identity in the same ambient ring as `self`.
    fn one_like(&self) -> Self;
    /// True when the element is zero at its working precision.
    fn vanishes(&self) -> bool;
    /// True when the element is invertible.
    fn is_unit(&self) -> bool;
    fn try_inv(&self) -> Option<Self>;
    /// Gauss valuation of the element, `None` when it vanishes.
    fn valuation(&self) -> Option<i64>;
    /// Certified lower bound for the valuation of the true value.
    fn val_floor(&self) -> i64;
    /// Absolute precision (minimum over components); `EXACT` if exact.
    fn abs_prec(&self) -> i64;
    /// Lowers the absolute precision to at most `n`.
    fn cap_prec(&self, n: i64) -> Self;
    /// Multiplication by an exact integer.
    fn mul_int(&self, c: &BigInt) -> Self;
    /// Division by a nonzero exact integer (the rings here are Q-algebras).
    fn div_int(&self, c: &BigInt) -> Self;

    fn int_like(&self, c: i64) -> Self {
        self.one_like().mul_int(&BigInt::from(c))
    }

    fn is_one(&self) -> bool {
        (self.clone() - self.one_like()).vanishes()
    }

    fn pow_u(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = self.one_like();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            e >>= 1;
            if e > 0 {
                base = base.clone() * base;
            }
        }
        acc
    }
}

/// Base coefficient field: Q_p at finite precision, or an exact model of Q
/// carrying the p-adic valuation.
pub trait Scalar: Ring + Zero + One {
    /// The prime whose valuation the scalar reports (0 if undetermined).
    fn prime(&self) -> u32;
    /// The rational `n/d` in the same ambient field as `self`.
    fn ratio_like(&self, n: &BigInt, d: &BigInt) -> Self;
    /// p-adic logarithm of a unit (trivial on roots of unity), if representable.
    fn log_unit(&self) -> Option<Self>;
    /// A primitive (p-1)-th root of unity, if representable.
    fn teichmuller_generator(&self) -> Option<Self>;
    /// Residue of a p-adic unit modulo p^e as a nonnegative integer.
    fn residue_mod_ppow(&self, e: u32) -> Option<BigInt>;
    /// Best rational representative (exact for exact scalars).
    fn to_rational(&self) -> Option<BigRational>;
}

pub(crate) fn v_p_big(x: &BigInt, p: u32) -> (i64, BigInt) {
    use num_integer::Integer;
    debug_assert!(!x.is_zero());
    let pb = BigInt::from(p);
    let mut k = 0i64;
    let mut y = x.clone();
    loop {
        let (q, r) = y.div_rem(&pb);
        if !r.is_zero() {
            break;
        }
        y = q;
        k += 1;
    }
    (k, y)
}

/// p-adic valuation of a nonzero integer.
pub fn v_p_int(x: &BigInt, p: u32) -> i64 {
    v_p_big(x, p).0
}
