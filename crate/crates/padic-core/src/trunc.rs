//! Truncated polynomial rings R[x]/(x^m).
//!
//! Used for the artinian base algebra Q_p[z]/(z^m) and for t-adic
//! truncations K_n[[t]]/(t^k).

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;

use crate::ring::{Ring, EXACT};

#[derive(Clone)]
pub struct Trunc<R> {
    c: Vec<R>,
}

impl<R: Ring> Trunc<R> {
    /// Builds from coefficients; the truncation order is `c.len()`.
    pub fn new(c: Vec<R>) -> Self {
        assert!(!c.is_empty(), "truncation order must be positive");
        Trunc { c }
    }

    /// `r` as a constant of truncation order `m`.
    pub fn constant(r: R, m: usize) -> Self {
        let z = r.zero_like();
        let mut c = vec![z; m];
        c[0] = r;
        Trunc { c }
    }

    /// The variable `x`, using `one` to fix the coefficient ring.
    pub fn var(one: &R, m: usize) -> Self {
        let mut c = vec![one.zero_like(); m];
        if m > 1 {
            c[1] = one.one_like();
        }
        Trunc { c }
    }

    /// Pads or cuts coefficients to order `m`.
    pub fn from_slice(c: &[R], zero: &R, m: usize) -> Self {
        let mut v: Vec<R> = c.iter().take(m).cloned().collect();
        while v.len() < m {
            v.push(zero.zero_like());
        }
        Trunc { c: v }
    }

    pub fn order(&self) -> usize {
        self.c.len()
    }

    pub fn coeffs(&self) -> &[R] {
        &self.c
    }

    pub fn coeff(&self, i: usize) -> &R {
        &self.c[i]
    }

    pub fn into_coeffs(self) -> Vec<R> {
        self.c
    }

    pub fn constant_term(&self) -> &R {
        &self.c[0]
    }

    pub fn map<U: Ring>(&self, f: impl Fn(&R) -> U) -> Trunc<U> {
        Trunc { c: self.c.iter().map(f).collect() }
    }

    /// Changes the truncation order, dropping or zero-padding.
    pub fn resize(&self, m: usize) -> Self {
        Trunc::from_slice(&self.c, &self.c[0], m)
    }

    /// Multiplies by `x^j` (terms beyond the order are dropped).
    pub fn shift(&self, j: usize) -> Self {
        let m = self.order();
        let z = self.c[0].zero_like();
        let mut c = vec![z; m];
        for i in 0..m.saturating_sub(j) {
            c[i + j] = self.c[i].clone();
        }
        Trunc { c }
    }

    /// Index of the first nonvanishing coefficient (`order()` if none).
    pub fn leading_index(&self) -> usize {
        self.c.iter().position(|x| !x.vanishes()).unwrap_or(self.order())
    }

    /// Substitutes `x ↦ c·x`.
    pub fn scale_var(&self, s: &R) -> Self {
        let mut pw = s.one_like();
        let mut out = Vec::with_capacity(self.order());
        for a in &self.c {
            out.push(a.clone() * pw.clone());
            pw = pw * s.clone();
        }
        Trunc { c: out }
    }

    fn zip(self, o: Self, f: impl Fn(R, R) -> R) -> Self {
        assert_eq!(self.order(), o.order(), "truncation orders differ");
        Trunc { c: self.c.into_iter().zip(o.c).map(|(a, b)| f(a, b)).collect() }
    }
}

impl<R: Ring> PartialEq for Trunc<R> {
    fn eq(&self, o: &Self) -> bool {
        self.order() == o.order() && self.c.iter().zip(&o.c).all(|(a, b)| a == b)
    }
}

impl<R: Ring> fmt::Debug for Trunc<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.c.iter()).finish()
    }
}

impl<R: Ring> Add for Trunc<R> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        self.zip(o, |a, b| a + b)
    }
}

impl<R: Ring> Sub for Trunc<R> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self.zip(o, |a, b| a - b)
    }
}

impl<R: Ring> Neg for Trunc<R> {
    type Output = Self;
    fn neg(self) -> Self {
        Trunc { c: self.c.into_iter().map(|a| -a).collect() }
    }
}

impl<R: Ring> Mul for Trunc<R> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let m = self.order();
        assert_eq!(m, o.order(), "truncation orders differ");
        let z = self.c[0].zero_like();
        let mut c: Vec<R> = vec![z; m];
        for (k, ck) in c.iter_mut().enumerate() {
            let mut acc: Option<R> = None;
            for i in 0..=k {
                let term = self.c[i].clone() * o.c[k - i].clone();
                acc = Some(match acc {
                    None => term,
                    Some(a) => a + term,
                });
            }
            *ck = acc.unwrap();
        }
        Trunc { c }
    }
}

impl<R: Ring> Ring for Trunc<R> {
    fn zero_like(&self) -> Self {
        Trunc { c: vec![self.c[0].zero_like(); self.order()] }
    }
    fn one_like(&self) -> Self {
        Trunc::constant(self.c[0].one_like(), self.order())
    }
    fn vanishes(&self) -> bool {
        self.c.iter().all(|a| a.vanishes())
    }
    fn is_unit(&self) -> bool {
        self.c[0].is_unit()
    }
    fn try_inv(&self) -> Option<Self> {
        let u0 = self.c[0].try_inv()?;
        let m = self.order();
        let mut b: Vec<R> = Vec::with_capacity(m);
        b.push(u0.clone());
        for k in 1..m {
            let mut acc = self.c[k].clone() * b[0].clone();
            for i in 1..k {
                acc = acc + self.c[k - i].clone() * b[i].clone();
            }
            b.push(-(u0.clone() * acc));
        }
        Some(Trunc { c: b })
    }
    fn valuation(&self) -> Option<i64> {
        self.c.iter().filter_map(|a| a.valuation()).min()
    }
    fn val_floor(&self) -> i64 {
        self.c.iter().map(|a| a.val_floor()).min().unwrap_or(EXACT)
    }
    fn abs_prec(&self) -> i64 {
        self.c.iter().map(|a| a.abs_prec()).min().unwrap_or(EXACT)
    }
    fn cap_prec(&self, n: i64) -> Self {
        self.map(|a| a.cap_prec(n))
    }
    fn mul_int(&self, k: &BigInt) -> Self {
        self.map(|a| a.mul_int(k))
    }
    fn div_int(&self, k: &BigInt) -> Self {
        self.map(|a| a.div_int(k))
    }
    fn int_like(&self, k: i64) -> Self {
        Trunc::constant(self.c[0].int_like(k), self.order())
    }
}

/// Polynomial evaluation helpers on coefficient vectors (lowest degree first).
pub fn poly_eval<R: Ring>(coeffs: &[R], x: &R) -> R {
    let mut acc = x.zero_like();
    for c in coeffs.iter().rev() {
        acc = acc * x.clone() + c.clone();
    }
    acc
}
