//! Fixed absolute-precision p-adic numbers.
//!
//! A value is `unit * p^val + O(p^prec)`. Inexact units are reduced modulo
//! `p^(prec - val)` and coprime to `p`; a value whose valuation reaches its
//! precision is the zero of that precision. `prec == EXACT` marks exact
//! values. Prime-agnostic exact integers (`p == 0`) exist only so that
//! `Zero`/`One` can be implemented; they adopt the prime of whatever they
//! meet.

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::PadicError;
use crate::ring::{prec_add, v_p_big, Ring, Scalar, EXACT};

/// Relative precision of inverses of exact non-units.
const EXACT_INV_DIGITS: i64 = 64;

thread_local! {
    static POW_CACHE: RefCell<HashMap<(u32, u64), BigInt>> = RefCell::new(HashMap::new());
}

/// `p^e` as a big integer, cached per thread.
pub fn ppow(p: u32, e: u64) -> BigInt {
    if e < 512 {
        POW_CACHE.with(|c| {
            c.borrow_mut()
                .entry((p, e))
                .or_insert_with(|| BigInt::from(p).pow(e as u32))
                .clone()
        })
    } else {
        BigInt::from(p).pow(e as u32)
    }
}

#[derive(Clone)]
pub struct Padic {
    p: u32,
    val: i64,
    unit: BigInt,
    prec: i64,
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> BigInt {
    let g = a.extended_gcd(m);
    debug_assert!(g.gcd.is_one());
    g.x.mod_floor(m)
}

impl Padic {
    /// Normalizes `x * p^val + O(p^prec)`.
    fn normalize(p: u32, val: i64, x: BigInt, prec: i64) -> Padic {
        debug_assert!(p > 0);
        if x.is_zero() || (prec != EXACT && val >= prec) {
            return Padic::zero_at(p, prec);
        }
        let (k, u) = v_p_big(&x, p);
        let v = val + k;
        if prec == EXACT {
            return Padic { p, val: v, unit: u, prec };
        }
        if v >= prec {
            return Padic::zero_at(p, prec);
        }
        let m = ppow(p, (prec - v) as u64);
        Padic { p, val: v, unit: u.mod_floor(&m), prec }
    }

    /// The zero of absolute precision `prec`.
    pub fn zero_at(p: u32, prec: i64) -> Padic {
        Padic { p, val: prec, unit: BigInt::zero(), prec }
    }

    /// `x * p^val + O(p^prec)` for an arbitrary integer `x`.
    pub fn from_parts(p: u32, x: BigInt, val: i64, prec: i64) -> Padic {
        assert!(p >= 3 && p % 2 == 1, "odd prime required");
        Padic::normalize(p, val, x, prec)
    }

    /// The integer `x` to absolute precision `prec`.
    pub fn from_int(p: u32, x: i64, prec: i64) -> Padic {
        Padic::from_parts(p, BigInt::from(x), 0, prec)
    }

    pub fn from_bigint(p: u32, x: BigInt, prec: i64) -> Padic {
        Padic::from_parts(p, x, 0, prec)
    }

    /// The rational `n/d` to absolute precision `prec`.
    pub fn from_ratio(p: u32, n: &BigInt, d: &BigInt, prec: i64) -> Padic {
        assert!(!d.is_zero(), "zero denominator");
        if n.is_zero() {
            return Padic::zero_at(p, prec);
        }
        let (vn, un) = v_p_big(n, p);
        let (vd, ud) = v_p_big(d, p);
        let v = vn - vd;
        if prec == EXACT {
            assert!(ud.abs().is_one(), "exact p-adic with non-unit denominator");
            return Padic { p, val: v, unit: un * ud, prec };
        }
        if v >= prec {
            return Padic::zero_at(p, prec);
        }
        let m = ppow(p, (prec - v) as u64);
        let u = (un * mod_inverse(&ud.mod_floor(&m), &m)).mod_floor(&m);
        Padic { p, val: v, unit: u, prec }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn prec(&self) -> i64 {
        self.prec
    }

    pub fn is_exact(&self) -> bool {
        self.prec == EXACT
    }

    pub fn is_zero_p(&self) -> bool {
        self.unit.is_zero()
    }

    /// Valuation (`None` for zero at precision).
    pub fn val(&self) -> Option<i64> {
        if self.unit.is_zero() {
            None
        } else {
            Some(self.val)
        }
    }

    pub fn unit(&self) -> &BigInt {
        &self.unit
    }

    /// Relative precision (number of significant digits).
    pub fn rel_prec(&self) -> i64 {
        if self.prec == EXACT {
            EXACT
        } else if self.unit.is_zero() {
            0
        } else {
            self.prec - self.val
        }
    }

    fn adopt(&self, p: u32) -> Padic {
        if self.p != 0 || p == 0 {
            return self.clone();
        }
        Padic::normalize(p, 0, self.unit.clone(), EXACT)
    }

    fn common_prime(a: &Padic, b: &Padic) -> u32 {
        if a.p != 0 && b.p != 0 {
            assert_eq!(a.p, b.p, "mixing different primes");
        }
        a.p.max(b.p)
    }

    /// Reduces to absolute precision `min(self.prec, n)`.
    pub fn with_prec(&self, n: i64) -> Padic {
        if n >= self.prec || self.p == 0 {
            return self.clone();
        }
        if self.unit.is_zero() {
            return Padic::zero_at(self.p, n);
        }
        Padic::normalize(self.p, self.val, self.unit.clone(), n)
    }

    /// Balanced representative of the unit part, used for display.
    fn balanced_unit(&self) -> BigInt {
        if self.prec == EXACT || self.unit.is_zero() {
            return self.unit.clone();
        }
        let m = ppow(self.p, (self.prec - self.val) as u64);
        let half: BigInt = &m >> 1usize;
        if self.unit > half {
            &self.unit - m
        } else {
            self.unit.clone()
        }
    }

    pub fn pow_i(&self, e: i64) -> Padic {
        if e >= 0 {
            self.pow_u(e as u64)
        } else {
            self.inverse().expect("inverse of zero").pow_u((-e) as u64)
        }
    }

    /// Multiplicative inverse, `None` for zero at precision. Exact inputs
    /// other than ±p^v come back with 64 relative digits.
    pub fn inverse(&self) -> Option<Padic> {
        if self.unit.is_zero() {
            return None;
        }
        if self.prec == EXACT && self.unit.abs().is_one() {
            return Some(Padic { p: self.p, val: -self.val, unit: self.unit.clone(), prec: EXACT });
        }
        let rel = if self.prec == EXACT { EXACT_INV_DIGITS } else { self.prec - self.val };
        let m = ppow(self.p, rel as u64);
        let u = mod_inverse(&self.unit, &m);
        Some(Padic { p: self.p, val: -self.val, unit: u, prec: rel - self.val })
    }

    /// Checked arithmetic surface: reports division by zero and results
    /// whose absolute precision would be nonpositive.
    pub fn checked_inv(&self) -> Result<Padic, PadicError> {
        let r = self.inverse().ok_or(PadicError::DivisionByZero)?;
        Self::check_prec(r)
    }

    pub fn checked_add(&self, o: &Padic) -> Result<Padic, PadicError> {
        Self::check_prec(self.clone() + o.clone())
    }

    pub fn checked_mul(&self, o: &Padic) -> Result<Padic, PadicError> {
        Self::check_prec(self.clone() * o.clone())
    }

    fn check_prec(r: Padic) -> Result<Padic, PadicError> {
        if r.prec != EXACT && r.prec <= 0 {
            Err(PadicError::PrecisionExhausted { prec: r.prec })
        } else {
            Ok(r)
        }
    }

    /// Multiplication by `p^k` (lossless).
    pub fn shift(&self, k: i64) -> Padic {
        if self.p == 0 {
            panic!("shift of a prime-agnostic integer");
        }
        if self.unit.is_zero() {
            return Padic::zero_at(self.p, prec_add(self.prec, k));
        }
        Padic { p: self.p, val: self.val + k, unit: self.unit.clone(), prec: prec_add(self.prec, k) }
    }

    /// Residue modulo `p^e` of a p-adic integer.
    pub fn residue(&self, e: u32) -> Option<BigInt> {
        let m = ppow(self.p, e as u64);
        if self.unit.is_zero() {
            return if self.prec >= e as i64 { Some(BigInt::zero()) } else { None };
        }
        if self.val < 0 || (self.prec != EXACT && self.prec < e as i64) {
            return None;
        }
        Some((&self.unit * ppow(self.p, self.val as u64)).mod_floor(&m))
    }

    /// Teichmüller representative of the residue of a unit.
    pub fn teichmuller(&self) -> Padic {
        assert!(self.val == 0 && !self.unit.is_zero(), "teichmuller of non-unit");
        let prec = if self.prec == EXACT { 64 } else { self.prec };
        let r = self.residue(1).expect("unit residue");
        let mut x = Padic::from_bigint(self.p, r, prec);
        for _ in 0..prec.max(1) {
            let y = x.pow_u(self.p as u64);
            if (y.clone() - x.clone()).vanishes() {
                return y;
            }
            x = y;
        }
        x
    }

    /// Logarithm of a unit, defined as log of its principal-unit part.
    pub fn log(&self) -> Option<Padic> {
        if self.unit.is_zero() || self.val != 0 {
            return None;
        }
        let w = self.teichmuller();
        let u = self.clone() * w.inverse()?;
        let x = u.clone() - u.one_like();
        if x.vanishes() {
            return Some(Padic::zero_at(self.p, self.prec));
        }
        let vx = x.val;
        let prec = self.prec;
        let mut acc = Padic::zero_at(self.p, prec);
        let mut pw = x.clone();
        let mut m: i64 = 1;
        loop {
            // terms x^m/m have valuation >= m*vx - log_p(m)
            let bound = m * vx - ((m as f64).ln() / (self.p as f64).ln()).floor() as i64;
            if bound >= prec && m > 1 {
                break;
            }
            let term = pw.div_int(&BigInt::from(m));
            if m % 2 == 1 {
                acc = acc + term;
            } else {
                acc = acc - term;
            }
            pw = pw * x.clone();
            m += 1;
        }
        Some(acc.with_prec(prec))
    }

    /// Exponential of an element of valuation at least 1.
    pub fn exp(&self) -> Option<Padic> {
        if !self.unit.is_zero() && self.val < 1 {
            return None;
        }
        let prec = self.prec;
        let mut acc = self.one_like().with_prec(prec);
        if self.unit.is_zero() {
            return Some(acc);
        }
        let mut term = self.one_like();
        let mut m: i64 = 1;
        loop {
            term = (term * self.clone()).div_int(&BigInt::from(m));
            if term.vanishes() || term.val_floor() >= prec {
                break;
            }
            acc = acc + term.clone();
            m += 1;
        }
        Some(acc)
    }

    /// Integer representative `m` with value `m * p^v`, for printing.
    pub fn parts(&self) -> (BigInt, i64, i64) {
        if self.unit.is_zero() {
            (BigInt::zero(), 0, self.prec)
        } else {
            (self.balanced_unit(), self.val, self.prec)
        }
    }
}

impl PartialEq for Padic {
    fn eq(&self, other: &Self) -> bool {
        (self.clone() - other.clone()).vanishes()
    }
}

impl Add for Padic {
    type Output = Padic;
    fn add(self, o: Padic) -> Padic {
        let p = Padic::common_prime(&self, &o);
        if p == 0 {
            return Padic { p: 0, val: 0, unit: self.unit + o.unit, prec: EXACT };
        }
        let a = self.adopt(p);
        let b = o.adopt(p);
        let prec = a.prec.min(b.prec);
        if a.unit.is_zero() {
            return b.with_prec(prec);
        }
        if b.unit.is_zero() {
            return a.with_prec(prec);
        }
        let v = a.val.min(b.val);
        let mut x = BigInt::zero();
        for t in [&a, &b] {
            if prec != EXACT && t.val >= prec {
                continue;
            }
            x += &t.unit * ppow(p, (t.val - v) as u64);
        }
        Padic::normalize(p, v, x, prec)
    }
}

impl Sub for Padic {
    type Output = Padic;
    fn sub(self, o: Padic) -> Padic {
        self + (-o)
    }
}

impl Neg for Padic {
    type Output = Padic;
    fn neg(self) -> Padic {
        if self.p == 0 || self.prec == EXACT || self.unit.is_zero() {
            return Padic { unit: -self.unit, ..self };
        }
        let m = ppow(self.p, (self.prec - self.val) as u64);
        Padic { unit: m - &self.unit, ..self }
    }
}

impl Mul for Padic {
    type Output = Padic;
    fn mul(self, o: Padic) -> Padic {
        let p = Padic::common_prime(&self, &o);
        if p == 0 {
            return Padic { p: 0, val: 0, unit: self.unit * o.unit, prec: EXACT };
        }
        let a = self.adopt(p);
        let b = o.adopt(p);
        let va = a.val_floor();
        let vb = b.val_floor();
        let prec = prec_add(a.prec, vb).min(prec_add(b.prec, va));
        if a.unit.is_zero() || b.unit.is_zero() {
            return Padic::zero_at(p, prec);
        }
        Padic::normalize(p, a.val + b.val, a.unit * b.unit, prec)
    }
}

impl Div for Padic {
    type Output = Padic;
    fn div(self, o: Padic) -> Padic {
        self * o.inverse().expect("division by zero")
    }
}

impl Zero for Padic {
    fn zero() -> Padic {
        Padic { p: 0, val: 0, unit: BigInt::zero(), prec: EXACT }
    }
    fn is_zero(&self) -> bool {
        self.unit.is_zero()
    }
}

impl One for Padic {
    fn one() -> Padic {
        Padic { p: 0, val: 0, unit: BigInt::one(), prec: EXACT }
    }
}

impl Ring for Padic {
    fn zero_like(&self) -> Self {
        if self.p == 0 {
            return Padic::zero();
        }
        Padic::zero_at(self.p, EXACT)
    }
    fn one_like(&self) -> Self {
        if self.p == 0 {
            return Padic::one();
        }
        Padic { p: self.p, val: 0, unit: BigInt::one(), prec: EXACT }
    }
    fn vanishes(&self) -> bool {
        self.unit.is_zero()
    }
    fn is_unit(&self) -> bool {
        !self.unit.is_zero()
    }
    fn try_inv(&self) -> Option<Self> {
        self.inverse()
    }
    fn valuation(&self) -> Option<i64> {
        self.val()
    }
    fn val_floor(&self) -> i64 {
        if self.unit.is_zero() {
            self.prec
        } else {
            self.val
        }
    }
    fn abs_prec(&self) -> i64 {
        self.prec
    }
    fn cap_prec(&self, n: i64) -> Self {
        self.with_prec(n)
    }
    fn mul_int(&self, c: &BigInt) -> Self {
        if self.p == 0 {
            return Padic { p: 0, val: 0, unit: &self.unit * c, prec: EXACT };
        }
        if c.is_zero() {
            return Padic::zero_at(self.p, EXACT);
        }
        let (k, u) = v_p_big(c, self.p);
        if self.unit.is_zero() {
            return Padic::zero_at(self.p, prec_add(self.prec, k));
        }
        Padic::normalize(self.p, self.val + k, &self.unit * u, prec_add(self.prec, k))
    }
    fn div_int(&self, c: &BigInt) -> Self {
        assert!(!c.is_zero(), "division by zero integer");
        assert!(self.p != 0, "division of a prime-agnostic integer");
        let (k, u) = v_p_big(c, self.p);
        if self.unit.is_zero() {
            return Padic::zero_at(self.p, prec_add(self.prec, -k));
        }
        if self.prec == EXACT {
            assert!(u.abs().is_one(), "exact division by non-unit integer");
            return Padic { p: self.p, val: self.val - k, unit: &self.unit * u, prec: EXACT };
        }
        let rel = self.prec - self.val;
        let m = ppow(self.p, rel as u64);
        let inv = mod_inverse(&u.mod_floor(&m), &m);
        Padic::normalize(self.p, self.val - k, &self.unit * inv, self.prec - k)
    }
    fn int_like(&self, c: i64) -> Self {
        if self.p == 0 {
            return Padic { p: 0, val: 0, unit: BigInt::from(c), prec: EXACT };
        }
        Padic::normalize(self.p, 0, BigInt::from(c), EXACT)
    }
}

impl Scalar for Padic {
    fn prime(&self) -> u32 {
        self.p
    }
    fn ratio_like(&self, n: &BigInt, d: &BigInt) -> Self {
        assert!(self.p != 0, "ratio needs a prime");
        let prec = if self.prec == EXACT { 64 } else { self.prec.max(1) };
        Padic::from_ratio(self.p, n, d, prec)
    }
    fn log_unit(&self) -> Option<Self> {
        self.log()
    }
    fn teichmuller_generator(&self) -> Option<Self> {
        let prec = if self.prec == EXACT { 64 } else { self.prec.max(1) };
        let g = primitive_root(self.p);
        Some(Padic::from_int(self.p, g as i64, prec).teichmuller())
    }
    fn residue_mod_ppow(&self, e: u32) -> Option<BigInt> {
        self.residue(e)
    }
    fn to_rational(&self) -> Option<BigRational> {
        if self.unit.is_zero() {
            return Some(BigRational::zero());
        }
        let u = self.balanced_unit();
        Some(if self.val >= 0 {
            BigRational::from_integer(u * ppow(self.p, self.val as u64))
        } else {
            BigRational::new(u, ppow(self.p, (-self.val) as u64))
        })
    }
}

/// Smallest primitive root modulo an odd prime.
pub fn primitive_root(p: u32) -> u32 {
    let phi = p - 1;
    let mut factors = vec![];
    let mut n = phi;
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            factors.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        factors.push(n);
    }
    (2..p)
        .find(|&g| factors.iter().all(|&q| modpow(g as u64, (phi / q) as u64, p as u64) != 1))
        .unwrap_or(1)
}

fn modpow(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

impl fmt::Display for Padic {
    /// Serialization format `m*p^v!N` (`!inf` for exact values).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (m, v, n) = self.parts();
        if n == EXACT {
            write!(f, "{}*p^{}!inf", m, v)
        } else {
            write!(f, "{}*p^{}!{}", m, v, n)
        }
    }
}

impl fmt::Debug for Padic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.p == 0 {
            write!(f, "{}", self.unit)
        } else {
            write!(f, "{} [p={}]", self, self.p)
        }
    }
}

/// Parses `m*p^v!N` (whitespace allowed; the base may be written as `p` or
/// as the prime itself; `!inf` for exact). The prime comes from context.
pub fn parse_padic(p: u32, s: &str) -> Result<Padic, PadicError> {
    let bad = || PadicError::Parse(s.to_string());
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let (body, prec) = match t.split_once('!') {
        Some((b, n)) => {
            let prec = if n == "inf" { EXACT } else { n.parse::<i64>().map_err(|_| bad())? };
            (b.to_string(), prec)
        }
        None => return Err(bad()),
    };
    let (m, v) = match body.split_once('*') {
        Some((m, rest)) => {
            let (base, e) = rest.split_once('^').ok_or_else(bad)?;
            if base != "p" && base.parse::<u32>().ok() != Some(p) {
                return Err(bad());
            }
            (m.to_string(), e.parse::<i64>().map_err(|_| bad())?)
        }
        None => (body, 0),
    };
    let m = BigInt::from_str(&m).map_err(|_| bad())?;
    if prec == EXACT {
        if m.is_zero() {
            return Ok(Padic::zero_at(p, EXACT));
        }
        return Ok(Padic::normalize(p, v, m, EXACT));
    }
    Ok(Padic::from_parts(p, m, v, prec))
}

/// Working context: a prime and a default absolute precision.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Qp {
    pub p: u32,
    pub prec: i64,
}

impl Qp {
    pub fn new(p: u32, prec: i64) -> Qp {
        assert!(p >= 3 && p % 2 == 1 && is_prime(p), "odd prime required, got {p}");
        assert!(prec > 0, "precision must be positive");
        Qp { p, prec }
    }
    pub fn int(&self, x: i64) -> Padic {
        Padic::from_int(self.p, x, self.prec)
    }
    pub fn big(&self, x: BigInt) -> Padic {
        Padic::from_bigint(self.p, x, self.prec)
    }
    pub fn ratio(&self, n: i64, d: i64) -> Padic {
        Padic::from_ratio(self.p, &BigInt::from(n), &BigInt::from(d), self.prec)
    }
    pub fn rational(&self, q: &BigRational) -> Padic {
        Padic::from_ratio(self.p, q.numer(), q.denom(), self.prec)
    }
    pub fn zero(&self) -> Padic {
        Padic::zero_at(self.p, self.prec)
    }
    pub fn one(&self) -> Padic {
        self.int(1)
    }
    /// p^k exactly scaled into the context precision.
    pub fn p_pow(&self, k: i64) -> Padic {
        self.one().shift(k)
    }
    /// The primitive (p-1)-th root of unity used as χ(ω).
    pub fn teichmuller_generator(&self) -> Padic {
        self.int(primitive_root(self.p) as i64).teichmuller()
    }
    pub fn parse(&self, s: &str) -> Result<Padic, PadicError> {
        parse_padic(self.p, s)
    }
}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl Padic {
    /// Approximate rational value as f64 (diagnostics only).
    pub fn approx_f64(&self) -> f64 {
        self.to_rational()
            .and_then(|q| Some(q.numer().to_f64()? / q.denom().to_f64()?))
            .unwrap_or(f64::NAN)
    }
}
