//! Finite sums Σ a_i u^i with rational exponents i whose denominators
//! divide p^M, coefficients in S (or S ⊗ an unramified layer), and the
//! Frobenius u ↦ u^p.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use padic_core::{Ring, Scalar, Trunc};

use crate::error::HahnError;

/// Coefficient rings with an isometric Frobenius φ_L ⊗ id over S.
pub trait Coefficient: Ring {
    type Q: Scalar;
    fn frob(&self) -> Self;
    /// Order of the Frobenius on the coefficient ring.
    fn frob_period(&self) -> u32;
    fn frob_inv(&self) -> Self {
        let mut x = self.clone();
        for _ in 1..self.frob_period() {
            x = x.frob();
        }
        x
    }
    /// Multiplication by an element of S.
    fn scale(&self, s: &Trunc<Self::Q>) -> Self;
    /// The image of `s` in the same ring as `self`.
    fn embed(&self, s: &Trunc<Self::Q>) -> Self {
        self.one_like().scale(s)
    }
}

impl<Q: Scalar> Coefficient for Trunc<Q> {
    type Q = Q;
    fn frob(&self) -> Self {
        self.clone()
    }
    fn frob_period(&self) -> u32 {
        1
    }
    fn scale(&self, s: &Trunc<Q>) -> Self {
        self.clone() * s.clone()
    }
}

/// S ⊗ Q_p[x]/(x^N − 1) with N = p^f − 1 and Frobenius x ↦ x^p. The algebra
/// is a product of unramified extensions of degree dividing f; norms are
/// Gauss norms on the basis x^k, which the Frobenius permutes.
#[derive(Clone, PartialEq)]
pub struct Unramified<Q: Scalar> {
    p: u32,
    f: u32,
    c: Vec<Trunc<Q>>,
}

impl<Q: Scalar> Unramified<Q> {
    pub fn constant(s: Trunc<Q>, p: u32, f: u32) -> Self {
        assert!(f >= 1);
        let n = (p as usize).pow(f) - 1;
        let mut c = vec![s.zero_like(); n];
        c[0] = s;
        Unramified { p, f, c }
    }

    /// x^k times `s`.
    pub fn basis(s: Trunc<Q>, p: u32, f: u32, k: usize) -> Self {
        let mut u = Unramified::constant(s.zero_like(), p, f);
        let n = u.c.len();
        u.c[k % n] = s;
        u
    }

    pub fn coords(&self) -> &[Trunc<Q>] {
        &self.c
    }

    pub fn degree(&self) -> u32 {
        self.f
    }
}

impl<Q: Scalar> fmt::Debug for Unramified<Q> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .c
            .iter()
            .enumerate()
            .filter(|(_, a)| !a.vanishes())
            .map(|(k, a)| format!("{a:?}*x^{k}"))
            .collect();
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

impl<Q: Scalar> Add for Unramified<Q> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let c = self.c.into_iter().zip(o.c).map(|(a, b)| a + b).collect();
        Unramified { p: self.p, f: self.f, c }
    }
}

impl<Q: Scalar> Sub for Unramified<Q> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        let c = self.c.into_iter().zip(o.c).map(|(a, b)| a - b).collect();
        Unramified { p: self.p, f: self.f, c }
    }
}

impl<Q: Scalar> Neg for Unramified<Q> {
    type Output = Self;
    fn neg(self) -> Self {
        Unramified { p: self.p, f: self.f, c: self.c.into_iter().map(|a| -a).collect() }
    }
}

impl<Q: Scalar> Mul for Unramified<Q> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let n = self.c.len();
        let mut c = vec![self.c[0].zero_like(); n];
        for (i, a) in self.c.iter().enumerate() {
            if a.vanishes() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                if !b.vanishes() {
                    c[(i + j) % n] = c[(i + j) % n].clone() + a.clone() * b.clone();
                }
            }
        }
        Unramified { p: self.p, f: self.f, c }
    }
}

impl<Q: Scalar> Ring for Unramified<Q> {
    fn zero_like(&self) -> Self {
        Unramified::constant(self.c[0].zero_like(), self.p, self.f)
    }
    fn one_like(&self) -> Self {
        Unramified::constant(self.c[0].one_like(), self.p, self.f)
    }
    fn vanishes(&self) -> bool {
        self.c.iter().all(|a| a.vanishes())
    }
    /// Only elements of S·1 are recognized as units.
    fn is_unit(&self) -> bool {
        self.try_inv().is_some()
    }
    fn try_inv(&self) -> Option<Self> {
        if self.c[1..].iter().any(|a| !a.vanishes()) {
            return None;
        }
        Some(Unramified::constant(self.c[0].try_inv()?, self.p, self.f))
    }
    fn valuation(&self) -> Option<i64> {
        self.c.iter().filter_map(|a| a.valuation()).min()
    }
    fn val_floor(&self) -> i64 {
        self.c.iter().map(|a| a.val_floor()).min().unwrap()
    }
    fn abs_prec(&self) -> i64 {
        self.c.iter().map(|a| a.abs_prec()).min().unwrap()
    }
    fn cap_prec(&self, n: i64) -> Self {
        Unramified { p: self.p, f: self.f, c: self.c.iter().map(|a| a.cap_prec(n)).collect() }
    }
    fn mul_int(&self, k: &BigInt) -> Self {
        Unramified { p: self.p, f: self.f, c: self.c.iter().map(|a| a.mul_int(k)).collect() }
    }
    fn div_int(&self, k: &BigInt) -> Self {
        Unramified { p: self.p, f: self.f, c: self.c.iter().map(|a| a.div_int(k)).collect() }
    }
}

impl<Q: Scalar> Coefficient for Unramified<Q> {
    type Q = Q;
    fn frob(&self) -> Self {
        let n = self.c.len();
        let mut c = vec![self.c[0].zero_like(); n];
        for (k, a) in self.c.iter().enumerate() {
            c[(k * self.p as usize) % n] = a.clone();
        }
        Unramified { p: self.p, f: self.f, c }
    }
    fn frob_period(&self) -> u32 {
        self.f
    }
    fn scale(&self, s: &Trunc<Q>) -> Self {
        Unramified { p: self.p, f: self.f, c: self.c.iter().map(|a| a.clone() * s.clone()).collect() }
    }
}

/// An element of the extended ring on radius r: finitely many terms.
#[derive(Clone)]
pub struct HahnElement<C: Coefficient> {
    p: u32,
    den_bound: u32,
    radius: BigRational,
    like: C,
    terms: BTreeMap<BigRational, C>,
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn p_power_denominator(i: &BigRational, p: u32) -> Option<u32> {
    let mut d = i.denom().clone();
    let pb = BigInt::from(p);
    let mut e = 0;
    while d.is_multiple_of(&pb) {
        d /= &pb;
        e += 1;
    }
    d.is_one().then_some(e)
}

impl<C: Coefficient> HahnElement<C> {
    pub fn zero(p: u32, den_bound: u32, radius: BigRational, like: &C) -> Self {
        assert!(radius.is_positive(), "radius must be positive");
        HahnElement { p, den_bound, radius, like: like.zero_like(), terms: BTreeMap::new() }
    }

    pub fn from_terms(
        p: u32,
        den_bound: u32,
        radius: BigRational,
        like: &C,
        terms: Vec<(BigRational, C)>,
    ) -> Result<Self, HahnError> {
        let mut h = HahnElement::zero(p, den_bound, radius, like);
        for (i, a) in terms {
            h.check_exponent(&i)?;
            let slot = h.terms.entry(i).or_insert_with(|| like.zero_like());
            *slot = slot.clone() + a;
        }
        Ok(h.normalize())
    }

    /// `a·u^i` in the same ring as `self`.
    pub fn monomial(&self, i: BigRational, a: C) -> Result<Self, HahnError> {
        HahnElement::from_terms(self.p, self.den_bound, self.radius.clone(), &self.like, vec![(i, a)])
    }

    fn check_exponent(&self, i: &BigRational) -> Result<(), HahnError> {
        match p_power_denominator(i, self.p) {
            Some(e) if e <= self.den_bound => Ok(()),
            _ => Err(HahnError::DenominatorOverflow { exponent: i.to_string(), bound: self.den_bound }),
        }
    }

    fn normalize(mut self) -> Self {
        self.terms.retain(|_, a| !a.vanishes());
        self
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    pub fn den_bound(&self) -> u32 {
        self.den_bound
    }

    pub fn radius(&self) -> &BigRational {
        &self.radius
    }

    pub fn like(&self) -> &C {
        &self.like
    }

    pub fn with_radius(&self, r: BigRational) -> Self {
        let mut h = self.clone();
        h.radius = r;
        h
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BigRational, &C)> {
        self.terms.iter()
    }

    pub fn support(&self) -> Vec<BigRational> {
        self.terms.keys().cloned().collect()
    }

    pub fn coeff(&self, i: &BigRational) -> C {
        self.terms.get(i).cloned().unwrap_or_else(|| self.like.zero_like())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// w_s = min v(a_i) + s·i, `None` for +∞.
    pub fn norm(&self, s: &BigRational) -> Result<Option<BigRational>, HahnError> {
        if !s.is_positive() || *s > self.radius {
            return Err(HahnError::OutOfRange { s: s.to_string() });
        }
        Ok(self.w_unchecked(s))
    }

    pub(crate) fn w_unchecked(&self, s: &BigRational) -> Option<BigRational> {
        self.terms
            .iter()
            .filter_map(|(i, a)| a.valuation().map(|v| BigRational::from_integer(BigInt::from(v)) + s * i))
            .min()
    }

    /// w_r at the element's own radius.
    pub fn w_r(&self) -> Option<BigRational> {
        self.w_unchecked(&self.radius)
    }

    /// φ(Σ a_i u^i) = Σ φ_L(a_i) u^{p i}; the radius becomes r/p.
    pub fn frob(&self) -> Self {
        let p = BigRational::from_integer(BigInt::from(self.p));
        let terms = self.terms.iter().map(|(i, a)| (i * &p, a.frob())).collect();
        HahnElement { terms, radius: &self.radius / &p, ..self.clone() }
    }

    /// φ^{-1}; fails when exponent denominators would leave p^M.
    pub fn frob_inv(&self) -> Result<Self, HahnError> {
        let p = BigRational::from_integer(BigInt::from(self.p));
        let mut terms = BTreeMap::new();
        for (i, a) in &self.terms {
            let j = i / &p;
            self.check_exponent(&j)?;
            terms.insert(j, a.frob_inv());
        }
        Ok(HahnElement { terms, radius: &self.radius * &p, ..self.clone() })
    }

    pub fn scale(&self, s: &Trunc<C::Q>) -> Self {
        let terms = self.terms.iter().map(|(i, a)| (i.clone(), a.scale(s))).collect();
        HahnElement { terms, ..self.clone() }.normalize()
    }

    pub fn cap_prec(&self, n: i64) -> Self {
        let terms = self.terms.iter().map(|(i, a)| (i.clone(), a.cap_prec(n))).collect();
        HahnElement { terms, ..self.clone() }.normalize()
    }

    fn merge_params(&self, o: &Self) -> (u32, BigRational) {
        assert_eq!(self.p, o.p, "mixing primes");
        (self.den_bound.max(o.den_bound), self.radius.clone().min(o.radius.clone()))
    }

    /// Equality at working precision.
    pub fn agrees_with(&self, o: &Self) -> bool {
        (self.clone() - o.clone()).is_zero()
    }

    /// Text form: `[(i, a), ...]` with i = num/den.
    pub fn to_text(&self) -> String {
        let parts: Vec<String> = self.terms.iter().map(|(i, a)| format!("({i}, {a:?})")).collect();
        format!("[{}]", parts.join(", "))
    }
}

impl<Q: Scalar> HahnElement<Trunc<Q>> {
    /// Parses `[(num/den, coeff), ...]` with rational coefficients.
    pub fn parse(p: u32, den_bound: u32, radius: BigRational, like: &Trunc<Q>, text: &str) -> Result<Self, HahnError> {
        let body = text.trim();
        let body = body.strip_prefix('[').and_then(|b| b.strip_suffix(']')).unwrap_or(body);
        let mut terms = Vec::new();
        for chunk in body.split(')') {
            let chunk = chunk.trim().trim_start_matches(',').trim();
            if chunk.is_empty() {
                continue;
            }
            let inner = chunk.strip_prefix('(').ok_or_else(|| HahnError::Parse(format!("expected '(' in {chunk:?}")))?;
            let (e, c) = inner.split_once(',').ok_or_else(|| HahnError::Parse(format!("expected 'exp, coeff' in {inner:?}")))?;
            let e = parse_rational(e)?;
            let c = parse_rational(c)?;
            let one = like.coeff(0);
            let a = Trunc::constant(one.ratio_like(c.numer(), c.denom()), like.order());
            terms.push((e, a));
        }
        HahnElement::from_terms(p, den_bound, radius, like, terms)
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational, HahnError> {
    let s = s.trim();
    let bad = || HahnError::Parse(format!("bad rational {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

impl<C: Coefficient> fmt::Debug for HahnElement<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (r = {}, M = {})", self.to_text(), self.radius, self.den_bound)
    }
}

impl<C: Coefficient> PartialEq for HahnElement<C> {
    fn eq(&self, o: &Self) -> bool {
        self.agrees_with(o)
    }
}

impl<C: Coefficient> Add for HahnElement<C> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let (m, r) = self.merge_params(&o);
        let mut terms = self.terms;
        for (i, a) in o.terms {
            let slot = terms.entry(i).or_insert_with(|| self.like.zero_like());
            *slot = slot.clone() + a;
        }
        HahnElement { p: self.p, den_bound: m, radius: r, like: self.like, terms }.normalize()
    }
}

impl<C: Coefficient> Neg for HahnElement<C> {
    type Output = Self;
    fn neg(self) -> Self {
        let terms = self.terms.into_iter().map(|(i, a)| (i, -a)).collect();
        HahnElement { terms, ..self }
    }
}

impl<C: Coefficient> Sub for HahnElement<C> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl<C: Coefficient> Mul for HahnElement<C> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let (m, r) = self.merge_params(&o);
        let mut terms: BTreeMap<BigRational, C> = BTreeMap::new();
        for (i, a) in &self.terms {
            for (j, b) in &o.terms {
                let slot = terms.entry(i + j).or_insert_with(|| self.like.zero_like());
                *slot = slot.clone() + a.clone() * b.clone();
            }
        }
        HahnElement { p: self.p, den_bound: m, radius: r, like: self.like, terms }.normalize()
    }
}
