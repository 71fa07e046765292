//! Laurent series with S-coefficients on a closed annulus, truncated to a
//! finite window and carrying an error guarantee.
//!
//! An element stores coefficients `a_lo, …, a_hi` and a guarantee `E`: the
//! true series differs from the stored one by something whose `w_s` is at
//! least `E` at both ends of the annulus (hence on the whole annulus, since
//! `s ↦ w_s` is concave). Coefficients of degree `<= known` are exact up to
//! scalar precision.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};
use padic_core::{Ring, Scalar, Trunc, EXACT};

use crate::error::RobbaError;

/// Norm values `w_s` (rational).
pub type W = Ratio<i64>;

/// `min` on optional bounds where `None` is +∞.
pub fn min_bound(a: Option<W>, b: Option<W>) -> Option<W> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(x), Some(y)) => Some(x.min(y)),
    }
}

pub fn add_bound(a: Option<W>, b: Option<W>) -> Option<W> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x + y),
        _ => None,
    }
}

/// Closed annulus `r1 <= s <= r2` in the w_s parametrization.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Annulus {
    pub r1: W,
    pub r2: W,
}

impl Annulus {
    pub fn new(r1: W, r2: W) -> Self {
        assert!(r1 > W::zero() && r1 <= r2, "annulus needs 0 < r1 <= r2");
        Annulus { r1, r2 }
    }

    pub fn contains(&self, s: W) -> bool {
        self.r1 <= s && s <= self.r2
    }

    pub fn intersect(&self, o: &Annulus) -> Annulus {
        Annulus::new(self.r1.max(o.r1), self.r2.min(o.r2))
    }

    /// Image annulus under φ.
    pub fn shrink(&self, p: u32) -> Annulus {
        Annulus::new(self.r1 / p as i64, self.r2 / p as i64)
    }

    /// Converts to the other radius convention, ρ(r) = (p − 1)/(p·r).
    pub fn rho(p: u32, r: W) -> W {
        W::new(p as i64 - 1, p as i64) / r
    }

    /// Admissibility radius of level n: the w-value of ε_n − 1.
    pub fn level_radius(p: u32, n: u32) -> W {
        assert!(n >= 1);
        W::new(1, (p as i64).pow(n - 1) * (p as i64 - 1))
    }
}

#[derive(Clone)]
pub struct RobbaElement<Q: Scalar> {
    p: u32,
    lo: i64,
    c: Vec<Trunc<Q>>,
    like: Trunc<Q>,
    ann: Annulus,
    window: i64,
    known: i64,
    err: Option<W>,
}

impl<Q: Scalar> RobbaElement<Q> {
    /// Builds from `(exponent, coefficient)` pairs. `like` fixes S and the
    /// scalar context; `window` is the highest degree ever stored.
    pub fn from_terms(like: &Trunc<Q>, ann: Annulus, window: i64, terms: &[(i64, Trunc<Q>)]) -> Self {
        let p = like.coeff(0).prime();
        let mut f = RobbaElement::zero_in(p, like, ann, window);
        if terms.is_empty() {
            return f;
        }
        let lo = terms.iter().map(|t| t.0).min().unwrap();
        let hi = terms.iter().map(|t| t.0).max().unwrap();
        let mut c = vec![like.zero_like(); (hi - lo + 1) as usize];
        for (i, a) in terms {
            let k = (i - lo) as usize;
            c[k] = c[k].clone() + a.clone();
        }
        f.lo = lo;
        f.c = c;
        f.normalize()
    }

    /// Power series from coefficients of degrees `0..`.
    pub fn from_series(like: &Trunc<Q>, ann: Annulus, window: i64, coeffs: Vec<Trunc<Q>>) -> Self {
        let p = like.coeff(0).prime();
        let mut f = RobbaElement::zero_in(p, like, ann, window);
        f.c = coeffs;
        f.normalize()
    }

    pub fn zero_in(p: u32, like: &Trunc<Q>, ann: Annulus, window: i64) -> Self {
        RobbaElement { p, lo: 0, c: vec![], like: like.clone(), ann, window, known: i64::MAX, err: None }
    }

    pub fn constant(a: Trunc<Q>, like: &Trunc<Q>, ann: Annulus, window: i64) -> Self {
        RobbaElement::from_terms(like, ann, window, &[(0, a)])
    }

    /// The variable T.
    pub fn var(like: &Trunc<Q>, ann: Annulus, window: i64) -> Self {
        RobbaElement::from_terms(like, ann, window, &[(1, like.one_like())])
    }

    /// A scalar constant in the same ring as `self`.
    pub fn scalar(&self, a: Trunc<Q>) -> Self {
        RobbaElement::constant(a, &self.like, self.ann, self.window)
    }

    pub fn monomial(&self, i: i64, a: Trunc<Q>) -> Self {
        RobbaElement::from_terms(&self.like, self.ann, self.window, &[(i, a)])
    }

    fn normalize(mut self) -> Self {
        while self.c.last().map_or(false, |a| a.vanishes()) {
            self.c.pop();
        }
        let lead = self.c.iter().position(|a| !a.vanishes()).unwrap_or(self.c.len());
        if lead > 0 {
            self.c.drain(0..lead);
            self.lo += lead as i64;
        }
        if self.c.is_empty() {
            self.lo = 0;
        }
        let w = self.window;
        self.truncate_above(w)
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    pub fn like(&self) -> &Trunc<Q> {
        &self.like
    }

    pub fn annulus(&self) -> Annulus {
        self.ann
    }

    pub fn window(&self) -> i64 {
        self.window
    }

    /// Degrees through which coefficients are exact (up to scalar precision).
    pub fn known_through(&self) -> i64 {
        self.known
    }

    /// Truncation guarantee E (`None` = no truncation error).
    pub fn guarantee(&self) -> Option<W> {
        self.err
    }

    pub fn is_polynomial_exact(&self) -> bool {
        self.err.is_none() && self.known == i64::MAX
    }

    pub fn low_degree(&self) -> i64 {
        self.lo
    }

    /// Highest stored degree (`lo - 1` when empty).
    pub fn high_degree(&self) -> i64 {
        self.lo + self.c.len() as i64 - 1
    }

    pub fn is_power_series(&self) -> bool {
        self.c.is_empty() || self.lo >= 0
    }

    /// Coefficient of T^i (zero outside the stored range).
    pub fn coeff(&self, i: i64) -> Trunc<Q> {
        if i < self.lo || i > self.high_degree() {
            return self.like.zero_like();
        }
        self.c[(i - self.lo) as usize].clone()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &Trunc<Q>)> {
        self.c.iter().enumerate().filter(|(_, a)| !a.vanishes()).map(move |(k, a)| (self.lo + k as i64, a))
    }

    /// w_s of the stored part, `None` for +∞.
    pub fn w_stored(&self, s: W) -> Option<W> {
        self.terms()
            .filter_map(|(i, a)| a.valuation().map(|v| W::from_integer(v) + s * i))
            .min()
    }

    /// w_s (spec operation `robba_norm`): min over stored terms.
    pub fn norm(&self, s: W) -> Result<Option<W>, RobbaError> {
        if !self.ann.contains(s) {
            return Err(RobbaError::OutOfAnnulus { s: s.to_string() });
        }
        Ok(self.w_stored(s))
    }

    /// min over the annulus of w_s of the stored part.
    pub fn w_min(&self) -> Option<W> {
        min_bound(self.w_stored(self.ann.r1), self.w_stored(self.ann.r2))
    }

    /// Lower bound for min over the annulus of w_s of the true series.
    pub fn w_true(&self) -> Option<W> {
        min_bound(self.w_min(), self.err)
    }

    pub fn with_annulus(&self, ann: Annulus) -> Self {
        let mut f = self.clone();
        f.ann = ann;
        f
    }

    /// Lowers the window, folding dropped terms into the guarantee.
    pub fn with_window(&self, d: i64) -> Self {
        let mut f = self.clone();
        f.window = d;
        f.truncate_above(d)
    }

    /// Enlarges the window bookkeeping without adding information.
    pub fn raise_window(&self, d: i64) -> Self {
        let mut f = self.clone();
        f.window = f.window.max(d);
        f
    }

    pub fn with_guarantee(&self, e: Option<W>) -> Self {
        let mut f = self.clone();
        f.err = min_bound(f.err, e);
        f
    }

    /// Marks coefficients above degree `d` as approximate.
    pub fn with_known(&self, d: i64) -> Self {
        let mut f = self.clone();
        f.known = f.known.min(d);
        f
    }

    fn truncate_above(mut self, d: i64) -> Self {
        let hi = self.high_degree();
        if hi <= d {
            return self;
        }
        let keep = (d - self.lo + 1).max(0) as usize;
        let dropped: Vec<Trunc<Q>> = self.c.drain(keep..).collect();
        let base = self.lo + keep as i64;
        let mut e: Option<W> = None;
        for (k, a) in dropped.iter().enumerate() {
            if let Some(v) = a.valuation() {
                let i = base + k as i64;
                let w = (W::from_integer(v) + self.ann.r1 * i).min(W::from_integer(v) + self.ann.r2 * i);
                e = min_bound(e, Some(w));
            }
        }
        self.err = min_bound(self.err, e);
        self.known = self.known.min(d);
        if self.c.is_empty() {
            self.lo = 0;
        }
        self
    }

    fn combine(&self, o: &Self, sign: bool) -> Self {
        assert_eq!(self.p, o.p, "mixing primes");
        let ann = self.ann.intersect(&o.ann);
        let window = self.window.min(o.window);
        if self.c.is_empty() && o.c.is_empty() {
            let mut z = RobbaElement::zero_in(self.p, &self.like, ann, window);
            z.err = min_bound(self.err, o.err);
            z.known = self.known.min(o.known);
            return z;
        }
        let lo = if self.c.is_empty() {
            o.lo
        } else if o.c.is_empty() {
            self.lo
        } else {
            self.lo.min(o.lo)
        };
        let hi = self.high_degree().max(o.high_degree());
        let c: Vec<Trunc<Q>> = (lo..=hi)
            .map(|i| if sign { self.coeff(i) + o.coeff(i) } else { self.coeff(i) - o.coeff(i) })
            .collect();
        let f = RobbaElement {
            p: self.p,
            lo,
            c,
            like: self.like.clone(),
            ann,
            window,
            known: self.known.min(o.known),
            err: min_bound(self.err, o.err),
        };
        f.normalize()
    }

    /// Product with full error bookkeeping, truncated to the common window.
    pub fn product(&self, o: &Self) -> Self {
        assert_eq!(self.p, o.p, "mixing primes");
        let ann = self.ann.intersect(&o.ann);
        let window = self.window.min(o.window);
        let a = self.with_annulus(ann);
        let b = o.with_annulus(ann);
        let err = min_bound(
            min_bound(add_bound(a.w_min(), b.err), add_bound(a.err, b.w_min())),
            add_bound(a.err, b.err),
        );
        // An empty stored part has w_min = +∞; its error still propagates.
        let err = match (a.c.is_empty(), b.c.is_empty()) {
            (true, _) | (_, true) => {
                let wa = a.w_true();
                let wb = b.w_true();
                min_bound(err, add_bound(wa, wb))
            }
            _ => err,
        };
        let known = {
            let x = if a.known == i64::MAX { i64::MAX } else { a.known.saturating_add(b.lo) };
            let y = if b.known == i64::MAX { i64::MAX } else { b.known.saturating_add(a.lo) };
            x.min(y)
        };
        if a.c.is_empty() || b.c.is_empty() {
            let mut z = RobbaElement::zero_in(self.p, &self.like, ann, window);
            z.err = err;
            z.known = known;
            return z;
        }
        let lo = a.lo + b.lo;
        let hi = (a.high_degree() + b.high_degree()).min(window.max(lo));
        let len = (hi - lo + 1).max(0) as usize;
        let mut acc: Vec<Option<Trunc<Q>>> = vec![None; len];
        let mut spill: Option<W> = None;
        for (i, x) in a.c.iter().enumerate() {
            if x.vanishes() {
                continue;
            }
            for (j, y) in b.c.iter().enumerate() {
                if y.vanishes() {
                    continue;
                }
                let k = i + j;
                if k < len {
                    let t = x.clone() * y.clone();
                    acc[k] = Some(match acc[k].take() {
                        None => t,
                        Some(s) => s + t,
                    });
                } else if let (Some(vx), Some(vy)) = (x.valuation(), y.valuation()) {
                    // Beyond the window only the size of the term matters.
                    let deg = lo + k as i64;
                    let v = W::from_integer(vx + vy);
                    spill = min_bound(spill, Some((v + ann.r1 * deg).min(v + ann.r2 * deg)));
                }
            }
        }
        let c = acc.into_iter().map(|x| x.unwrap_or_else(|| self.like.zero_like())).collect();
        let f = RobbaElement {
            p: self.p,
            lo,
            c,
            like: self.like.clone(),
            ann,
            window,
            known: known.min(if spill.is_some() { window } else { i64::MAX }),
            err: min_bound(err, spill),
        };
        f.normalize()
    }

    /// Multiplies coefficients by a base element.
    pub fn scale(&self, s: &Trunc<Q>) -> Self {
        let mut f = self.clone();
        f.c = f.c.iter().map(|a| a.clone() * s.clone()).collect();
        f.err = match (f.err, s.valuation()) {
            (Some(e), Some(v)) => Some(e + v),
            (Some(_), None) => None,
            (None, _) => None,
        };
        f.normalize()
    }

    /// Multiplies by T^j.
    pub fn shift(&self, j: i64) -> Self {
        let mut f = self.clone();
        f.lo += j;
        if f.known != i64::MAX {
            f.known += j;
        }
        // w_s(T^j g) = w_s(g) + s·j, so the guarantee moves by at least min(r1 j, r2 j).
        f.err = f.err.map(|e| e + (self.ann.r1 * j).min(self.ann.r2 * j));
        f.normalize()
    }

    /// True when all stored coefficients through the common known degree agree.
    pub fn agrees_with(&self, o: &Self) -> bool {
        let d = self.combine(o, false);
        let top = self.known.min(o.known);
        let ok = d.terms().all(|(i, _)| i > top);
        ok
    }

    /// Worst (lowest) w-value at which `self` and `o` may differ, combining
    /// stored differences and both guarantees.
    pub fn distance(&self, o: &Self) -> Option<W> {
        let d = self.combine(o, false);
        min_bound(d.w_min(), d.err)
    }

    /// Inverse of a power series with invertible constant term, certified
    /// by the residual `f·h − 1`.
    pub fn inverse_series(&self) -> Result<Self, RobbaError> {
        if self.lo != 0 || self.c.is_empty() || !self.c[0].is_unit() {
            return Err(RobbaError::NotInvertible);
        }
        let d = self.window.max(0) as usize;
        let u0 = self.c[0].try_inv().ok_or(RobbaError::NotInvertible)?;
        let mut h: Vec<Trunc<Q>> = Vec::with_capacity(d + 1);
        h.push(u0.clone());
        for k in 1..=d {
            let mut acc = self.like.zero_like();
            for i in 1..=k.min(self.c.len() - 1) {
                acc = acc + self.c[i].clone() * h[k - i].clone();
            }
            h.push(-(u0.clone() * acc));
        }
        let hs = RobbaElement::from_series(&self.like, self.ann, self.window, h);
        let exact_self = RobbaElement { err: None, known: i64::MAX, window: 2 * self.window + 2, ..self.clone() };
        let exact_h = RobbaElement { window: 2 * self.window + 2, err: None, known: i64::MAX, ..hs.clone() };
        let r = exact_self.product(&exact_h) - exact_self.scalar(self.like.one_like());
        let w_r = min_bound(r.w_min(), add_bound(self.err, hs.w_min()));
        match w_r {
            Some(w) if w <= W::zero() => Err(RobbaError::NotInvertible),
            _ => {
                let e = add_bound(hs.w_min(), w_r);
                let mut out = hs;
                out.err = min_bound(out.err, e);
                out.known = out.known.min(self.known);
                Ok(out)
            }
        }
    }

    /// Inverse of an element with a dominant monomial a·T^d (every other
    /// term strictly smaller on the whole annulus), by a geometric series
    /// stopped once the remainder is below `target`.
    pub fn inverse_dominant(&self, target: W) -> Result<Self, RobbaError> {
        let at = |s: W| {
            self.terms()
                .filter_map(|(i, a)| a.valuation().map(|v| (W::from_integer(v) + s * i, i)))
                .min()
                .map(|x| x.1)
        };
        let d = match (at(self.ann.r1), at(self.ann.r2)) {
            (Some(x), Some(y)) if x == y => x,
            _ => return Err(RobbaError::NotInvertible),
        };
        let a = self.coeff(d);
        let a_inv = a.try_inv().ok_or(RobbaError::NotInvertible)?;
        let lead_inv = self.monomial(-d, a_inv);
        let u = self.product(&lead_inv) - self.scalar(self.like.one_like());
        let wu = u.w_true().unwrap_or(target);
        if wu <= W::zero() {
            return Err(RobbaError::NotInvertible);
        }
        let mut acc = self.scalar(self.like.one_like());
        let mut term = acc.clone();
        let mut k: i64 = 0;
        while W::from_integer(k) * wu < target {
            term = term.product(&(-u.clone()));
            acc = acc + term.clone();
            k += 1;
            if k > 4 * (self.window.abs() + 64) {
                break;
            }
        }
        // remainder Σ_{j>k} (−u)^j
        let rem = W::from_integer(k + 1) * wu;
        let mut out = acc.product(&lead_inv);
        let wl = lead_inv.w_min();
        out.err = min_bound(out.err, add_bound(Some(rem), wl));
        out.known = out.known.min(out.window);
        Ok(out)
    }

    /// Maps scalar coefficients (e.g. cap precision).
    pub fn map_coeffs(&self, f: impl Fn(&Trunc<Q>) -> Trunc<Q>) -> Self {
        let mut g = self.clone();
        g.c = g.c.iter().map(f).collect();
        g.normalize()
    }

    /// Reduction of the coefficients modulo z (the specialization z = 0).
    pub fn reduce_base(&self) -> Self {
        let like1 = self.like.resize(1);
        let mut g = RobbaElement {
            p: self.p,
            lo: self.lo,
            c: self.c.iter().map(|a| a.resize(1)).collect(),
            like: like1,
            ann: self.ann,
            window: self.window,
            known: self.known,
            err: self.err,
        };
        g = g.normalize();
        g
    }

    /// Smallest scalar absolute precision among stored coefficients.
    pub fn scalar_precision(&self) -> i64 {
        self.c.iter().map(|a| a.abs_prec()).min().unwrap_or(EXACT)
    }

    /// Degree-by-degree listing for reports.
    pub fn describe(&self) -> String {
        let mut parts: Vec<String> = self.terms().map(|(i, a)| format!("({i}, {a:?})")).collect();
        if parts.is_empty() {
            parts.push("0".into());
        }
        let e = self.err.map_or("inf".to_string(), |e| e.to_string());
        format!("[{}] on [{}, {}] window {} E {}", parts.join(", "), self.ann.r1, self.ann.r2, self.window, e)
    }

    /// Integer valuation floor of a rational bound.
    pub fn floor_bound(w: Option<W>) -> i64 {
        w.map_or(EXACT, |x| x.floor().to_integer())
    }

    pub fn is_zero_stored(&self) -> bool {
        self.c.is_empty()
    }

    /// Approximate f64 of a norm (diagnostics).
    pub fn w_f64(w: Option<W>) -> f64 {
        w.map_or(f64::INFINITY, |x| x.to_f64().unwrap_or(f64::NAN))
    }
}

impl<Q: Scalar> fmt::Debug for RobbaElement<Q> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.describe())
    }
}

impl<Q: Scalar> PartialEq for RobbaElement<Q> {
    fn eq(&self, o: &Self) -> bool {
        self.agrees_with(o)
    }
}

impl<Q: Scalar> Add for RobbaElement<Q> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        self.combine(&o, true)
    }
}

impl<Q: Scalar> Sub for RobbaElement<Q> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self.combine(&o, false)
    }
}

impl<Q: Scalar> Neg for RobbaElement<Q> {
    type Output = Self;
    fn neg(mut self) -> Self {
        self.c = self.c.into_iter().map(|a| -a).collect();
        self
    }
}

impl<Q: Scalar> Mul for RobbaElement<Q> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        self.product(&o)
    }
}

impl<Q: Scalar> Ring for RobbaElement<Q> {
    fn zero_like(&self) -> Self {
        RobbaElement::zero_in(self.p, &self.like, self.ann, self.window)
    }
    fn one_like(&self) -> Self {
        self.scalar(self.like.one_like())
    }
    fn vanishes(&self) -> bool {
        self.c.is_empty()
    }
    fn is_unit(&self) -> bool {
        self.inverse_series().is_ok()
    }
    fn try_inv(&self) -> Option<Self> {
        if let Ok(x) = self.inverse_series() {
            return Some(x);
        }
        let target = match self.scalar_precision() {
            EXACT => W::from_integer(64),
            n => W::from_integer(n),
        };
        self.inverse_dominant(target).ok()
    }
    fn valuation(&self) -> Option<i64> {
        self.w_min().map(|w| w.floor().to_integer())
    }
    fn val_floor(&self) -> i64 {
        RobbaElement::<Q>::floor_bound(self.w_true())
    }
    fn abs_prec(&self) -> i64 {
        self.scalar_precision()
    }
    fn cap_prec(&self, n: i64) -> Self {
        self.map_coeffs(|a| a.cap_prec(n))
    }
    fn mul_int(&self, k: &BigInt) -> Self {
        let s = self.like.one_like().mul_int(k);
        self.scale(&s)
    }
    fn div_int(&self, k: &BigInt) -> Self {
        let s = self.like.one_like().div_int(k);
        self.scale(&s)
    }
    fn int_like(&self, k: i64) -> Self {
        self.scalar(self.like.int_like(k))
    }
}
