//! The Frobenius equation φ(b) − α·b = a for |α^{-1}| < 1: obstruction
//! criterion, the unique solution, and a certificate for it.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use padic_core::{Ring, Trunc};

use crate::element::{Coefficient, HahnElement};
use crate::error::HahnError;

#[derive(Clone, Debug, PartialEq)]
pub struct FrobeniusCertificate {
    /// Working precision N: coefficients of valuation >= N count as zero.
    pub precision: i64,
    /// w_r(φ(b) − α·b − a), `None` for +∞.
    pub residual_w_r: Option<BigRational>,
    /// w_r(a) − w_r(b), `None` when b = 0.
    pub norm_gap: Option<BigRational>,
    pub c_bound: BigRational,
    pub c1: BigRational,
    pub c2: BigRational,
    /// Smallest valuation among dropped tail coefficients.
    pub truncated_tail_val: Option<i64>,
    pub dropped_terms: usize,
}

impl FrobeniusCertificate {
    pub fn residual_ok(&self) -> bool {
        self.residual_w_r.as_ref().map_or(true, |w| *w >= BigRational::from_integer(BigInt::from(self.precision)))
    }

    pub fn bound_ok(&self) -> bool {
        self.norm_gap.as_ref().map_or(true, |g| *g <= self.c_bound)
    }

    pub fn holds(&self) -> bool {
        self.residual_ok() && self.bound_ok()
    }
}

#[derive(Clone, Debug)]
pub struct CriterionReport<C: Coefficient> {
    /// Nonzero obstruction values keyed by negative exponent.
    pub obstructions: BTreeMap<BigRational, C>,
    /// Exponents whose obstruction has valuation >= N but is not exactly zero.
    pub numerically_zero: Vec<BigRational>,
    pub exactly_zero: Vec<BigRational>,
}

impl<C: Coefficient> CriterionReport<C> {
    pub fn solvable(&self) -> bool {
        self.obstructions.is_empty()
    }
}

/// Slope data of α: (α^{-1}, v(α^{-1}), v(α)) with Gauss valuations.
pub struct SlopeData<C: Coefficient> {
    pub alpha: Trunc<C::Q>,
    pub alpha_inv: Trunc<C::Q>,
    pub lambda: i64,
    pub mu: i64,
}

pub fn check_slope<C: Coefficient>(alpha: &Trunc<C::Q>) -> Result<SlopeData<C>, HahnError> {
    let inv = alpha.try_inv().ok_or(HahnError::SlopeViolation { valuation: None })?;
    let lambda = inv.valuation();
    match lambda {
        Some(l) if l >= 1 => Ok(SlopeData {
            alpha: alpha.clone(),
            alpha_inv: inv,
            lambda: l,
            mu: alpha.valuation().expect("α is a unit"),
        }),
        v => Err(HahnError::SlopeViolation { valuation: v }),
    }
}

/// C_1(r, α) = max_{k>=1} (−(k−1)·v(α) − r(p^k − 1)) and
/// C_2(r, α) = max_{m>=0} (r(1 − p^{−m}) − (m+1)·v(α^{-1})).
/// Both are attained at a finite index since the increments decrease.
pub fn frobenius_constants(p: u32, r: &BigRational, lambda: i64, mu: i64) -> (BigRational, BigRational) {
    let pr = BigRational::from_integer(BigInt::from(p));
    let int = |x: i64| BigRational::from_integer(BigInt::from(x));
    let one = BigRational::one();

    let mut best1: Option<BigRational> = None;
    let mut pk = pr.clone();
    for k in 1i64.. {
        let val = -int((k - 1) * mu) - r * (&pk - &one);
        best1 = Some(best1.map_or(val.clone(), |b| b.max(val)));
        // increment to k+1: −μ − r·p^k(p − 1)
        if -int(mu) - r * &pk * (&pr - &one) <= BigRational::zero() {
            break;
        }
        pk = &pk * &pr;
    }

    let mut best2: Option<BigRational> = None;
    let mut pm = one.clone();
    for m in 0i64.. {
        let val = r * (&one - &one / &pm) - int((m + 1) * lambda);
        best2 = Some(best2.map_or(val.clone(), |b| b.max(val)));
        // increment to m+1: r·p^{−m−1}(p − 1) − λ
        if r * (&pr - &one) / (&pm * &pr) - int(lambda) <= BigRational::zero() {
            break;
        }
        pm = &pm * &pr;
    }
    (best1.unwrap(), best2.unwrap())
}

/// m with q = p^{−m}, if q is a power of p.
fn neg_log_p(q: &BigRational, p: u32) -> Option<i64> {
    let pb = BigInt::from(p);
    let count = |x: &BigInt| -> Option<i64> {
        let mut x = x.clone();
        let mut k = 0;
        while !x.is_one() {
            let (d, r) = x.div_rem(&pb);
            if !r.is_zero() {
                return None;
            }
            x = d;
            k += 1;
        }
        Some(k)
    };
    if !q.is_positive() {
        return None;
    }
    if q.numer().is_one() {
        count(q.denom())
    } else if q.denom().is_one() {
        count(q.numer()).map(|k| -k)
    } else {
        None
    }
}

fn frob_pow<C: Coefficient>(a: &C, m: i64) -> C {
    let per = a.frob_period() as i64;
    let e = m.rem_euclid(per);
    let mut x = a.clone();
    for _ in 0..e {
        x = x.frob();
    }
    x
}

/// α^{−e} for any integer e.
fn alpha_pow<C: Coefficient>(s: &SlopeData<C>, e: i64) -> Trunc<C::Q> {
    if e >= 0 {
        s.alpha_inv.pow_u(e as u64)
    } else {
        s.alpha.pow_u(e.unsigned_abs())
    }
}

fn negligible<R: Ring>(a: &R, prec: i64) -> bool {
    a.vanishes() || a.valuation().map_or(true, |v| v >= prec)
}

/// Obstructions Σ_{m∈Z} α^{−(m+1)} φ^m(a_{i p^{−m}}) at the negative exponents of `a`.
pub fn criterion_check<C: Coefficient>(alpha: &Trunc<C::Q>, a: &HahnElement<C>, prec: i64) -> Result<CriterionReport<C>, HahnError> {
    let s = check_slope::<C>(alpha)?;
    let p = a.prime();
    let mut rep = CriterionReport { obstructions: BTreeMap::new(), numerically_zero: Vec::new(), exactly_zero: Vec::new() };
    let neg: Vec<BigRational> = a.support().into_iter().filter(|i| i.is_negative()).collect();
    for i in &neg {
        let mut acc = a.like().zero_like();
        for (j, aj) in a.terms() {
            if let Some(m) = neg_log_p(&(j / i), p) {
                acc = acc + frob_pow(aj, m).scale(&alpha_pow(&s, m + 1));
            }
        }
        if acc.vanishes() && acc.abs_prec() == padic_core::EXACT {
            rep.exactly_zero.push(i.clone());
        } else if negligible(&acc, prec) {
            rep.numerically_zero.push(i.clone());
        } else {
            rep.obstructions.insert(i.clone(), acc);
        }
    }
    Ok(rep)
}

/// Solves φ(b) − α·b = a. The solution lives on radius p·r.
pub fn solve_frobenius<C: Coefficient>(
    alpha: &Trunc<C::Q>,
    a: &HahnElement<C>,
    prec: i64,
) -> Result<(HahnElement<C>, FrobeniusCertificate), HahnError> {
    let s = check_slope::<C>(alpha)?;
    let rep = criterion_check(alpha, a, prec)?;
    if !rep.solvable() {
        return Err(HahnError::NoSolution {
            obstructions: rep.obstructions.iter().map(|(i, v)| (i.to_string(), format!("{v:?}"))).collect(),
        });
    }
    let p = a.prime();
    let pr = BigRational::from_integer(BigInt::from(p));
    let mut b: BTreeMap<BigRational, C> = BTreeMap::new();
    let step = |b: &BTreeMap<BigRational, C>, i: &BigRational| -> C {
        let prev = b.get(&(i / &pr)).map(|x| x.frob()).unwrap_or_else(|| a.like().zero_like());
        (prev - a.coeff(i)).scale(&s.alpha_inv)
    };

    // Negative exponents: forward orbits down to the lowest support point,
    // processed from the one closest to zero.
    let support = a.support();
    if let Some(lowest) = support.first().filter(|x| x.is_negative()).cloned() {
        let mut cand: BTreeSet<BigRational> = BTreeSet::new();
        for j in support.iter().filter(|x| x.is_negative()) {
            let mut x = j.clone();
            while x >= lowest {
                cand.insert(x.clone());
                x = &x * &pr;
            }
        }
        for i in cand.iter().rev() {
            let v = step(&b, i);
            b.insert(i.clone(), v);
        }
    }

    // Exponent zero: geometric series over one Frobenius period.
    let a0 = a.coeff(&BigRational::zero());
    if !a0.vanishes() {
        let f = a0.frob_period() as i64;
        let mut head = a.like().zero_like();
        for r in 0..f {
            head = head + frob_pow(&a0, r).scale(&alpha_pow(&s, r + 1));
        }
        let denom = (alpha.one_like() - alpha_pow(&s, f)).try_inv().expect("1 − α^{−f} is a unit");
        b.insert(BigRational::zero(), -head.scale(&denom));
    }

    // Positive exponents: forward orbits until the coefficient is negligible.
    let max_pos = support.last().filter(|x| x.is_positive()).cloned();
    let mut cand: BTreeSet<BigRational> = support.iter().filter(|x| x.is_positive()).cloned().collect();
    let mut tail: Option<i64> = None;
    let mut dropped = 0usize;
    while let Some(i) = cand.pop_first() {
        let v = step(&b, &i);
        let next = &i * &pr;
        let beyond = max_pos.as_ref().map_or(true, |m| next > *m);
        if !negligible(&v, prec) || !beyond {
            cand.insert(next);
        } else if !v.vanishes() {
            let d = v.frob().scale(&s.alpha_inv);
            if let Some(w) = d.valuation() {
                tail = Some(tail.map_or(w, |t: i64| t.min(w)));
            }
            dropped += 1;
        }
        b.insert(i, v);
    }

    let terms: Vec<(BigRational, C)> = b.into_iter().collect();
    let sol = HahnElement::from_terms(p, a.den_bound(), a.radius() * &pr, a.like(), terms)?;

    let r = a.radius().clone();
    let residual = sol.frob() - sol.scale(alpha) - a.clone();
    let (c1, c2) = frobenius_constants(p, &r, s.lambda, s.mu);
    let wa = a.w_unchecked(&r);
    let wb = sol.w_unchecked(&r);
    let norm_gap = match (wa, wb) {
        (Some(x), Some(y)) => Some(x - y),
        _ => None,
    };
    let cert = FrobeniusCertificate {
        precision: prec,
        residual_w_r: residual.w_unchecked(&r),
        norm_gap,
        c_bound: c1.clone().max(c2.clone()),
        c1,
        c2,
        truncated_tail_val: tail,
        dropped_terms: dropped,
    };
    Ok((sol, cert))
}
