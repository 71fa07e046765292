//! Frobenius φ: T ↦ (1+T)^p − 1 and Γ actions T ↦ (1+T)^c − 1.

use std::cell::RefCell;
use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use padic_core::{Ring, Scalar, Trunc, EXACT};

use crate::element::{min_bound, RobbaElement, W};
use crate::error::RobbaError;

type Rows = std::rc::Rc<Vec<Vec<BigInt>>>;

thread_local! {
    static ROWS: RefCell<HashMap<(u32, BigInt, i64, Option<BigInt>), Rows>> = RefCell::new(HashMap::new());
}

/// Rows `j = 0..=jmax` of `((1+T)^c − 1)^j`, truncated at degree `dmax`,
/// optionally reduced modulo `modulus`.
fn power_rows(p: u32, c: &BigInt, jmax: i64, dmax: i64, modulus: Option<&BigInt>) -> Rows {
    let key = (p, c.clone(), dmax, modulus.cloned());
    if let Some(r) = ROWS.with(|t| t.borrow().get(&key).cloned()) {
        if r.len() as i64 > jmax {
            return r;
        }
    }
    let d = dmax.max(0) as usize;
    let mut first = vec![BigInt::zero(); d + 1];
    let mut b = BigInt::one();
    for i in 1..=d {
        b = b * (c - BigInt::from(i - 1));
        b = b.div_floor(&BigInt::from(i));
        first[i] = b.clone();
        if c.is_positive() && BigInt::from(i) > *c {
            first[i] = BigInt::zero();
        }
    }
    let red = |x: BigInt| match modulus {
        Some(m) => x.mod_floor(m),
        None => x,
    };
    let first: Vec<BigInt> = first.into_iter().map(red).collect();
    let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(jmax.max(0) as usize + 1);
    let mut unit = vec![BigInt::zero(); d + 1];
    unit[0] = BigInt::one();
    rows.push(unit);
    for j in 1..=jmax.max(0) as usize {
        let prev = &rows[j - 1];
        let mut next = vec![BigInt::zero(); d + 1];
        for (a, pa) in prev.iter().enumerate() {
            if pa.is_zero() {
                continue;
            }
            for (bidx, fb) in first.iter().enumerate().skip(1) {
                if a + bidx > d {
                    break;
                }
                if !fb.is_zero() {
                    next[a + bidx] += pa * fb;
                }
            }
        }
        let next = next.into_iter().map(red).collect();
        rows.push(next);
    }
    let rows = std::rc::Rc::new(rows);
    ROWS.with(|t| t.borrow_mut().insert(key, rows.clone()));
    rows
}

/// Integer data of a unit exponent: the integer representative and the
/// precision to which it represents the true exponent.
fn exponent_data<Q: Scalar>(c: &Q) -> Result<(BigInt, i64), RobbaError> {
    if c.valuation() != Some(0) {
        return Err(RobbaError::NonUnitExponent);
    }
    if c.abs_prec() == EXACT {
        let r = c.to_rational().ok_or(RobbaError::NonUnitExponent)?;
        if !r.is_integer() {
            return Err(RobbaError::NonUnitExponent);
        }
        return Ok((r.to_integer(), EXACT));
    }
    let n = c.abs_prec();
    let res = c.residue_mod_ppow(n as u32).ok_or(RobbaError::NonUnitExponent)?;
    Ok((res, n))
}

fn floor_log(p: u32, e: i64) -> i64 {
    let mut k = 0;
    let mut x = 1i64;
    while x.saturating_mul(p as i64) <= e {
        x *= p as i64;
        k += 1;
    }
    k
}

/// Substitutes `T ↦ (1+T)^c − 1` in the nonnegative part of `f`, with the
/// result living on `out_ann`; the negative part is handled by `neg`.
fn substitute<Q: Scalar>(
    f: &RobbaElement<Q>,
    c: &BigInt,
    c_prec: i64,
    out: RobbaElement<Q>,
    finite: bool,
    neg: impl Fn(i64) -> Result<RobbaElement<Q>, RobbaError>,
) -> Result<RobbaElement<Q>, RobbaError> {
    let p = f.prime();
    let d = f.window();
    let hi = f.high_degree();
    let modulus = if c_prec == EXACT { None } else { Some(BigInt::from(p).pow(c_prec as u32)) };
    // Exact finite expansions are kept in full when they fit the window.
    let dmax = if finite { d.max(0) } else { d.max(0) };
    let rows = power_rows(p, c, hi.max(0), dmax, modulus.as_ref());
    let ann = out.annulus();
    let like = f.like().clone();
    let mut acc: Vec<Option<Trunc<Q>>> = vec![None; dmax as usize + 1];
    let mut spill: Option<W> = None;
    let mut result = out.clone();
    for (j, a) in f.terms() {
        if j < 0 {
            let g = neg(-j)?;
            result = result + g.scale(a);
            continue;
        }
        let row = &rows[j as usize];
        for (e, b) in row.iter().enumerate() {
            if b.is_zero() {
                continue;
            }
            let mut t = a.mul_int(b);
            if c_prec != EXACT {
                t = t.cap_prec(c_prec - floor_log(p, e as i64));
            }
            acc[e] = Some(match acc[e].take() {
                None => t,
                Some(s) => s + t,
            });
        }
        // Dropped part of ((1+T)^c − 1)^j: degrees above the window.
        let full_degree = if finite && c.is_positive() { c * BigInt::from(j) } else { BigInt::from(i64::MAX) };
        if full_degree > BigInt::from(dmax) {
            if let Some(v) = a.valuation() {
                let s_min = ann.r1.min(ann.r2);
                spill = min_bound(spill, Some(W::from_integer(v) + s_min * (dmax + 1)));
            }
        }
    }
    let coeffs: Vec<Trunc<Q>> = acc.into_iter().map(|x| x.unwrap_or_else(|| like.zero_like())).collect();
    let series = RobbaElement::from_series(&like, ann, d, coeffs);
    let mut series = series.with_guarantee(spill);
    if spill.is_some() {
        series = series.with_known(dmax);
    }
    result = result + series;
    // error of the input maps to an error of the same w-size
    result = result.with_guarantee(f.guarantee());
    let known = f.known_through();
    if known != i64::MAX {
        result = result.with_known(known);
    }
    Ok(result)
}

/// Frobenius: T ↦ (1+T)^p − 1; the result lives on [r1/p, r2/p].
/// Guarantees transfer unchanged, which is valid while r2 <= p/(p − 1).
pub fn phi<Q: Scalar>(f: &RobbaElement<Q>) -> RobbaElement<Q> {
    let p = f.prime();
    let ann = f.annulus().shrink(p);
    let zero = RobbaElement::zero_in(p, f.like(), ann, f.window());
    let c = BigInt::from(p);
    let neg = |j: i64| -> Result<RobbaElement<Q>, RobbaError> {
        let t = RobbaElement::var(f.like(), ann, f.window());
        let phit = substitute(&t, &c, EXACT, zero.clone(), true, |_| unreachable!())?;
        let target = target_for(f);
        let inv = phit.inverse_dominant(target)?;
        Ok(inv.pow_u(j as u64))
    };
    substitute(f, &c, EXACT, zero.clone(), true, neg).expect("Frobenius of a Laurent element")
}

/// Iterated Frobenius φ^k.
pub fn phi_iter<Q: Scalar>(f: &RobbaElement<Q>, k: u32) -> RobbaElement<Q> {
    let mut g = f.clone();
    for _ in 0..k {
        g = phi(&g);
    }
    g
}

fn target_for<Q: Scalar>(f: &RobbaElement<Q>) -> W {
    match f.scalar_precision() {
        EXACT => W::from_integer(64),
        n => W::from_integer(n),
    }
}

/// Γ action with χ(γ) = c: T ↦ (1+T)^c − 1.
pub fn gamma<Q: Scalar>(f: &RobbaElement<Q>, c: &Q) -> Result<RobbaElement<Q>, RobbaError> {
    let (ci, prec) = exponent_data(c)?;
    gamma_int(f, &ci, prec)
}

/// Γ action for an integer representative `c` of χ(γ), known modulo p^prec.
pub fn gamma_int<Q: Scalar>(f: &RobbaElement<Q>, c: &BigInt, prec: i64) -> Result<RobbaElement<Q>, RobbaError> {
    let p = f.prime();
    if (c % BigInt::from(p)).is_zero() {
        return Err(RobbaError::NonUnitExponent);
    }
    let ann = f.annulus();
    let zero = RobbaElement::zero_in(p, f.like(), ann, f.window());
    let finite = prec == EXACT;
    let neg = |j: i64| -> Result<RobbaElement<Q>, RobbaError> {
        let t = RobbaElement::var(f.like(), ann, f.window());
        let gt = substitute(&t, c, prec, zero.clone(), finite, |_| unreachable!())?;
        let inv = gt.inverse_dominant(target_for(f))?;
        Ok(inv.pow_u(j as u64))
    };
    substitute(f, c, prec, zero.clone(), finite, neg)
}

/// γ_0 with χ(γ_0) = 1 + p.
pub fn gamma0<Q: Scalar>(f: &RobbaElement<Q>) -> RobbaElement<Q> {
    let c = BigInt::from(1 + f.prime());
    gamma_int(f, &c, EXACT).expect("1 + p is a unit")
}

/// The torsion generator ω with χ(ω) the Teichmüller lift of a primitive root.
pub fn omega<Q: Scalar>(f: &RobbaElement<Q>) -> Result<RobbaElement<Q>, RobbaError> {
    let c = f.like().coeff(0).teichmuller_generator().ok_or(RobbaError::NonUnitExponent)?;
    gamma(f, &c)
}

/// χ(ω) in the scalar context of `like`.
pub fn chi_omega<Q: Scalar>(like: &Q) -> Option<Q> {
    like.teichmuller_generator()
}

/// χ(γ_0) = 1 + p.
pub fn chi_gamma0<Q: Scalar>(like: &Q) -> Q {
    like.int_like(1 + like.prime() as i64)
}
