//! The elements t = log(1+T), q = ((1+T)^p − 1)/T and φ^{n−1}(q).

use num_bigint::BigInt;
use padic_core::{Ring, Scalar, Trunc};

use crate::actions::phi_iter;
use crate::element::{Annulus, RobbaElement, W};
use crate::error::RobbaError;

/// Lower bound for min_{i > d} (s·i − v_p(i)), used for the tail of log(1+T).
pub fn log_tail_bound(p: u32, s: W, d: i64) -> W {
    // On [p^e, p^{e+1}) we have v_p(i) <= e, so s·i − v_p(i) >= s·max(d+1, p^e) − e.
    let mut e: u32 = 0;
    while (p as i64).pow(e + 1) <= d + 1 {
        e += 1;
    }
    let mut best: Option<W> = None;
    loop {
        let start = ((p as i64).pow(e)).max(d + 1);
        let val = s * start - W::from_integer(e as i64);
        best = Some(best.map_or(val, |b: W| b.min(val)));
        let grow = s * ((p as i64).pow(e) * (p as i64 - 1));
        if grow >= W::from_integer(1) || e > 40 {
            break;
        }
        e += 1;
    }
    best.unwrap()
}

/// t = log(1+T) through degree `window`, with the tail folded into the guarantee.
pub fn t_element<Q: Scalar>(like: &Trunc<Q>, ann: Annulus, window: i64) -> Result<RobbaElement<Q>, RobbaError> {
    if window < 1 {
        return Err(RobbaError::WindowTooSmall { window, what: "t needs at least degree 1".into() });
    }
    let one = like.coeff(0);
    let m = like.order();
    let coeffs: Vec<Trunc<Q>> = (0..=window)
        .map(|i| {
            if i == 0 {
                like.zero_like()
            } else {
                let sign = if i % 2 == 1 { 1 } else { -1 };
                Trunc::constant(one.ratio_like(&BigInt::from(sign), &BigInt::from(i)), m)
            }
        })
        .collect();
    let p = one.prime();
    let e = log_tail_bound(p, ann.r1, window).min(log_tail_bound(p, ann.r2, window));
    Ok(RobbaElement::from_series(like, ann, window, coeffs).with_guarantee(Some(e)).with_known(window))
}

/// q = ((1+T)^p − 1)/T, an exact polynomial.
pub fn q_element<Q: Scalar>(like: &Trunc<Q>, ann: Annulus, window: i64) -> Result<RobbaElement<Q>, RobbaError> {
    let p = like.coeff(0).prime() as i64;
    if window < p - 1 {
        return Err(RobbaError::WindowTooSmall { window, what: "q has degree p-1".into() });
    }
    let m = like.order();
    let one = like.coeff(0);
    let mut b = BigInt::from(1);
    let mut coeffs = Vec::new();
    for i in 1..=p {
        b = b * BigInt::from(p - i + 1) / BigInt::from(i);
        coeffs.push(Trunc::constant(one.one_like().mul_int(&b), m));
    }
    Ok(RobbaElement::from_series(like, ann, window, coeffs))
}

/// φ^{n−1}(q), living on the annulus `ann` (q is taken on p^{n−1}·ann).
pub fn phi_q<Q: Scalar>(like: &Trunc<Q>, ann: Annulus, window: i64, n: u32) -> Result<RobbaElement<Q>, RobbaError> {
    assert!(n >= 1);
    let p = like.coeff(0).prime() as i64;
    let scale = p.pow(n - 1);
    let big = Annulus::new(ann.r1 * scale, ann.r2 * scale);
    let deg = (p - 1) * scale;
    if window < deg {
        return Err(RobbaError::WindowTooSmall { window, what: format!("phi^{}(q) has degree {deg}", n - 1) });
    }
    let q = q_element(like, big, window)?;
    Ok(phi_iter(&q, n - 1))
}

/// Π_{i=1}^{count} φ^{i−1}(q)/p, the partial product converging to t.
pub fn t_partial_product<Q: Scalar>(like: &Trunc<Q>, ann: Annulus, window: i64, count: u32) -> Result<RobbaElement<Q>, RobbaError> {
    let p = like.coeff(0).prime();
    let mut acc = RobbaElement::var(like, ann, window);
    for i in 1..=count {
        let q = phi_q(like, ann, window, i)?;
        acc = acc * q.div_int(&BigInt::from(p));
    }
    Ok(acc)
}
