//! Newton polygons of polynomials over a valued ring.

use num_rational::Ratio;

use crate::ring::Ring;

/// Slopes of the lower Newton polygon with their horizontal lengths.
///
/// `coeffs` is lowest degree first. A slope `s` with length `l` means `l`
/// roots of valuation `s` (the polygon through points `(i, v(a_i))`).
/// Roots at zero (vanishing low coefficients) are reported with slope
/// `None`.
pub fn newton_slopes<R: Ring>(coeffs: &[R]) -> Vec<(Option<Ratio<i64>>, usize)> {
    let pts: Vec<(i64, i64)> = coeffs
        .iter()
        .enumerate()
        .filter_map(|(i, c)| c.valuation().map(|v| (i as i64, v)))
        .collect();
    let mut out = Vec::new();
    if pts.is_empty() {
        return out;
    }
    if pts[0].0 > 0 {
        out.push((None, pts[0].0 as usize));
    }
    let mut i = 0;
    while i + 1 < pts.len() {
        let (x0, y0) = pts[i];
        let mut best = i + 1;
        let mut best_slope = Ratio::new(pts[i + 1].1 - y0, pts[i + 1].0 - x0);
        for (j, &(x, y)) in pts.iter().enumerate().skip(i + 2) {
            let s = Ratio::new(y - y0, x - x0);
            if s <= best_slope {
                best_slope = s;
                best = j;
            }
        }
        // Root valuations are the negatives of the polygon slopes.
        out.push((Some(-best_slope), (pts[best].0 - x0) as usize));
        i = best;
    }
    out
}

/// Valuations of the roots (with multiplicity), `None` for zero roots.
pub fn root_valuations<R: Ring>(coeffs: &[R]) -> Vec<Option<Ratio<i64>>> {
    newton_slopes(coeffs).into_iter().flat_map(|(s, l)| std::iter::repeat(s).take(l)).collect()
}
