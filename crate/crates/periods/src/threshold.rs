//! Injectivity threshold for t-adic localization of Frobenius eigenvectors.

use num_rational::Ratio;
use num_traits::Zero;
use padic_core::newton::root_valuations;
use padic_core::{Character, Scalar};
use phigamma::PhiGammaModule;

/// Valuations of the eigenvalues of A(0) mod z (`None` for zero roots).
pub fn frobenius_slopes<Q: Scalar>(d: &PhiGammaModule<Q>) -> Vec<Option<Ratio<i64>>> {
    let a0 = d.phi_constant_term().map(|x| x.coeff(0).clone());
    root_valuations(&a0.charpoly())
}

/// Smallest eigenvalue valuation of A(0), if A(0) is invertible.
pub fn min_slope<Q: Scalar>(d: &PhiGammaModule<Q>) -> Option<Ratio<i64>> {
    let s = frobenius_slopes(d);
    if s.iter().any(|x| x.is_none()) {
        return None;
    }
    s.into_iter().flatten().min()
}

/// k_min = floor(max(0, v(δ(p)) − μ)) + 1 with μ the smallest slope of
/// A(0): the twist D(δ^{-1}) has Frobenius slopes λ_i/δ(p), and a
/// t^k-divisible eigenvector forces φ(a') = p^{-k}·a' there, impossible
/// once k exceeds v(δ(p)) − μ.
pub fn slope_threshold<Q: Scalar>(delta: &Character<Q>, d: &PhiGammaModule<Q>) -> usize {
    let va = delta.p_value.coeff(0).valuation().unwrap_or(0);
    let mu = min_slope(d).unwrap_or_else(Ratio::zero);
    let gap = (Ratio::from_integer(va) - mu).max(Ratio::zero());
    gap.floor().to_integer() as usize + 1
}
