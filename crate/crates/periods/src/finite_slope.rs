//! Whether (D)^{φ=α, Γ=1} → (D_dif^{+,n}/(t^k))^Γ is an isomorphism over an
//! artinian base.

use padic_core::{Character, Scalar, Trunc};
use phigamma::PhiGammaModule;
use robba::{DifElement, Localizer};

use crate::error::PeriodError;
use crate::solve::{rank_at, solve_period_at, PeriodSolution, DEFAULT_TARGET, SLACK};

#[derive(Clone, Debug)]
pub struct FiniteSlopeVerdict<Q: Scalar> {
    pub isomorphism: bool,
    pub injective: bool,
    pub surjective: bool,
    /// Q_p-dimensions of both sides.
    pub eigenspace_dim: usize,
    pub invariants_dim: usize,
    pub eigenspace_rank: usize,
    pub invariants_rank: usize,
    /// A Γ-invariant vector with no eigenvector lift, when surjectivity fails.
    pub witness: Option<Vec<DifElement<Q>>>,
    pub solution: PeriodSolution<Q>,
}

/// α must already be normalized so that the Γ-part of the query is trivial.
pub fn finite_slope_test<Q: Scalar>(d: &PhiGammaModule<Q>, alpha: &Trunc<Q>, n: u32, k: usize) -> Result<FiniteSlopeVerdict<Q>, PeriodError> {
    if d.like().order() == 0 {
        return Err(PeriodError::BadBase);
    }
    let delta = Character::unramified(alpha.clone());
    let sol = solve_period_at(d, &delta, n, k, DEFAULT_TARGET)?;
    let tol = DEFAULT_TARGET - SLACK;
    let dm = d.dif_module(n, k)?;
    let inv = dm.gamma_invariants(&Character::trivial(d.like()))?;
    let loc = Localizer::new(d.like().coeff(0), n, k);
    let mut images: Vec<Vec<Q>> = Vec::with_capacity(sol.span.len());
    for x in &sol.span {
        let mut img = Vec::with_capacity(x.len());
        for e in x {
            img.push(loc.apply(e)?);
        }
        images.push(dm.vector_coords(&img));
    }
    let r0 = rank_at(&images, tol);
    let injective = r0 == sol.span.len();
    let mut witness = None;
    for y in &inv.basis {
        let mut rows = images.clone();
        rows.push(y.clone());
        if rank_at(&rows, tol) > r0 {
            witness = Some(dm.vector_from_coords(y));
            break;
        }
    }
    let surjective = witness.is_none();
    Ok(FiniteSlopeVerdict {
        isomorphism: injective && surjective,
        injective,
        surjective,
        eigenspace_dim: sol.span.len(),
        invariants_dim: inv.q_dim(),
        eigenspace_rank: sol.formal_rank,
        invariants_rank: inv.rank,
        witness,
        solution: sol,
    })
}
