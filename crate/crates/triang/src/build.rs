//! Split trianguline modules from refinements, basis scrambling and chain
//! transport.

use padic_core::matrix::subsets;
use padic_core::{Character, Matrix, Ring, Scalar, Trunc};
use phigamma::{Frame, PhiGammaModule};
use robba::RobbaElement;

use crate::error::TriangError;
use crate::filtered::{refinement_parameters, wedge_characters, FilteredPhiModule, Refinement};

/// Wedge vectors m_i ∈ ∧^i D (coordinates over lexicographic i-subsets)
/// with their characters Δ_i.
#[derive(Clone, Debug)]
pub struct Chain<Q: Scalar> {
    pub vectors: Vec<Vec<RobbaElement<Q>>>,
    pub characters: Vec<Character<Q>>,
}

impl<Q: Scalar> Chain<Q> {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Multiplies m_i by the base element `u[i]`.
    pub fn scaled(&self, u: &[Trunc<Q>]) -> Self {
        let vectors = self.vectors.iter().zip(u).map(|(v, a)| v.iter().map(|x| x.scale(a)).collect()).collect();
        Chain { vectors, characters: self.characters.clone() }
    }
}

/// D = ⊕_i R(δ_i) in the order of the refinement, with the chain
/// m_i = e_1∧…∧e_i and Δ_i = δ_1⋯δ_i. The filtration must be made of
/// eigenlines.
pub fn build_trianguline<Q: Scalar>(
    m: &FilteredPhiModule<Q>,
    r: &Refinement<Q>,
    frame: Frame,
) -> Result<(PhiGammaModule<Q>, Chain<Q>), TriangError> {
    m.line_weights(r)?;
    let deltas = refinement_parameters(r);
    let mut d = PhiGammaModule::rank1(&deltas[0], frame)?;
    for delta in &deltas[1..] {
        d = d.direct_sum(&PhiGammaModule::rank1(delta, frame)?)?;
    }
    let rank = r.dim();
    let like = d.like().clone();
    let vectors = (1..=rank)
        .map(|i| {
            let len = subsets(rank, i).len();
            (0..len)
                .map(|j| {
                    let a = if j == 0 { like.one_like() } else { like.zero_like() };
                    RobbaElement::constant(a, &like, frame.ann, frame.window)
                })
                .collect()
        })
        .collect();
    Ok((d, Chain { vectors, characters: wedge_characters(&deltas) }))
}

/// A polynomial basis change U with det U = 1 and its exact inverse.
#[derive(Clone, Debug)]
pub struct Scramble<Q: Scalar> {
    pub u: Matrix<RobbaElement<Q>>,
    pub u_inv: Matrix<RobbaElement<Q>>,
}

fn unitriangular_inverse<Q: Scalar>(x: &Matrix<RobbaElement<Q>>) -> Matrix<RobbaElement<Q>> {
    let d = x.rows();
    let one = x.get(0, 0).one_like();
    let id = Matrix::identity(d, &one);
    let neg = id.clone() - x.clone();
    let mut acc = id.clone();
    let mut pw = id;
    for _ in 1..d {
        pw = pw * neg.clone();
        acc = acc + pw.clone();
    }
    acc
}

/// U = L·V with L lower and V upper unitriangular. `polys` supplies the
/// T-coefficients of the off-diagonal entries, lower ones first (row by
/// row), reused cyclically.
pub fn unimodular<Q: Scalar>(like: &Trunc<Q>, frame: Frame, d: usize, polys: &[Vec<Q>]) -> Scramble<Q> {
    let poly = |c: &[Q]| {
        let terms: Vec<(i64, Trunc<Q>)> = c.iter().enumerate().map(|(i, a)| (i as i64, Trunc::constant(a.clone(), like.order()))).collect();
        RobbaElement::from_terms(like, frame.ann, frame.window, &terms)
    };
    let one = poly(&[like.coeff(0).one_like()]);
    let mut it = polys.iter().cycle();
    let mut next = || if polys.is_empty() { one.zero_like() } else { poly(it.next().unwrap()) };
    let mut lower = Matrix::identity(d, &one);
    let mut upper = Matrix::identity(d, &one);
    for i in 0..d {
        for j in 0..i {
            lower.set(i, j, next());
        }
    }
    for i in 0..d {
        for j in i + 1..d {
            upper.set(i, j, next());
        }
    }
    let u = lower.clone() * upper.clone();
    let u_inv = unitriangular_inverse(&upper) * unitriangular_inverse(&lower);
    Scramble { u, u_inv }
}

/// Coordinates of the chain in the basis e·U: m_i ↦ ∧^i(U^{-1})·m_i.
pub fn transport<Q: Scalar>(c: &Chain<Q>, u_inv: &Matrix<RobbaElement<Q>>) -> Chain<Q> {
    let vectors = c.vectors.iter().enumerate().map(|(i, v)| u_inv.compound(i + 1).apply(v)).collect();
    Chain { vectors, characters: c.characters.clone() }
}
