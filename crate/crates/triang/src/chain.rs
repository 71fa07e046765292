//! Chain recognition in the localization K_n[[t]]/(t^k) ⊗ S.
//!
//! (m_1, …, m_d) is a chain iff m_1 is saturated, m_1 ∧ m_i = 0 for i ≥ 2,
//! and the contractions m_i = m_1 ∧ m_i' form a chain of D / (m_1). All three
//! steps are carried out on ι_n-images with a unit coordinate of m_1 as
//! pivot, so the quotient is the span of the remaining coordinates.

use std::fmt;

use padic_core::matrix::{subset_index, subsets};
use padic_core::{Character, Ring, Scalar};
use periods::{eigen_residual, order_at, DEFAULT_TARGET, SLACK};
use phigamma::PhiGammaModule;
use robba::{Annulus, DifElement, W};

use crate::build::Chain;
use crate::error::TriangError;

/// Residual floor below which a chain vector is rejected as not an
/// eigenvector.
pub const EIGEN_FLOOR: i64 = 8;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ChainFailure {
    /// The step-th vector (in the step-th quotient) is divisible by t.
    Saturation { step: usize, t_order: usize },
    /// m_step ∧ m_index does not vanish modulo t^k in the step-th quotient.
    Wedge { step: usize, index: usize },
}

impl ChainFailure {
    pub fn step(&self) -> usize {
        match self {
            ChainFailure::Saturation { step, .. } | ChainFailure::Wedge { step, .. } => *step,
        }
    }

    pub fn is_saturation(&self) -> bool {
        matches!(self, ChainFailure::Saturation { .. })
    }
}

impl fmt::Display for ChainFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChainFailure::Saturation { step, t_order } => write!(f, "saturation at step {step} (t-order {t_order})"),
            ChainFailure::Wedge { step, index } => write!(f, "wedge m_{step} ^ m_{index} nonzero at step {step}"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ChainReport<Q: Scalar> {
    pub is_chain: bool,
    pub failure: Option<ChainFailure>,
    /// t-order of the vector examined at each step reached.
    pub t_orders: Vec<usize>,
    /// Eigenvector residual floor of each m_i.
    pub residual_floors: Vec<Option<W>>,
    /// Lifts f_1, f_2, … with f_1∧…∧f_i = ι_n(m_i), in the coordinates of D.
    pub flag: Vec<Vec<DifElement<Q>>>,
    pub level: u32,
    pub cutoff: usize,
}

fn tol() -> i64 {
    DEFAULT_TARGET - SLACK
}

pub(crate) fn negligible<Q: Scalar>(x: &DifElement<Q>) -> bool {
    order_at(x, tol()) >= x.t_order_cap()
}

/// Valuation of the (t^0, z^0) coefficient when it is visibly nonzero.
fn unit_size<Q: Scalar>(x: &DifElement<Q>) -> Option<i64> {
    x.coeff(0).coeff(0).valuation().filter(|&v| v < tol())
}

fn odd_before(l: usize, s: &[usize]) -> bool {
    s.iter().filter(|&&x| x < l).count() % 2 == 1
}

/// v ∧ w for v ∈ B^r and w ∈ ∧^q B^r.
pub(crate) fn wedge_vec<Q: Scalar>(v: &[DifElement<Q>], w: &[DifElement<Q>], r: usize, q: usize) -> Vec<DifElement<Q>> {
    let zero = v[0].zero_like();
    let big = subsets(r, q);
    let mut out = vec![zero; subsets(r, q + 1).len()];
    for (a, s) in big.iter().enumerate() {
        if negligible(&w[a]) {
            continue;
        }
        for l in (0..r).filter(|l| !s.contains(l)) {
            let mut u = s.clone();
            u.push(l);
            u.sort();
            let term = v[l].clone() * w[a].clone();
            let idx = subset_index(r, &u);
            out[idx] = if odd_before(l, s) { out[idx].clone() - term } else { out[idx].clone() + term };
        }
    }
    out
}

/// w' with w = μ ∧ w' for w ∈ ∧^q, using the pivot coordinate j of μ
/// (`cinv` = μ_j^{-1}); the result lives on the coordinates other than j.
fn contract<Q: Scalar>(w: &[DifElement<Q>], r: usize, q: usize, j: usize, cinv: &DifElement<Q>) -> Vec<DifElement<Q>> {
    subsets(r - 1, q - 1)
        .into_iter()
        .map(|s| {
            let orig: Vec<usize> = s.iter().map(|&x| if x < j { x } else { x + 1 }).collect();
            let mut full = orig.clone();
            full.push(j);
            full.sort();
            let c = w[subset_index(r, &full)].clone() * cinv.clone();
            if odd_before(j, &orig) {
                -c
            } else {
                c
            }
        })
        .collect()
}

pub(crate) fn level_check<Q: Scalar>(d: &PhiGammaModule<Q>, n: u32) -> Result<(), TriangError> {
    let r = Annulus::level_radius(d.prime(), n);
    if n == 0 || !d.frame().ann.contains(r) {
        return Err(periods::PeriodError::LevelOutOfRange { n, r: r.to_string() }.into());
    }
    Ok(())
}

/// Eigenvector check of each m_i on ∧^i D, then the recursive chain test at
/// level n modulo t^k.
pub fn chain_test<Q: Scalar>(d: &PhiGammaModule<Q>, chain: &Chain<Q>, n: u32, k: usize) -> Result<ChainReport<Q>, TriangError> {
    let rank = d.rank();
    if chain.len() != rank || chain.characters.len() != rank {
        return Err(TriangError::ChainFailed(format!("a chain of rank {rank} has {rank} vectors, got {}", chain.len())));
    }
    level_check(d, n)?;
    let mut floors = Vec::with_capacity(rank);
    let mut images = Vec::with_capacity(rank);
    for (i, (m, delta)) in chain.vectors.iter().zip(&chain.characters).enumerate() {
        let wi = d.wedge(i + 1)?;
        let f = eigen_residual(&wi, m, delta)?;
        if f.map_or(false, |f| f < W::from_integer(EIGEN_FLOOR)) {
            return Err(TriangError::NotEigenvector { index: i + 1, floor: f.unwrap().to_string() });
        }
        floors.push(f);
        images.push(wi.localize_vector(m, n, k)?);
    }
    let mut report = ChainReport {
        is_chain: false,
        failure: None,
        t_orders: Vec::new(),
        residual_floors: floors,
        flag: Vec::new(),
        level: n,
        cutoff: k,
    };
    let mut idx: Vec<usize> = (0..rank).collect();
    let mut cur = images;
    for step in 1..=rank {
        let r = idx.len();
        let mu = cur[0].clone();
        let order = mu.iter().map(|x| order_at(x, tol())).min().unwrap_or(k);
        report.t_orders.push(order);
        let pivot = (0..r).filter_map(|a| unit_size(&mu[a]).map(|v| (v, a))).min();
        let Some((_, j)) = pivot else {
            report.failure = Some(ChainFailure::Saturation { step, t_order: order });
            return Ok(report);
        };
        let mut f = vec![mu[0].zero_like(); rank];
        for (a, &o) in idx.iter().enumerate() {
            f[o] = mu[a].clone();
        }
        report.flag.push(f);
        for (i, w) in cur.iter().enumerate().skip(1) {
            if !wedge_vec(&mu, w, r, i + 1).iter().all(negligible) {
                report.failure = Some(ChainFailure::Wedge { step, index: step + i });
                return Ok(report);
            }
        }
        let cinv = mu[j].try_inv().expect("pivot is a unit");
        cur = cur.iter().enumerate().skip(1).map(|(i, w)| contract(w, r, i + 1, j, &cinv)).collect();
        idx.remove(j);
    }
    report.is_chain = true;
    Ok(report)
}

/// Extracted triangulation: parameters δ_i = Δ_i/Δ_{i−1} and the flag at
/// the localization level.
#[derive(Clone, Debug)]
pub struct Triangulation<Q: Scalar> {
    pub parameters: Vec<Character<Q>>,
    pub flag: Vec<Vec<DifElement<Q>>>,
    /// γ_0 and ω preserve every span(f_1, …, f_i).
    pub flag_stable: bool,
    pub level: u32,
    pub cutoff: usize,
}

pub fn extract_triangulation<Q: Scalar>(d: &PhiGammaModule<Q>, chain: &Chain<Q>, n: u32, k: usize) -> Result<Triangulation<Q>, TriangError> {
    let report = chain_test(d, chain, n, k)?;
    if !report.is_chain {
        return Err(TriangError::ChainFailed(report.failure.map(|f| f.to_string()).unwrap_or_default()));
    }
    let mut parameters: Vec<Character<Q>> = Vec::with_capacity(chain.len());
    for (i, delta) in chain.characters.iter().enumerate() {
        parameters.push(if i == 0 { delta.clone() } else { delta.div(&chain.characters[i - 1]) });
    }
    let dm = d.dif_module(n, k)?;
    let rank = d.rank();
    let mut flag_stable = true;
    let mut top: Vec<DifElement<Q>> = report.flag[0].clone();
    for i in 1..=rank {
        if i > 1 {
            top = wedge_vec(&report.flag[i - 1], &top, rank, i - 1);
        }
        if i == rank {
            break;
        }
        for f in &report.flag[..i] {
            for g in [dm.apply_gamma0(f), dm.apply_omega(f)] {
                flag_stable &= wedge_vec(&g, &top, rank, i).iter().all(negligible);
            }
        }
    }
    Ok(Triangulation { parameters, flag: report.flag, flag_stable, level: n, cutoff: k })
}
