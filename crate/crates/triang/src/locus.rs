//! Per-point triangulation reports over a finite sample of a family.

use padic_core::{Character, Scalar};
use periods::{slope_threshold, solve_period};
use phigamma::PhiGammaModule;
use rayon::prelude::*;

use crate::build::Chain;
use crate::chain::{chain_test, extract_triangulation, ChainFailure};
use crate::error::TriangError;
use crate::filtered::wedge_characters;

/// One specialization: a module and the successive characters δ_i whose
/// products Δ_i are queried on the wedge powers.
#[derive(Clone, Debug)]
pub struct ScanPoint<Q: Scalar> {
    pub label: String,
    pub module: PhiGammaModule<Q>,
    pub deltas: Vec<Character<Q>>,
}

/// Nonvanishing of P(k_i) for ∧^i D(Δ_i^{-1}), a sufficient condition for
/// the Δ_i-line to be saturated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Criterion {
    /// P(k_i) is a unit: saturation follows.
    Unit,
    /// P(k_i) vanishes at the point but not on the whole artinian fiber.
    VanishesAtPoint,
    /// P(k_i) vanishes on the whole fiber.
    Vanishes,
    Inapplicable(String),
}

impl Criterion {
    pub fn conclusive(&self) -> bool {
        *self == Criterion::Unit
    }
}

#[derive(Clone, Debug)]
pub struct PointReport<Q: Scalar> {
    pub label: String,
    pub cutoff: usize,
    pub criteria: Vec<Criterion>,
    /// t-order of the Δ_i-generator on ∧^i D, for each i solved.
    pub t_orders: Vec<usize>,
    /// Every Δ_i-line is generated by a vector not divisible by t.
    pub saturated: Option<bool>,
    pub chain: Option<bool>,
    pub failure: Option<ChainFailure>,
    pub parameters: Option<Vec<Character<Q>>>,
    pub error: Option<String>,
}

/// max_i of the injectivity thresholds of Δ_i on ∧^i D; it exceeds every
/// t-order a Δ_i-eigenvector can have.
pub fn default_cutoff<Q: Scalar>(d: &PhiGammaModule<Q>, deltas: &[Character<Q>]) -> Result<usize, TriangError> {
    let mut k = 1;
    for (i, delta) in wedge_characters(deltas).iter().enumerate() {
        k = k.max(slope_threshold(delta, &d.wedge(i + 1)?));
    }
    Ok(k)
}

/// Δ_i-eigenvectors m_i of ∧^i D, each required to span a rank-one line.
pub fn solve_chain<Q: Scalar>(d: &PhiGammaModule<Q>, deltas: &[Character<Q>], n: u32, k: usize) -> Result<(Chain<Q>, Vec<usize>), TriangError> {
    let characters = wedge_characters(deltas);
    let mut vectors = Vec::with_capacity(characters.len());
    let mut orders = Vec::with_capacity(characters.len());
    for (i, delta) in characters.iter().enumerate() {
        let s = solve_period(&d.wedge(i + 1)?, delta, n, k)?;
        if s.lower_bound != 1 || s.upper_bound != 1 || s.vectors.len() != 1 {
            return Err(TriangError::ChainFailed(format!(
                "Δ_{} has eigenspace rank between {} and {}",
                i + 1,
                s.lower_bound,
                s.upper_bound
            )));
        }
        orders.push(s.t_orders[0]);
        vectors.push(s.vectors[0].clone());
    }
    Ok((Chain { vectors, characters }, orders))
}

fn criterion<Q: Scalar>(d: &PhiGammaModule<Q>, delta: &Character<Q>, n: u32, i: usize) -> Criterion {
    let run = || -> Result<Criterion, TriangError> {
        let wi = d.wedge(i)?;
        let k = slope_threshold(delta, &wi);
        let sen = wi.twist(&delta.inv())?.sen(n)?;
        let pk = sen.p_value(k)?;
        let tol = sen.tolerance();
        let small = |x: &Q| x.valuation().map_or(true, |v| v >= tol);
        Ok(if !small(pk.coeff(0)) {
            Criterion::Unit
        } else if pk.coeffs().iter().all(small) {
            Criterion::Vanishes
        } else {
            Criterion::VanishesAtPoint
        })
    };
    run().unwrap_or_else(|e| Criterion::Inapplicable(e.to_string()))
}

pub fn scan_point<Q: Scalar>(pt: &ScanPoint<Q>, n: u32, k: Option<usize>) -> PointReport<Q> {
    let d = &pt.module;
    let mut rep = PointReport {
        label: pt.label.clone(),
        cutoff: 0,
        criteria: Vec::new(),
        t_orders: Vec::new(),
        saturated: None,
        chain: None,
        failure: None,
        parameters: None,
        error: None,
    };
    let characters = wedge_characters(&pt.deltas);
    rep.criteria = characters.iter().enumerate().map(|(i, c)| criterion(d, c, n, i + 1)).collect();
    let k = match k.map_or_else(|| default_cutoff(d, &pt.deltas), Ok) {
        Ok(k) => k,
        Err(e) => {
            rep.error = Some(e.to_string());
            return rep;
        }
    };
    rep.cutoff = k;
    let (chain, orders) = match solve_chain(d, &pt.deltas, n, k) {
        Ok(x) => x,
        Err(e) => {
            rep.error = Some(e.to_string());
            return rep;
        }
    };
    rep.saturated = Some(orders.iter().all(|&o| o == 0));
    rep.t_orders = orders;
    match chain_test(d, &chain, n, k) {
        Ok(r) => {
            rep.chain = Some(r.is_chain);
            rep.failure = r.failure;
            if r.is_chain {
                match extract_triangulation(d, &chain, n, k) {
                    Ok(t) => rep.parameters = Some(t.parameters),
                    Err(e) => rep.error = Some(e.to_string()),
                }
            }
        }
        Err(e) => rep.error = Some(e.to_string()),
    }
    rep
}

/// Scans the points in parallel; the reports keep the input order.
pub fn locus_scan<Q: Scalar + Send + Sync>(points: &[ScanPoint<Q>], n: u32, k: Option<usize>) -> Vec<PointReport<Q>>
where
    PhiGammaModule<Q>: Send + Sync,
{
    points.par_iter().map(|pt| scan_point(pt, n, k)).collect()
}
