//! The Sen operator Θ = log(γ)/log χ(γ) on D_Sen^n = D_dif^{+,n}/(t) and
//! Sen's polynomial det(T·I − Θ).

use num_bigint::BigInt;
use padic_core::{Matrix, Ring, Scalar, Trunc, EXACT};
use robba::KnS;

use crate::dif::{prec_of, residue, DifModule};
use crate::error::PhiGammaError;
use crate::module::PhiGammaModule;

/// Digits given up when deciding that a quantity vanishes.
pub const SLACK: i64 = 2;

/// Precision used for exact inputs.
const EXACT_CAP: i64 = 64;

const MAX_POWERS: u32 = 8;

#[derive(Clone, Debug)]
pub struct SenData<Q: Scalar> {
    pub n: u32,
    /// Θ as a matrix over K_n ⊗ S.
    pub theta: Matrix<KnS<Q>>,
    /// det(T·I − Θ), lowest degree first, projected to S.
    pub sen_poly: Vec<Trunc<Q>>,
    /// Extra p-th powers of γ_0^{p^{n−1}} needed for the log to converge.
    pub powers: u32,
    /// Lowest valuation of the non-rational K_n-coordinates of the
    /// characteristic polynomial before projection.
    pub descent_valuation: i64,
    /// Lowest valuation of G·σ(Θ) − Θ·G over γ_0 and ω.
    pub commutation_valuation: i64,
    /// Absolute precision of Θ.
    pub precision: i64,
}

impl<Q: Scalar> SenData<Q> {
    pub fn tolerance(&self) -> i64 {
        self.precision - SLACK
    }

    /// The characteristic polynomial has coefficients in S.
    pub fn descends(&self) -> bool {
        self.descent_valuation >= self.tolerance()
    }

    /// Θ commutes with the Γ-action.
    pub fn commutes(&self) -> bool {
        self.commutation_valuation >= self.tolerance()
    }

    fn negligible(&self, a: &Trunc<Q>) -> bool {
        a.vanishes() || a.val_floor() >= self.tolerance()
    }

    /// Q(T) with sen_poly = T·Q(T).
    pub fn q_factor(&self) -> Result<Vec<Trunc<Q>>, PhiGammaError> {
        let c0 = &self.sen_poly[0];
        if !self.negligible(c0) {
            return Err(PhiGammaError::ZeroNotARoot { valuation: c0.valuation() });
        }
        Ok(self.sen_poly[1..].to_vec())
    }

    /// P(i) = Π_{j=0}^{i−1} Q(−j).
    pub fn p_value(&self, i: usize) -> Result<Trunc<Q>, PhiGammaError> {
        let q = self.q_factor()?;
        let one = q[0].one_like();
        let mut acc = one.clone();
        for j in 0..i {
            let x = one.int_like(-(j as i64));
            let mut val = q[q.len() - 1].clone();
            for c in q.iter().rev().skip(1) {
                val = val * x.clone() + c.clone();
            }
            acc = acc * val;
        }
        Ok(acc)
    }

    /// det(Θ) in S.
    pub fn det_theta(&self) -> Trunc<Q> {
        let d = self.sen_poly.len() - 1;
        if d % 2 == 0 {
            self.sen_poly[0].clone()
        } else {
            -self.sen_poly[0].clone()
        }
    }

    /// det(Θ) vanishes at the working tolerance.
    pub fn det_vanishes(&self) -> bool {
        self.negligible(&self.det_theta())
    }
}

fn sigma<Q: Scalar>(m: &Matrix<KnS<Q>>, a: i64) -> Matrix<KnS<Q>> {
    m.map(|x| x.map(|y| y.galois(a)))
}

fn scale_q<Q: Scalar>(m: &Matrix<KnS<Q>>, s: &Q) -> Matrix<KnS<Q>> {
    m.map(|x| x.map(|y| y.map(|u| u.clone() * s.clone())))
}

impl<Q: Scalar> DifModule<Q> {
    /// Sen operator of the reduction modulo t.
    ///
    /// γ_0^N with N = p^{n−1} fixes K_n, so it acts K_n-linearly through the
    /// cocycle M = G·σ(G)···σ^{N−1}(G). Θ = log(M^{p^e}) / log χ(γ_0)^{N p^e}
    /// for the least e with |M^{p^e} − I| < 1.
    pub fn sen(&self) -> Result<SenData<Q>, PhiGammaError> {
        let n = self.level();
        let p = self.prime();
        let c0 = self.chi_gamma0().clone();
        if c0.log_unit().is_none() {
            return Err(PhiGammaError::NoLogarithm);
        }
        let g1: Matrix<KnS<Q>> = self.gamma0_matrix().map(|x| x.coeff(0).clone());
        let w1: Matrix<KnS<Q>> = self.omega_matrix().map(|x| x.coeff(0).clone());
        let mut prec = prec_of(&g1).min(c0.abs_prec());
        if prec == EXACT {
            prec = EXACT_CAP;
        }
        let g1 = g1.map(|x| x.cap_prec(prec));
        let w1 = w1.map(|x| x.cap_prec(prec));
        let d = g1.rows();
        let like = g1.get(0, 0).clone();
        let id = Matrix::identity(d, &like);
        let a0 = residue(&c0, n);
        let big_n = (p as u64).pow(n - 1);
        let mut cocycle = g1.clone();
        let mut s = g1.clone();
        for _ in 1..big_n {
            s = sigma(&s, a0);
            cocycle = cocycle * s.clone();
        }

        let mut x = cocycle;
        let mut powers = 0;
        loop {
            let v = (x.clone() - id.clone()).val_floor();
            if v >= 1 {
                break;
            }
            if powers == MAX_POWERS {
                return Err(PhiGammaError::NonConvergent { powers });
            }
            x = x.pow_u(p as u64);
            powers += 1;
        }

        // log(I + D) = Σ (−1)^{m+1} D^m / m, stopped once terms pass the precision.
        let dm = x - id.clone();
        let vd = dm.val_floor().max(1);
        let mut acc = dm.clone();
        let mut pw = dm.clone();
        let mut m: i64 = 2;
        loop {
            let lg = ((m as f64).ln() / (p as f64).ln()).floor() as i64;
            if m * vd - lg >= prec + 2 {
                break;
            }
            pw = pw * dm.clone();
            let term = pw.map(|e| e.div_int(&BigInt::from(m)));
            acc = if m % 2 == 0 { acc - term } else { acc + term };
            m += 1;
        }
        let mult = BigInt::from(big_n) * BigInt::from(p).pow(powers);
        let lc = c0.cap_prec(prec).log_unit().ok_or(PhiGammaError::NoLogarithm)?.mul_int(&mult);
        let inv = lc.try_inv().ok_or(PhiGammaError::NoLogarithm)?;
        let theta = scale_q(&acc, &inv);
        let precision = prec_of(&theta).min(prec);

        let cp = theta.charpoly();
        let mut descent_valuation = EXACT;
        let sen_poly: Vec<Trunc<Q>> = cp
            .iter()
            .map(|c| {
                Trunc::new(
                    c.coeffs()
                        .iter()
                        .map(|cy| {
                            for extra in &cy.coords()[1..] {
                                descent_valuation = descent_valuation.min(extra.val_floor());
                            }
                            cy.coords()[0].clone()
                        })
                        .collect(),
                )
            })
            .collect();

        let aw = residue(self.chi_omega(), n);
        let cg = (g1.clone() * sigma(&theta, a0) - theta.clone() * g1).val_floor();
        let cw = (w1.clone() * sigma(&theta, aw) - theta.clone() * w1).val_floor();

        Ok(SenData {
            n,
            theta,
            sen_poly,
            powers,
            descent_valuation,
            commutation_valuation: cg.min(cw),
            precision,
        })
    }
}

impl<Q: Scalar> PhiGammaModule<Q> {
    pub fn sen(&self, n: u32) -> Result<SenData<Q>, PhiGammaError> {
        self.dif_module(n, 1)?.sen()
    }
}
