//! (φ, Γ)-modules presented by matrices over the truncated Robba ring.
//!
//! The basis is a row e with φ(e) = e·A, γ_0(e) = e·G and ω(e) = e·W, so
//! for a column v of coordinates φ(e·v) = e·A·φ(v) and γ(e·v) = e·G·γ(v).

use std::fmt;

use padic_core::{Character, Matrix, PadicError, Ring, Scalar, Trunc};
use robba::{chi_gamma0, chi_omega, gamma, gamma0, phi, Annulus, Localizer, RobbaElement, W};

use crate::dif::DifModule;
use crate::error::PhiGammaError;

/// Annulus and window shared by all entries of a presentation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Frame {
    pub ann: Annulus,
    pub window: i64,
}

impl Frame {
    pub fn new(ann: Annulus, window: i64) -> Self {
        Frame { ann, window }
    }

    /// Annulus [r_levels, p/(p − 1)] with a window long enough that a
    /// truncated integral power series has error at least `target` there.
    pub fn standard(p: u32, levels: u32, target: i64) -> Self {
        let r1 = Annulus::level_radius(p, levels);
        let r2 = W::new(p as i64, p as i64 - 1);
        let window = (W::from_integer(target + 4) / r1).ceil().to_integer();
        Frame { ann: Annulus::new(r1, r2), window }
    }

    /// Like [`Frame::standard`], with the window grown until series with
    /// coefficients of size i^j (such as t^j) still truncate below the
    /// target, also after one Frobenius: W·r_1 − j·(1 + log_p W) ≥ target + 4.
    pub fn for_t_order(p: u32, levels: u32, target: i64, j: u32) -> Self {
        let mut f = Frame::standard(p, levels, target);
        let r1 = f.ann.r1;
        let need = W::from_integer(target + 4);
        let log_p = |w: i64| {
            let (mut e, mut x) = (0, 1i64);
            while x < w {
                x *= p as i64;
                e += 1;
            }
            e
        };
        while r1 * W::from_integer(f.window) - W::from_integer(j as i64 * (1 + log_p(f.window))) < need {
            f.window += 1;
        }
        f
    }

    /// Two levels for p = 3, one for larger primes.
    pub fn default_for(p: u32, target: i64) -> Self {
        Frame::standard(p, if p == 3 { 2 } else { 1 }, target)
    }

    /// Levels n >= 1 whose radius r_n lies in the annulus.
    pub fn levels(&self, p: u32) -> Vec<u32> {
        (1..32).filter(|&n| self.ann.contains(Annulus::level_radius(p, n))).collect()
    }
}

/// How a module was built, for reports.
#[derive(Clone, Debug, PartialEq)]
pub enum Provenance {
    Rank1 { p_value: String, weight: i64, nu: Option<String> },
    Sum(Box<Provenance>, Box<Provenance>),
    Tensor(Box<Provenance>, Box<Provenance>),
    Wedge(Box<Provenance>, usize),
    Twist(Box<Provenance>, String),
    TwistT(Box<Provenance>, i64),
    ChangeBasis(Box<Provenance>),
    ReduceBase(Box<Provenance>),
    Custom(String),
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Rank1 { p_value, weight, nu: None } => write!(f, "R({p_value}; {weight})"),
            Provenance::Rank1 { p_value, weight, nu: Some(nu) } => write!(f, "R({p_value}; {weight} + {nu})"),
            Provenance::Sum(a, b) => write!(f, "({a} + {b})"),
            Provenance::Tensor(a, b) => write!(f, "({a} x {b})"),
            Provenance::Wedge(a, i) => write!(f, "wedge{i}({a})"),
            Provenance::Twist(a, d) => write!(f, "{a}({d})"),
            Provenance::TwistT(a, j) => write!(f, "t^{j}{a}"),
            Provenance::ChangeBasis(a) => write!(f, "U.{a}"),
            Provenance::ReduceBase(a) => write!(f, "{a} mod z"),
            Provenance::Custom(s) => write!(f, "{s}"),
        }
    }
}

/// Compact text for a base element: its coefficients in z.
pub fn base_text<Q: Scalar>(a: &Trunc<Q>) -> String {
    let cs: Vec<String> = a
        .coeffs()
        .iter()
        .map(|x| match x.to_rational() {
            Some(r) => r.to_string(),
            None => format!("{x:?}"),
        })
        .collect();
    if cs.len() == 1 {
        cs[0].clone()
    } else {
        format!("[{}]", cs.join(", "))
    }
}

/// Closeness of two matrices: min over entries of `distance`, plus whether
/// every stored coefficient through the known degrees agrees.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Agreement {
    pub distance: Option<W>,
    pub agrees: bool,
}

pub fn compare<Q: Scalar>(x: &Matrix<RobbaElement<Q>>, y: &Matrix<RobbaElement<Q>>) -> Agreement {
    let mut distance: Option<W> = None;
    let mut agrees = true;
    for (a, b) in x.entries().iter().zip(y.entries()) {
        distance = robba::min_bound(distance, a.distance(b));
        agrees &= a.agrees_with(b);
    }
    Agreement { distance, agrees }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CommutationReport {
    /// A·φ(G) against G·γ_0(A).
    pub phi_gamma0: Agreement,
    /// A·φ(W) against W·ω(A).
    pub phi_omega: Agreement,
    /// G·γ_0(W) against W·ω(G).
    pub gamma0_omega: Agreement,
}

impl CommutationReport {
    pub fn holds(&self) -> bool {
        self.phi_gamma0.agrees && self.phi_omega.agrees && self.gamma0_omega.agrees
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct InvertibilityReport {
    /// A·A' − I for the computed inverse A'.
    pub residual: Agreement,
    pub target: i64,
}

impl InvertibilityReport {
    pub fn holds(&self) -> bool {
        self.residual.agrees && self.residual.distance.map_or(true, |w| w >= W::from_integer(self.target))
    }
}

/// Precision for the characters' values: that of the inputs, or 64 digits
/// for exact inputs.
fn context_prec(p: i64) -> i64 {
    if p == padic_core::EXACT {
        64
    } else {
        p
    }
}

fn no_log(e: PadicError) -> PhiGammaError {
    match e {
        PadicError::NoLogarithm => PhiGammaError::NoLogarithm,
        e => e.into(),
    }
}

/// Inverse through Cayley–Hamilton, A^{-1} = −(Σ_{j>=1} c_j A^{j−1}) / c_0,
/// with the residual distance of A·A^{-1} to I.
pub fn invert_matrix<Q: Scalar>(
    m: &Matrix<RobbaElement<Q>>,
) -> Result<(Matrix<RobbaElement<Q>>, Agreement), PhiGammaError> {
    if !m.is_square() || m.rows() == 0 {
        return Err(PhiGammaError::NotInvertible("not a nonempty square matrix".into()));
    }
    let d = m.rows();
    let like = m.get(0, 0).clone();
    let cp = m.charpoly();
    let inv0 = (-cp[0].clone())
        .try_inv()
        .ok_or_else(|| PhiGammaError::NotInvertible("determinant is not a unit on the annulus".into()))?;
    let mut b = Matrix::zeros(d, d, &like);
    let mut pw = Matrix::identity(d, &like);
    for (j, c) in cp.iter().enumerate().skip(1) {
        b = b + pw.scale(c);
        if j < d {
            pw = pw * m.clone();
        }
    }
    let inv = b.scale(&inv0);
    let check = compare(&(m.clone() * inv.clone()), &Matrix::identity(d, &like));
    Ok((inv, check))
}

fn map_matrix<Q: Scalar, U: Ring, E>(
    m: &Matrix<RobbaElement<Q>>,
    f: impl Fn(&RobbaElement<Q>) -> Result<U, E>,
) -> Result<Matrix<U>, E> {
    let mut out = Vec::with_capacity(m.rows());
    for i in 0..m.rows() {
        let mut row = Vec::with_capacity(m.cols());
        for j in 0..m.cols() {
            row.push(f(m.get(i, j))?);
        }
        out.push(row);
    }
    Ok(Matrix::from_rows(out))
}

#[derive(Clone)]
pub struct PhiGammaModule<Q: Scalar> {
    like: Trunc<Q>,
    frame: Frame,
    a: Matrix<RobbaElement<Q>>,
    g: Matrix<RobbaElement<Q>>,
    w: Matrix<RobbaElement<Q>>,
    c0: Q,
    cw: Q,
    provenance: Provenance,
}

impl<Q: Scalar> fmt::Debug for PhiGammaModule<Q> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PhiGammaModule[{}] rank {} A = {:?}", self.provenance, self.rank(), self.a)
    }
}

impl<Q: Scalar> PhiGammaModule<Q> {
    /// A module from explicit matrices.
    pub fn from_matrices(
        like: &Trunc<Q>,
        frame: Frame,
        a: Matrix<RobbaElement<Q>>,
        g: Matrix<RobbaElement<Q>>,
        w: Matrix<RobbaElement<Q>>,
        provenance: Provenance,
    ) -> Result<Self, PhiGammaError> {
        let d = a.rows();
        for m in [&a, &g, &w] {
            if m.rows() != d || m.cols() != d {
                return Err(PhiGammaError::Incompatible("matrices must be square of equal size".into()));
            }
        }
        let one = like.coeff(0);
        let prec = context_prec([&a, &g, &w].iter().flat_map(|m| m.entries().iter().map(|x| x.scalar_precision())).min().unwrap_or(padic_core::EXACT));
        let cw = chi_omega(one).ok_or(PhiGammaError::NoTorsionGenerator)?.cap_prec(prec);
        let c0 = chi_gamma0(one).cap_prec(prec);
        Ok(PhiGammaModule { like: like.one_like(), frame, a, g, w, c0, cw, provenance })
    }

    /// R(δ) with its canonical basis: A = δ(p), G = δ(χ(γ_0)), W = δ(χ(ω)).
    pub fn rank1(delta: &Character<Q>, frame: Frame) -> Result<Self, PhiGammaError> {
        let like = delta.p_value.one_like();
        let one = like.coeff(0).clone();
        let prec = context_prec(delta.p_value.abs_prec());
        let cw = chi_omega(&one).ok_or(PhiGammaError::NoTorsionGenerator)?.cap_prec(prec);
        let c0 = chi_gamma0(&one).cap_prec(prec);
        let el = |x: Trunc<Q>| Matrix::from_rows(vec![vec![RobbaElement::constant(x, &like, frame.ann, frame.window)]]);
        let a = el(delta.p_value.clone());
        let g = el(delta.eval_unit(&c0).map_err(no_log)?);
        let w = el(delta.eval_unit(&cw).map_err(no_log)?);
        let provenance = Provenance::Rank1 {
            p_value: base_text(&delta.p_value),
            weight: delta.weight,
            nu: delta.nu.as_ref().map(base_text),
        };
        Ok(PhiGammaModule { like, frame, a, g, w, c0, cw, provenance })
    }

    pub fn rank(&self) -> usize {
        self.a.rows()
    }

    pub fn prime(&self) -> u32 {
        self.like.coeff(0).prime()
    }

    /// The unit of S (fixes S and the scalar context).
    pub fn like(&self) -> &Trunc<Q> {
        &self.like
    }

    pub fn frame(&self) -> Frame {
        self.frame
    }

    pub fn phi_matrix(&self) -> &Matrix<RobbaElement<Q>> {
        &self.a
    }

    pub fn gamma0_matrix(&self) -> &Matrix<RobbaElement<Q>> {
        &self.g
    }

    pub fn omega_matrix(&self) -> &Matrix<RobbaElement<Q>> {
        &self.w
    }

    pub fn chi_gamma0(&self) -> &Q {
        &self.c0
    }

    pub fn chi_omega(&self) -> &Q {
        &self.cw
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// True when every matrix entry has no negative-degree terms.
    pub fn is_power_series(&self) -> bool {
        [&self.a, &self.g, &self.w].iter().all(|m| m.entries().iter().all(|x| x.is_power_series()))
    }

    fn check_compatible(&self, o: &Self) -> Result<(), PhiGammaError> {
        if self.prime() != o.prime() || self.like.order() != o.like.order() {
            return Err(PhiGammaError::Incompatible("different bases".into()));
        }
        if self.frame != o.frame {
            return Err(PhiGammaError::Incompatible("different annuli or windows".into()));
        }
        Ok(())
    }

    fn derived(&self, a: Matrix<RobbaElement<Q>>, g: Matrix<RobbaElement<Q>>, w: Matrix<RobbaElement<Q>>, provenance: Provenance) -> Self {
        PhiGammaModule { like: self.like.clone(), frame: self.frame, a, g, w, c0: self.c0.clone(), cw: self.cw.clone(), provenance }
    }

    pub fn direct_sum(&self, o: &Self) -> Result<Self, PhiGammaError> {
        self.check_compatible(o)?;
        Ok(self.derived(
            self.a.block_diag(&o.a),
            self.g.block_diag(&o.g),
            self.w.block_diag(&o.w),
            Provenance::Sum(Box::new(self.provenance.clone()), Box::new(o.provenance.clone())),
        ))
    }

    /// Tensor product; basis e_i ⊗ f_k has index i·rank(o) + k.
    pub fn tensor(&self, o: &Self) -> Result<Self, PhiGammaError> {
        self.check_compatible(o)?;
        Ok(self.derived(
            self.a.kronecker(&o.a),
            self.g.kronecker(&o.g),
            self.w.kronecker(&o.w),
            Provenance::Tensor(Box::new(self.provenance.clone()), Box::new(o.provenance.clone())),
        ))
    }

    /// ∧^i with basis the lexicographic i-subsets.
    pub fn wedge(&self, i: usize) -> Result<Self, PhiGammaError> {
        let d = self.rank();
        if i == 0 || i > d {
            return Err(PhiGammaError::RankOutOfRange { i, d });
        }
        Ok(self.derived(
            self.a.compound(i),
            self.g.compound(i),
            self.w.compound(i),
            Provenance::Wedge(Box::new(self.provenance.clone()), i),
        ))
    }

    /// D(δ) = D ⊗ R(δ).
    pub fn twist(&self, delta: &Character<Q>) -> Result<Self, PhiGammaError> {
        let r = PhiGammaModule::rank1(delta, self.frame)?;
        let mut out = self.tensor(&r)?;
        out.provenance = Provenance::Twist(Box::new(self.provenance.clone()), r.provenance.to_string());
        Ok(out)
    }

    /// Basis rescaled by t^j: φ(t^j) = p^j t^j and γ(t^j) = χ(γ)^j t^j.
    pub fn twist_t(&self, j: i64) -> Self {
        let p = self.like.int_like(self.prime() as i64);
        let pw = |x: Trunc<Q>| -> Trunc<Q> {
            if j >= 0 {
                x.pow_u(j as u64)
            } else {
                x.try_inv().expect("p and χ(γ) are invertible in S").pow_u(j.unsigned_abs())
            }
        };
        let sp = pw(p);
        let s0 = pw(Trunc::constant(self.c0.clone(), self.like.order()));
        let sw = pw(Trunc::constant(self.cw.clone(), self.like.order()));
        let sc = |m: &Matrix<RobbaElement<Q>>, s: &Trunc<Q>| m.map(|x| x.scale(s));
        self.derived(
            sc(&self.a, &sp),
            sc(&self.g, &s0),
            sc(&self.w, &sw),
            Provenance::TwistT(Box::new(self.provenance.clone()), j),
        )
    }

    /// New basis e·U: A ↦ U^{-1}·A·φ(U), G ↦ U^{-1}·G·γ_0(U), W ↦ U^{-1}·W·ω(U).
    pub fn change_basis(&self, u: &Matrix<RobbaElement<Q>>) -> Result<Self, PhiGammaError> {
        if u.rows() != self.rank() || u.cols() != self.rank() {
            return Err(PhiGammaError::Incompatible("basis change has the wrong size".into()));
        }
        let (ui, check) = invert_matrix(u)?;
        if !check.agrees {
            return Err(PhiGammaError::NotInvertible("inverse fails its residual check".into()));
        }
        let pu = u.map(phi);
        let gu = u.map(gamma0);
        let wu = map_matrix(u, |x| gamma(x, &self.cw))?;
        let a = self.settle(ui.clone() * self.a.clone() * pu)?;
        let g = self.settle(ui.clone() * self.g.clone() * gu)?;
        let w = self.settle(ui * self.w.clone() * wu)?;
        let mut out = self.derived(a, g, w, Provenance::ChangeBasis(Box::new(self.provenance.clone())));
        let ann = [&out.a, &out.g, &out.w]
            .iter()
            .flat_map(|m| m.entries().iter().map(|x| x.annulus()))
            .fold(self.frame.ann, |acc, x| acc.intersect(&x));
        if ann != self.frame.ann {
            if ann.r2 < ann.r1 * self.prime() as i64 {
                return Err(PhiGammaError::Incompatible("annulus too thin for the Frobenius after the basis change".into()));
            }
            out.frame.ann = ann;
        }
        Ok(out)
    }

    /// Power series converge on the whole disc outside the inner radius,
    /// so entries computed on a smaller annulus extend back to the frame.
    fn settle(&self, m: Matrix<RobbaElement<Q>>) -> Result<Matrix<RobbaElement<Q>>, PhiGammaError> {
        let ann = self.frame.ann;
        Ok(m.map(|x| {
            if x.is_power_series() && x.annulus().r1 <= ann.r1 {
                x.with_annulus(ann)
            } else {
                x.clone()
            }
        }))
    }

    /// Specialization z = 0 of S.
    pub fn reduce_base(&self) -> Self {
        let r = |m: &Matrix<RobbaElement<Q>>| m.map(|x| x.reduce_base());
        PhiGammaModule {
            like: self.like.resize(1),
            frame: self.frame,
            a: r(&self.a),
            g: r(&self.g),
            w: r(&self.w),
            c0: self.c0.clone(),
            cw: self.cw.clone(),
            provenance: Provenance::ReduceBase(Box::new(self.provenance.clone())),
        }
    }

    /// φ(e·v) = e·A·φ(v).
    pub fn apply_phi(&self, v: &[RobbaElement<Q>]) -> Vec<RobbaElement<Q>> {
        let pv: Vec<RobbaElement<Q>> = v.iter().map(phi).collect();
        self.a.apply(&pv)
    }

    pub fn apply_gamma0(&self, v: &[RobbaElement<Q>]) -> Vec<RobbaElement<Q>> {
        let gv: Vec<RobbaElement<Q>> = v.iter().map(gamma0).collect();
        self.g.apply(&gv)
    }

    pub fn apply_omega(&self, v: &[RobbaElement<Q>]) -> Result<Vec<RobbaElement<Q>>, PhiGammaError> {
        let mut wv = Vec::with_capacity(v.len());
        for x in v {
            wv.push(gamma(x, &self.cw)?);
        }
        Ok(self.w.apply(&wv))
    }

    pub fn check_commutation(&self) -> Result<CommutationReport, PhiGammaError> {
        let pg = self.a.clone() * self.g.map(phi);
        let ga = self.g.clone() * self.a.map(gamma0);
        let pw = self.a.clone() * self.w.map(phi);
        let wa = self.w.clone() * map_matrix(&self.a, |x| gamma(x, &self.cw))?;
        let gw = self.g.clone() * map_matrix(&self.w, |x| gamma(x, &self.c0))?;
        let wg = self.w.clone() * map_matrix(&self.g, |x| gamma(x, &self.cw))?;
        Ok(CommutationReport { phi_gamma0: compare(&pg, &ga), phi_omega: compare(&pw, &wa), gamma0_omega: compare(&gw, &wg) })
    }

    /// Certifies that A is invertible: w(A·A' − I) >= target for the
    /// computed inverse A'.
    pub fn invertibility(&self, target: i64) -> Result<InvertibilityReport, PhiGammaError> {
        let (_, residual) = invert_matrix(&self.a)?;
        Ok(InvertibilityReport { residual, target })
    }

    /// Constant terms of A (meaningful for power-series presentations).
    pub fn phi_constant_term(&self) -> Matrix<Trunc<Q>> {
        self.a.map(|x| x.coeff(0))
    }

    /// Entrywise ι_n of the Γ-matrices modulo t^k.
    pub fn dif_module(&self, n: u32, k: usize) -> Result<DifModule<Q>, PhiGammaError> {
        let loc = Localizer::new(self.like.coeff(0), n, k);
        let g = map_matrix(&self.g, |x| loc.apply(x))?;
        let w = map_matrix(&self.w, |x| loc.apply(x))?;
        Ok(DifModule::new(n, k, self.like.order(), self.c0.clone(), self.cw.clone(), g, w))
    }

    /// ι_n of a coordinate vector.
    pub fn localize_vector(&self, v: &[RobbaElement<Q>], n: u32, k: usize) -> Result<Vec<robba::DifElement<Q>>, PhiGammaError> {
        let loc = Localizer::new(self.like.coeff(0), n, k);
        let mut out = Vec::with_capacity(v.len());
        for x in v {
            out.push(loc.apply(x)?);
        }
        Ok(out)
    }

    /// Largest |exponent| among stored negative-degree terms (0 for power series).
    pub fn pole_order(&self) -> i64 {
        [&self.a, &self.g, &self.w]
            .iter()
            .flat_map(|m| m.entries().iter())
            .map(|x| if x.is_zero_stored() { 0 } else { x.low_degree().min(0).abs() })
            .max()
            .unwrap_or(0)
    }
}

/// A matrix of constants in the given frame.
pub fn scalar_matrix<Q: Scalar>(like: &Trunc<Q>, frame: Frame, rows: Vec<Vec<Trunc<Q>>>) -> Matrix<RobbaElement<Q>> {
    Matrix::from_rows(
        rows.into_iter()
            .map(|r| r.into_iter().map(|x| RobbaElement::constant(x, like, frame.ann, frame.window)).collect())
            .collect(),
    )
}
