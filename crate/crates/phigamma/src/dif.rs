//! Finite modules D_dif^{+,n}/(t^k) with their Γ-action, and Γ-eigenvectors.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use padic_core::{linalg, Character, Matrix, PadicError, Ring, Scalar, Trunc, EXACT};
use robba::DifElement;

use crate::error::PhiGammaError;

/// D_dif^{+,n}/(t^k) over K_n[[t]]/(t^k) ⊗ S with γ(e·v) = e·G·γ(v).
#[derive(Clone, Debug)]
pub struct DifModule<Q: Scalar> {
    n: u32,
    k: usize,
    m: usize,
    c0: Q,
    cw: Q,
    g: Matrix<DifElement<Q>>,
    w: Matrix<DifElement<Q>>,
}

fn no_log(e: PadicError) -> PhiGammaError {
    match e {
        PadicError::NoLogarithm => PhiGammaError::NoLogarithm,
        e => e.into(),
    }
}

/// Q_p-span bookkeeping on coordinate vectors.
fn span_rank<Q: Scalar>(rows: &[Vec<Q>]) -> usize {
    if rows.is_empty() || rows[0].is_empty() {
        return 0;
    }
    linalg::rank(&Matrix::from_rows(rows.to_vec()))
}

impl<Q: Scalar> DifModule<Q> {
    pub fn new(n: u32, k: usize, m: usize, c0: Q, cw: Q, g: Matrix<DifElement<Q>>, w: Matrix<DifElement<Q>>) -> Self {
        DifModule { n, k, m, c0, cw, g, w }
    }

    pub fn level(&self) -> u32 {
        self.n
    }

    pub fn t_order_cap(&self) -> usize {
        self.k
    }

    pub fn base_order(&self) -> usize {
        self.m
    }

    pub fn rank(&self) -> usize {
        self.g.rows()
    }

    pub fn prime(&self) -> u32 {
        self.c0.prime()
    }

    pub fn chi_gamma0(&self) -> &Q {
        &self.c0
    }

    pub fn chi_omega(&self) -> &Q {
        &self.cw
    }

    pub fn gamma0_matrix(&self) -> &Matrix<DifElement<Q>> {
        &self.g
    }

    pub fn omega_matrix(&self) -> &Matrix<DifElement<Q>> {
        &self.w
    }

    /// Dimension over K_n of K_n ⊗ Q_p-coordinates per entry.
    fn entry_dim(&self) -> usize {
        self.k * self.m * padic_core::cyclo_degree(self.prime(), self.n)
    }

    /// Q_p-dimension of the module.
    pub fn q_dim(&self) -> usize {
        self.rank() * self.entry_dim()
    }

    pub fn apply_gamma0(&self, v: &[DifElement<Q>]) -> Vec<DifElement<Q>> {
        let gv: Vec<DifElement<Q>> = v.iter().map(|x| x.gamma(&self.c0)).collect();
        self.g.apply(&gv)
    }

    pub fn apply_omega(&self, v: &[DifElement<Q>]) -> Vec<DifElement<Q>> {
        let wv: Vec<DifElement<Q>> = v.iter().map(|x| x.gamma(&self.cw)).collect();
        self.w.apply(&wv)
    }

    pub fn zero_vector(&self) -> Vec<DifElement<Q>> {
        let z = DifElement::zero(&self.c0.one_like(), self.n, self.k, self.m);
        vec![z; self.rank()]
    }

    pub fn vector_coords(&self, v: &[DifElement<Q>]) -> Vec<Q> {
        v.iter().flat_map(|x| x.coords()).collect()
    }

    pub fn vector_from_coords(&self, c: &[Q]) -> Vec<DifElement<Q>> {
        let e = self.entry_dim();
        c.chunks(e).map(|ch| DifElement::from_coords(ch, self.prime(), self.n, self.k, self.m)).collect()
    }

    /// Reduction modulo t^j for j <= k.
    pub fn truncate(&self, j: usize) -> Self {
        let j = j.min(self.k);
        DifModule {
            k: j,
            g: self.g.map(|x| x.truncate(j)),
            w: self.w.map(|x| x.truncate(j)),
            ..self.clone()
        }
    }

    /// Specialization z = 0.
    pub fn reduce_base(&self) -> Self {
        DifModule { m: 1, g: self.g.map(|x| x.reduce_base()), w: self.w.map(|x| x.reduce_base()), ..self.clone() }
    }

    /// The module in the basis e·U: G ↦ U^{-1}·G·γ_0(U), W ↦ U^{-1}·W·ω(U).
    pub fn conjugate(&self, u: &Matrix<DifElement<Q>>) -> Result<Self, PhiGammaError> {
        let ui = linalg::inverse(u).ok_or_else(|| PhiGammaError::NotInvertible("basis change mod t^k".into()))?;
        let gu = u.map(|x| x.gamma(&self.c0));
        let wu = u.map(|x| x.gamma(&self.cw));
        Ok(DifModule { g: ui.clone() * self.g.clone() * gu, w: ui * self.w.clone() * wu, ..self.clone() })
    }

    /// Lowest valuation among entries of G·γ_0(W) − W·ω(G).
    pub fn commutation_valuation(&self) -> i64 {
        let lhs = self.g.clone() * self.w.map(|x| x.gamma(&self.c0));
        let rhs = self.w.clone() * self.g.map(|x| x.gamma(&self.cw));
        (lhs - rhs).val_floor()
    }

    /// {x : γ_0 x = η(χ(γ_0)) x, ω x = η(χ(ω)) x} by Q_p-linear algebra on coordinates.
    pub fn gamma_invariants(&self, eta: &Character<Q>) -> Result<Invariants<Q>, PhiGammaError> {
        let e0 = eta.eval_unit(&self.c0).map_err(no_log)?;
        let ew = eta.eval_unit(&self.cw).map_err(no_log)?;
        let total = self.q_dim();
        let one = self.c0.one_like();
        let mut cols: Vec<Vec<Q>> = Vec::with_capacity(total);
        for idx in 0..total {
            let mut c = vec![one.zero_like(); total];
            c[idx] = one.clone();
            let u = self.vector_from_coords(&c);
            let su: Vec<DifElement<Q>> = u.iter().map(|x| x.scale_base(&e0)).collect();
            let wu: Vec<DifElement<Q>> = u.iter().map(|x| x.scale_base(&ew)).collect();
            let a: Vec<DifElement<Q>> = self.apply_gamma0(&u).into_iter().zip(su).map(|(x, y)| x - y).collect();
            let b: Vec<DifElement<Q>> = self.apply_omega(&u).into_iter().zip(wu).map(|(x, y)| x - y).collect();
            let mut col = self.vector_coords(&a);
            col.extend(self.vector_coords(&b));
            cols.push(col);
        }
        let rows = 2 * total;
        let mat = Matrix::from_fn(rows, total, |i, j| cols[j][i].clone());
        let basis = linalg::kernel(&mat);
        Ok(self.invariants_from_basis(basis))
    }

    fn invariants_from_basis(&self, basis: Vec<Vec<Q>>) -> Invariants<Q> {
        let z = Trunc::var(&self.c0.one_like(), self.m);
        let zk: Vec<Vec<Q>> = basis
            .iter()
            .map(|x| {
                let v = self.vector_from_coords(x);
                let zv: Vec<DifElement<Q>> = v.iter().map(|e| e.scale_base(&z)).collect();
                self.vector_coords(&zv)
            })
            .collect();
        let mut span = if self.m > 1 { zk } else { Vec::new() };
        let mut base_rank = span_rank(&span);
        let mut generators = Vec::new();
        for x in &basis {
            span.push(x.clone());
            let r = span_rank(&span);
            if r > base_rank {
                base_rank = r;
                generators.push(self.vector_from_coords(x));
            } else {
                span.pop();
            }
        }
        let rank = generators.len();
        let free = basis.len() == rank * self.m;
        Invariants { basis, generators, rank, free }
    }
}

/// Γ-eigenvectors in a [`DifModule`].
#[derive(Clone, Debug)]
pub struct Invariants<Q: Scalar> {
    /// Q_p-basis (coordinates).
    pub basis: Vec<Vec<Q>>,
    /// S-module generators lifting a basis of K/zK.
    pub generators: Vec<Vec<DifElement<Q>>>,
    /// Minimal number of S-generators.
    pub rank: usize,
    /// Whether the module is S-free (dim_Q K = rank · dim_Q S).
    pub free: bool,
}

impl<Q: Scalar> Invariants<Q> {
    pub fn q_dim(&self) -> usize {
        self.basis.len()
    }

    /// Whether coordinates `c` lie in the Q_p-span of the basis.
    pub fn contains(&self, c: &[Q]) -> bool {
        let r0 = span_rank(&self.basis);
        let mut rows = self.basis.clone();
        rows.push(c.to_vec());
        span_rank(&rows) == r0
    }
}

/// Kernel and cokernel of the reduction (D_dif^{+,n}/(t^k))^Γ → (D_Sen^n)^Γ.
#[derive(Clone, Debug)]
pub struct DescentReport<Q: Scalar> {
    pub k: usize,
    pub p_k: Trunc<Q>,
    pub source_dim: usize,
    pub target_dim: usize,
    pub kernel_dim: usize,
    pub cokernel_dim: usize,
    /// P(k) kills every kernel vector.
    pub kernel_killed: bool,
    /// P(k)·(target) lies in the image.
    pub cokernel_killed: bool,
}

impl<Q: Scalar> DescentReport<Q> {
    pub fn is_isomorphism(&self) -> bool {
        self.kernel_dim == 0 && self.cokernel_dim == 0
    }
}

impl<Q: Scalar> DifModule<Q> {
    /// Compares Γ-invariants mod t^k with those mod t, given P(k).
    pub fn descent(&self, eta: &Character<Q>, p_k: &Trunc<Q>) -> Result<DescentReport<Q>, PhiGammaError> {
        let big = self.gamma_invariants(eta)?;
        let small_mod = self.truncate(1);
        let small = small_mod.gamma_invariants(eta)?;
        let reduce = |c: &[Q]| -> Vec<Q> {
            let v = self.vector_from_coords(c);
            let r: Vec<DifElement<Q>> = v.iter().map(|x| x.truncate(1)).collect();
            small_mod.vector_coords(&r)
        };
        let images: Vec<Vec<Q>> = big.basis.iter().map(|c| reduce(c)).collect();
        let image_rank = span_rank(&images);
        let kernel_dim = big.basis.len() - image_rank;
        let one = self.c0.one_like();

        // Kernel vectors: combinations of the basis with zero image.
        let mut kernel_killed = true;
        if kernel_dim > 0 {
            let len = small_mod.q_dim();
            let mat = Matrix::from_fn(len, images.len(), |i, j| images[j][i].clone());
            for combo in linalg::kernel(&mat) {
                let mut acc = vec![one.zero_like(); self.q_dim()];
                for (cf, b) in combo.iter().zip(&big.basis) {
                    for (a, x) in acc.iter_mut().zip(b) {
                        *a = a.clone() + cf.clone() * x.clone();
                    }
                }
                let v = self.vector_from_coords(&acc);
                kernel_killed &= v.iter().all(|x| x.scale_base(p_k).vanishes());
            }
        }

        let cokernel_dim = small.basis.len() - image_rank;
        let mut cokernel_killed = true;
        if cokernel_dim > 0 {
            for y in &small.basis {
                let v = small_mod.vector_from_coords(y);
                let pv: Vec<DifElement<Q>> = v.iter().map(|x| x.scale_base(p_k)).collect();
                let mut rows = images.clone();
                rows.push(small_mod.vector_coords(&pv));
                cokernel_killed &= span_rank(&rows) == image_rank;
            }
        }
        Ok(DescentReport {
            k: self.k,
            p_k: p_k.clone(),
            source_dim: big.basis.len(),
            target_dim: small.basis.len(),
            kernel_dim,
            cokernel_dim,
            kernel_killed,
            cokernel_killed,
        })
    }
}

/// Residue of a unit exponent modulo p^n as a machine integer.
pub(crate) fn residue(c: &impl Scalar, n: u32) -> i64 {
    c.residue_mod_ppow(n).and_then(|r: BigInt| r.to_i64()).expect("unit exponent with a small residue")
}

pub(crate) fn prec_of<R: Ring>(m: &Matrix<R>) -> i64 {
    m.entries().iter().map(|x| x.abs_prec()).min().unwrap_or(EXACT)
}
