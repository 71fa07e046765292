//! Power-series eigenvectors, solved coefficient by coefficient in T.
//!
//! For x = Σ v_i T^i the T^i-coefficient of A·φ(x) − α·x is
//! (p^i·A_0 − α)·v_i plus terms in v_0, …, v_{i−1}, so once p^i·A_0 − α is
//! invertible (i beyond the slope gap) the tail is forced. The head is the
//! Q_p-kernel of the φ-, γ_0- and ω-equations truncated at T^L.

use padic_core::{linalg, Matrix, Ring, Scalar, Trunc};
use phigamma::PhiGammaModule;
use robba::{gamma, gamma0, RobbaElement};

use crate::error::PeriodError;

/// S^d-valued coefficient vectors v_0, v_1, … of a power-series vector.
pub type Coeffs<Q> = Vec<Vec<Trunc<Q>>>;

/// One of the three semilinear actions in coefficient form.
struct Action<Q: Scalar> {
    /// Matrix coefficients M_l of the presentation.
    mats: Vec<Matrix<Trunc<Q>>>,
    /// `powers[i][h]`: T^h-coefficient of σ(T)^i.
    powers: Vec<Vec<Trunc<Q>>>,
    eig: Trunc<Q>,
}

impl<Q: Scalar> Action<Q> {
    /// T^j-coefficients (j < len) of M·σ(x) − eig·x.
    fn residual(&self, v: &Coeffs<Q>, len: usize, zero: &Trunc<Q>) -> Coeffs<Q> {
        let d = v.first().map_or(0, |x| x.len());
        let mut sx = vec![vec![zero.clone(); d]; len];
        for (i, vi) in v.iter().enumerate().take(len) {
            for h in i..len {
                let c = &self.powers[i][h];
                if c.vanishes() {
                    continue;
                }
                for r in 0..d {
                    sx[h][r] = sx[h][r].clone() + vi[r].clone() * c.clone();
                }
            }
        }
        let mut out = vec![vec![zero.clone(); d]; len];
        for (j, row) in out.iter_mut().enumerate() {
            for l in 0..=j.min(self.mats.len().saturating_sub(1)) {
                let mv = self.mats[l].apply(&sx[j - l]);
                for r in 0..d {
                    row[r] = row[r].clone() + mv[r].clone();
                }
            }
            if j < v.len() {
                for r in 0..d {
                    row[r] = row[r].clone() - self.eig.clone() * v[j][r].clone();
                }
            }
        }
        out
    }
}

fn coefficient_matrices<Q: Scalar>(m: &Matrix<RobbaElement<Q>>, upto: usize) -> Vec<Matrix<Trunc<Q>>> {
    let deg = m.entries().iter().map(|x| x.high_degree()).max().unwrap_or(0).max(0) as usize;
    (0..=deg.min(upto)).map(|l| m.map(|x| x.coeff(l as i64))).collect()
}

/// Coefficients of φ(T)^i = ((1+T)^p − 1)^i below T^len, for i < len.
pub(crate) fn phi_power_table<Q: Scalar>(one: &Q, p: u32, len: usize) -> Vec<Vec<Q>> {
    let mut base = vec![one.zero_like(); (p as usize + 1).min(len.max(1))];
    let mut binom = num_bigint::BigInt::from(1);
    for j in 1..=p as usize {
        binom = binom * num_bigint::BigInt::from(p as usize + 1 - j) / num_bigint::BigInt::from(j);
        if j < base.len() {
            base[j] = one.mul_int(&binom);
        }
    }
    let mut out = Vec::with_capacity(len);
    let mut cur = vec![one.zero_like(); len];
    if len > 0 {
        cur[0] = one.clone();
    }
    for _ in 0..len {
        out.push(cur.clone());
        let mut next = vec![one.zero_like(); len];
        for (a, x) in cur.iter().enumerate() {
            if x.vanishes() {
                continue;
            }
            for (b, y) in base.iter().enumerate() {
                if a + b < len && !y.vanishes() {
                    next[a + b] = next[a + b].clone() + x.clone() * y.clone();
                }
            }
        }
        cur = next;
    }
    out
}

/// Flattens S^d-vectors to Q_p-coordinates (component-major, then z-degree).
pub(crate) fn flatten<Q: Scalar>(v: &Coeffs<Q>) -> Vec<Q> {
    v.iter().flat_map(|row| row.iter().flat_map(|a| a.coeffs().iter().cloned())).collect()
}

pub(crate) fn unflatten<Q: Scalar>(c: &[Q], d: usize, m: usize) -> Coeffs<Q> {
    c.chunks(d * m).map(|row| row.chunks(m).map(|a| Trunc::new(a.to_vec())).collect()).collect()
}

/// The formal eigenspace of a power-series presentation.
pub(crate) struct FormalSolver<Q: Scalar> {
    d: usize,
    m: usize,
    p: u32,
    zero: Trunc<Q>,
    alpha: Trunc<Q>,
    /// Number of leading coefficients treated as unknowns.
    head: usize,
    phi: Vec<Matrix<Trunc<Q>>>,
    actions: Vec<Action<Q>>,
}

impl<Q: Scalar> FormalSolver<Q> {
    /// `head` leading coefficients are solved for; `eta0`, `eta_w` are the
    /// eigenvalues of γ_0 and ω.
    pub fn new(d: &PhiGammaModule<Q>, alpha: &Trunc<Q>, eta0: &Trunc<Q>, eta_w: &Trunc<Q>, head: usize, top: usize) -> Result<Self, PeriodError> {
        let like = d.like().clone();
        let frame = d.frame();
        let one = like.coeff(0).clone();
        let p = d.prime();
        let konst = |x: &Q| Trunc::constant(x.clone(), like.order());
        let ptab = phi_power_table(&one, p, head);
        let phi_powers: Vec<Vec<Trunc<Q>>> = ptab.iter().map(|r| r.iter().map(konst).collect()).collect();
        let mut g_powers = Vec::with_capacity(head);
        let mut w_powers = Vec::with_capacity(head);
        for i in 0..head {
            let t = RobbaElement::from_terms(&like, frame.ann, frame.window, &[(i as i64, like.one_like())]);
            let g = gamma0(&t);
            let w = gamma(&t, d.chi_omega())?;
            g_powers.push((0..head).map(|h| g.coeff(h as i64)).collect());
            w_powers.push((0..head).map(|h| w.coeff(h as i64)).collect());
        }
        let phi = coefficient_matrices(d.phi_matrix(), top);
        let actions = vec![
            Action { mats: phi.clone(), powers: phi_powers, eig: alpha.clone() },
            Action { mats: coefficient_matrices(d.gamma0_matrix(), head), powers: g_powers, eig: eta0.clone() },
            Action { mats: coefficient_matrices(d.omega_matrix(), head), powers: w_powers, eig: eta_w.clone() },
        ];
        Ok(FormalSolver { d: d.rank(), m: like.order(), p, zero: like.zero_like(), alpha: alpha.clone(), head, phi, actions })
    }

    /// Q_p-basis of the head coefficients (v_0, …, v_{head−1}) of all solutions.
    pub fn kernel(&self) -> Vec<Coeffs<Q>> {
        let unknowns = self.head * self.d * self.m;
        let one = self.zero.coeff(0).one_like();
        let mut cols: Vec<Vec<Q>> = Vec::with_capacity(unknowns);
        for idx in 0..unknowns {
            let mut c = vec![one.zero_like(); unknowns];
            c[idx] = one.clone();
            let v = unflatten(&c, self.d, self.m);
            let mut col = Vec::new();
            for act in &self.actions {
                col.extend(flatten(&act.residual(&v, self.head, &self.zero)));
            }
            cols.push(col);
        }
        let rows = cols[0].len();
        let mat = Matrix::from_fn(rows, unknowns, |i, j| cols[j][i].clone());
        linalg::kernel(&mat).into_iter().map(|x| unflatten(&x, self.d, self.m)).collect()
    }

    /// z·v for a coefficient vector.
    pub fn times_z(&self, v: &Coeffs<Q>) -> Coeffs<Q> {
        v.iter().map(|row| row.iter().map(|a| a.shift(1)).collect()).collect()
    }

    /// Continues a head solution through T^top by the forced recursion.
    pub fn extend(&self, head: &Coeffs<Q>, top: usize, ptab: &[Vec<Q>]) -> Result<Coeffs<Q>, PeriodError> {
        let d = self.d;
        let mut v: Coeffs<Q> = head.clone();
        let mut acc = vec![vec![self.zero.clone(); d]; top + 1];
        let add = |acc: &mut Vec<Vec<Trunc<Q>>>, vi: &[Trunc<Q>], i: usize| {
            for h in i..=top {
                let c = &ptab[i][h];
                if c.vanishes() {
                    continue;
                }
                for r in 0..d {
                    acc[h][r] = acc[h][r].clone() + vi[r].map(|x| x.clone() * c.clone());
                }
            }
        };
        for (i, vi) in v.iter().enumerate() {
            add(&mut acc, vi, i);
        }
        let one = self.zero.one_like();
        let mut pi = one.int_like(self.p as i64).pow_u(v.len() as u64);
        for i in v.len()..=top {
            let mut c = vec![self.zero.clone(); d];
            for l in 0..=i.min(self.phi.len() - 1) {
                let mv = self.phi[l].apply(&acc[i - l]);
                for r in 0..d {
                    c[r] = c[r].clone() + mv[r].clone();
                }
            }
            let lhs = Matrix::identity(d, &one).scale(&self.alpha) - self.phi[0].scale(&pi);
            let inv = linalg::inverse(&lhs).ok_or(PeriodError::SingularFrobenius)?;
            let vi = inv.apply(&c);
            add(&mut acc, &vi, i);
            v.push(vi);
            pi = pi * one.int_like(self.p as i64);
        }
        Ok(v)
    }
}
