//! Localization ι_n: T ↦ ε_n·exp(t/p^n) − 1 into K_n[[t]]/(t^k) ⊗ S.
//!
//! Elements are stored in the variable τ = t/p^n. The ideals (t^j) and
//! (τ^j) coincide, so t-adic orders are read off directly, while the
//! coefficients ε_n/j! of ι_n(T) stay nearly integral. [`DifElement::t_coeff`]
//! converts back to t-coordinates.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Mutex;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use padic_core::{Cyclo, Ring, Scalar, Trunc, EXACT};

use crate::element::{Annulus, RobbaElement, W};
use crate::error::RobbaError;

/// K_n ⊗ S: z-polynomials with K_n coefficients.
pub type KnS<Q> = Trunc<Cyclo<Q>>;

#[derive(Clone)]
pub struct DifElement<Q: Scalar> {
    n: u32,
    c: Trunc<KnS<Q>>,
    /// Per τ-degree lower bound on the valuation of the coordinate error
    /// coming from series truncation (`EXACT` when none).
    floors: Vec<i64>,
}

impl<Q: Scalar> DifElement<Q> {
    pub fn from_coeffs(n: u32, coeffs: Vec<KnS<Q>>) -> Self {
        let k = coeffs.len();
        DifElement { n, c: Trunc::new(coeffs), floors: vec![EXACT; k] }
    }

    /// The zero of K_n[[τ]]/(τ^k) ⊗ S, with S of order `m`.
    pub fn zero(like: &Q, n: u32, k: usize, m: usize) -> Self {
        let p = like.prime();
        let z = Trunc::constant(Cyclo::constant(like.zero_like(), p, n), m);
        DifElement::from_coeffs(n, vec![z; k])
    }

    /// Embeds an element of K_n ⊗ S as a constant.
    pub fn constant(a: KnS<Q>, n: u32, k: usize) -> Self {
        let z = a.zero_like();
        let mut c = vec![z; k];
        c[0] = a;
        DifElement::from_coeffs(n, c)
    }

    /// Embeds an element of S.
    pub fn from_base(a: &Trunc<Q>, n: u32, k: usize) -> Self {
        let p = a.coeff(0).prime();
        DifElement::constant(a.map(|x| Cyclo::constant(x.clone(), p, n)), n, k)
    }

    /// τ^j.
    pub fn tau_pow(like: &Q, n: u32, k: usize, m: usize, j: usize) -> Self {
        let p = like.prime();
        let mut z = DifElement::zero(like, n, k, m);
        if j < k {
            let mut c = z.c.into_coeffs();
            c[j] = Trunc::constant(Cyclo::constant(like.one_like(), p, n), m);
            z.c = Trunc::new(c);
        }
        z
    }

    pub fn level(&self) -> u32 {
        self.n
    }

    pub fn t_order_cap(&self) -> usize {
        self.c.order()
    }

    pub fn base_order(&self) -> usize {
        self.c.coeff(0).order()
    }

    pub fn prime(&self) -> u32 {
        self.c.coeff(0).coeff(0).prime()
    }

    pub fn coeffs(&self) -> &[KnS<Q>] {
        self.c.coeffs()
    }

    /// τ^j coefficient.
    pub fn coeff(&self, j: usize) -> &KnS<Q> {
        self.c.coeff(j)
    }

    pub fn floors(&self) -> &[i64] {
        &self.floors
    }

    /// t^j coefficient (τ^j coefficient times p^{−nj}).
    pub fn t_coeff(&self, j: usize) -> KnS<Q> {
        let s = self.coeff(j).coeff(0).coords()[0].ratio_like(&BigInt::from(1), &BigInt::from(self.prime()).pow(self.n * j as u32));
        self.coeff(j).map(|x| x.map(|y| y.clone() * s.clone()))
    }

    /// Image in level n+1: ε_n = ε_{n+1}^p and τ_n = p·τ_{n+1}.
    pub fn to_next_level(&self) -> Self {
        let p = BigInt::from(self.prime());
        let mut scale = BigInt::from(1);
        let mut out = Vec::with_capacity(self.c.order());
        for x in self.c.coeffs() {
            out.push(x.map(|y| y.embed_up().mul_int(&scale)));
            scale *= &p;
        }
        let floors = self.floors.iter().enumerate().map(|(j, &f)| padic_core::prec_add(f, j as i64)).collect();
        DifElement { n: self.n + 1, c: Trunc::new(out), floors }
    }

    /// Reduction modulo τ^k' (k' <= k).
    pub fn truncate(&self, k: usize) -> Self {
        DifElement { n: self.n, c: self.c.resize(k), floors: self.floors.iter().cloned().take(k).collect() }
    }

    /// Reduction modulo z (specialization of S to Q_p).
    pub fn reduce_base(&self) -> Self {
        DifElement { n: self.n, c: self.c.map(|a| a.resize(1)), floors: self.floors.clone() }
    }

    /// Index of the first nonvanishing τ-coefficient (`k` if all vanish).
    pub fn t_order(&self) -> usize {
        self.c.leading_index()
    }

    /// True when every vanishing coefficient below the order is known to at
    /// least one p-adic digit, so the order is not an artifact of precision.
    pub fn t_order_reliable(&self) -> bool {
        let o = self.t_order();
        (0..o).all(|j| self.floors[j] >= 1 && self.coeff(j).abs_prec() >= 1)
    }

    /// Γ action with χ(γ) = c: ε_n ↦ ε_n^{c mod p^n}, τ ↦ c·τ.
    pub fn gamma(&self, c: &Q) -> Self {
        let a = c.residue_mod_ppow(self.n).expect("unit exponent").to_i64().expect("small residue");
        let mut pw = c.one_like();
        let mut out = Vec::with_capacity(self.c.order());
        for x in self.c.coeffs() {
            let s = pw.clone();
            out.push(x.map(|y| y.galois(a).map(|u| u.clone() * s.clone())));
            pw = pw * c.clone();
        }
        DifElement { n: self.n, c: Trunc::new(out), floors: self.floors.clone() }
    }

    /// Multiplication by an element of S.
    pub fn scale_base(&self, a: &Trunc<Q>) -> Self {
        let p = self.prime();
        let n = self.n;
        let ak = a.map(|x| Cyclo::constant(x.clone(), p, n));
        DifElement { n, c: self.c.map(|x| x.clone() * ak.clone()), floors: self.floors.clone() }
    }

    /// Q_p-coordinates ordered by (τ-degree, z-degree, ε-power).
    pub fn coords(&self) -> Vec<Q> {
        let mut v = Vec::new();
        for x in self.c.coeffs() {
            for y in x.coeffs() {
                v.extend(y.coords().iter().cloned());
            }
        }
        v
    }

    pub fn from_coords(coords: &[Q], p: u32, n: u32, k: usize, m: usize) -> Self {
        let d = padic_core::cyclo_degree(p, n);
        assert_eq!(coords.len(), k * m * d);
        let mut it = coords.chunks(d);
        let c: Vec<KnS<Q>> = (0..k)
            .map(|_| Trunc::new((0..m).map(|_| Cyclo::from_coords(it.next().unwrap().to_vec(), p, n)).collect()))
            .collect();
        DifElement::from_coeffs(n, c)
    }

    pub fn vanishes_mod_t(&self, k: usize) -> bool {
        (0..k.min(self.c.order())).all(|j| self.coeff(j).vanishes())
    }

    fn with_floors(mut self, f: Vec<i64>) -> Self {
        self.floors = f;
        self
    }

    fn merge_floors(&self, o: &Self) -> Vec<i64> {
        self.floors.iter().zip(&o.floors).map(|(a, b)| *a.min(b)).collect()
    }
}

impl<Q: Scalar> PartialEq for DifElement<Q> {
    fn eq(&self, o: &Self) -> bool {
        self.n == o.n && self.c == o.c
    }
}

impl<Q: Scalar> fmt::Debug for DifElement<Q> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Dif(n={}, τ: {:?})", self.n, self.c)
    }
}

impl<Q: Scalar> Add for DifElement<Q> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let fl = self.merge_floors(&o);
        DifElement { n: self.n, c: self.c + o.c, floors: fl }
    }
}

impl<Q: Scalar> Sub for DifElement<Q> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        let fl = self.merge_floors(&o);
        DifElement { n: self.n, c: self.c - o.c, floors: fl }
    }
}

impl<Q: Scalar> Neg for DifElement<Q> {
    type Output = Self;
    fn neg(self) -> Self {
        DifElement { n: self.n, c: -self.c, floors: self.floors }
    }
}

impl<Q: Scalar> Mul for DifElement<Q> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let k = self.c.order();
        // floor of a product coefficient j: min over i of floors[i] + (valuation of the partner).
        let mut fl = vec![EXACT; k];
        for (j, f) in fl.iter_mut().enumerate() {
            for i in 0..=j {
                let a = padic_core::prec_add(self.floors[i], o.c.coeff(j - i).val_floor().min(0));
                let b = padic_core::prec_add(o.floors[i], self.c.coeff(j - i).val_floor().min(0));
                *f = (*f).min(a).min(b);
            }
        }
        DifElement { n: self.n, c: self.c * o.c, floors: fl }
    }
}

impl<Q: Scalar> Ring for DifElement<Q> {
    fn zero_like(&self) -> Self {
        let k = self.c.order();
        DifElement { n: self.n, c: self.c.zero_like(), floors: vec![EXACT; k] }
    }
    fn one_like(&self) -> Self {
        let k = self.c.order();
        DifElement { n: self.n, c: self.c.one_like(), floors: vec![EXACT; k] }
    }
    fn vanishes(&self) -> bool {
        self.c.vanishes()
    }
    fn is_unit(&self) -> bool {
        self.c.is_unit()
    }
    fn try_inv(&self) -> Option<Self> {
        Some(DifElement { n: self.n, c: self.c.try_inv()?, floors: self.floors.clone() })
    }
    fn valuation(&self) -> Option<i64> {
        self.c.valuation()
    }
    fn val_floor(&self) -> i64 {
        self.c.val_floor()
    }
    fn abs_prec(&self) -> i64 {
        self.c.abs_prec()
    }
    fn cap_prec(&self, k: i64) -> Self {
        DifElement { n: self.n, c: self.c.cap_prec(k), floors: self.floors.clone() }
    }
    fn mul_int(&self, k: &BigInt) -> Self {
        DifElement { n: self.n, c: self.c.mul_int(k), floors: self.floors.clone() }
    }
    fn div_int(&self, k: &BigInt) -> Self {
        DifElement { n: self.n, c: self.c.div_int(k), floors: self.floors.clone() }
    }
}

/// Precomputed powers of ι_n(T) for one (p, n, k).
pub struct Localizer<Q: Scalar> {
    p: u32,
    n: u32,
    k: usize,
    one: Q,
    pos: Mutex<Vec<Trunc<Cyclo<Q>>>>,
    inv: Trunc<Cyclo<Q>>,
}

impl<Q: Scalar> Localizer<Q> {
    /// `one` carries the scalar context (prime and precision).
    pub fn new(one: &Q, n: u32, k: usize) -> Self {
        assert!(n >= 1, "localization needs n >= 1");
        assert!(k >= 1, "t-order must be positive");
        let p = one.prime();
        let cz = Cyclo::constant(one.zero_like(), p, n);
        let eps = Cyclo::eps_pow(&one.one_like(), p, n, 1);
        let mut c = vec![cz.clone(); k];
        let mut fact = BigInt::from(1);
        for (j, cj) in c.iter_mut().enumerate() {
            if j == 0 {
                *cj = eps.clone() - Cyclo::constant(one.one_like(), p, n);
            } else {
                fact *= BigInt::from(j);
                let s = one.ratio_like(&BigInt::from(1), &fact);
                *cj = eps.map(|x| x.clone() * s.clone());
            }
        }
        let base = Trunc::new(c);
        let inv = base.try_inv().expect("ε_n − 1 is invertible in K_n");
        let unit = base.one_like();
        Localizer { p, n, k, one: one.clone(), pos: Mutex::new(vec![unit, base]), inv }
    }

    pub fn level(&self) -> u32 {
        self.n
    }

    pub fn t_order_cap(&self) -> usize {
        self.k
    }

    /// ι_n(T) as a τ-series.
    pub fn iota_t(&self) -> Trunc<Cyclo<Q>> {
        self.power(1)
    }

    fn power(&self, i: i64) -> Trunc<Cyclo<Q>> {
        if i < 0 {
            return self.inv.pow_u(i.unsigned_abs());
        }
        let mut pos = self.pos.lock().unwrap();
        while pos.len() as i64 <= i {
            let next = pos.last().unwrap().clone() * pos[1].clone();
            pos.push(next);
        }
        pos[i as usize].clone()
    }

    /// ι_n(f) modulo τ^k.
    pub fn apply(&self, f: &RobbaElement<Q>) -> Result<DifElement<Q>, RobbaError> {
        let r = Annulus::level_radius(self.p, self.n);
        if !f.annulus().contains(r) {
            return Err(RobbaError::LevelOutOfRange { n: self.n, r: r.to_string() });
        }
        let m = f.like().order();
        let cz = Cyclo::constant(self.one.zero_like(), self.p, self.n);
        let mut acc: Vec<Vec<Cyclo<Q>>> = vec![vec![cz; m]; self.k];
        for (i, a) in f.terms() {
            let pw = self.power(i);
            for (j, row) in acc.iter_mut().enumerate() {
                let pj = pw.coeff(j);
                if pj.vanishes() && pj.abs_prec() == EXACT {
                    continue;
                }
                for (l, slot) in row.iter_mut().enumerate() {
                    let s = a.coeff(l);
                    if s.vanishes() && s.abs_prec() == EXACT {
                        continue;
                    }
                    *slot = slot.clone() + pj.map(|x| x.clone() * s.clone());
                }
            }
        }
        let e = f.guarantee();
        let floors: Vec<i64> = (0..self.k)
            .map(|j| match e {
                None => EXACT,
                Some(e) => (e - W::new(j as i64, self.p as i64 - 1)).floor().to_integer(),
            })
            .collect();
        let coeffs: Vec<KnS<Q>> = acc
            .into_iter()
            .zip(&floors)
            .map(|(row, &fl)| {
                let t = Trunc::new(row);
                if fl == EXACT {
                    t
                } else {
                    t.cap_prec(fl)
                }
            })
            .collect();
        Ok(DifElement::from_coeffs(self.n, coeffs).with_floors(floors))
    }
}

/// ι_n(f) mod t^k (one-shot).
pub fn iota<Q: Scalar>(f: &RobbaElement<Q>, n: u32, k: usize) -> Result<DifElement<Q>, RobbaError> {
    Localizer::new(f.like().coeff(0), n, k).apply(f)
}

/// Per-level t-adic orders of ι_n(f) mod t^k.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TOrderReport {
    pub levels: Vec<u32>,
    pub orders: Vec<usize>,
    pub cutoff: usize,
    /// Minimum over tested levels; "divisible by t^j" holds for j <= min on the tested window only.
    pub min_order: usize,
    pub reliable: bool,
}

pub fn t_order<Q: Scalar>(f: &RobbaElement<Q>, levels: &[u32], k: usize) -> Result<TOrderReport, RobbaError> {
    let mut orders = Vec::new();
    let mut reliable = true;
    for &n in levels {
        let x = iota(f, n, k)?;
        reliable &= x.t_order_reliable();
        orders.push(x.t_order());
    }
    let min_order = orders.iter().cloned().min().unwrap_or(k);
    Ok(TOrderReport { levels: levels.to_vec(), orders, cutoff: k, min_order, reliable })
}
