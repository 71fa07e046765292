//! Residue rings R[x]/Φ_{p^n}(x), modeling K_n = Q_p(ε_n) (and K_n ⊗ S).

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;

use crate::linalg;
use crate::matrix::Matrix;
use crate::ring::{Ring, EXACT};

/// Degree of Φ_{p^n}.
pub fn cyclo_degree(p: u32, n: u32) -> usize {
    if n == 0 {
        1
    } else {
        (p as usize - 1) * (p as usize).pow(n - 1)
    }
}

#[derive(Clone)]
pub struct Cyclo<R> {
    p: u32,
    n: u32,
    c: Vec<R>,
}

impl<R: Ring> Cyclo<R> {
    /// Canonical residue of the polynomial `poly` (lowest degree first).
    pub fn reduce(poly: &[R], zero: &R, p: u32, n: u32) -> Self {
        let d = cyclo_degree(p, n);
        let mut c: Vec<R> = vec![zero.zero_like(); d];
        if n == 0 {
            for a in poly {
                c[0] = c[0].clone() + a.clone();
            }
            return Cyclo { p, n, c };
        }
        let pn = (p as usize).pow(n);
        let step = pn / p as usize;
        let mut folded: Vec<R> = vec![zero.zero_like(); pn];
        for (i, a) in poly.iter().enumerate() {
            let j = i % pn;
            folded[j] = folded[j].clone() + a.clone();
        }
        for (i, a) in folded.iter().enumerate().take(d) {
            c[i] = a.clone();
        }
        for i in d..pn {
            let r = i - d;
            if folded[i].vanishes() && folded[i].abs_prec() == EXACT {
                continue;
            }
            for j in 0..(p as usize - 1) {
                let k = r + j * step;
                c[k] = c[k].clone() - folded[i].clone();
            }
        }
        Cyclo { p, n, c }
    }

    /// Embeds a base element as a constant.
    pub fn constant(r: R, p: u32, n: u32) -> Self {
        let d = cyclo_degree(p, n);
        let mut c = vec![r.zero_like(); d];
        c[0] = r;
        Cyclo { p, n, c }
    }

    /// ε_n^e for any integer e.
    pub fn eps_pow(one: &R, p: u32, n: u32, e: i64) -> Self {
        if n == 0 {
            return Cyclo::constant(one.one_like(), p, 0);
        }
        let pn = (p as i64).pow(n);
        let k = e.rem_euclid(pn) as usize;
        let mut poly = vec![one.zero_like(); k + 1];
        poly[k] = one.one_like();
        Cyclo::reduce(&poly, one, p, n)
    }

    pub fn from_coords(c: Vec<R>, p: u32, n: u32) -> Self {
        assert_eq!(c.len(), cyclo_degree(p, n), "wrong number of coordinates");
        Cyclo { p, n, c }
    }

    pub fn level(&self) -> u32 {
        self.n
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.c.len()
    }

    /// Coordinates in the basis 1, ε, …, ε^{d-1}.
    pub fn coords(&self) -> &[R] {
        &self.c
    }

    pub fn map<U: Ring>(&self, f: impl Fn(&R) -> U) -> Cyclo<U> {
        Cyclo { p: self.p, n: self.n, c: self.c.iter().map(f).collect() }
    }

    /// Galois action ε ↦ ε^a (a prime to p).
    pub fn galois(&self, a: i64) -> Self {
        if self.n == 0 {
            return self.clone();
        }
        let pn = (self.p as i64).pow(self.n);
        let a = a.rem_euclid(pn);
        assert!(a % self.p as i64 != 0, "Galois exponent must be prime to p");
        let z = self.c[0].zero_like();
        let mut poly = vec![z; pn as usize];
        for (i, ci) in self.c.iter().enumerate() {
            let j = ((i as i64 * a) % pn) as usize;
            poly[j] = poly[j].clone() + ci.clone();
        }
        Cyclo::reduce(&poly, &self.c[0], self.p, self.n)
    }

    /// Tower embedding K_n → K_{n+1}, ε_n ↦ ε_{n+1}^p.
    pub fn embed_up(&self) -> Self {
        let n1 = self.n + 1;
        let z = self.c[0].zero_like();
        let mut poly = vec![z; self.c.len() * self.p as usize];
        for (i, ci) in self.c.iter().enumerate() {
            poly[i * self.p as usize] = ci.clone();
        }
        Cyclo::reduce(&poly, &self.c[0], self.p, n1)
    }

    /// Matrix of multiplication by `self` on coordinates (columns are images).
    pub fn mult_matrix(&self) -> Matrix<R> {
        let d = self.degree();
        let one = self.c[0].one_like();
        let mut cols = Vec::with_capacity(d);
        for j in 0..d {
            let e = Cyclo::eps_pow(&one, self.p, self.n, j as i64);
            cols.push((self.clone() * e).c);
        }
        Matrix::from_fn(d, d, |i, j| cols[j][i].clone())
    }

    fn check(&self, o: &Self) {
        assert!(self.p == o.p && self.n == o.n, "cyclotomic levels differ");
    }
}

impl<R: Ring> PartialEq for Cyclo<R> {
    fn eq(&self, o: &Self) -> bool {
        self.p == o.p && self.n == o.n && self.c.iter().zip(&o.c).all(|(a, b)| a == b)
    }
}

impl<R: Ring> fmt::Debug for Cyclo<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "K{}", self.n)?;
        f.debug_list().entries(self.c.iter()).finish()
    }
}

impl<R: Ring> Add for Cyclo<R> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        self.check(&o);
        Cyclo { p: self.p, n: self.n, c: self.c.into_iter().zip(o.c).map(|(a, b)| a + b).collect() }
    }
}

impl<R: Ring> Sub for Cyclo<R> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self.check(&o);
        Cyclo { p: self.p, n: self.n, c: self.c.into_iter().zip(o.c).map(|(a, b)| a - b).collect() }
    }
}

impl<R: Ring> Neg for Cyclo<R> {
    type Output = Self;
    fn neg(self) -> Self {
        Cyclo { p: self.p, n: self.n, c: self.c.into_iter().map(|a| -a).collect() }
    }
}

impl<R: Ring> Mul for Cyclo<R> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        self.check(&o);
        let d = self.degree();
        if d == 1 {
            return Cyclo { p: self.p, n: self.n, c: vec![self.c[0].clone() * o.c[0].clone()] };
        }
        let z = self.c[0].zero_like();
        let mut poly: Vec<Option<R>> = vec![None; 2 * d - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.vanishes() && a.abs_prec() == EXACT {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                if b.vanishes() && b.abs_prec() == EXACT {
                    continue;
                }
                let t = a.clone() * b.clone();
                poly[i + j] = Some(match poly[i + j].take() {
                    None => t,
                    Some(s) => s + t,
                });
            }
        }
        let poly: Vec<R> = poly.into_iter().map(|x| x.unwrap_or_else(|| z.clone())).collect();
        Cyclo::reduce(&poly, &z, self.p, self.n)
    }
}

impl<R: Ring> Ring for Cyclo<R> {
    fn zero_like(&self) -> Self {
        Cyclo { p: self.p, n: self.n, c: vec![self.c[0].zero_like(); self.degree()] }
    }
    fn one_like(&self) -> Self {
        Cyclo::constant(self.c[0].one_like(), self.p, self.n)
    }
    fn vanishes(&self) -> bool {
        self.c.iter().all(|a| a.vanishes())
    }
    fn is_unit(&self) -> bool {
        self.c.iter().any(|a| a.is_unit())
    }
    fn try_inv(&self) -> Option<Self> {
        if self.degree() == 1 {
            return Some(Cyclo { p: self.p, n: self.n, c: vec![self.c[0].try_inv()?] });
        }
        let m = self.mult_matrix();
        let one = Cyclo::constant(self.c[0].one_like(), self.p, self.n);
        let x = linalg::solve(&m, &one.c)?;
        Some(Cyclo { p: self.p, n: self.n, c: x })
    }
    fn valuation(&self) -> Option<i64> {
        self.c.iter().filter_map(|a| a.valuation()).min()
    }
    fn val_floor(&self) -> i64 {
        self.c.iter().map(|a| a.val_floor()).min().unwrap_or(EXACT)
    }
    fn abs_prec(&self) -> i64 {
        self.c.iter().map(|a| a.abs_prec()).min().unwrap_or(EXACT)
    }
    fn cap_prec(&self, k: i64) -> Self {
        self.map(|a| a.cap_prec(k))
    }
    fn mul_int(&self, k: &BigInt) -> Self {
        self.map(|a| a.mul_int(k))
    }
    fn div_int(&self, k: &BigInt) -> Self {
        self.map(|a| a.div_int(k))
    }
    fn int_like(&self, k: i64) -> Self {
        Cyclo::constant(self.c[0].int_like(k), self.p, self.n)
    }
}
