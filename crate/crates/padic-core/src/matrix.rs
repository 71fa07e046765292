//! Dense row-major matrices over a [`Ring`], with division-free
//! determinants and characteristic polynomials (Berkowitz), Kronecker
//! products and compound (exterior power) matrices.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;

use crate::ring::{Ring, EXACT};

#[derive(Clone)]
pub struct Matrix<R> {
    rows: usize,
    cols: usize,
    data: Vec<R>,
}

impl<R: Ring> Matrix<R> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> R) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<R>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn zeros(rows: usize, cols: usize, like: &R) -> Self {
        Matrix { rows, cols, data: vec![like.zero_like(); rows * cols] }
    }

    pub fn identity(n: usize, like: &R) -> Self {
        Matrix::from_fn(n, n, |i, j| if i == j { like.one_like() } else { like.zero_like() })
    }

    pub fn diag(entries: &[R]) -> Self {
        let n = entries.len();
        Matrix::from_fn(n, n, |i, j| if i == j { entries[i].clone() } else { entries[0].zero_like() })
    }

    pub fn column(v: &[R]) -> Self {
        Matrix { rows: v.len(), cols: 1, data: v.to_vec() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &R {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: R) {
        self.data[i * self.cols + j] = v;
    }

    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut R {
        &mut self.data[i * self.cols + j]
    }

    pub fn entries(&self) -> &[R] {
        &self.data
    }

    pub fn row(&self, i: usize) -> Vec<R> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn col(&self, j: usize) -> Vec<R> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn map<U: Ring>(&self, f: impl Fn(&R) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn scale(&self, s: &R) -> Self {
        self.map(|a| a.clone() * s.clone())
    }

    /// Matrix-vector product `self · v`.
    pub fn apply(&self, v: &[R]) -> Vec<R> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = self.get(i, 0).clone() * v[0].clone();
                for j in 1..self.cols {
                    acc = acc + self.get(i, j).clone() * v[j].clone();
                }
                acc
            })
            .collect()
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        Matrix::from_fn(rows.len(), cols.len(), |i, j| self.get(rows[i], cols[j]).clone())
    }

    pub fn vanishes(&self) -> bool {
        self.data.iter().all(|a| a.vanishes())
    }

    pub fn val_floor(&self) -> i64 {
        self.data.iter().map(|a| a.val_floor()).min().unwrap_or(EXACT)
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self.get(i, j).vanishes()))
    }

    pub fn mul_int(&self, c: &BigInt) -> Self {
        self.map(|a| a.mul_int(c))
    }

    pub fn pow_u(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Matrix::identity(self.rows, &self.data[0]);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            e >>= 1;
            if e > 0 {
                base = base.clone() * base;
            }
        }
        acc
    }

    /// Characteristic polynomial det(T·I − A), coefficients lowest degree
    /// first, computed without divisions.
    pub fn charpoly(&self) -> Vec<R> {
        assert!(self.is_square());
        let n = self.rows;
        let like = &self.data[0];
        // Highest-degree-first coefficients of the leading r×r block.
        let mut v: Vec<R> = vec![like.one_like(), -self.get(0, 0).clone()];
        for r in 1..n {
            let m = self.submatrix(&(0..r).collect::<Vec<_>>(), &(0..r).collect::<Vec<_>>());
            let c: Vec<R> = (0..r).map(|i| self.get(i, r).clone()).collect();
            let row: Vec<R> = (0..r).map(|j| self.get(r, j).clone()).collect();
            let a = self.get(r, r).clone();
            let mut t: Vec<R> = Vec::with_capacity(r + 2);
            t.push(like.one_like());
            t.push(-a);
            let mut mc = c;
            for _ in 0..r {
                let mut s = row[0].clone() * mc[0].clone();
                for j in 1..r {
                    s = s + row[j].clone() * mc[j].clone();
                }
                t.push(-s);
                mc = m.apply(&mc);
            }
            let mut nv: Vec<R> = Vec::with_capacity(r + 2);
            for i in 0..(r + 2) {
                let mut acc = like.zero_like();
                for j in 0..(r + 1) {
                    if i >= j {
                        acc = acc + t[i - j].clone() * v[j].clone();
                    }
                }
                nv.push(acc);
            }
            v = nv;
        }
        v.reverse();
        v
    }

    pub fn det(&self) -> R {
        assert!(self.is_square());
        if self.rows == 0 {
            panic!("determinant of an empty matrix needs a ring template");
        }
        let cp = self.charpoly();
        if self.rows % 2 == 0 {
            cp[0].clone()
        } else {
            -cp[0].clone()
        }
    }

    pub fn trace(&self) -> R {
        let mut acc = self.get(0, 0).clone();
        for i in 1..self.rows.min(self.cols) {
            acc = acc + self.get(i, i).clone();
        }
        acc
    }

    /// Kronecker product; basis `e_i ⊗ f_k` is ordered as `i * dim(f) + k`.
    pub fn kronecker(&self, o: &Self) -> Self {
        Matrix::from_fn(self.rows * o.rows, self.cols * o.cols, |i, j| {
            let (a, c) = (i / o.rows, i % o.rows);
            let (b, d) = (j / o.cols, j % o.cols);
            self.get(a, b).clone() * o.get(c, d).clone()
        })
    }

    /// Block diagonal sum.
    pub fn block_diag(&self, o: &Self) -> Self {
        let like = &self.data[0];
        Matrix::from_fn(self.rows + o.rows, self.cols + o.cols, |i, j| {
            if i < self.rows && j < self.cols {
                self.get(i, j).clone()
            } else if i >= self.rows && j >= self.cols {
                o.get(i - self.rows, j - self.cols).clone()
            } else {
                like.zero_like()
            }
        })
    }

    /// i-th compound matrix: entry (J, I) = det A[J, I] over lexicographic
    /// i-subsets.
    pub fn compound(&self, i: usize) -> Self {
        assert!(self.is_square());
        let subs = subsets(self.rows, i);
        Matrix::from_fn(subs.len(), subs.len(), |a, b| self.submatrix(&subs[a], &subs[b]).det())
    }
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for s in start..n {
            cur.push(s);
            rec(s + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Position of a sorted subset in [`subsets`] order.
pub fn subset_index(n: usize, set: &[usize]) -> usize {
    subsets(n, set.len()).iter().position(|s| s == set).expect("not a sorted subset")
}

impl<R: Ring> PartialEq for Matrix<R> {
    fn eq(&self, o: &Self) -> bool {
        self.rows == o.rows && self.cols == o.cols && self.data.iter().zip(&o.data).all(|(a, b)| a == b)
    }
}

impl<R: Ring> fmt::Debug for Matrix<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<R>> = (0..self.rows).map(|i| self.row(i)).collect();
        f.debug_list().entries(rows.iter()).finish()
    }
}

impl<R: Ring> Add for Matrix<R> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        assert!(self.rows == o.rows && self.cols == o.cols, "shape mismatch");
        Matrix { rows: self.rows, cols: self.cols, data: self.data.into_iter().zip(o.data).map(|(a, b)| a + b).collect() }
    }
}

impl<R: Ring> Sub for Matrix<R> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        assert!(self.rows == o.rows && self.cols == o.cols, "shape mismatch");
        Matrix { rows: self.rows, cols: self.cols, data: self.data.into_iter().zip(o.data).map(|(a, b)| a - b).collect() }
    }
}

impl<R: Ring> Neg for Matrix<R> {
    type Output = Self;
    fn neg(self) -> Self {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.into_iter().map(|a| -a).collect() }
    }
}

impl<R: Ring> Mul for Matrix<R> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        assert_eq!(self.cols, o.rows, "shape mismatch");
        Matrix::from_fn(self.rows, o.cols, |i, j| {
            let mut acc = self.get(i, 0).clone() * o.get(0, j).clone();
            for k in 1..self.cols {
                acc = acc + self.get(i, k).clone() * o.get(k, j).clone();
            }
            acc
        })
    }
}
