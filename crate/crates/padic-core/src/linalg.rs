//! Gaussian elimination over field-like rings.
//!
//! Pivots are units of minimal valuation, which keeps p-adic elimination
//! stable; entries that vanish at their precision count as zero. Over a
//! local ring the same routine works whenever the needed pivots are units
//! (e.g. inverting a matrix whose reduction is invertible).

use crate::matrix::Matrix;
use crate::ring::Ring;

/// Reduced row echelon form and pivot columns.
pub fn rref<R: Ring>(m: &Matrix<R>) -> (Matrix<R>, Vec<usize>) {
    let (r, c) = (m.rows(), m.cols());
    let mut rows: Vec<Vec<R>> = (0..r).map(|i| m.row(i)).collect();
    let mut pivots = Vec::new();
    let mut top = 0;
    for col in 0..c {
        if top == r {
            break;
        }
        let best = (top..r)
            .filter(|&i| rows[i][col].is_unit())
            .min_by_key(|&i| rows[i][col].val_floor());
        let Some(b) = best else { continue };
        let Some(inv) = rows[b][col].try_inv() else { continue };
        rows.swap(top, b);
        let pr: Vec<R> = rows[top].iter().map(|x| x.clone() * inv.clone()).collect();
        rows[top] = pr;
        for i in 0..r {
            if i == top || rows[i][col].vanishes() {
                continue;
            }
            let f = rows[i][col].clone();
            for j in col..c {
                let t = f.clone() * rows[top][j].clone();
                rows[i][j] = rows[i][j].clone() - t;
            }
        }
        pivots.push(col);
        top += 1;
    }
    let like = m.get(0, 0).clone();
    let flat = Matrix::from_fn(r, c, |i, j| if rows.is_empty() { like.zero_like() } else { rows[i][j].clone() });
    (flat, pivots)
}

pub fn rank<R: Ring>(m: &Matrix<R>) -> usize {
    if m.rows() == 0 || m.cols() == 0 {
        return 0;
    }
    rref(m).1.len()
}

/// Basis of the right kernel `{x : m x = 0}`.
pub fn kernel<R: Ring>(m: &Matrix<R>) -> Vec<Vec<R>> {
    let c = m.cols();
    if c == 0 {
        return vec![];
    }
    if m.rows() == 0 {
        let like = m.get(0, 0);
        return (0..c)
            .map(|f| (0..c).map(|j| if j == f { like.one_like() } else { like.zero_like() }).collect())
            .collect();
    }
    let (e, piv) = rref(m);
    let like = m.get(0, 0).clone();
    let mut out = Vec::new();
    for f in 0..c {
        if piv.contains(&f) {
            continue;
        }
        let mut x = vec![like.zero_like(); c];
        x[f] = like.one_like();
        for (i, &pc) in piv.iter().enumerate() {
            x[pc] = -e.get(i, f).clone();
        }
        out.push(x);
    }
    out
}

/// Some solution of `m x = b`, or `None` when inconsistent.
pub fn solve<R: Ring>(m: &Matrix<R>, b: &[R]) -> Option<Vec<R>> {
    let (r, c) = (m.rows(), m.cols());
    assert_eq!(r, b.len());
    let aug = Matrix::from_fn(r, c + 1, |i, j| if j < c { m.get(i, j).clone() } else { b[i].clone() });
    let (e, piv) = rref(&aug);
    if piv.contains(&c) {
        return None;
    }
    let like = m.get(0, 0).clone();
    let mut x = vec![like.zero_like(); c];
    for (i, &pc) in piv.iter().enumerate() {
        x[pc] = e.get(i, c).clone();
    }
    Some(x)
}

/// Inverse of a square matrix, `None` when singular at working precision.
pub fn inverse<R: Ring>(m: &Matrix<R>) -> Option<Matrix<R>> {
    let n = m.rows();
    assert!(m.is_square());
    let like = m.get(0, 0).clone();
    let aug = Matrix::from_fn(n, 2 * n, |i, j| {
        if j < n {
            m.get(i, j).clone()
        } else if j - n == i {
            like.one_like()
        } else {
            like.zero_like()
        }
    });
    let (e, piv) = rref(&aug);
    if piv.len() < n || piv[n - 1] != n - 1 {
        return None;
    }
    Some(Matrix::from_fn(n, n, |i, j| e.get(i, n + j).clone()))
}

/// Column-space basis indices (pivot columns of `m`).
pub fn column_basis<R: Ring>(m: &Matrix<R>) -> Vec<usize> {
    if m.rows() == 0 {
        return vec![];
    }
    rref(m).1
}
