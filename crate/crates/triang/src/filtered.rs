//! Filtered φ-modules over Q_p, refinements and their parameters.

use padic_core::{linalg, Character, Matrix, Scalar, Trunc};

use crate::error::TriangError;

/// A crystalline Frobenius with a decreasing Hodge flag, one jump per step.
#[derive(Clone, Debug)]
pub struct FilteredPhiModule<Q: Scalar> {
    phi: Matrix<Q>,
    jumps: Vec<i64>,
    /// `fil[i]` has as columns a basis of Fil^{k_{i+1}}, of dimension d − i.
    fil: Vec<Matrix<Q>>,
}

fn column_rank<Q: Scalar>(cols: &[Vec<Q>]) -> usize {
    if cols.is_empty() {
        return 0;
    }
    linalg::rank(&Matrix::from_rows(cols.to_vec()))
}

fn columns<Q: Scalar>(m: &Matrix<Q>) -> Vec<Vec<Q>> {
    (0..m.cols()).map(|j| m.col(j)).collect()
}

impl<Q: Scalar> FilteredPhiModule<Q> {
    pub fn new(phi: Matrix<Q>, jumps: Vec<i64>, fil: Vec<Matrix<Q>>) -> Result<Self, TriangError> {
        let d = phi.rows();
        let bad = |s: String| Err(TriangError::BadFiltration(s));
        if !phi.is_square() || d == 0 {
            return bad("Frobenius must be a nonempty square matrix".into());
        }
        if jumps.len() != d || fil.len() != d {
            return bad(format!("need {d} jumps and {d} filtration steps"));
        }
        if jumps.windows(2).any(|w| w[0] >= w[1]) {
            return bad("jumps must be strictly increasing".into());
        }
        for (i, f) in fil.iter().enumerate() {
            if f.rows() != d || f.cols() != d - i || column_rank(&columns(f)) != d - i {
                return bad(format!("step {} must have a basis of {} vectors", i + 1, d - i));
            }
            if i > 0 {
                let mut both = columns(&fil[i - 1]);
                both.extend(columns(f));
                if column_rank(&both) != d - i + 1 {
                    return bad(format!("step {} is not contained in step {}", i + 1, i));
                }
            }
        }
        if phi.det().vanishes() {
            return bad("Frobenius is not invertible".into());
        }
        Ok(FilteredPhiModule { phi, jumps, fil })
    }

    /// Diagonal Frobenius with eigenvalue `eig[j]` on e_j, where e_j lies
    /// exactly in Fil^{weights[j]}; the weights must be distinct.
    pub fn split(eig: &[Q], weights: &[i64]) -> Result<Self, TriangError> {
        let d = eig.len();
        if weights.len() != d {
            return Err(TriangError::BadFiltration("one weight per eigenvalue".into()));
        }
        let one = eig[0].one_like();
        let mut jumps = weights.to_vec();
        jumps.sort();
        let fil = (0..d)
            .map(|i| {
                let lines: Vec<usize> = (0..d).filter(|&j| weights[j] >= jumps[i]).collect();
                Matrix::from_fn(d, lines.len(), |r, c| if r == lines[c] { one.clone() } else { one.zero_like() })
            })
            .collect();
        FilteredPhiModule::new(Matrix::diag(eig), jumps, fil)
    }

    pub fn dim(&self) -> usize {
        self.phi.rows()
    }

    pub fn phi(&self) -> &Matrix<Q> {
        &self.phi
    }

    pub fn jumps(&self) -> &[i64] {
        &self.jumps
    }

    pub fn fil(&self, i: usize) -> &Matrix<Q> {
        &self.fil[i]
    }

    fn eigenline(&self, lambda: &Q) -> Vec<Vec<Q>> {
        let d = self.dim();
        let m = Matrix::from_fn(d, d, |i, j| {
            let x = self.phi.get(i, j).clone();
            if i == j {
                x - lambda.clone()
            } else {
                x
            }
        });
        linalg::kernel(&m)
    }

    /// dim(span(vs) ∩ Fil^{k_{i+1}}).
    fn meet_dim(&self, vs: &[Vec<Q>], i: usize) -> usize {
        let f = columns(&self.fil[i]);
        let mut both = vs.to_vec();
        both.extend(f.iter().cloned());
        column_rank(vs) + f.len() - column_rank(&both)
    }

    /// Refinement by an ordering of the (distinct) Frobenius eigenvalues.
    pub fn refinement(&self, ordering: &[Q]) -> Result<Refinement<Q>, TriangError> {
        let d = self.dim();
        if ordering.len() != d {
            return Err(TriangError::OrderingLength { got: ordering.len(), d });
        }
        for a in 0..d {
            for b in a + 1..d {
                if (ordering[a].clone() - ordering[b].clone()).vanishes() {
                    return Err(TriangError::RepeatedEigenvalues);
                }
            }
        }
        let mut lines = Vec::with_capacity(d);
        for (i, l) in ordering.iter().enumerate() {
            let k = self.eigenline(l);
            match k.len() {
                0 => return Err(TriangError::NotEigenvalue(i)),
                1 => lines.push(k.into_iter().next().unwrap()),
                _ => return Err(TriangError::RepeatedEigenvalues),
            }
        }
        let mut induced = Vec::with_capacity(d);
        for i in 0..d {
            let s = (0..d)
                .rev()
                .find(|&j| self.meet_dim(&lines[..=i], j) > self.meet_dim(&lines[..i], j))
                .expect("Fil^{k_1} is everything");
            induced.push(self.jumps[s]);
        }
        Ok(Refinement { ordering: ordering.to_vec(), lines, induced_jumps: induced, jumps: self.jumps.clone() })
    }

    /// Refinements for every ordering of the given eigenvalues.
    pub fn refinements(&self, eig: &[Q]) -> Result<Vec<Refinement<Q>>, TriangError> {
        permutations(eig.len()).into_iter().map(|p| self.refinement(&p.iter().map(|&i| eig[i].clone()).collect::<Vec<_>>())).collect()
    }

    /// Noncritical: D = F_i ⊕ Fil^{k_{i+1}} for 1 ≤ i < d. Regular:
    /// φ_1⋯φ_i is an eigenvalue of multiplicity one on the i-th wedge.
    pub fn classify(&self, r: &Refinement<Q>) -> Classification {
        let d = self.dim();
        let noncritical = (1..d).all(|i| {
            let mut both = r.lines[..i].to_vec();
            both.extend(columns(&self.fil[i]));
            column_rank(&both) == d
        });
        let regular = (1..d).all(|i| {
            let target = product(&r.ordering[..i]);
            padic_core::matrix::subsets(d, i)
                .iter()
                .filter(|s| {
                    let v: Vec<Q> = s.iter().map(|&j| r.ordering[j].clone()).collect();
                    (product(&v) - target.clone()).vanishes()
                })
                .count()
                == 1
        });
        Classification { noncritical, regular }
    }

    /// Lines e_j spanning the eigenline of ordering[j], and the weight of
    /// each line, or `NotSplit` when the flag is not made of eigenlines.
    pub fn line_weights(&self, r: &Refinement<Q>) -> Result<Vec<i64>, TriangError> {
        let d = self.dim();
        for i in 0..d {
            let dims: usize = r.lines.iter().map(|l| self.meet_dim(std::slice::from_ref(l), i)).sum();
            if dims != d - i {
                return Err(TriangError::NotSplit(format!("Fil^{} meets the eigenlines in dimension {dims} < {}", self.jumps[i], d - i)));
            }
        }
        Ok(r
            .lines
            .iter()
            .map(|l| {
                let top = (0..d).rev().find(|&i| self.meet_dim(std::slice::from_ref(l), i) == 1).unwrap();
                self.jumps[top]
            })
            .collect())
    }
}

fn product<Q: Scalar>(v: &[Q]) -> Q {
    v.iter().fold(v[0].one_like(), |a, b| a * b.clone())
}

/// Permutations of 0..d in lexicographic order.
pub fn permutations(d: usize) -> Vec<Vec<usize>> {
    if d == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for first in 0..d {
        for rest in permutations(d - 1) {
            let mut p = vec![first];
            p.extend(rest.into_iter().map(|x| if x >= first { x + 1 } else { x }));
            out.push(p);
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Classification {
    pub noncritical: bool,
    pub regular: bool,
}

/// An ordering (φ_1, …, φ_d) of the eigenvalues with its flag F_i.
#[derive(Clone, Debug)]
pub struct Refinement<Q: Scalar> {
    pub ordering: Vec<Q>,
    /// Eigenvector of each φ_i; F_i is spanned by the first i.
    pub lines: Vec<Vec<Q>>,
    /// Jump of the Hodge filtration induced on F_i / F_{i−1}.
    pub induced_jumps: Vec<i64>,
    /// The Hodge jumps k_1 < … < k_d of the module.
    pub jumps: Vec<i64>,
}

impl<Q: Scalar> Refinement<Q> {
    pub fn dim(&self) -> usize {
        self.ordering.len()
    }

    /// Cutoff (k_d − k_1) + ⌈max v(φ_i)⌉ + 2.
    pub fn default_cutoff(&self) -> usize {
        let gap = self.jumps.last().unwrap() - self.jumps[0];
        let slope = self.ordering.iter().filter_map(|x| x.valuation()).max().unwrap_or(0).max(0);
        (gap + slope + 2) as usize
    }
}

fn character<Q: Scalar>(phi: &Q, s: i64) -> Character<Q> {
    let p = phi.one_like().int_like(phi.prime() as i64);
    let ps = p.pow_u(s.unsigned_abs());
    let v = if s >= 0 { phi.clone() * ps.try_inv().expect("p is invertible") } else { phi.clone() * ps };
    Character::new(Trunc::constant(v, 1), -s)
}

/// δ_i = (φ_i·p^{−s_i}, weight −s_i) with s_i the induced jumps.
pub fn refinement_parameters<Q: Scalar>(r: &Refinement<Q>) -> Vec<Character<Q>> {
    r.ordering.iter().zip(&r.induced_jumps).map(|(a, &s)| character(a, s)).collect()
}

/// The same formula with the sorted jumps k_i in place of s_i: the
/// parameters that vary analytically in a family through the point. They
/// agree with [`refinement_parameters`] exactly when the refinement is
/// noncritical.
pub fn family_parameters<Q: Scalar>(r: &Refinement<Q>) -> Vec<Character<Q>> {
    r.ordering.iter().zip(&r.jumps).map(|(a, &s)| character(a, s)).collect()
}

/// Δ_i = δ_1⋯δ_i.
pub fn wedge_characters<Q: Scalar>(deltas: &[Character<Q>]) -> Vec<Character<Q>> {
    let mut out: Vec<Character<Q>> = Vec::with_capacity(deltas.len());
    for d in deltas {
        let next = match out.last() {
            Some(prev) => prev.mul(d),
            None => d.clone(),
        };
        out.push(next);
    }
    out
}
