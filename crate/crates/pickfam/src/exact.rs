//! Exact dense linear algebra over the Gaussian rationals.
//!
//! Small matrices only (quotient rings here have dimension <= ~10), so
//! plain fraction arithmetic with leftmost-pivot elimination is fine and
//! keeps every downstream certificate exact.

use crate::rational::{cq_inv, cq_is_zero, cq_zero, conj, Cq};

/// Dense row-major matrix over `Q(i)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CqMat {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Cq>,
}

impl CqMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CqMat { rows, cols, data: vec![cq_zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = crate::rational::cq_one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Cq>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        CqMat { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn row(&self, i: usize) -> &[Cq] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn conj_transpose(&self) -> CqMat {
        let mut out = CqMat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = conj(&self[(i, j)]);
            }
        }
        out
    }

    pub fn mul(&self, other: &CqMat) -> CqMat {
        assert_eq!(self.cols, other.rows, "shape mismatch in matrix product");
        let mut out = CqMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if cq_is_zero(a) {
                    continue;
                }
                for j in 0..other.cols {
                    let prod = a * &other[(k, j)];
                    out[(i, j)] = &out[(i, j)] + &prod;
                }
            }
        }
        out
    }

    pub fn is_hermitian(&self) -> bool {
        self.rows == self.cols && *self == self.conj_transpose()
    }

    /// In-place reduced row echelon form; returns the pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !cq_is_zero(&self[(i, c)])) else {
                continue;
            };
            self.swap_rows(r, p);
            let inv = cq_inv(&self[(r, c)]).expect("pivot is nonzero");
            for j in c..self.cols {
                self[(r, j)] = &self[(r, j)] * &inv;
            }
            for i in 0..self.rows {
                if i != r && !cq_is_zero(&self[(i, c)]) {
                    let f = self[(i, c)].clone();
                    for j in c..self.cols {
                        let sub = &f * &self[(r, j)];
                        self[(i, j)] = &self[(i, j)] - &sub;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref().len()
    }

    /// Indices of a maximal independent subset of the rows, scanning in
    /// order (greedy; keeps the earliest spanning rows).
    pub fn independent_rows(&self) -> Vec<usize> {
        let mut kept: Vec<usize> = Vec::new();
        let mut basis = CqMat::zeros(0, self.cols);
        for i in 0..self.rows {
            let mut trial_rows: Vec<Vec<Cq>> = (0..basis.rows).map(|r| basis.row(r).to_vec()).collect();
            trial_rows.push(self.row(i).to_vec());
            let trial = CqMat::from_rows(trial_rows);
            if trial.rank() > basis.rows {
                kept.push(i);
                basis = trial;
            }
        }
        kept
    }

    /// Exact inverse of a square matrix; `None` if singular.
    pub fn inverse(&self) -> Option<CqMat> {
        assert_eq!(self.rows, self.cols, "inverse needs a square matrix");
        let n = self.rows;
        let mut aug = CqMat::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, n + i)] = crate::rational::cq_one();
        }
        let pivots = aug.rref();
        if pivots.len() < n || pivots.iter().enumerate().any(|(k, &c)| c != k) {
            return None;
        }
        let mut inv = CqMat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv[(i, j)] = aug[(i, n + j)].clone();
            }
        }
        Some(inv)
    }

    /// Solves `A x = b`. Returns a particular solution and a basis of the
    /// nullspace of `A`, or `None` when the system is inconsistent.
    pub fn solve(&self, b: &[Cq]) -> Option<(Vec<Cq>, Vec<Vec<Cq>>)> {
        assert_eq!(b.len(), self.rows, "rhs length mismatch");
        let mut aug = CqMat::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, self.cols)] = b[i].clone();
        }
        let pivots = aug.rref();
        if pivots.contains(&self.cols) {
            return None; // a pivot in the rhs column means 0 = 1
        }
        let mut x = vec![cq_zero(); self.cols];
        for (r, &c) in pivots.iter().enumerate() {
            x[c] = aug[(r, self.cols)].clone();
        }
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut nullspace = Vec::with_capacity(free.len());
        for &f in &free {
            let mut v = vec![cq_zero(); self.cols];
            v[f] = crate::rational::cq_one();
            for (r, &c) in pivots.iter().enumerate() {
                v[c] = -aug[(r, f)].clone();
            }
            nullspace.push(v);
        }
        Some((x, nullspace))
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

impl std::ops::Index<(usize, usize)> for CqMat {
    type Output = Cq;
    fn index(&self, (i, j): (usize, usize)) -> &Cq {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CqMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Cq {
        &mut self.data[i * self.cols + j]
    }
}

/// Determinant by cofactor expansion; the matrices this is used on
/// (unit-group actions, `GL_k` certificates) are at most 4x4.
pub fn det_small(m: &CqMat) -> Cq {
    assert_eq!(m.rows, m.cols);
    let n = m.rows;
    match n {
        0 => crate::rational::cq_one(),
        1 => m[(0, 0)].clone(),
        _ => {
            let mut acc = cq_zero();
            for j in 0..n {
                if cq_is_zero(&m[(0, j)]) {
                    continue;
                }
                let mut minor = CqMat::zeros(n - 1, n - 1);
                for i in 1..n {
                    let mut cc = 0;
                    for c in 0..n {
                        if c == j {
                            continue;
                        }
                        minor[(i - 1, cc)] = m[(i, c)].clone();
                        cc += 1;
                    }
                }
                let term = &m[(0, j)] * &det_small(&minor);
                if j % 2 == 0 {
                    acc = &acc + &term;
                } else {
                    acc = &acc - &term;
                }
            }
            acc
        }
    }
}
