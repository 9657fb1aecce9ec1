//! Dense exact linear algebra over the rationals: row reduction, kernels and
//! linear solving. Pivoting is deterministic (first nonzero entry in column
//! order), which keeps every derived basis reproducible across runs.

use num::{BigRational, One, Zero};

use crate::polyring::Rat;

#[derive(Debug, Clone)]
pub struct QMatrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Rat>,
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix { rows, cols, data: vec![Rat::zero(); rows * cols] }
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Self {
        let r = rows.len();
        let c = rows.first().map(|x| x.len()).unwrap_or(0);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c);
            data.extend(row);
        }
        QMatrix { rows: r, cols: c, data }
    }

    pub fn at(&self, r: usize, c: usize) -> &Rat {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Rat) {
        self.data[r * self.cols + c] = v;
    }

    /// In-place reduced row echelon form; returns the pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let mut pivot_row = None;
            for r in row..self.rows {
                if !self.at(r, col).is_zero() {
                    pivot_row = Some(r);
                    break;
                }
            }
            let Some(pr) = pivot_row else { continue };
            if pr != row {
                for c in 0..self.cols {
                    self.data.swap(row * self.cols + c, pr * self.cols + c);
                }
            }
            let inv = BigRational::one() / self.at(row, col).clone();
            for c in col..self.cols {
                let v = self.at(row, c) * &inv;
                self.set(row, c, v);
            }
            for r in 0..self.rows {
                if r != row && !self.at(r, col).is_zero() {
                    let f = self.at(r, col).clone();
                    for c in col..self.cols {
                        let v = self.at(r, c) - &f * self.at(row, c);
                        self.set(r, c, v);
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    pub fn rank(mut self) -> usize {
        self.rref().len()
    }

    /// Basis of the right kernel, one vector per free column, in free-column
    /// order.
    pub fn kernel_basis(mut self) -> Vec<Vec<Rat>> {
        let pivots = self.rref();
        let pivot_set: std::collections::BTreeSet<usize> = pivots.iter().cloned().collect();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivot_set.contains(c)).collect();
        let mut basis = Vec::with_capacity(free.len());
        for &fc in &free {
            let mut v = vec![Rat::zero(); self.cols];
            v[fc] = Rat::one();
            for (ri, &pc) in pivots.iter().enumerate() {
                v[pc] = -self.at(ri, fc).clone();
            }
            basis.push(v);
        }
        basis
    }

    /// One solution of `A x = b` with free variables set to zero, or `None`
    /// when the system is inconsistent.
    pub fn solve(&self, b: &[Rat]) -> Option<Vec<Rat>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = QMatrix::zeros(self.rows, self.cols + 1);
        for r in 0..self.rows {
            for c in 0..self.cols {
                aug.set(r, c, self.at(r, c).clone());
            }
            aug.set(r, self.cols, b[r].clone());
        }
        let pivots = aug.rref();
        if pivots.contains(&self.cols) {
            return None; // inconsistent
        }
        let mut x = vec![Rat::zero(); self.cols];
        for (ri, &pc) in pivots.iter().enumerate() {
            x[pc] = aug.at(ri, self.cols).clone();
        }
        Some(x)
    }
}

/// Reduced-row-echelon basis of the span of the given vectors.
pub fn rref_basis(vectors: Vec<Vec<Rat>>) -> Vec<Vec<Rat>> {
    if vectors.is_empty() {
        return vec![];
    }
    let cols = vectors[0].len();
    let mut m = QMatrix::from_rows(vectors);
    let pivots = m.rref();
    (0..pivots.len())
        .map(|r| (0..cols).map(|c| m.at(r, c).clone()).collect())
        .collect()
}
