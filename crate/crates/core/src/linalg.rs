//! Dense exact linear algebra over ℚ(i): row reduction, kernels, solving.
//!
//! Matrices are small (basis-indexed spaces of truncated models), so plain
//! Gauss–Jordan elimination with exact scalars is the right tool.

use crate::scalars::ExactScalar;
use crate::Error;

/// Dense row-major matrix over ℚ(i).
#[derive(Clone, PartialEq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<ExactScalar>,
}

impl Matrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![ExactScalar::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zero(n, n);
        for i in 0..n {
            *m.at_mut(i, i) = ExactScalar::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<ExactScalar>>) -> Self {
        let r = rows.len();
        let c = rows.first().map(|x| x.len()).unwrap_or(0);
        assert!(rows.iter().all(|x| x.len() == c), "ragged matrix rows");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn at(&self, r: usize, c: usize) -> &ExactScalar {
        &self.data[r * self.cols + c]
    }

    pub fn at_mut(&mut self, r: usize, c: usize) -> &mut ExactScalar {
        &mut self.data[r * self.cols + c]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in matrix product");
        let mut out = Matrix::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.at(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let p = a * b;
                    *out.at_mut(i, j) += &p;
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[ExactScalar]) -> Vec<ExactScalar> {
        assert_eq!(self.cols, v.len(), "dimension mismatch in matrix-vector product");
        let mut out = vec![ExactScalar::zero(); self.rows];
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.at(i, j);
                if a.is_zero() || v[j].is_zero() {
                    continue;
                }
                let p = a * &v[j];
                out[i] += &p;
            }
        }
        out
    }

    /// Reduced row echelon form; returns pivot column indices.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row >= self.rows {
                break;
            }
            let pivot_row = (row..self.rows).find(|&r| !self.at(r, col).is_zero());
            let Some(p) = pivot_row else { continue };
            for c in 0..self.cols {
                let tmp = self.at(p, c).clone();
                *self.at_mut(p, c) = self.at(row, c).clone();
                *self.at_mut(row, c) = tmp;
            }
            let inv = self.at(row, col).inv().expect("pivot is nonzero");
            for c in 0..self.cols {
                let v = self.at(row, c) * &inv;
                *self.at_mut(row, c) = v;
            }
            for r in 0..self.rows {
                if r == row || self.at(r, col).is_zero() {
                    continue;
                }
                let f = self.at(r, col).clone();
                for c in 0..self.cols {
                    let v = self.at(r, c) - &(&f * self.at(row, c));
                    *self.at_mut(r, c) = v;
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    /// Basis of the right kernel {v : Av = 0}.
    pub fn kernel_basis(&self) -> Vec<Vec<ExactScalar>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let mut basis = Vec::new();
        let pivot_set: std::collections::BTreeSet<usize> = pivots.iter().copied().collect();
        for free in 0..self.cols {
            if pivot_set.contains(&free) {
                continue;
            }
            let mut v = vec![ExactScalar::zero(); self.cols];
            v[free] = ExactScalar::one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -m.at(r, free);
            }
            basis.push(v);
        }
        basis
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }

    /// Solve Ax = b exactly; errors when the system is inconsistent.
    /// For underdetermined systems returns the solution with free
    /// variables set to zero.
    pub fn solve(&self, b: &[ExactScalar]) -> Result<Vec<ExactScalar>, Error> {
        assert_eq!(self.rows, b.len());
        let mut aug = Matrix::zero(self.rows, self.cols + 1);
        for r in 0..self.rows {
            for c in 0..self.cols {
                *aug.at_mut(r, c) = self.at(r, c).clone();
            }
            *aug.at_mut(r, self.cols) = b[r].clone();
        }
        let pivots = aug.rref();
        if pivots.contains(&self.cols) {
            return Err(Error::Domain("inconsistent linear system".into()));
        }
        let mut x = vec![ExactScalar::zero(); self.cols];
        for (r, &pc) in pivots.iter().enumerate() {
            x[pc] = aug.at(r, self.cols).clone();
        }
        Ok(x)
    }

    /// Two-sided inverse; errors when singular.
    pub fn inverse(&self) -> Result<Matrix, Error> {
        assert_eq!(self.rows, self.cols, "inverse of a non-square matrix");
        let n = self.rows;
        let mut aug = Matrix::zero(n, 2 * n);
        for r in 0..n {
            for c in 0..n {
                *aug.at_mut(r, c) = self.at(r, c).clone();
            }
            *aug.at_mut(r, n + r) = ExactScalar::one();
        }
        let pivots = aug.rref();
        if pivots.len() != n || pivots.iter().enumerate().any(|(i, &p)| i != p) {
            return Err(Error::NotInvertible("singular matrix".into()));
        }
        let mut inv = Matrix::zero(n, n);
        for r in 0..n {
            for c in 0..n {
                *inv.at_mut(r, c) = aug.at(r, n + c).clone();
            }
        }
        Ok(inv)
    }
}

impl std::fmt::Debug for Matrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "Matrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| format!("{}", self.at(r, c))).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Add `scale * b` into `a` componentwise.
pub fn axpy(a: &mut [ExactScalar], scale: &ExactScalar, b: &[ExactScalar]) {
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter_mut().zip(b) {
        let p = scale * y;
        *x += &p;
    }
}
