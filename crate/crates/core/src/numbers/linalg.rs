//! Dense exact Gaussian elimination over [`Rat`].
//!
//! Zero entries are skipped in row operations, so banded systems (the chain
//! intersection matrices) cost O(k^2) comparisons and O(k) arithmetic.

use crate::error::{Error, Result};
use crate::numbers::Rat;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Rat>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![Rat::zero(); rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix");
        Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rat {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rat) {
        self.data[i * self.cols + j] = v;
    }

    /// Leading `k x k` block.
    pub fn leading(&self, k: usize) -> Matrix {
        let mut m = Matrix::zeros(k, k);
        for i in 0..k {
            for j in 0..k {
                m.set(i, j, self.get(i, j).clone());
            }
        }
        m
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Forward elimination in place (on an augmented copy when `rhs` is given).
    /// Returns the pivots in order and whether rows were swapped an odd
    /// number of times.
    fn eliminate(&mut self, rhs: &mut [Rat], allow_swaps: bool) -> Result<(Vec<Rat>, bool)> {
        let n = self.rows;
        let mut pivots = Vec::with_capacity(n);
        let mut odd = false;
        for col in 0..n {
            let pivot_row = if allow_swaps {
                (col..n).find(|&i| !self.get(i, col).is_zero())
            } else {
                Some(col).filter(|&i| !self.get(i, col).is_zero())
            }
            .ok_or(Error::SingularSystem)?;
            if pivot_row != col {
                self.swap_rows(pivot_row, col);
                if !rhs.is_empty() {
                    rhs.swap(pivot_row, col);
                }
                odd = !odd;
            }
            let pivot = self.get(col, col).clone();
            let nonzero_cols: Vec<usize> = (col + 1..self.cols)
                .filter(|&j| !self.get(col, j).is_zero())
                .collect();
            for i in col + 1..n {
                if self.get(i, col).is_zero() {
                    continue;
                }
                let factor = self.get(i, col) / &pivot;
                for &j in &nonzero_cols {
                    let v = self.get(i, j) - &factor * self.get(col, j);
                    self.set(i, j, v);
                }
                self.set(i, col, Rat::zero());
                if !rhs.is_empty() {
                    let v = &rhs[i] - &factor * &rhs[col];
                    rhs[i] = v;
                }
            }
            pivots.push(pivot);
        }
        Ok((pivots, odd))
    }
}

/// Solves `m x = rhs` for square nonsingular `m`.
pub fn solve(m: &Matrix, rhs: &[Rat]) -> Result<Vec<Rat>> {
    assert_eq!(m.rows, m.cols, "solve needs a square matrix");
    assert_eq!(m.rows, rhs.len(), "right-hand side has wrong length");
    let n = m.rows;
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut a = m.clone();
    let mut b = rhs.to_vec();
    a.eliminate(&mut b, true)?;
    let mut x = vec![Rat::zero(); n];
    for i in (0..n).rev() {
        let mut acc = b[i].clone();
        for (j, xj) in x.iter().enumerate().skip(i + 1) {
            let aij = a.get(i, j);
            if !aij.is_zero() {
                acc -= aij * xj;
            }
        }
        x[i] = acc / a.get(i, i);
    }
    Ok(x)
}

pub fn determinant(m: &Matrix) -> Rat {
    assert_eq!(m.rows, m.cols, "determinant needs a square matrix");
    let mut a = m.clone();
    match a.eliminate(&mut [], true) {
        Ok((pivots, odd)) => {
            let d: Rat = pivots.iter().fold(Rat::one(), |acc, p| acc * p);
            if odd {
                -d
            } else {
                d
            }
        }
        Err(_) => Rat::zero(),
    }
}

/// Determinants of the leading `1x1, 2x2, ..., nxn` blocks.
pub fn leading_principal_minors(m: &Matrix) -> Vec<Rat> {
    assert_eq!(m.rows, m.cols, "minors need a square matrix");
    let mut a = m.clone();
    // Without row swaps the k-th minor is the product of the first k pivots.
    match a.eliminate(&mut [], false) {
        Ok((pivots, _)) => pivots
            .iter()
            .scan(Rat::one(), |acc, p| {
                *acc = &*acc * p;
                Some(acc.clone())
            })
            .collect(),
        Err(_) => (1..=m.rows).map(|k| determinant(&m.leading(k))).collect(),
    }
}
