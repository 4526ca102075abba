//! Banded direct solver for the global stiffness.
//!
//! The structured meshes here give dof half-bandwidths around 100, so a
//! dense band LU (no pivoting; the constrained stiffness is strongly
//! diagonally dominant after Dirichlet conditioning) is both simple and
//! fast at the problem sizes involved (<= ~15k dofs).

use crate::error::GnrError;

/// Square band matrix with equal lower/upper half-bandwidth.
#[derive(Debug, Clone)]
pub struct BandMatrix {
    n: usize,
    bw: usize,
    /// Row-major: entry (i, j) lives at `data[i * (2bw+1) + (j - i + bw)]`.
    data: Vec<f64>,
}

impl BandMatrix {
    pub fn new(n: usize, bw: usize) -> Self {
        BandMatrix {
            n,
            bw,
            data: vec![0.0; n * (2 * bw + 1)],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.bw
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        i * (2 * self.bw + 1) + (j + self.bw - i)
    }

    #[inline]
    pub fn in_band(&self, i: usize, j: usize) -> bool {
        let (i, j) = (i as isize, j as isize);
        (i - j).abs() <= self.bw as isize
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(self.in_band(i, j), "entry ({i},{j}) outside bandwidth");
        let k = self.idx(i, j);
        self.data[k] += v;
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(self.in_band(i, j));
        let k = self.idx(i, j);
        self.data[k] = v;
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if self.in_band(i, j) {
            self.data[self.idx(i, j)]
        } else {
            0.0
        }
    }

    pub fn zero_row(&mut self, i: usize) {
        let w = 2 * self.bw + 1;
        for x in &mut self.data[i * w..(i + 1) * w] {
            *x = 0.0;
        }
    }

    pub fn zero_col(&mut self, j: usize) {
        let lo = j.saturating_sub(self.bw);
        let hi = (j + self.bw + 1).min(self.n);
        for i in lo..hi {
            let k = self.idx(i, j);
            self.data[k] = 0.0;
        }
    }

    /// y = A x.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        for i in 0..self.n {
            let lo = i.saturating_sub(self.bw);
            let hi = (i + self.bw + 1).min(self.n);
            let mut s = 0.0;
            for j in lo..hi {
                s += self.data[self.idx(i, j)] * x[j];
            }
            y[i] = s;
        }
        y
    }

    /// In-place band LU without pivoting, then solve. Consumes the matrix.
    pub fn solve(mut self, b: &mut [f64]) -> Result<(), GnrError> {
        assert_eq!(b.len(), self.n);
        let n = self.n;
        let bw = self.bw;
        for col in 0..n {
            let piv = self.data[self.idx(col, col)];
            if !piv.is_finite() || piv.abs() < 1e-300 {
                return Err(GnrError::LinearSolve(format!(
                    "zero pivot at dof {col} (banded LU without pivoting)"
                )));
            }
            let hi = (col + bw + 1).min(n);
            for row in (col + 1)..hi {
                let f = self.data[self.idx(row, col)] / piv;
                if f == 0.0 {
                    continue;
                }
                let jhi = (col + bw + 1).min(n);
                for j in col..jhi {
                    let v = self.data[self.idx(col, j)];
                    if v != 0.0 {
                        let k = self.idx(row, j);
                        self.data[k] -= f * v;
                    }
                }
                b[row] -= f * b[col];
            }
        }
        for col in (0..n).rev() {
            let hi = (col + bw + 1).min(n);
            let mut s = b[col];
            for j in (col + 1)..hi {
                s -= self.data[self.idx(col, j)] * b[j];
            }
            b[col] = s / self.data[self.idx(col, col)];
        }
        Ok(())
    }
}
