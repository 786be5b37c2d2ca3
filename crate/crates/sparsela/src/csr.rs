//! Compressed sparse row matrices assembled from triplets.

use crate::LinAlgError;

/// Triplet accumulator; duplicate entries are summed on compression.
#[derive(Debug, Clone)]
pub struct Triplets {
    nrows: usize,
    ncols: usize,
    entries: Vec<(u32, u32, f64)>,
}

impl Triplets {
    pub fn new(nrows: usize, ncols: usize) -> Self {
        Triplets { nrows, ncols, entries: Vec::new() }
    }

    pub fn push(&mut self, row: usize, col: usize, val: f64) {
        debug_assert!(row < self.nrows && col < self.ncols);
        if val != 0.0 {
            self.entries.push((row as u32, col as u32, val));
        }
    }

    pub fn to_csr(mut self) -> CsrMatrix {
        // Stable sort keeps the accumulation order deterministic.
        self.entries.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut row_ptr = vec![0usize; self.nrows + 1];
        let mut col_idx: Vec<u32> = Vec::new();
        let mut vals: Vec<f64> = Vec::new();
        let mut it = self.entries.iter().peekable();
        for row in 0..self.nrows {
            while let Some(&&(r, c, v)) = it.peek() {
                if r as usize != row {
                    break;
                }
                it.next();
                if vals.len() > row_ptr[row] && col_idx.last() == Some(&c) {
                    *vals.last_mut().unwrap() += v;
                    continue;
                }
                col_idx.push(c);
                vals.push(v);
            }
            row_ptr[row + 1] = vals.len();
        }
        CsrMatrix { nrows: self.nrows, ncols: self.ncols, row_ptr, col_idx, vals }
    }
}

#[derive(Debug, Clone)]
pub struct CsrMatrix {
    pub nrows: usize,
    pub ncols: usize,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<u32>,
    pub vals: Vec<f64>,
}

impl CsrMatrix {
    pub fn identity(n: usize) -> Self {
        CsrMatrix {
            nrows: n,
            ncols: n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n as u32).collect(),
            vals: vec![1.0; n],
        }
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, i: usize) -> (&[u32], &[f64]) {
        let (lo, hi) = (self.row_ptr[i], self.row_ptr[i + 1]);
        (&self.col_idx[lo..hi], &self.vals[lo..hi])
    }

    /// y = A x
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.ncols, "spmv dimension mismatch");
        let mut y = vec![0.0; self.nrows];
        self.mul_vec_into(x, &mut y);
        y
    }

    pub fn mul_vec_into(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.ncols);
        assert_eq!(y.len(), self.nrows);
        for i in 0..self.nrows {
            let mut s = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                s += self.vals[k] * x[self.col_idx[k] as usize];
            }
            y[i] = s;
        }
    }

    /// y = A^T x, accumulated in row order so the result is deterministic.
    pub fn mul_transpose_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.nrows, "transpose spmv dimension mismatch");
        let mut y = vec![0.0; self.ncols];
        for i in 0..self.nrows {
            let xi = x[i];
            if xi == 0.0 {
                continue;
            }
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                y[self.col_idx[k] as usize] += self.vals[k] * xi;
            }
        }
        y
    }

    pub fn transpose(&self) -> CsrMatrix {
        let mut t = Triplets::new(self.ncols, self.nrows);
        for i in 0..self.nrows {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                t.push(self.col_idx[k] as usize, i, self.vals[k]);
            }
        }
        t.to_csr()
    }

    pub fn max_abs(&self) -> f64 {
        self.vals.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// max |A - A^T| over all entries, for symmetry audits.
    pub fn asymmetry(&self) -> f64 {
        let t = self.transpose();
        let mut worst = 0.0f64;
        for i in 0..self.nrows {
            let (ca, va) = self.row(i);
            let (cb, vb) = t.row(i);
            let mut ia = 0;
            let mut ib = 0;
            while ia < ca.len() || ib < cb.len() {
                let (a_col, b_col) = (
                    ca.get(ia).copied().unwrap_or(u32::MAX),
                    cb.get(ib).copied().unwrap_or(u32::MAX),
                );
                if a_col == b_col {
                    worst = worst.max((va[ia] - vb[ib]).abs());
                    ia += 1;
                    ib += 1;
                } else if a_col < b_col {
                    worst = worst.max(va[ia].abs());
                    ia += 1;
                } else {
                    worst = worst.max(vb[ib].abs());
                    ib += 1;
                }
            }
        }
        worst
    }

    pub fn is_symmetric(&self, rel_tol: f64) -> bool {
        self.nrows == self.ncols && self.asymmetry() <= rel_tol * self.max_abs().max(1e-300)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&(j as u32)) {
            Ok(k) => vals[k],
            Err(_) => 0.0,
        }
    }

    pub fn to_dense(&self) -> crate::DenseMatrix {
        let mut d = crate::DenseMatrix::zeros(self.nrows, self.ncols);
        for i in 0..self.nrows {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                d.set(i, self.col_idx[k] as usize, self.vals[k]);
            }
        }
        d
    }

    pub fn check_dims(&self, x: &[f64]) -> Result<(), LinAlgError> {
        if x.len() != self.ncols {
            return Err(LinAlgError::DimensionMismatch { expected: self.ncols, got: x.len() });
        }
        Ok(())
    }
}
