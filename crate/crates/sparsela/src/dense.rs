//! Small dense matrices: Cholesky for the per-cell blocks and a cyclic
//! Jacobi eigensolver used as the reference route in eigenvalue audits.

use crate::LinAlgError;

#[derive(Debug, Clone)]
pub struct DenseMatrix {
    pub nrows: usize,
    pub ncols: usize,
    data: Vec<f64>, // row-major
}

impl DenseMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        DenseMatrix { nrows, ncols, data: vec![0.0; nrows * ncols] }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.ncols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.ncols + j] = v;
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.ncols + j] += v;
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.ncols);
        let mut y = vec![0.0; self.nrows];
        for i in 0..self.nrows {
            let row = &self.data[i * self.ncols..(i + 1) * self.ncols];
            let mut s = 0.0;
            for j in 0..self.ncols {
                s += row[j] * x[j];
            }
            y[i] = s;
        }
        y
    }
}

/// Lower-triangular Cholesky factor of a dense SPD matrix.
#[derive(Debug, Clone)]
pub struct DenseCholesky {
    n: usize,
    l: Vec<f64>, // row-major lower triangle (full storage)
}

impl DenseCholesky {
    pub fn factor(a: &DenseMatrix) -> Result<Self, LinAlgError> {
        assert_eq!(a.nrows, a.ncols);
        let n = a.nrows;
        let mut l = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let mut s = a.get(i, j);
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k];
                }
                if i == j {
                    if s <= 0.0 || !s.is_finite() {
                        return Err(LinAlgError::NotPositiveDefinite { row: i });
                    }
                    l[i * n + i] = s.sqrt();
                } else {
                    l[i * n + j] = s / l[j * n + j];
                }
            }
        }
        Ok(DenseCholesky { n, l })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn solve_into(&self, b: &mut [f64]) {
        let n = self.n;
        assert_eq!(b.len(), n);
        // L y = b
        for i in 0..n {
            let mut s = b[i];
            for k in 0..i {
                s -= self.l[i * n + k] * b[k];
            }
            b[i] = s / self.l[i * n + i];
        }
        // L^T x = y
        for i in (0..n).rev() {
            let mut s = b[i];
            for k in (i + 1)..n {
                s -= self.l[k * n + i] * b[k];
            }
            b[i] = s / self.l[i * n + i];
        }
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_into(&mut x);
        x
    }

    /// x = L^{-1} b (forward substitution only).
    pub fn forward(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in 0..i {
                s -= self.l[i * n + k] * y[k];
            }
            y[i] = s / self.l[i * n + i];
        }
        y
    }

    pub fn l_entry(&self, i: usize, j: usize) -> f64 {
        self.l[i * self.n + j]
    }
}

/// All eigenvalues of a symmetric dense matrix by cyclic Jacobi rotations,
/// returned in ascending order. Reference-quality, O(n^3) per sweep.
pub fn jacobi_eigenvalues(a: &DenseMatrix) -> Vec<f64> {
    assert_eq!(a.nrows, a.ncols);
    let n = a.nrows;
    let mut m = a.clone();
    // Symmetrize defensively; callers pass symmetric data.
    for i in 0..n {
        for j in 0..i {
            let v = 0.5 * (m.get(i, j) + m.get(j, i));
            m.set(i, j, v);
            m.set(j, i, v);
        }
    }
    let max_sweeps = 60;
    for _ in 0..max_sweeps {
        let mut off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += m.get(i, j) * m.get(i, j);
            }
        }
        let scale: f64 = (0..n).map(|i| m.get(i, i).abs()).fold(1e-300, f64::max);
        if off.sqrt() <= 1e-14 * scale * n as f64 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m.get(p, q);
                if apq == 0.0 {
                    continue;
                }
                let app = m.get(p, p);
                let aqq = m.get(q, q);
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    1.0 / (theta - (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = m.get(k, p);
                    let akq = m.get(k, q);
                    m.set(k, p, c * akp - s * akq);
                    m.set(k, q, s * akp + c * akq);
                }
                for k in 0..n {
                    let apk = m.get(p, k);
                    let aqk = m.get(q, k);
                    m.set(p, k, c * apk - s * aqk);
                    m.set(q, k, s * apk + c * aqk);
                }
            }
        }
    }
    let mut eigs: Vec<f64> = (0..n).map(|i| m.get(i, i)).collect();
    eigs.sort_by(f64::total_cmp);
    eigs
}

/// Eigenvalues of the symmetric generalized pencil (A, B) with B SPD,
/// via the reduction L^{-1} A L^{-T} with B = L L^T.
pub fn generalized_eigenvalues(a: &DenseMatrix, b: &DenseMatrix) -> Result<Vec<f64>, LinAlgError> {
    assert_eq!(a.nrows, b.nrows);
    let n = a.nrows;
    let chol = DenseCholesky::factor(b)?;
    // C = L^{-1} A L^{-T}: forward-solve the columns, then the rows.
    let mut c = DenseMatrix::zeros(n, n);
    for j in 0..n {
        let col: Vec<f64> = (0..n).map(|i| a.get(i, j)).collect();
        let y = chol.forward(&col);
        for i in 0..n {
            c.set(i, j, y[i]);
        }
    }
    let mut out = DenseMatrix::zeros(n, n);
    for i in 0..n {
        let row: Vec<f64> = (0..n).map(|j| c.get(i, j)).collect();
        let y = chol.forward(&row);
        for j in 0..n {
            out.set(i, j, y[j]);
        }
    }
    Ok(jacobi_eigenvalues(&out))
}
