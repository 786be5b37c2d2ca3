//! Block-diagonal SPD factorization: one dense Cholesky per block. This is
//! how block mass matrices are inverted everywhere in the solver.

use crate::csr::CsrMatrix;
use crate::dense::{DenseCholesky, DenseMatrix};
use crate::LinAlgError;

#[derive(Debug, Clone)]
pub struct BlockDiagFactor {
    offsets: Vec<usize>,
    factors: Vec<DenseCholesky>,
}

impl BlockDiagFactor {
    /// Factor a block-diagonal matrix given the block boundaries
    /// `offsets = [0, b1, b1+b2, ..., n]`. Entries outside the blocks are
    /// ignored (the caller guarantees there are none).
    pub fn factor(a: &CsrMatrix, offsets: &[usize]) -> Result<Self, LinAlgError> {
        assert!(offsets.len() >= 2 && offsets[offsets.len() - 1] == a.nrows);
        let mut factors = Vec::with_capacity(offsets.len() - 1);
        for b in 0..offsets.len() - 1 {
            let (lo, hi) = (offsets[b], offsets[b + 1]);
            let m = hi - lo;
            let mut block = DenseMatrix::zeros(m, m);
            for i in lo..hi {
                let (cols, vals) = a.row(i);
                for (&j, &v) in cols.iter().zip(vals) {
                    let j = j as usize;
                    if j >= lo && j < hi {
                        block.set(i - lo, j - lo, v);
                    }
                }
            }
            factors.push(DenseCholesky::factor(&block)?);
        }
        Ok(BlockDiagFactor { offsets: offsets.to_vec(), factors })
    }

    pub fn n(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn solve_into(&self, x: &mut [f64]) {
        assert_eq!(x.len(), self.n());
        for (b, f) in self.factors.iter().enumerate() {
            let (lo, hi) = (self.offsets[b], self.offsets[b + 1]);
            f.solve_into(&mut x[lo..hi]);
        }
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_into(&mut x);
        x
    }

    pub fn n_blocks(&self) -> usize {
        self.factors.len()
    }

    pub fn block(&self, b: usize) -> &DenseCholesky {
        &self.factors[b]
    }

    pub fn block_range(&self, b: usize) -> std::ops::Range<usize> {
        self.offsets[b]..self.offsets[b + 1]
    }
}
