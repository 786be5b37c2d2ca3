//! Sparse Cholesky for SPD systems: reverse Cuthill–McKee reordering plus an
//! envelope (profile) factorization. The permutation is internal; callers see
//! original indexing. Intended for the coarse/direct solves, where system
//! sizes stay in the low thousands.

use crate::csr::CsrMatrix;
use crate::LinAlgError;

#[derive(Debug, Clone)]
pub struct SparseCholesky {
    n: usize,
    perm: Vec<usize>,  // perm[new] = old
    iperm: Vec<usize>, // iperm[old] = new
    first: Vec<usize>, // first column of each envelope row
    offsets: Vec<usize>,
    rows: Vec<f64>, // packed envelope rows, columns first[i]..=i
}

fn rcm_order(n: usize, adj: &[Vec<u32>]) -> Vec<usize> {
    let degree: Vec<usize> = adj.iter().map(|a| a.len()).collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut queue = std::collections::VecDeque::new();
    loop {
        // Deterministic start: lowest degree among unvisited, ties by index.
        let mut start = None;
        let mut best = usize::MAX;
        for v in 0..n {
            if !visited[v] && degree[v] < best {
                best = degree[v];
                start = Some(v);
            }
        }
        let Some(start) = start else { break };
        visited[start] = true;
        queue.push_back(start);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut nbrs: Vec<u32> =
                adj[v].iter().copied().filter(|&u| !visited[u as usize]).collect();
            nbrs.sort_by_key(|&u| (degree[u as usize], u));
            for u in nbrs {
                visited[u as usize] = true;
                queue.push_back(u as usize);
            }
        }
    }
    order.reverse();
    order
}

impl SparseCholesky {
    pub fn factor(a: &CsrMatrix) -> Result<Self, LinAlgError> {
        assert_eq!(a.nrows, a.ncols, "cholesky needs a square matrix");
        let n = a.nrows;

        // Symmetric adjacency of the pattern (diagonal excluded).
        let mut adj: Vec<Vec<u32>> = vec![Vec::new(); n];
        for i in 0..n {
            let (cols, _) = a.row(i);
            for &j in cols {
                let j = j as usize;
                if j != i {
                    adj[i].push(j as u32);
                    adj[j].push(i as u32);
                }
            }
        }
        for l in adj.iter_mut() {
            l.sort_unstable();
            l.dedup();
        }

        let perm = rcm_order(n, &adj);
        let mut iperm = vec![0usize; n];
        for (new, &old) in perm.iter().enumerate() {
            iperm[old] = new;
        }

        // Envelope of the permuted matrix. Cholesky fill stays inside it.
        let mut first: Vec<usize> = (0..n).collect();
        for i in 0..n {
            let pi = iperm[i];
            let (cols, _) = a.row(i);
            for &j in cols {
                let pj = iperm[j as usize];
                if pj < pi {
                    first[pi] = first[pi].min(pj);
                } else if pi < pj {
                    first[pj] = first[pj].min(pi);
                }
            }
        }
        let mut offsets = vec![0usize; n + 1];
        for i in 0..n {
            offsets[i + 1] = offsets[i] + (i - first[i] + 1);
        }
        let mut rows = vec![0.0f64; offsets[n]];

        // Scatter A into the envelope (lower triangle, permuted).
        for i in 0..n {
            let pi = iperm[i];
            let (cols, vals) = a.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                let pj = iperm[j as usize];
                let (r, c) = if pj <= pi { (pi, pj) } else { (pj, pi) };
                if pj == pi && j as usize != i {
                    continue;
                }
                rows[offsets[r] + (c - first[r])] = v;
            }
        }

        // Row-oriented envelope factorization.
        for i in 0..n {
            let fi = first[i];
            for j in fi..i {
                let fj = first[j];
                let lo = fi.max(fj);
                let mut s = rows[offsets[i] + (j - fi)];
                // dot of row i [lo..j) with row j [lo..j)
                let off_i = offsets[i] + (lo - fi);
                let off_j = offsets[j] + (lo - fj);
                for k in 0..(j - lo) {
                    s -= rows[off_i + k] * rows[off_j + k];
                }
                let djj = rows[offsets[j] + (j - fj)];
                rows[offsets[i] + (j - fi)] = s / djj;
            }
            let mut d = rows[offsets[i] + (i - fi)];
            for k in fi..i {
                let l = rows[offsets[i] + (k - fi)];
                d -= l * l;
            }
            if d <= 0.0 || !d.is_finite() {
                return Err(LinAlgError::NotPositiveDefinite { row: perm[i] });
            }
            rows[offsets[i] + (i - fi)] = d.sqrt();
        }

        Ok(SparseCholesky { n, perm, iperm, first, offsets, rows })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        assert_eq!(b.len(), self.n);
        let n = self.n;
        let mut y = vec![0.0; n];
        for i in 0..n {
            y[i] = b[self.perm[i]];
        }
        // Forward: L y = P b
        for i in 0..n {
            let fi = self.first[i];
            let mut s = y[i];
            let base = self.offsets[i];
            for k in fi..i {
                s -= self.rows[base + (k - fi)] * y[k];
            }
            y[i] = s / self.rows[base + (i - fi)];
        }
        // Backward: L^T x = y, as a column sweep over the stored rows.
        for i in (0..n).rev() {
            let fi = self.first[i];
            let base = self.offsets[i];
            let xi = y[i] / self.rows[base + (i - fi)];
            y[i] = xi;
            for k in fi..i {
                y[k] -= self.rows[base + (k - fi)] * xi;
            }
        }
        let mut x = vec![0.0; n];
        for i in 0..n {
            x[self.perm[i]] = y[i];
        }
        let _ = &self.iperm; // retained for diagnostics
        x
    }

    /// Envelope size, for fill diagnostics.
    pub fn stored_entries(&self) -> usize {
        self.rows.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::csr::Triplets;
    use crate::rng::SplitMix64;
    use crate::vecops::{norm2, sub};

    #[test]
    fn diagonal_solve_is_division() {
        let mut t = Triplets::new(4, 4);
        for i in 0..4 {
            t.push(i, i, (i + 1) as f64);
        }
        let a = t.to_csr();
        let f = SparseCholesky::factor(&a).unwrap();
        let x = f.solve(&[1.0, 1.0, 1.0, 1.0]);
        let expect = [1.0, 0.5, 1.0 / 3.0, 0.25];
        for (got, want) in x.iter().zip(expect) {
            assert!((got - want).abs() < 1e-15);
        }
    }

    #[test]
    fn random_spd_residual() {
        // Laplacian-like band matrix plus random symmetric noise.
        let n = 60;
        let mut rng = SplitMix64::new(11);
        let mut t = Triplets::new(n, n);
        for i in 0..n {
            t.push(i, i, 4.0 + rng.next_f64());
            if i + 1 < n {
                t.push(i, i + 1, -1.0);
                t.push(i + 1, i, -1.0);
            }
            if i + 7 < n {
                let v = 0.3 * rng.next_signed();
                t.push(i, i + 7, v);
                t.push(i + 7, i, v);
            }
        }
        let a = t.to_csr();
        let f = SparseCholesky::factor(&a).unwrap();
        let xs = rng.vector(n);
        let b = a.mul_vec(&xs);
        let x = f.solve(&b);
        let r = sub(&a.mul_vec(&x), &b);
        assert!(norm2(&r) <= 1e-10 * (norm2(&b) + 1.0));
        // Deterministic reuse.
        let x2 = f.solve(&b);
        assert_eq!(x, x2);
    }

    #[test]
    fn indefinite_reports_row() {
        let mut t = Triplets::new(3, 3);
        t.push(0, 0, 1.0);
        t.push(1, 1, 1.0);
        t.push(2, 2, -5.0);
        let a = t.to_csr();
        match SparseCholesky::factor(&a) {
            Err(LinAlgError::NotPositiveDefinite { row }) => assert_eq!(row, 2),
            other => panic!("expected failure, got {other:?}"),
        }
    }
}
