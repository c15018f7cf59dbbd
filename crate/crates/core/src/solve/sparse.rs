//! Sparse Cholesky factorization of symmetric positive definite matrices,
//! with a minimum-degree ordering computed once per sparsity pattern.

#[allow(unused_imports)]
use num_traits::Float;
use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum CholeskyError {
    #[error("matrix is not positive definite (pivot {0})")]
    NotPositiveDefinite(usize),
}

/// Ordering and fill pattern of `L` for one sparsity pattern. Values live in
/// a separate buffer (see [`SymbolicCholesky::zeroed`]), so the analysis is
/// reused across factorizations.
#[derive(Debug, Clone)]
pub struct SymbolicCholesky {
    n: usize,
    /// `order[k]` is the original index of pivot `k`; `pos` inverts it.
    order: Vec<usize>,
    pos: Vec<usize>,
    col_ptr: Vec<usize>,
    /// Permuted row indices below the diagonal, sorted within each column.
    row_idx: Vec<usize>,
}

/// Numeric values of a matrix on the pattern of `L` (lower triangle,
/// permuted), factored in place.
#[derive(Debug, Clone)]
pub struct CholeskyValues {
    diag: Vec<f64>,
    off: Vec<f64>,
}

impl SymbolicCholesky {
    /// Analyzes the `n x n` pattern given by the off-diagonal pairs `pairs`
    /// (either orientation, duplicates allowed).
    pub fn analyze(n: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut adj = vec![BTreeSet::new(); n];
        for (i, j) in pairs {
            if i != j {
                adj[i].insert(j);
                adj[j].insert(i);
            }
        }
        let mut queue: BTreeSet<(usize, usize)> = (0..n).map(|v| (adj[v].len(), v)).collect();
        let mut order = Vec::with_capacity(n);
        let mut cols: Vec<Vec<usize>> = Vec::with_capacity(n);
        while let Some((_, p)) = queue.pop_first() {
            let nb: Vec<usize> = core::mem::take(&mut adj[p]).into_iter().collect();
            for &u in &nb {
                queue.remove(&(adj[u].len(), u));
                adj[u].remove(&p);
                adj[u].extend(nb.iter().copied().filter(|&w| w != u));
                queue.insert((adj[u].len(), u));
            }
            order.push(p);
            cols.push(nb);
        }
        let mut pos = vec![0; n];
        for (k, &v) in order.iter().enumerate() {
            pos[v] = k;
        }
        let mut col_ptr = Vec::with_capacity(n + 1);
        let mut row_idx = Vec::new();
        col_ptr.push(0);
        for col in cols {
            let start = row_idx.len();
            row_idx.extend(col.iter().map(|&v| pos[v]));
            row_idx[start..].sort_unstable();
            col_ptr.push(row_idx.len());
        }
        SymbolicCholesky { n, order, pos, col_ptr, row_idx }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Stored entries of `L` below the diagonal.
    pub fn fill(&self) -> usize {
        self.row_idx.len()
    }

    pub fn zeroed(&self) -> CholeskyValues {
        CholeskyValues { diag: vec![0.0; self.n], off: vec![0.0; self.row_idx.len()] }
    }

    fn slot(&self, pi: usize, pj: usize) -> usize {
        let (lo, hi) = (self.col_ptr[pj], self.col_ptr[pj + 1]);
        lo + self.row_idx[lo..hi].binary_search(&pi).expect("entry outside the analyzed pattern")
    }

    /// Adds `v` to entry `(i, j)` (and its mirror) in original indices.
    /// Off-diagonal entries must belong to the analyzed pattern.
    pub fn add(&self, m: &mut CholeskyValues, i: usize, j: usize, v: f64) {
        let (pi, pj) = (self.pos[i], self.pos[j]);
        if pi == pj {
            m.diag[pi] += v;
        } else {
            let s = self.slot(pi.max(pj), pi.min(pj));
            m.off[s] += v;
        }
    }

    pub fn add_diagonal(&self, m: &mut CholeskyValues, i: usize, v: f64) {
        m.diag[self.pos[i]] += v;
    }

    pub fn diagonal(&self, m: &CholeskyValues, i: usize) -> f64 {
        m.diag[self.pos[i]]
    }

    /// Overwrites `m` with its Cholesky factor.
    pub fn factor(&self, m: &mut CholeskyValues) -> Result<(), CholeskyError> {
        for k in 0..self.n {
            let d = m.diag[k];
            if !(d > 0.0) || !d.is_finite() {
                return Err(CholeskyError::NotPositiveDefinite(self.order[k]));
            }
            let d = d.sqrt();
            m.diag[k] = d;
            let (lo, hi) = (self.col_ptr[k], self.col_ptr[k + 1]);
            for s in lo..hi {
                m.off[s] /= d;
            }
            for a in lo..hi {
                let (i, li) = (self.row_idx[a], m.off[a]);
                m.diag[i] -= li * li;
                for b in lo..a {
                    let j = self.row_idx[b];
                    let s = self.slot(i, j);
                    m.off[s] -= li * m.off[b];
                }
            }
        }
        Ok(())
    }

    /// Solves `A x = b` with a factored `m`.
    pub fn solve(&self, m: &CholeskyValues, b: &[f64]) -> Vec<f64> {
        let mut y: Vec<f64> = self.order.iter().map(|&v| b[v]).collect();
        for k in 0..self.n {
            y[k] /= m.diag[k];
            let yk = y[k];
            for s in self.col_ptr[k]..self.col_ptr[k + 1] {
                y[self.row_idx[s]] -= m.off[s] * yk;
            }
        }
        for k in (0..self.n).rev() {
            let mut acc = y[k];
            for s in self.col_ptr[k]..self.col_ptr[k + 1] {
                acc -= m.off[s] * y[self.row_idx[s]];
            }
            y[k] = acc / m.diag[k];
        }
        let mut x = vec![0.0; self.n];
        for (k, &v) in self.order.iter().enumerate() {
            x[v] = y[k];
        }
        x
    }
}
