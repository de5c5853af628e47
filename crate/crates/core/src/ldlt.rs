//! Envelope (profile) LDLᵀ factorization of sparse symmetric matrices with a
//! reverse Cuthill–McKee ordering.
//!
//! Pivots are taken in order without interchanges; symmetric indefinite
//! matrices factor as long as no pivot vanishes, which is what shift-invert
//! needs. The number of negative pivots is the matrix inertia (Sylvester).

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

/// Pivots below `PIVOT_RTOL * max|a_ii|` are treated as zero.
pub const PIVOT_RTOL: f64 = 1e-13;

#[derive(Debug, Clone)]
pub struct Ldlt {
    n: usize,
    /// perm[new] = old
    perm: Vec<usize>,
    first: Vec<usize>,
    offsets: Vec<usize>,
    lower: Vec<f64>,
    diag: Vec<f64>,
}

/// Reverse Cuthill–McKee ordering of the symmetric sparsity pattern of `a`.
/// Returns `perm` with `perm[new] = old`.
pub fn reverse_cuthill_mckee(a: &CsrMatrix) -> Vec<usize> {
    let n = a.nrows();
    let adj: Vec<Vec<usize>> = (0..n)
        .map(|r| a.row(r).map(|(c, _)| c).filter(|&c| c != r).collect())
        .collect();
    let degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut by_degree: Vec<usize> = (0..n).collect();
    by_degree.sort_by_key(|&v| (degree[v], v));

    for &seed in &by_degree {
        if visited[seed] {
            continue;
        }
        let start = pseudo_peripheral(seed, &adj, &degree);
        visited[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut nbrs: Vec<usize> = adj[v].iter().copied().filter(|&w| !visited[w]).collect();
            nbrs.sort_by_key(|&w| (degree[w], w));
            for w in nbrs {
                visited[w] = true;
                queue.push_back(w);
            }
        }
    }
    order.reverse();
    order
}

fn bfs_levels(start: usize, adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; adj.len()];
    seen[start] = true;
    let mut levels = vec![vec![start]];
    loop {
        let mut next = Vec::new();
        for &v in levels.last().unwrap() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    next.push(w);
                }
            }
        }
        if next.is_empty() {
            return levels;
        }
        levels.push(next);
    }
}

fn pseudo_peripheral(seed: usize, adj: &[Vec<usize>], degree: &[usize]) -> usize {
    let mut current = seed;
    let mut depth = bfs_levels(current, adj).len();
    for _ in 0..8 {
        let levels = bfs_levels(current, adj);
        let last = levels.last().unwrap();
        let candidate = *last.iter().min_by_key(|&&v| (degree[v], v)).unwrap();
        let cand_depth = bfs_levels(candidate, adj).len();
        if cand_depth > depth {
            depth = cand_depth;
            current = candidate;
        } else {
            break;
        }
    }
    current
}

impl Ldlt {
    /// Factors `a` (assumed symmetric; only the lower triangle is read after
    /// permutation, so asymmetric input silently uses one half).
    pub fn factor(a: &CsrMatrix) -> Result<Self> {
        if a.nrows() != a.ncols() {
            return Err(Error::Dimension("LDLT needs a square matrix".into()));
        }
        let n = a.nrows();
        let perm = reverse_cuthill_mckee(a);
        let mut inv = vec![0usize; n];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }

        // permuted lower-triangle rows
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        let mut scale: f64 = 0.0;
        for (r, c, v) in a.triplets() {
            let (i, j) = (inv[r], inv[c]);
            if j <= i {
                rows[i].push((j, v));
            }
            if r == c {
                scale = scale.max(v.abs());
            }
        }
        if scale == 0.0 {
            scale = a.max_abs().max(f64::MIN_POSITIVE);
        }
        let first: Vec<usize> = rows
            .iter()
            .enumerate()
            .map(|(i, r)| r.iter().map(|&(j, _)| j).min().unwrap_or(i).min(i))
            .collect();
        let mut offsets = vec![0usize; n + 1];
        for i in 0..n {
            offsets[i + 1] = offsets[i] + (i - first[i]);
        }
        let mut lower = vec![0.0; offsets[n]];
        let mut diag = vec![0.0; n];

        let mut work = vec![0.0; n];
        for i in 0..n {
            let fi = first[i];
            for x in &mut work[fi..=i] {
                *x = 0.0;
            }
            for &(j, v) in &rows[i] {
                work[j] += v;
            }
            // work[j] becomes v_j = L_ij * D_j
            for j in fi..i {
                let fj = first[j];
                let start = fi.max(fj);
                let lj = &lower[offsets[j]..offsets[j + 1]];
                let mut s = 0.0;
                for k in start..j {
                    s += work[k] * lj[k - fj];
                }
                work[j] -= s;
            }
            let mut d = work[i];
            let li = offsets[i];
            for j in fi..i {
                let l = work[j] / diag[j];
                d -= work[j] * l;
                lower[li + (j - fi)] = l;
            }
            if !d.is_finite() || d.abs() <= PIVOT_RTOL * scale {
                return Err(Error::Factorization(format!(
                    "zero pivot {d:e} at step {i} of {n} (scale {scale:e})"
                )));
            }
            diag[i] = d;
        }

        Ok(Self {
            n,
            perm,
            first,
            offsets,
            lower,
            diag,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Number of stored off-diagonal factor entries.
    pub fn envelope_size(&self) -> usize {
        self.lower.len()
    }

    /// Count of negative pivots, equal to the number of negative eigenvalues.
    pub fn negative_pivots(&self) -> usize {
        self.diag.iter().filter(|&&d| d < 0.0).count()
    }

    pub fn min_abs_pivot(&self) -> f64 {
        self.diag.iter().fold(f64::INFINITY, |m, d| m.min(d.abs()))
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = vec![0.0; self.n];
        self.solve_into(b, &mut x);
        x
    }

    pub fn solve_into(&self, b: &[f64], out: &mut [f64]) {
        assert_eq!(b.len(), self.n);
        let mut y: Vec<f64> = self.perm.iter().map(|&old| b[old]).collect();
        for i in 0..self.n {
            let fi = self.first[i];
            let li = &self.lower[self.offsets[i]..self.offsets[i + 1]];
            let mut s = 0.0;
            for (k, l) in li.iter().enumerate() {
                s += l * y[fi + k];
            }
            y[i] -= s;
        }
        for (yi, d) in y.iter_mut().zip(&self.diag) {
            *yi /= d;
        }
        for i in (0..self.n).rev() {
            let fi = self.first[i];
            let xi = y[i];
            let li = &self.lower[self.offsets[i]..self.offsets[i + 1]];
            for (k, l) in li.iter().enumerate() {
                y[fi + k] -= l * xi;
            }
        }
        for (new, &old) in self.perm.iter().enumerate() {
            out[old] = y[new];
        }
    }
}
