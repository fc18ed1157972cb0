//! Block Krylov iteration with full reorthogonalization and Rayleigh-Ritz
//! extraction.
//!
//! The whole basis and its image under the operator are kept, so the
//! projected matrix is exact for the subspace and degenerate eigenvalues
//! (up to the block size) are resolved.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::graph::SymmetricOperator;
use crate::seeds;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

struct KrylovBasis<'a, A: SymmetricOperator> {
    op: &'a A,
    q: Vec<Vec<f64>>,
    aq: Vec<Vec<f64>>,
    /// Projected matrix `Q^T A Q`, grown row by row.
    t: Vec<Vec<f64>>,
}

impl<'a, A: SymmetricOperator> KrylovBasis<'a, A> {
    fn new(op: &'a A) -> Self {
        Self {
            op,
            q: Vec::new(),
            aq: Vec::new(),
            t: Vec::new(),
        }
    }

    fn dim(&self) -> usize {
        self.q.len()
    }

    /// Orthogonalizes `v` against the basis twice and appends it unless it
    /// is numerically dependent. Returns whether it was kept.
    fn push(&mut self, mut v: Vec<f64>) -> bool {
        let start = dot(&v, &v).sqrt();
        if start == 0.0 {
            return false;
        }
        for _ in 0..2 {
            for b in &self.q {
                let c = dot(&v, b);
                axpy(-c, b, &mut v);
            }
        }
        let norm = dot(&v, &v).sqrt();
        if norm <= 1e-10 * start {
            return false;
        }
        v.iter_mut().for_each(|x| *x /= norm);
        let mut av = vec![0.0; v.len()];
        self.op.apply(&v, &mut av);
        let row: Vec<f64> = self.q.iter().map(|b| dot(b, &av)).collect();
        let diag = dot(&v, &av);
        for (j, r) in self.t.iter_mut().enumerate() {
            r.push(row[j]);
        }
        let mut new_row = row;
        new_row.push(diag);
        self.t.push(new_row);
        self.q.push(v);
        self.aq.push(av);
        true
    }

    fn projected(&self) -> DMatrix<f64> {
        let d = self.dim();
        let m = DMatrix::from_fn(d, d, |i, j| self.t[i][j]);
        (&m + m.transpose()) * 0.5
    }

    /// Ritz pairs for the `k` smallest (or largest) Ritz values with their
    /// residual norms.
    fn ritz(&self, k: usize, largest: bool) -> (Vec<f64>, Vec<Vec<f64>>, Vec<f64>) {
        let eig = SymmetricEigen::new(self.projected());
        let mut order: Vec<usize> = (0..self.dim()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        if largest {
            order.reverse();
        }
        let n = self.q[0].len();
        let mut values = Vec::with_capacity(k);
        let mut vectors = Vec::with_capacity(k);
        let mut residuals = Vec::with_capacity(k);
        for &c in order.iter().take(k) {
            let theta = eig.eigenvalues[c];
            let mut y = vec![0.0; n];
            let mut ay = vec![0.0; n];
            for (j, (qj, aqj)) in self.q.iter().zip(&self.aq).enumerate() {
                let s = eig.eigenvectors[(j, c)];
                axpy(s, qj, &mut y);
                axpy(s, aqj, &mut ay);
            }
            axpy(-theta, &y, &mut ay);
            residuals.push(dot(&ay, &ay).sqrt());
            values.push(theta);
            vectors.push(y);
        }
        (values, vectors, residuals)
    }
}

fn random_vector<R: Rng>(n: usize, rng: &mut R) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

/// The `k` smallest eigenpairs of `op`, residuals below `abs_tol`.
pub(super) fn smallest_eigenpairs<A: SymmetricOperator>(
    op: &A,
    k: usize,
    abs_tol: f64,
    max_dim: usize,
    seed: u64,
) -> Result<(DMatrix<f64>, Vec<f64>)> {
    let n = op.dim();
    let block = k.clamp(2, 16).min(n);
    let mut rng = seeds::stream(seed, &[0x4b52]);
    let mut basis = KrylovBasis::new(op);
    let mut frontier: Vec<usize> = Vec::new();
    let mut worst = f64::INFINITY;
    while basis.dim() < max_dim {
        let mut added = Vec::new();
        for &j in &frontier {
            if basis.dim() >= max_dim {
                break;
            }
            if basis.push(basis.aq[j].clone()) {
                added.push(basis.dim() - 1);
            }
        }
        // Restart directions when the frontier is exhausted (invariant
        // subspace found) or at the very beginning.
        let mut attempts = 0;
        while added.len() < block && basis.dim() < max_dim && attempts < 4 * block {
            attempts += 1;
            if frontier.is_empty() || added.is_empty() {
                if basis.push(random_vector(n, &mut rng)) {
                    added.push(basis.dim() - 1);
                }
            } else {
                break;
            }
        }
        if added.is_empty() {
            break;
        }
        frontier = added;
        if basis.dim() >= k {
            let (values, vectors, residuals) = basis.ritz(k, false);
            worst = residuals.iter().cloned().fold(0.0, f64::max);
            if worst <= abs_tol || basis.dim() == n {
                let v = DMatrix::from_fn(n, k, |r, c| vectors[c][r]);
                return Ok((v, values));
            }
        }
    }
    Err(Error::NoConvergence {
        iterations: basis.dim(),
        residual: worst,
    })
}

/// Largest Ritz value of a single-vector Krylov run.
///
/// Stops when the value stalls to relative `1e-12` or the residual drops
/// below `1e-8` of it. The Ritz value never exceeds the true maximum.
pub(super) fn largest_ritz_value<A: SymmetricOperator>(op: &A, max_dim: usize, seed: u64) -> f64 {
    let n = op.dim();
    let mut rng = seeds::stream(seed, &[0x4c4d]);
    let mut basis = KrylovBasis::new(op);
    if !basis.push(random_vector(n, &mut rng)) {
        return 0.0;
    }
    let mut last = f64::NEG_INFINITY;
    loop {
        let (values, _, residuals) = basis.ritz(1, true);
        let theta = values[0];
        if residuals[0] <= 1e-8 * theta.abs()
            || (theta - last).abs() <= 1e-12 * theta.abs()
            || basis.dim() >= max_dim.min(n)
        {
            return theta;
        }
        last = theta;
        let next = basis.aq[basis.dim() - 1].clone();
        if !basis.push(next) && !basis.push(random_vector(n, &mut rng)) {
            return theta;
        }
    }
}
