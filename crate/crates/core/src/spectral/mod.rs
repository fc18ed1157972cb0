//! Partial eigendecomposition of the Laplacian and spectral estimates that
//! avoid it.

mod estimate;
mod krylov;

pub use estimate::{
    eigencount, eigencount_with_probes, estimate_lambda_k, estimate_lambda_k_with_probes,
    estimate_lambda_max, LambdaKEstimate, SpectralCounter,
};

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::graph::{Laplacian, SymmetricOperator};

/// The first `k` eigenpairs of a Laplacian, eigenvalues ascending.
///
/// Each eigenvector has its largest-magnitude entry positive.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenBasis {
    vectors: DMatrix<f64>,
    values: Vec<f64>,
}

impl EigenBasis {
    /// Wraps precomputed eigenpairs; checks orthonormality to 1e-10.
    pub fn new(vectors: DMatrix<f64>, values: Vec<f64>) -> Result<Self> {
        if vectors.ncols() != values.len() {
            return Err(Error::InvalidArgument(format!(
                "{} vectors for {} values",
                vectors.ncols(),
                values.len()
            )));
        }
        let dev = orthonormality_error(&vectors);
        if dev > 1e-10 {
            return Err(Error::NotOrthonormal(dev));
        }
        Ok(Self { vectors, values })
    }

    /// `N × k` matrix `U_k`.
    pub fn vectors(&self) -> &DMatrix<f64> {
        &self.vectors
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn k(&self) -> usize {
        self.values.len()
    }

    pub fn n(&self) -> usize {
        self.vectors.nrows()
    }

    /// The same basis restricted to its first `k` modes.
    pub fn truncate(&self, k: usize) -> Self {
        let k = k.min(self.k());
        Self {
            vectors: self.vectors.columns(0, k).into_owned(),
            values: self.values[..k].to_vec(),
        }
    }

    /// `U_k U_k^T`, for tests and small oracles.
    pub fn projector(&self) -> DMatrix<f64> {
        &self.vectors * self.vectors.transpose()
    }

    /// `max_i ‖L u_i − λ_i u_i‖`.
    pub fn max_residual(&self, l: &impl SymmetricOperator) -> f64 {
        let n = self.n();
        let mut y = vec![0.0; n];
        (0..self.k())
            .map(|i| {
                let u = self.vectors.column(i);
                l.apply(u.as_slice(), &mut y);
                y.iter()
                    .zip(u.iter())
                    .map(|(a, b)| (a - self.values[i] * b).powi(2))
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max)
    }
}

/// `max |X^T X − I|` entrywise.
pub fn orthonormality_error(x: &DMatrix<f64>) -> f64 {
    let g = x.transpose() * x;
    let mut dev: f64 = 0.0;
    for i in 0..g.nrows() {
        for j in 0..g.ncols() {
            let target = if i == j { 1.0 } else { 0.0 };
            dev = dev.max((g[(i, j)] - target).abs());
        }
    }
    dev
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EigenSolver {
    /// Dense for `N <= 500`, Krylov above.
    #[default]
    Auto,
    Dense,
    Krylov,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenOptions {
    pub solver: EigenSolver,
    /// Residual target relative to the Gershgorin bound on `‖L‖`.
    pub tolerance: f64,
    /// Cap on the Krylov subspace dimension (`None` means `N`).
    pub max_dimension: Option<usize>,
    pub seed: u64,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self {
            solver: EigenSolver::Auto,
            tolerance: 1e-10,
            max_dimension: None,
            seed: 0x1a2b_3c4d,
        }
    }
}

pub const DENSE_LIMIT: usize = 500;

/// The `k` smallest eigenpairs of `L`.
pub fn partial_eigendecomposition(
    l: &Laplacian,
    k: usize,
    opts: &EigenOptions,
) -> Result<EigenBasis> {
    let n = l.n();
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!(
            "k = {k} must lie in [1, {n}]"
        )));
    }
    let dense = match opts.solver {
        EigenSolver::Dense => true,
        EigenSolver::Krylov => false,
        EigenSolver::Auto => n <= DENSE_LIMIT,
    };
    let (vectors, values) = if dense {
        dense_smallest(&l.to_dense(), k)
    } else {
        let scale = l.gershgorin_bound().max(f64::MIN_POSITIVE);
        krylov::smallest_eigenpairs(
            l,
            k,
            opts.tolerance * scale,
            opts.max_dimension.unwrap_or(n).min(n),
            opts.seed,
        )?
    };
    let mut vectors = vectors;
    fix_signs(&mut vectors);
    Ok(EigenBasis { vectors, values })
}

/// Full dense diagonalization, keeping the `k` smallest pairs.
pub fn dense_smallest(m: &DMatrix<f64>, k: usize) -> (DMatrix<f64>, Vec<f64>) {
    let eig = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..m.nrows()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let order = &order[..k];
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(m.nrows(), k, |r, c| eig.eigenvectors[(r, order[c])]);
    (vectors, values)
}

/// All eigenvalues of a dense symmetric matrix, ascending.
pub fn dense_spectrum(m: &DMatrix<f64>) -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(m.clone())
        .eigenvalues
        .iter()
        .copied()
        .collect();
    ev.sort_by(f64::total_cmp);
    ev
}

fn fix_signs(v: &mut DMatrix<f64>) {
    for mut col in v.column_iter_mut() {
        let mut best = 0.0f64;
        let mut sign = 1.0;
        for &x in col.iter() {
            if x.abs() > best {
                best = x.abs();
                sign = x.signum();
            }
        }
        if sign < 0.0 {
            col.neg_mut();
        }
    }
}
