use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::spectral::{orthonormality_error, EigenBasis};

/// Projection kernel `K = X X^T` kept in factored form.
///
/// Only the `N × d` factor is stored (row-major, so each `K_ij` is one
/// length-`d` dot product); `K` itself is never materialized.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionKernel {
    n: usize,
    d: usize,
    rows: Vec<f64>,
}

impl ProjectionKernel {
    /// `x` must have orthonormal columns to 1e-10.
    pub fn new(x: DMatrix<f64>) -> Result<Self> {
        let dev = orthonormality_error(&x);
        if dev > 1e-10 {
            return Err(Error::NotOrthonormal(dev));
        }
        let (n, d) = x.shape();
        let mut rows = Vec::with_capacity(n * d);
        for i in 0..n {
            rows.extend(x.row(i).iter());
        }
        Ok(Self { n, d, rows })
    }

    /// Kernel of a random `d`-dimensional subspace (QR of a Gaussian matrix).
    pub fn random<R: Rng + ?Sized>(n: usize, d: usize, rng: &mut R) -> Self {
        assert!(d <= n);
        let g = DMatrix::<f64>::from_fn(n, d, |_, _| rng.sample(StandardNormal));
        let q = g.qr().q();
        Self::new(q).expect("QR factor is orthonormal")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `d`, the rank of `K`.
    pub fn rank(&self) -> usize {
        self.d
    }

    pub fn factor_row(&self, i: usize) -> &[f64] {
        &self.rows[i * self.d..(i + 1) * self.d]
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.factor_row(i)
            .iter()
            .zip(self.factor_row(j))
            .map(|(a, b)| a * b)
            .sum()
    }

    /// `diag(K)`, i.e. squared row norms of `X`.
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.entry(i, i)).collect()
    }

    /// Column `k_s = X x_s^T`.
    pub fn column(&self, s: usize) -> Vec<f64> {
        (0..self.n).map(|i| self.entry(i, s)).collect()
    }

    /// `K_{A,B}`.
    pub fn submatrix(&self, a: &[usize], b: &[usize]) -> DMatrix<f64> {
        DMatrix::from_fn(a.len(), b.len(), |r, c| self.entry(a[r], b[c]))
    }

    pub fn factor(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.n, self.d, &self.rows)
    }

    /// Dense `N × N` kernel, for small-N checks.
    pub fn to_dense(&self) -> DMatrix<f64> {
        let x = self.factor();
        &x * x.transpose()
    }
}

/// The m-DPP kernel `K_k = U_k U_k^T` of a bandlimited model.
pub fn kernel_from_basis(basis: &EigenBasis) -> Result<ProjectionKernel> {
    ProjectionKernel::new(basis.vectors().clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use crate::spectral::{dense_spectrum, partial_eigendecomposition, EigenOptions};

    #[test]
    fn full_basis_gives_identity() {
        let l = Graph::cycle(7).unwrap().laplacian();
        let b = partial_eigendecomposition(&l, 7, &EigenOptions::default()).unwrap();
        let k = kernel_from_basis(&b).unwrap();
        assert!((k.to_dense() - DMatrix::identity(7, 7)).amax() < 1e-10);
    }

    #[test]
    fn single_mode_is_constant() {
        let l = Graph::path(5).unwrap().laplacian();
        let b = partial_eigendecomposition(&l, 1, &EigenOptions::default()).unwrap();
        let k = kernel_from_basis(&b).unwrap();
        assert!((k.to_dense().add_scalar(-0.2)).amax() < 1e-12);
    }

    #[test]
    fn trace_and_spectrum() {
        let mut rng = crate::seeds::stream(1, &[]);
        let k = ProjectionKernel::random(30, 4, &mut rng);
        assert!((k.diagonal().iter().sum::<f64>() - 4.0).abs() < 1e-8);
        let dense = k.to_dense();
        assert!((&dense - dense.transpose()).amax() < 1e-14);
        for ev in dense_spectrum(&dense) {
            assert!(ev.abs() < 1e-10 || (ev - 1.0).abs() < 1e-10, "{ev}");
        }
    }

    #[test]
    fn rejects_non_orthonormal() {
        let x = DMatrix::from_element(4, 2, 1.0);
        assert!(matches!(
            ProjectionKernel::new(x),
            Err(Error::NotOrthonormal(_))
        ));
    }
}
