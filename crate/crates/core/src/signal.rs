//! k-bandlimited graph signals.

use nalgebra::DVector;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::EigenBasis;

/// A unit-norm signal `x = U_k α` in the span of the first `k` modes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandlimitedSignal {
    pub values: Vec<f64>,
    pub coefficients: Vec<f64>,
}

impl BandlimitedSignal {
    pub fn band(&self) -> usize {
        self.coefficients.len()
    }

    /// Builds `U_k α` and rescales both `x` and `α` to unit norm.
    pub fn from_coefficients(basis: &EigenBasis, alpha: &[f64]) -> Result<Self> {
        if alpha.len() != basis.k() {
            return Err(Error::InvalidArgument(format!(
                "{} coefficients for a basis of {} modes",
                alpha.len(),
                basis.k()
            )));
        }
        let a = DVector::from_column_slice(alpha);
        let x = basis.vectors() * &a;
        let norm = x.norm();
        if !(norm > 0.0) {
            return Err(Error::NumericalBreakdown {
                step: 0,
                message: "bandlimited signal has zero norm".into(),
            });
        }
        Ok(Self {
            values: (x / norm).iter().copied().collect(),
            coefficients: (a / norm).iter().copied().collect(),
        })
    }
}

/// Draws `α ~ N(0, I_k)` and returns the normalized `x = U_k α`.
pub fn generate_bandlimited_signal<R: Rng + ?Sized>(
    basis: &EigenBasis,
    rng: &mut R,
) -> Result<BandlimitedSignal> {
    if basis.k() == 0 {
        return Err(Error::InvalidArgument("basis has no columns".into()));
    }
    loop {
        let alpha: Vec<f64> = (0..basis.k()).map(|_| rng.sample(StandardNormal)).collect();
        match BandlimitedSignal::from_coefficients(basis, &alpha) {
            Err(Error::NumericalBreakdown { .. }) => continue,
            other => return other,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use crate::spectral::{partial_eigendecomposition, EigenOptions};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn basis() -> EigenBasis {
        let l = Graph::cycle(12).unwrap().laplacian();
        partial_eigendecomposition(&l, 4, &EigenOptions::default()).unwrap()
    }

    #[test]
    fn single_mode() {
        let b = basis();
        let s = BandlimitedSignal::from_coefficients(&b, &[1.0, 0.0, 0.0, 0.0]).unwrap();
        for (x, u) in s.values.iter().zip(b.vectors().column(0).iter()) {
            assert!((x - u).abs() < 1e-14);
        }
    }

    #[test]
    fn unit_norm_and_in_span() {
        let b = basis();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let s = generate_bandlimited_signal(&b, &mut rng).unwrap();
            let x = DVector::from_column_slice(&s.values);
            assert!((x.norm() - 1.0).abs() < 1e-12);
            let u = b.vectors();
            let proj = u * (u.transpose() * &x);
            assert!((&x - proj).norm() <= 1e-10);
            let rebuilt = u * DVector::from_column_slice(&s.coefficients);
            assert!((&x - rebuilt).norm() <= 1e-12);
        }
    }

    #[test]
    fn zero_coefficients_rejected() {
        let b = basis();
        assert!(BandlimitedSignal::from_coefficients(&b, &[0.0; 4]).is_err());
    }
}
