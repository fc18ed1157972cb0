//! Noisy measurement on sampled nodes and least-squares recovery of
//! bandlimited signals.

use itertools::Itertools;
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::dpp::SampleSet;
use crate::error::{Error, Result};
use crate::spectral::EigenBasis;

/// Relative singular-value threshold below which `M U_k` is rank deficient.
pub const RANK_TOLERANCE: f64 = 1e-10;

/// Subsets allowed in [`brute_force_mv`].
pub const MV_BUDGET: u128 = 1_000_000;

/// `y = M x + n` on a sample set.
#[derive(Debug, Clone, PartialEq)]
pub struct Measurement {
    pub samples: SampleSet,
    pub values: Vec<f64>,
    pub noise_std: f64,
}

pub fn measure<R: Rng + ?Sized>(
    x: &[f64],
    samples: &SampleSet,
    noise_std: f64,
    rng: &mut R,
) -> Result<Measurement> {
    if !(noise_std >= 0.0) {
        return Err(Error::InvalidArgument(format!("noise std {noise_std} < 0")));
    }
    if let Some(&bad) = samples.nodes().iter().find(|&&s| s >= x.len()) {
        return Err(Error::NodeOutOfRange {
            index: bad,
            n_nodes: x.len(),
        });
    }
    let values = if noise_std == 0.0 {
        samples.nodes().iter().map(|&s| x[s]).collect()
    } else {
        let noise = Normal::new(0.0, noise_std).expect("finite std");
        samples
            .nodes()
            .iter()
            .map(|&s| x[s] + noise.sample(rng))
            .collect()
    };
    Ok(Measurement {
        samples: samples.clone(),
        values,
        noise_std,
    })
}

/// Rows of `U_k` at the sampled nodes, `m × k`.
pub fn sampled_rows(basis: &EigenBasis, samples: &SampleSet) -> Result<DMatrix<f64>> {
    let u = basis.vectors();
    if let Some(&bad) = samples.nodes().iter().find(|&&s| s >= basis.n()) {
        return Err(Error::NodeOutOfRange {
            index: bad,
            n_nodes: basis.n(),
        });
    }
    let nodes = samples.nodes();
    Ok(DMatrix::from_fn(nodes.len(), basis.k(), |r, c| {
        u[(nodes[r], c)]
    }))
}

/// Singular values of `M U_k`, ascending, padded with zeros to `k`.
pub fn singular_spectrum(basis: &EigenBasis, samples: &SampleSet) -> Result<Vec<f64>> {
    if samples.is_empty() {
        return Err(Error::InvalidArgument("empty sample set".into()));
    }
    let b = sampled_rows(basis, samples)?;
    let mut sv: Vec<f64> = b.singular_values().iter().copied().collect();
    sv.resize(basis.k(), 0.0);
    sv.sort_by(f64::total_cmp);
    Ok(sv)
}

/// `x_rec = U_k (M U_k)^+ y` via the SVD of `M U_k`.
///
/// Fails with [`Error::RankDeficient`] when `σ_1 < 1e-10 σ_k` (or `m < k`).
pub fn reconstruct(meas: &Measurement, basis: &EigenBasis) -> Result<Vec<f64>> {
    if meas.values.len() != meas.samples.len() {
        return Err(Error::InvalidArgument(
            "measurement length differs from sample count".into(),
        ));
    }
    let b = sampled_rows(basis, &meas.samples)?;
    let k = basis.k();
    if b.nrows() < k {
        let largest = if b.nrows() == 0 {
            0.0
        } else {
            b.singular_values().max()
        };
        return Err(Error::RankDeficient {
            smallest: 0.0,
            largest,
        });
    }
    let svd = b.svd(true, true);
    let largest = svd.singular_values.max();
    let smallest = svd.singular_values.min();
    if !(smallest >= RANK_TOLERANCE * largest) || largest == 0.0 {
        return Err(Error::RankDeficient { smallest, largest });
    }
    let y = DVector::from_column_slice(&meas.values);
    let u = svd.u.as_ref().expect("requested U");
    let vt = svd.v_t.as_ref().expect("requested V^T");
    let mut coeff = u.transpose() * y;
    for (c, s) in coeff.iter_mut().zip(svd.singular_values.iter()) {
        *c /= s;
    }
    let alpha = vt.transpose() * coeff;
    Ok((basis.vectors() * alpha).iter().copied().collect())
}

/// `det(U_k^T M^T M U_k) = ∏ σ_i²` for a size-`k` sample set.
pub fn mv_objective(basis: &EigenBasis, samples: &SampleSet) -> Result<f64> {
    if samples.len() != basis.k() {
        return Err(Error::InvalidArgument(format!(
            "max-volume objective needs |A| = k = {}, got {}",
            basis.k(),
            samples.len()
        )));
    }
    let b = sampled_rows(basis, samples)?;
    Ok(b.determinant().powi(2))
}

/// Exact maximizer of [`mv_objective`] by enumeration; ties go to the
/// lexicographically first subset.
pub fn brute_force_mv(basis: &EigenBasis) -> Result<SampleSet> {
    let (n, k) = (basis.n(), basis.k());
    let count = binomial(n, k);
    if count > MV_BUDGET {
        return Err(Error::BudgetExceeded {
            count,
            budget: MV_BUDGET,
        });
    }
    let u = basis.vectors();
    let mut best: Option<(Vec<usize>, f64)> = None;
    for a in (0..n).combinations(k) {
        let b = DMatrix::from_fn(k, k, |r, c| u[(a[r], c)]);
        let v = b.determinant().powi(2);
        match &best {
            Some((_, bv)) if v <= *bv * (1.0 + 1e-12) => {}
            _ => best = Some((a, v)),
        }
    }
    let (a, _) = best.expect("at least one subset");
    SampleSet::new(a, n)
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i as u128 + 1))
}
