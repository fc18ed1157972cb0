//! Exact m-DPP sampling with projection kernels.
//!
//! Two samplers share the same selection rule and differ in how they
//! down-date the marginal scores `p(i)`:
//!
//! * [`sample_mdpp_reference`] recomputes the Schur complement
//!   `K_ii − K_{S,i}^T K_S^{-1} K_{S,i}` for every node, `O(N m³)`.
//! * [`sample_mdpp_fast`] keeps the orthogonalized kernel columns `f_l`
//!   and subtracts `f_n(i)²`, `O(N m²)`.
//!
//! Both produce `P(A) = det(K_A) / Z` with `Z = ∏_{l=1}^m (d − l + 1)`.

mod kernel;
pub mod oracle;
mod sampler;

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

pub use kernel::{kernel_from_basis, ProjectionKernel};
pub(crate) use sampler::argmax as sampler_argmax;
pub use sampler::{
    run_fast, run_reference, sample_mdpp_fast, sample_mdpp_greedy, sample_mdpp_reference,
    ForcedSelector, GreedySelector, OpCounter, RandomSelector, SamplerTrace, Selector,
    NEGATIVE_FLOOR,
};

use crate::error::{Error, Result};

/// Selected nodes in selection order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SampleSet(Vec<usize>);

impl SampleSet {
    /// Checks distinctness and range.
    pub fn new(nodes: Vec<usize>, n: usize) -> Result<Self> {
        let mut seen = HashSet::with_capacity(nodes.len());
        for &s in &nodes {
            if s >= n {
                return Err(Error::NodeOutOfRange {
                    index: s,
                    n_nodes: n,
                });
            }
            if !seen.insert(s) {
                return Err(Error::DuplicateSample(s));
            }
        }
        Ok(Self(nodes))
    }

    pub(crate) fn from_distinct(nodes: Vec<usize>) -> Self {
        Self(nodes)
    }

    pub fn nodes(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Nodes in increasing order, for set comparisons.
    pub fn sorted(&self) -> Vec<usize> {
        let mut v = self.0.clone();
        v.sort_unstable();
        v
    }
}

/// A sample set with its provenance, as printed by the CLI.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub method: String,
    pub seed: u64,
    pub nodes: SampleSet,
}

/// `log Z = Σ_{l=1}^m log(d − l + 1)`.
pub fn log_normalizer(d: usize, m: usize) -> f64 {
    (1..=m).map(|l| ((d - l + 1) as f64).ln()).sum()
}

/// `log P(A) = log det(K_A) − log Z`; `-∞` when `det(K_A) <= 0`.
///
/// `Z` counts ordered draws, so this is the probability of one particular
/// draw order of `A`; summed over unordered `m`-subsets it totals `1 / m!`.
pub fn mdpp_log_probability(kernel: &ProjectionKernel, a: &SampleSet) -> Result<f64> {
    let a = SampleSet::new(a.nodes().to_vec(), kernel.n())?;
    let m = a.len();
    if m > kernel.rank() {
        return Err(Error::SampleSizeExceedsRank {
            m,
            rank: kernel.rank(),
        });
    }
    if m == 0 {
        return Ok(0.0);
    }
    let det = kernel.submatrix(a.nodes(), a.nodes()).determinant();
    if !(det > 0.0) {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(det.ln() - log_normalizer(kernel.rank(), m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use itertools::Itertools;
    use nalgebra::DMatrix;

    #[test]
    fn empty_set_has_log_probability_zero() {
        let k = ProjectionKernel::new(DMatrix::identity(4, 2)).unwrap();
        assert_eq!(
            mdpp_log_probability(&k, &SampleSet::new(vec![], 4).unwrap()).unwrap(),
            0.0
        );
    }

    #[test]
    fn identity_kernel_is_uniform() {
        let k = ProjectionKernel::new(DMatrix::identity(6, 6)).unwrap();
        let a = SampleSet::new(vec![4, 1, 2], 6).unwrap();
        let lp = mdpp_log_probability(&k, &a).unwrap();
        assert!((lp + (6.0f64 * 5.0 * 4.0).ln()).abs() < 1e-12);
    }

    #[test]
    fn probabilities_sum_to_inverse_factorial() {
        let mut rng = crate::seeds::stream(2, &[]);
        let k = ProjectionKernel::random(6, 3, &mut rng);
        let total: f64 = (0..6)
            .combinations(3)
            .map(|c| {
                mdpp_log_probability(&k, &SampleSet::new(c, 6).unwrap())
                    .unwrap()
                    .exp()
            })
            .sum();
        assert!((total - 1.0 / 6.0).abs() < 1e-10, "{total}");
    }

    #[test]
    fn duplicates_rejected() {
        let k = ProjectionKernel::new(DMatrix::identity(4, 2)).unwrap();
        let a = SampleSet::from_distinct(vec![1, 1]);
        assert!(matches!(
            mdpp_log_probability(&k, &a),
            Err(Error::DuplicateSample(1))
        ));
    }

    #[test]
    fn sample_set_json_is_a_plain_array() {
        let rec = SampleRecord {
            method: "dpp-ideal".into(),
            seed: 3,
            nodes: SampleSet::new(vec![2, 0], 3).unwrap(),
        };
        let json = serde_json::to_string(&rec).unwrap();
        assert_eq!(json, r#"{"method":"dpp-ideal","seed":3,"nodes":[2,0]}"#);
    }
}
