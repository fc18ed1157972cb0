//! Eigendecomposition-free approximate m-DPP sampling.
//!
//! The kernel `K_k = h_k(L)` is replaced by the Chebyshev filter `h̃(L)`:
//! its diagonal is estimated from filtered Gaussian probes and its columns
//! are `h̃(L) δ_s`. Selection is greedy, and two stabilization rules keep
//! the loop well defined once approximation errors accumulate:
//!
//! 1. after each down-date the scores of all chosen nodes are set to 0;
//! 2. if the pivot `f_n(s_n)` is not positive, `f_n` is divided by
//!    `√(‖f_n‖₂ / N)` instead of `√f_n(s_n)`.

use rand::RngCore;

use crate::chebyshev::{fit_ideal_lowpass_with, ChebyshevFilter};
use crate::dpp::SampleSet;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::graph::Laplacian;
use crate::probes::{estimate_diagonal_with, RandomProbeMatrix};
use crate::spectral::estimate_lambda_max;

#[derive(Debug, Clone, PartialEq)]
pub struct ApproxConfig {
    pub degree: usize,
    pub jackson: bool,
    /// Uses [`estimate_lambda_max`] when unset.
    pub lambda_max: Option<f64>,
    /// Keep every intermediate score vector in the result.
    pub record_scores: bool,
    pub execution: Execution,
}

impl Default for ApproxConfig {
    fn default() -> Self {
        Self {
            degree: 50,
            jackson: true,
            lambda_max: None,
            record_scores: false,
            execution: Execution::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ApproxSample {
    pub samples: SampleSet,
    pub filter: ChebyshevFilter,
    /// Estimated `diag(h̃(L)²)` before any selection.
    pub initial_scores: Vec<f64>,
    /// Steps (0-based) where the pivot was not positive and the fallback
    /// normalization was used.
    pub fallback_steps: Vec<usize>,
    /// Scores after each step when `record_scores` is set.
    pub scores: Vec<Vec<f64>>,
}

impl ApproxSample {
    pub fn fallback_rate(&self) -> f64 {
        self.fallback_steps.len() as f64 / self.samples.len().max(1) as f64
    }
}

/// Greedy approximate m-DPP selection with fresh probes.
pub fn sample_approx<R: RngCore + ?Sized>(
    l: &Laplacian,
    lambda_k: f64,
    r: usize,
    m: usize,
    n_probes: usize,
    rng: &mut R,
) -> Result<ApproxSample> {
    if n_probes == 0 {
        return Err(Error::InvalidArgument("n_probes must be >= 1".into()));
    }
    let probes = RandomProbeMatrix::gaussian(l.n(), n_probes, rng);
    let cfg = ApproxConfig {
        degree: r,
        ..Default::default()
    };
    sample_approx_with_probes(l, lambda_k, m, &probes, &cfg)
}

/// Deterministic given `(L, λ_k, probes, cfg)`.
pub fn sample_approx_with_probes(
    l: &Laplacian,
    lambda_k: f64,
    m: usize,
    probes: &RandomProbeMatrix,
    cfg: &ApproxConfig,
) -> Result<ApproxSample> {
    let n = l.n();
    if m == 0 || m > n {
        return Err(Error::InvalidArgument(format!(
            "m = {m} must lie in [1, {n}]"
        )));
    }
    if cfg.degree < 10 {
        return Err(Error::InvalidArgument(format!(
            "filter degree {} < 10",
            cfg.degree
        )));
    }
    if probes.n_rows() != n {
        return Err(Error::InvalidArgument(
            "probe matrix has wrong row count".into(),
        ));
    }
    let lambda_max = cfg.lambda_max.unwrap_or_else(|| estimate_lambda_max(l));
    let filter = fit_ideal_lowpass_with(lambda_k, lambda_max, cfg.degree, cfg.jackson)?;
    let initial_scores = estimate_diagonal_with(&filter, l, probes, cfg.execution);
    let mut p = initial_scores.clone();

    let mut chosen = vec![false; n];
    let mut selected = Vec::with_capacity(m);
    let mut fs: Vec<Vec<f64>> = Vec::with_capacity(m);
    let mut fallback_steps = Vec::new();
    let mut scores = Vec::new();
    let mut delta = vec![0.0; n];
    for step in 0..m {
        let s = crate::dpp::sampler_argmax(&p, |i| !chosen[i]);
        delta[s] = 1.0;
        let mut f = filter.apply(l, &delta);
        delta[s] = 0.0;
        for fl in &fs {
            let c = fl[s];
            for (a, b) in f.iter_mut().zip(fl) {
                *a -= c * b;
            }
        }
        let pivot = f[s];
        let denom = if pivot > 0.0 {
            pivot.sqrt()
        } else {
            fallback_steps.push(step);
            let norm = f.iter().map(|v| v * v).sum::<f64>().sqrt();
            log::debug!("step {step}: pivot {pivot:e} <= 0, normalizing by sqrt(|f|/N)");
            (norm / n as f64).sqrt()
        };
        if denom > 0.0 {
            for (pi, fi) in p.iter_mut().zip(f.iter_mut()) {
                *fi /= denom;
                *pi -= *fi * *fi;
            }
        }
        chosen[s] = true;
        selected.push(s);
        for &t in &selected {
            p[t] = 0.0;
        }
        if cfg.record_scores {
            scores.push(p.clone());
        }
        fs.push(f);
    }
    Ok(ApproxSample {
        samples: SampleSet::from_distinct(selected),
        filter,
        initial_scores,
        fallback_steps,
        scores,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use crate::seeds;

    #[test]
    fn two_cliques_split() {
        let l = Graph::cliques(&[8, 8]).unwrap().laplacian();
        // spectrum {0, 0, 8, ...}: cutoff between the null space and the rest
        let a = sample_approx(&l, 4.0, 50, 2, 60, &mut seeds::stream(1, &[])).unwrap();
        let s = a.samples.sorted();
        assert!(s[0] < 8 && s[1] >= 8, "{s:?}");
    }

    #[test]
    fn single_pick_is_argmax_of_estimate() {
        let l = Graph::cycle(20).unwrap().laplacian();
        let probes = RandomProbeMatrix::gaussian(20, 30, &mut seeds::stream(2, &[]));
        let a = sample_approx_with_probes(&l, 1.0, 1, &probes, &ApproxConfig::default()).unwrap();
        let best = crate::dpp::sampler_argmax(&a.initial_scores, |_| true);
        assert_eq!(a.samples.nodes(), &[best]);
    }

    #[test]
    fn distinct_even_beyond_rank() {
        let l = Graph::cliques(&[5, 6, 7]).unwrap().laplacian();
        let a = sample_approx(&l, 2.0, 30, 18, 20, &mut seeds::stream(3, &[])).unwrap();
        assert_eq!(a.samples.sorted(), (0..18).collect::<Vec<_>>());
    }

    #[test]
    fn deterministic_for_fixed_probes() {
        let l = Graph::cycle(40).unwrap().laplacian();
        let probes = RandomProbeMatrix::gaussian(40, 25, &mut seeds::stream(4, &[]));
        let seq = ApproxConfig {
            execution: Execution::Sequential,
            ..Default::default()
        };
        let a = sample_approx_with_probes(&l, 0.3, 6, &probes, &seq).unwrap();
        let b = sample_approx_with_probes(&l, 0.3, 6, &probes, &ApproxConfig::default()).unwrap();
        assert_eq!(a.samples, b.samples);
        assert_eq!(a.initial_scores, b.initial_scores);
    }

    #[test]
    fn preconditions() {
        let l = Graph::cycle(10).unwrap().laplacian();
        let mut rng = seeds::stream(5, &[]);
        assert!(sample_approx(&l, 1.0, 50, 0, 5, &mut rng).is_err());
        assert!(sample_approx(&l, 1.0, 50, 11, 5, &mut rng).is_err());
        assert!(sample_approx(&l, 1.0, 5, 2, 5, &mut rng).is_err());
    }
}
