//! Spectral estimates without diagonalization: `λ_max`, eigenvalue counts
//! and the band cutoff `λ_k`.

use rand::RngCore;

use super::krylov::largest_ritz_value;
use crate::chebyshev::{ChebyshevFilter, ChebyshevMoments};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::graph::Laplacian;
use crate::probes::RandomProbeMatrix;

/// Upper estimate of the largest Laplacian eigenvalue: the top Ritz value
/// of a Krylov run inflated by 1%, capped by the Gershgorin bound.
///
/// Returns 0 for an edgeless graph.
pub fn estimate_lambda_max(l: &Laplacian) -> f64 {
    if l.max_degree() == 0.0 {
        return 0.0;
    }
    let theta = largest_ritz_value(l, 300, 0x6c6d);
    (1.01 * theta).min(l.gershgorin_bound())
}

/// Stochastic eigenvalue counter sharing one probe block across queries.
///
/// `count(t)` estimates `Tr(h̃_t(L)²) ≈ #{λ_i <= t}` as `‖h̃_t(L) R‖_F²`
/// where `h̃_t` is the degree-`r` low-pass with cutoff `t`. Queries reuse
/// Chebyshev moments, so they are monotone-consistent and cheap.
#[derive(Debug, Clone)]
pub struct SpectralCounter {
    moments: ChebyshevMoments,
    probe_energy: f64,
    r: usize,
    jackson: bool,
}

impl SpectralCounter {
    pub fn new(
        l: &Laplacian,
        lambda_max: f64,
        r: usize,
        probes: &RandomProbeMatrix,
        exec: Execution,
    ) -> Self {
        let probe_energy = probes
            .columns()
            .iter()
            .map(|c| c.iter().map(|v| v * v).sum::<f64>())
            .sum();
        let lmax = if lambda_max > 0.0 { lambda_max } else { 1.0 };
        Self {
            moments: ChebyshevMoments::compute(l, lmax, r, probes.columns(), exec),
            probe_energy,
            r,
            jackson: true,
        }
    }

    pub fn lambda_max(&self) -> f64 {
        self.moments.lambda_max()
    }

    pub fn count(&self, threshold: f64) -> f64 {
        if threshold < 0.0 {
            return 0.0;
        }
        if threshold >= self.lambda_max() {
            return self.probe_energy;
        }
        let f =
            ChebyshevFilter::lowpass_clamped(threshold, self.lambda_max(), self.r, self.jackson);
        self.moments.squared_norm(f.coefficients()).max(0.0)
    }
}

/// Estimated number of eigenvalues `<= threshold`.
pub fn eigencount<R: RngCore + ?Sized>(
    l: &Laplacian,
    threshold: f64,
    r: usize,
    n_probes: usize,
    rng: &mut R,
) -> f64 {
    let probes = RandomProbeMatrix::gaussian(l.n(), n_probes, rng);
    eigencount_with_probes(
        l,
        estimate_lambda_max(l),
        threshold,
        r,
        &probes,
        Execution::default(),
    )
}

/// [`eigencount`] with explicit `λ_max` and probes, filtering each probe
/// directly.
pub fn eigencount_with_probes(
    l: &Laplacian,
    lambda_max: f64,
    threshold: f64,
    r: usize,
    probes: &RandomProbeMatrix,
    exec: Execution,
) -> f64 {
    let energy = |cols: &[Vec<f64>]| cols.iter().flatten().map(|v| v * v).sum::<f64>();
    if threshold < 0.0 {
        return 0.0;
    }
    if lambda_max <= 0.0 || threshold >= lambda_max {
        return energy(probes.columns());
    }
    let f = ChebyshevFilter::lowpass_clamped(threshold, lambda_max, r, true);
    energy(&f.apply_many(l, probes.columns(), exec))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaKEstimate {
    pub value: f64,
    /// Estimated eigenvalue count at `value`.
    pub count: f64,
    /// False when the dichotomy could not bracket the target level; `value`
    /// is then the best endpoint.
    pub bracketed: bool,
    pub bisections: usize,
}

/// Estimates the band cutoff by dichotomy on `[0, λ_max]` over a
/// [`SpectralCounter`].
///
/// The smoothed count gains a quarter unit exactly at each eigenvalue
/// (`h̃ = ½` there), so the target level `k − ¼` sits between the k-th and
/// (k+1)-th transitions. Stops at bracket width `1e-3 λ_max` or after 50
/// bisections.
pub fn estimate_lambda_k<R: RngCore + ?Sized>(
    l: &Laplacian,
    k: usize,
    r: usize,
    n_probes: usize,
    rng: &mut R,
) -> Result<LambdaKEstimate> {
    let probes = RandomProbeMatrix::gaussian(l.n(), n_probes, rng);
    estimate_lambda_k_with_probes(l, k, r, &probes, Execution::default())
}

pub fn estimate_lambda_k_with_probes(
    l: &Laplacian,
    k: usize,
    r: usize,
    probes: &RandomProbeMatrix,
    exec: Execution,
) -> Result<LambdaKEstimate> {
    if k == 0 || k >= l.n() {
        return Err(Error::InvalidArgument(format!(
            "k = {k} must lie in [1, {})",
            l.n()
        )));
    }
    if r < 10 {
        return Err(Error::InvalidArgument(format!("filter degree {r} < 10")));
    }
    let lambda_max = estimate_lambda_max(l);
    if lambda_max <= 0.0 {
        return Ok(LambdaKEstimate {
            value: 0.0,
            count: probes.columns().iter().flatten().map(|v| v * v).sum(),
            bracketed: false,
            bisections: 0,
        });
    }
    let counter = SpectralCounter::new(l, lambda_max, r, probes, exec);
    let target = k as f64 - 0.25;
    let (mut lo, mut hi) = (0.0, lambda_max);
    let (c_lo, c_hi) = (counter.count(lo), counter.count(hi));
    if c_lo >= target || c_hi < target {
        let value = if c_lo >= target { lo } else { hi };
        log::warn!("λ_k dichotomy failed to bracket level {target} (counts {c_lo}, {c_hi})");
        return Ok(LambdaKEstimate {
            value,
            count: counter.count(value),
            bracketed: false,
            bisections: 0,
        });
    }
    let mut bisections = 0;
    while hi - lo >= 1e-3 * lambda_max && bisections < 50 {
        let mid = 0.5 * (lo + hi);
        if counter.count(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
        bisections += 1;
    }
    let value = 0.5 * (lo + hi);
    Ok(LambdaKEstimate {
        value,
        count: counter.count(value),
        bracketed: true,
        bisections,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Graph, SbmConfig};
    use crate::seeds;
    use crate::spectral::dense_spectrum;

    #[test]
    fn lambda_max_brackets() {
        let cases = [
            (Graph::path(2).unwrap(), 2.0),
            (Graph::complete(5).unwrap(), 5.0),
            (Graph::star(10).unwrap(), 10.0),
        ];
        for (g, exact) in cases {
            let l = g.laplacian();
            let oracle = *dense_spectrum(&l.to_dense()).last().unwrap();
            assert!((oracle - exact).abs() < 1e-10);
            let est = estimate_lambda_max(&l);
            assert!(
                est >= exact - 1e-12 && est <= 1.01 * exact + 1e-12,
                "{est} vs {exact}"
            );
        }
    }

    #[test]
    fn lambda_max_on_sbm() {
        let l = SbmConfig::new(300, 3, 0.5, 2)
            .generate()
            .unwrap()
            .laplacian();
        let exact = *dense_spectrum(&l.to_dense()).last().unwrap();
        let est = estimate_lambda_max(&l);
        assert!(est >= exact && est <= 1.01 * exact, "{est} vs {exact}");
    }

    #[test]
    fn count_extremes() {
        let l = SbmConfig::new(200, 4, 0.25, 3)
            .generate()
            .unwrap()
            .laplacian();
        let lmax = estimate_lambda_max(&l);
        let mut rng = seeds::stream(4, &[]);
        let full = eigencount(&l, lmax, 50, 40, &mut rng);
        assert!((full - 200.0).abs() < 20.0, "{full}");
        let none = eigencount(&l, -1e-12, 50, 40, &mut rng);
        assert!(none.abs() < 1e-12);
    }

    #[test]
    fn count_on_three_path() {
        let l = Graph::path(3).unwrap().laplacian();
        let mut rng = seeds::stream(5, &[]);
        let c = eigencount(&l, 2.0, 100, 500, &mut rng);
        assert!((1.6..=2.4).contains(&c), "{c}");
    }

    #[test]
    fn counter_matches_direct_filtering() {
        let l = SbmConfig::new(120, 3, 0.25, 6)
            .generate()
            .unwrap()
            .laplacian();
        let lmax = estimate_lambda_max(&l);
        let probes = RandomProbeMatrix::gaussian(120, 8, &mut seeds::stream(6, &[]));
        let counter = SpectralCounter::new(&l, lmax, 40, &probes, Execution::Sequential);
        for t in [0.5, 2.0, 5.0, 11.0] {
            let direct = eigencount_with_probes(&l, lmax, t, 40, &probes, Execution::Sequential);
            let fast = counter.count(t);
            assert!(
                (direct - fast).abs() <= 1e-8 * direct.max(1.0),
                "{direct} vs {fast}"
            );
        }
    }

    #[test]
    fn count_monotone_in_threshold() {
        let l = SbmConfig::new(200, 5, 0.25, 7)
            .generate()
            .unwrap()
            .laplacian();
        let lmax = estimate_lambda_max(&l);
        let probes = RandomProbeMatrix::gaussian(200, 30, &mut seeds::stream(7, &[]));
        let counter = SpectralCounter::new(&l, lmax, 50, &probes, Execution::Sequential);
        let mut prev: f64 = 0.0;
        for i in 0..=200 {
            let c = counter.count(lmax * i as f64 / 200.0);
            // Jackson-damped steps are monotone up to roundoff.
            assert!(c >= prev - 1e-6 * prev.max(1.0), "step {i}: {c} < {prev}");
            prev = c;
        }
    }

    #[test]
    fn lambda_k_on_components() {
        let g = Graph::cliques(&[6, 8, 7]).unwrap();
        let l = g.laplacian();
        let spec = dense_spectrum(&l.to_dense());
        let est = estimate_lambda_k(&l, 3, 50, 200, &mut seeds::stream(8, &[])).unwrap();
        assert!(est.bracketed);
        assert!(est.value < spec[3], "{est:?}");
        assert_eq!(spec.iter().filter(|&&v| v <= est.value).count(), 3);
    }

    #[test]
    fn lambda_k_on_three_path() {
        let l = Graph::path(3).unwrap().laplacian();
        let est = estimate_lambda_k(&l, 2, 50, 500, &mut seeds::stream(9, &[])).unwrap();
        assert!(est.value >= 1.0 && est.value < 3.0, "{est:?}");
    }

    #[test]
    fn lambda_k_preconditions() {
        let l = Graph::path(3).unwrap().laplacian();
        let mut rng = seeds::stream(1, &[]);
        assert!(estimate_lambda_k(&l, 3, 50, 10, &mut rng).is_err());
        assert!(estimate_lambda_k(&l, 1, 5, 10, &mut rng).is_err());
    }
}
