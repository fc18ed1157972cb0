use std::sync::Arc;
use std::time::Instant;

use super::{
    sample_uniform_iid, sample_weighted_iid, BenchConfig, BenchResult, BenchRow, CutoffSource,
    Method,
};
use crate::approx::{sample_approx_with_probes, ApproxConfig};
use crate::chebyshev::fit_ideal_lowpass;
use crate::dpp::{kernel_from_basis, sample_mdpp_greedy, SampleSet};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::graph::{Graph, Laplacian};
use crate::probes::{default_probe_count, estimate_diagonal_with, RandomProbeMatrix};
use crate::reconstruction::{measure, reconstruct, singular_spectrum};
use crate::seeds;
use crate::signal::{generate_bandlimited_signal, BandlimitedSignal};
use crate::spectral::{
    estimate_lambda_k_with_probes, estimate_lambda_max, partial_eigendecomposition, EigenBasis,
    EigenOptions,
};

// stream labels
const SIGNAL: u64 = 1;
const SAMPLE: u64 = 2;
const NOISE: u64 = 3;
const CUTOFF: u64 = 4;
const DIAG: u64 = 5;
const APPROX: u64 = 6;

/// Everything a benchmark needs before trials start.
#[derive(Debug, Clone)]
pub struct BenchContext {
    pub graph: Graph,
    pub laplacian: Laplacian,
    pub basis: EigenBasis,
    pub lambda_max: f64,
    pub cutoff: f64,
    pub n_probes: usize,
    pub signals: Vec<BandlimitedSignal>,
}

impl BenchContext {
    pub fn prepare(cfg: &BenchConfig, exec: Execution) -> Result<Self> {
        let graph = cfg.graph.load()?;
        Self::from_graph(cfg, graph, exec)
    }

    pub fn from_graph(cfg: &BenchConfig, graph: Graph, exec: Execution) -> Result<Self> {
        let n = graph.n_nodes();
        cfg.validate(n)?;
        let laplacian = graph.laplacian();
        let k = cfg.k;
        let wide = partial_eigendecomposition(&laplacian, k + 1, &EigenOptions::default())?;
        let basis = wide.truncate(k);
        let lambda_max = estimate_lambda_max(&laplacian);
        let n_probes = cfg.n_probes.unwrap_or_else(|| default_probe_count(n));
        let cutoff = match cfg.cutoff {
            CutoffSource::Exact => 0.5 * (wide.values()[k - 1] + wide.values()[k]),
            CutoffSource::Estimated => {
                let probes = RandomProbeMatrix::gaussian_with(
                    n,
                    n_probes,
                    &mut seeds::stream(cfg.seed, &[CUTOFF]),
                    exec,
                );
                let est = estimate_lambda_k_with_probes(&laplacian, k, cfg.r, &probes, exec)?;
                if !est.bracketed {
                    log::warn!("cutoff estimate did not bracket; using {}", est.value);
                }
                est.value
            }
        };
        if !(cutoff > 0.0 && cutoff < lambda_max) {
            return Err(Error::InvalidConfig(format!(
                "filter cutoff {cutoff} outside (0, λ_max = {lambda_max}); the band may include the whole spectrum"
            )));
        }
        let signals = (0..cfg.n_signals)
            .map(|i| {
                generate_bandlimited_signal(
                    &basis,
                    &mut seeds::stream(cfg.seed, &[SIGNAL, i as u64]),
                )
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            graph,
            laplacian,
            basis,
            lambda_max,
            cutoff,
            n_probes,
            signals,
        })
    }
}

/// How each method produces its sample set for one `m`.
enum Plan {
    Uniform,
    Weighted(Arc<Vec<f64>>),
    Fixed(SampleSet),
}

struct Trial {
    error: f64,
    failed: bool,
    bound_violated: bool,
    millis: f64,
}

/// Per-method inputs shared across the `m` grid, computed on first use.
#[derive(Default)]
struct Prepared {
    diag_exact: Option<Arc<Vec<f64>>>,
    diag_est: Option<Arc<Vec<f64>>>,
    approx_probes: Option<RandomProbeMatrix>,
}

impl Prepared {
    fn plan(
        &mut self,
        ctx: &BenchContext,
        cfg: &BenchConfig,
        method: Method,
        m: usize,
        exec: Execution,
    ) -> Result<Plan> {
        let n = ctx.graph.n_nodes();
        Ok(match method {
            Method::UniformIid => Plan::Uniform,
            Method::DiagIidExact => Plan::Weighted(
                self.diag_exact
                    .get_or_insert_with(|| {
                        let u = ctx.basis.vectors();
                        Arc::new((0..n).map(|i| u.row(i).norm_squared()).collect())
                    })
                    .clone(),
            ),
            Method::DiagIidEstimated => {
                if self.diag_est.is_none() {
                    let filter = fit_ideal_lowpass(ctx.cutoff, ctx.lambda_max, cfg.r)?;
                    let probes = RandomProbeMatrix::gaussian_with(
                        n,
                        ctx.n_probes,
                        &mut seeds::stream(cfg.seed, &[DIAG]),
                        exec,
                    );
                    let mut p = estimate_diagonal_with(&filter, &ctx.laplacian, &probes, exec);
                    // an estimate is a sum of squares, but keep weights valid regardless
                    p.iter_mut().for_each(|v| *v = v.max(0.0));
                    self.diag_est = Some(Arc::new(p));
                }
                Plan::Weighted(self.diag_est.clone().expect("just set"))
            }
            Method::DppApprox => {
                let probes = self.approx_probes.get_or_insert_with(|| {
                    RandomProbeMatrix::gaussian_with(
                        n,
                        ctx.n_probes,
                        &mut seeds::stream(cfg.seed, &[APPROX]),
                        exec,
                    )
                });
                let acfg = ApproxConfig {
                    degree: cfg.r,
                    lambda_max: Some(ctx.lambda_max),
                    execution: exec,
                    ..Default::default()
                };
                let s = sample_approx_with_probes(&ctx.laplacian, ctx.cutoff, m, probes, &acfg)?;
                if !s.fallback_steps.is_empty() {
                    log::info!(
                        "dpp-approx m={m}: fallback normalization at steps {:?}",
                        s.fallback_steps
                    );
                }
                Plan::Fixed(s.samples)
            }
            Method::DppIdeal => {
                let kernel = kernel_from_basis(&ctx.basis)?;
                Plan::Fixed(sample_mdpp_greedy(&kernel, m)?)
            }
        })
    }
}

impl Plan {
    fn draw(&self, n: usize, m: usize, rng: &mut seeds::StreamRng) -> Result<SampleSet> {
        match self {
            Plan::Uniform => sample_uniform_iid(n, m, rng),
            Plan::Weighted(w) => sample_weighted_iid(w, m, rng),
            Plan::Fixed(s) => Ok(s.clone()),
        }
    }
}

pub fn run_benchmark(cfg: &BenchConfig) -> Result<BenchResult> {
    run_benchmark_with(cfg, Execution::default())
}

pub fn run_benchmark_with(cfg: &BenchConfig, exec: Execution) -> Result<BenchResult> {
    let ctx = BenchContext::prepare(cfg, exec)?;
    run_with_context(cfg, &ctx, exec)
}

impl BenchContext {
    /// One sample set of size `m` as the benchmark would draw it for signal 0.
    pub fn draw(
        &self,
        cfg: &BenchConfig,
        method: Method,
        m: usize,
        exec: Execution,
    ) -> Result<SampleSet> {
        let n = self.graph.n_nodes();
        if m == 0 || m > n {
            return Err(Error::InvalidArgument(format!(
                "m = {m} must lie in [1, {n}]"
            )));
        }
        let plan = Prepared::default().plan(self, cfg, method, m, exec)?;
        plan.draw(
            n,
            m,
            &mut seeds::stream(cfg.seed, &[SAMPLE, method.id(), m as u64, 0]),
        )
    }

    pub fn run(&self, cfg: &BenchConfig, exec: Execution) -> Result<BenchResult> {
        run_with_context(cfg, self, exec)
    }
}

fn run_with_context(cfg: &BenchConfig, ctx: &BenchContext, exec: Execution) -> Result<BenchResult> {
    let n = ctx.graph.n_nodes();
    let grid = cfg.effective_grid();
    let mut prep = Prepared::default();
    let mut plans = Vec::with_capacity(grid.len());
    let mut setup_ms = Vec::with_capacity(grid.len());
    for &(method, m) in &grid {
        let start = Instant::now();
        plans.push(prep.plan(ctx, cfg, method, m, exec)?);
        setup_ms.push(start.elapsed().as_secs_f64() * 1e3);
    }

    let n_signals = ctx.signals.len();
    let jobs = grid.len() * n_signals;
    let trials: Vec<Result<Trial>> = exec.map(jobs, |job| {
        let (g, i) = (job / n_signals, job % n_signals);
        let (method, m) = grid[g];
        let labels = [method.id(), m as u64, i as u64];
        let start = Instant::now();
        let samples = plans[g].draw(
            n,
            m,
            &mut seeds::stream(cfg.seed, &[SAMPLE, labels[0], labels[1], labels[2]]),
        )?;
        let x = &ctx.signals[i].values;
        let mut noise_rng = seeds::stream(cfg.seed, &[NOISE, labels[0], labels[1], labels[2]]);
        let meas = measure(x, &samples, cfg.noise_std, &mut noise_rng)?;
        let trial = match reconstruct(&meas, &ctx.basis) {
            Ok(rec) => {
                let error = rec
                    .iter()
                    .zip(x)
                    .map(|(a, b)| (a - b).powi(2))
                    .sum::<f64>()
                    .sqrt();
                let noise_norm = meas
                    .values
                    .iter()
                    .zip(samples.nodes())
                    .map(|(y, &s)| (y - x[s]).powi(2))
                    .sum::<f64>()
                    .sqrt();
                let sigma_1 = singular_spectrum(&ctx.basis, &samples)?[0];
                let bound = noise_norm / sigma_1;
                Trial {
                    error,
                    failed: false,
                    bound_violated: error > bound * (1.0 + 1e-8) + 1e-12,
                    millis: 0.0,
                }
            }
            Err(Error::RankDeficient { .. }) => Trial {
                error: f64::INFINITY,
                failed: true,
                bound_violated: false,
                millis: 0.0,
            },
            Err(e) => return Err(e),
        };
        Ok(Trial {
            millis: start.elapsed().as_secs_f64() * 1e3,
            ..trial
        })
    });

    let mut rows = Vec::with_capacity(grid.len());
    let mut iter = trials.into_iter();
    for (g, &(method, m)) in grid.iter().enumerate() {
        let chunk: Vec<Trial> = iter.by_ref().take(n_signals).collect::<Result<_>>()?;
        let mut errors: Vec<f64> = chunk.iter().map(|t| t.error).collect();
        errors.sort_by(f64::total_cmp);
        let wall = setup_ms[g] + chunk.iter().map(|t| t.millis).sum::<f64>();
        rows.push(BenchRow {
            method,
            m,
            n_signals,
            median_error: quantile(&errors, 0.5),
            q1_error: quantile(&errors, 0.25),
            q3_error: quantile(&errors, 0.75),
            failures: chunk.iter().filter(|t| t.failed).count(),
            bound_violations: chunk.iter().filter(|t| t.bound_violated).count(),
            sampling: if method.is_deterministic() {
                "fixed-set"
            } else {
                "fresh-per-signal"
            }
            .to_string(),
            wall_time_ms: cfg.record_timing.then_some(wall),
        });
    }
    Ok(BenchResult {
        seed: cfg.seed,
        n_nodes: n,
        k: cfg.k,
        noise_std: cfg.noise_std,
        cutoff: ctx.cutoff,
        cutoff_source: cfg.cutoff,
        lambda_max: ctx.lambda_max,
        rows,
    })
}

/// Linear-interpolated quantile of sorted data; infinite neighbours win.
pub(crate) fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let t = pos - lo as f64;
    if t == 0.0 || lo + 1 >= sorted.len() {
        return sorted[lo];
    }
    let (a, b) = (sorted[lo], sorted[lo + 1]);
    if b.is_infinite() {
        return b;
    }
    a + t * (b - a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::GraphSource;
    use crate::graph::SbmConfig;

    #[test]
    fn quantiles() {
        let v = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile(&v, 0.5), 2.5);
        assert_eq!(quantile(&v, 0.0), 1.0);
        let w = [1.0, 2.0, f64::INFINITY, f64::INFINITY];
        assert_eq!(quantile(&w, 0.5), f64::INFINITY);
        assert_eq!(quantile(&w, 0.25), 1.75);
    }

    fn small_cfg() -> BenchConfig {
        let mut cfg = BenchConfig::new(
            GraphSource::Sbm(SbmConfig::new(120, 4, 0.25, 3)),
            vec![4, 8],
        );
        cfg.k = 4;
        cfg.n_signals = 12;
        cfg.seed = 17;
        cfg
    }

    #[test]
    fn noiseless_ideal_is_exact() {
        let mut cfg = small_cfg();
        cfg.noise_std = 0.0;
        cfg.methods = vec![Method::DppIdeal];
        let res = run_benchmark(&cfg).unwrap();
        let row = res.row(Method::DppIdeal, 4).unwrap();
        assert_eq!(row.failures, 0);
        assert!(row.median_error <= 1e-8);
    }

    #[test]
    fn parallel_and_sequential_agree() {
        let cfg = small_cfg();
        let a = run_benchmark_with(&cfg, Execution::Sequential).unwrap();
        let b = run_benchmark_with(&cfg, Execution::Parallel).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.rows.len(), 4 * 2 + 1);
        assert!(a.rows.iter().all(|r| r.bound_violations == 0));
    }

    #[test]
    fn exact_cutoff_sits_in_gap() {
        let mut cfg = small_cfg();
        cfg.cutoff = CutoffSource::Exact;
        let ctx = BenchContext::prepare(&cfg, Execution::default()).unwrap();
        let wide = partial_eigendecomposition(&ctx.laplacian, 5, &EigenOptions::default()).unwrap();
        assert!(ctx.cutoff > wide.values()[3] && ctx.cutoff < wide.values()[4]);
    }
}
