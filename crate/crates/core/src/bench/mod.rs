//! The five-method sampling comparison.
//!
//! For every method and sample size the harness samples nodes, measures
//! unit-norm bandlimited signals with Gaussian noise, reconstructs them
//! with the known `U_k`, and records the distribution of `‖x_rec − x‖₂`.
//! Rank-deficient draws count as failures with infinite error.

mod iid;
mod report;
mod runner;

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

pub use iid::{sample_uniform_iid, sample_weighted_iid};
pub use report::{emit_report, read_json_report, write_csv, write_json, ReportFormat, CSV_COLUMNS};
pub use runner::{run_benchmark, run_benchmark_with, BenchContext};

use crate::error::{Error, Result};
use crate::graph::{load_graph, Graph, GraphFormat, SbmConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    UniformIid,
    DiagIidExact,
    DiagIidEstimated,
    DppApprox,
    DppIdeal,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::UniformIid,
        Method::DiagIidExact,
        Method::DiagIidEstimated,
        Method::DppApprox,
        Method::DppIdeal,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::UniformIid => "uniform-iid",
            Method::DiagIidExact => "diag-iid-exact",
            Method::DiagIidEstimated => "diag-iid-estimated",
            Method::DppApprox => "dpp-approx",
            Method::DppIdeal => "dpp-ideal",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.name() == s)
    }

    /// Deterministic methods draw one sample set reused for every signal.
    pub fn is_deterministic(self) -> bool {
        matches!(self, Method::DppApprox | Method::DppIdeal)
    }

    fn id(self) -> u64 {
        self as u64
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphSource {
    Sbm(SbmConfig),
    EdgeList(PathBuf),
}

impl GraphSource {
    pub fn load(&self) -> Result<Graph> {
        match self {
            GraphSource::Sbm(cfg) => cfg.generate(),
            GraphSource::EdgeList(p) => load_graph(p, GraphFormat::EdgeList),
        }
    }
}

/// Where the filter cutoff of the approximate methods comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CutoffSource {
    /// Stochastic dichotomy, no eigendecomposition.
    #[default]
    Estimated,
    /// Midpoint of `λ_k` and `λ_{k+1}` from the partial eigendecomposition.
    Exact,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub graph: GraphSource,
    #[serde(default = "defaults::k")]
    pub k: usize,
    pub m_grid: Vec<usize>,
    #[serde(default = "defaults::n_signals")]
    pub n_signals: usize,
    #[serde(default = "defaults::noise_std")]
    pub noise_std: f64,
    #[serde(default = "defaults::methods")]
    pub methods: Vec<Method>,
    /// Chebyshev degree.
    #[serde(default = "defaults::r")]
    pub r: usize,
    /// Probe count for diagonal and cutoff estimation (`10 ⌈log₂ N⌉` if unset).
    #[serde(default)]
    pub n_probes: Option<usize>,
    #[serde(default)]
    pub cutoff: CutoffSource,
    #[serde(default)]
    pub seed: u64,
    /// Wall-time is left out by default so reports are byte-reproducible.
    #[serde(default)]
    pub record_timing: bool,
}

mod defaults {
    use super::Method;
    pub fn k() -> usize {
        10
    }
    pub fn n_signals() -> usize {
        100
    }
    pub fn noise_std() -> f64 {
        1e-3
    }
    pub fn methods() -> Vec<Method> {
        Method::ALL.to_vec()
    }
    pub fn r() -> usize {
        50
    }
}

impl BenchConfig {
    pub fn new(graph: GraphSource, m_grid: Vec<usize>) -> Self {
        Self {
            graph,
            k: defaults::k(),
            m_grid,
            n_signals: defaults::n_signals(),
            noise_std: defaults::noise_std(),
            methods: defaults::methods(),
            r: defaults::r(),
            n_probes: None,
            cutoff: CutoffSource::default(),
            seed: 0,
            record_timing: false,
        }
    }

    pub fn validate(&self, n_nodes: usize) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.k == 0 || self.k >= n_nodes {
            return bad(format!("k = {} must lie in [1, {})", self.k, n_nodes));
        }
        if self.n_signals == 0 {
            return bad("n_signals must be >= 1".into());
        }
        if !(self.noise_std >= 0.0) || !self.noise_std.is_finite() {
            return bad(format!(
                "noise std {} must be finite and >= 0",
                self.noise_std
            ));
        }
        if self.methods.is_empty() {
            return bad("no methods selected".into());
        }
        if self.r < 10 {
            return bad(format!("Chebyshev degree {} < 10", self.r));
        }
        if self.n_probes == Some(0) {
            return bad("n_probes must be >= 1".into());
        }
        if let Some(&m) = self.m_grid.iter().find(|&&m| m == 0 || m > n_nodes) {
            return bad(format!("grid size m = {m} outside [1, {n_nodes}]"));
        }
        Ok(())
    }

    /// `(method, m)` pairs evaluated, in report order. `dpp-ideal` only
    /// runs at `m = k`.
    pub fn effective_grid(&self) -> Vec<(Method, usize)> {
        let mut methods = self.methods.clone();
        methods.sort();
        methods.dedup();
        let mut grid = self.m_grid.clone();
        grid.sort_unstable();
        grid.dedup();
        let mut out = Vec::new();
        for method in methods {
            if method == Method::DppIdeal {
                out.push((method, self.k));
            } else {
                out.extend(grid.iter().map(|&m| (method, m)));
            }
        }
        out
    }
}

/// Aggregate over all signals for one `(method, m)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub method: Method,
    pub m: usize,
    pub n_signals: usize,
    #[serde(with = "report::float_or_inf")]
    pub median_error: f64,
    #[serde(with = "report::float_or_inf")]
    pub q1_error: f64,
    #[serde(with = "report::float_or_inf")]
    pub q3_error: f64,
    /// Rank-deficient draws.
    pub failures: usize,
    /// Trials whose error exceeded `‖n‖ / σ_1`; always 0 for a correct solver.
    pub bound_violations: usize,
    /// `fixed-set` for deterministic methods, `fresh-per-signal` otherwise.
    pub sampling: String,
    pub wall_time_ms: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchResult {
    pub seed: u64,
    pub n_nodes: usize,
    pub k: usize,
    pub noise_std: f64,
    pub cutoff: f64,
    pub cutoff_source: CutoffSource,
    pub lambda_max: f64,
    pub rows: Vec<BenchRow>,
}

impl BenchResult {
    pub fn row(&self, method: Method, m: usize) -> Option<&BenchRow> {
        self.rows.iter().find(|r| r.method == method && r.m == m)
    }
}
