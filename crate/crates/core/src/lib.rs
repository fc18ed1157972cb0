//! Node sampling on graphs with determinantal point processes.
//!
//! The crate covers the full pipeline used to sample and recover
//! k-bandlimited graph signals:
//!
//! * [`graph`]: weighted undirected graphs, the combinatorial Laplacian,
//!   stochastic block model generation and edge-list I/O.
//! * [`spectral`]: partial eigendecomposition of the Laplacian and
//!   diagonalization-free spectral estimates (largest eigenvalue,
//!   eigenvalue counts, the band cutoff `λ_k`).
//! * [`dpp`]: exact m-DPP sampling with projection kernels, both the
//!   Schur-complement sampler and its `O(N m²)` rewrite, plus greedy mode.
//! * [`chebyshev`], [`probes`] and [`approx`]: polynomial graph filters,
//!   stochastic diagonal estimation and the eigendecomposition-free
//!   approximate sampler built on them.
//! * [`reconstruction`]: noisy measurement, least-squares recovery and the
//!   max-volume objective.
//! * [`bench`]: the five-method comparison harness and its reports.
//!
//! Data-parallel loops (probe filtering, Monte-Carlo trials) run on rayon
//! when the `parallel` feature is enabled; see [`exec::Execution`].

// NaN must fail validation, so `!(x > 0.0)` is used on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod approx;
pub mod bench;
pub mod chebyshev;
pub mod dpp;
pub mod error;
pub mod exec;
pub mod graph;
pub mod probes;
pub mod reconstruction;
pub mod seeds;
pub mod signal;
pub mod spectral;

pub use error::{Error, Result};
pub use exec::Execution;
pub use graph::{Graph, Laplacian};
pub use spectral::EigenBasis;
