//! Gaussian probe signals and stochastic estimation of `diag(h̃(L)²)`.

use rand::{Rng, RngCore};
use rand_distr::{Distribution, Normal};

use crate::chebyshev::ChebyshevFilter;
use crate::exec::Execution;
use crate::graph::SymmetricOperator;
use crate::seeds::StreamRng;

/// `N × n` matrix with i.i.d. `N(0, 1/n)` entries, stored by column.
///
/// Each column comes from its own stream seeded from the caller's RNG, so
/// the matrix is the same whether columns are drawn in parallel or not.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomProbeMatrix {
    n_rows: usize,
    columns: Vec<Vec<f64>>,
}

impl RandomProbeMatrix {
    pub fn gaussian<R: Rng + ?Sized>(n_rows: usize, n_probes: usize, rng: &mut R) -> Self {
        Self::gaussian_with(n_rows, n_probes, rng, Execution::default())
    }

    pub fn gaussian_with<R: Rng + ?Sized>(
        n_rows: usize,
        n_probes: usize,
        rng: &mut R,
        exec: Execution,
    ) -> Self {
        assert!(n_probes >= 1, "need at least one probe");
        let seeds: Vec<u64> = (0..n_probes).map(|_| rng.next_u64()).collect();
        let normal = Normal::new(0.0, (1.0 / n_probes as f64).sqrt()).expect("valid std");
        let columns = exec.map(n_probes, |j| {
            let mut r = <StreamRng as rand::SeedableRng>::seed_from_u64(seeds[j]);
            (0..n_rows).map(|_| normal.sample(&mut r)).collect()
        });
        Self { n_rows, columns }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_probes(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[Vec<f64>] {
        &self.columns
    }

    /// `‖row_i‖²` for every row; each has mean 1.
    pub fn row_energies(&self) -> Vec<f64> {
        row_energies(&self.columns, self.n_rows)
    }
}

/// `Σ_j cols[j][i]²`, summed in column order.
fn row_energies(cols: &[Vec<f64>], n_rows: usize) -> Vec<f64> {
    let mut out = vec![0.0; n_rows];
    for c in cols {
        for (o, v) in out.iter_mut().zip(c) {
            *o += v * v;
        }
    }
    out
}

/// Default probe count `10 ⌈log₂ N⌉`.
pub fn default_probe_count(n: usize) -> usize {
    let bits = (n.max(2) as f64).log2().ceil() as usize;
    10 * bits
}

/// `p_0(i) = ‖δ_i^T h̃(L) R‖²` with fresh probes.
pub fn estimate_diagonal<A, R>(
    f: &ChebyshevFilter,
    op: &A,
    n_probes: usize,
    rng: &mut R,
) -> Vec<f64>
where
    A: SymmetricOperator + ?Sized,
    R: RngCore + ?Sized,
{
    let probes = RandomProbeMatrix::gaussian(op.dim(), n_probes, rng);
    estimate_diagonal_with(f, op, &probes, Execution::default())
}

/// Unbiased estimate of `diag(h̃(L)²)` from a fixed probe matrix.
pub fn estimate_diagonal_with<A: SymmetricOperator + ?Sized>(
    f: &ChebyshevFilter,
    op: &A,
    probes: &RandomProbeMatrix,
    exec: Execution,
) -> Vec<f64> {
    let filtered = f.apply_many(op, probes.columns(), exec);
    row_energies(&filtered, op.dim())
}
