//! Brute-force m-DPP law by dense subset enumeration, for small `N`.
//!
//! Determinants are taken on the dense `N × N` kernel, independently of the
//! samplers' update formulas.

use itertools::Itertools;

use super::ProjectionKernel;

/// `(subset, det(K_A))` for every sorted `m`-subset.
pub fn subset_determinants(kernel: &ProjectionKernel, m: usize) -> Vec<(Vec<usize>, f64)> {
    let dense = kernel.to_dense();
    (0..kernel.n())
        .combinations(m)
        .map(|a| {
            let sub = nalgebra::DMatrix::from_fn(m, m, |r, c| dense[(a[r], a[c])]);
            let det = if m == 0 { 1.0 } else { sub.determinant() };
            (a, det)
        })
        .collect()
}

/// Exact law `P(A) = det(K_A) / Σ_B det(K_B)` over sorted `m`-subsets.
pub fn exact_law(kernel: &ProjectionKernel, m: usize) -> Vec<(Vec<usize>, f64)> {
    let dets = subset_determinants(kernel, m);
    let total: f64 = dets.iter().map(|(_, d)| d.max(0.0)).sum();
    dets.into_iter()
        .map(|(a, d)| (a, d.max(0.0) / total))
        .collect()
}

/// Total-variation distance between empirical counts and a law.
pub fn total_variation(
    law: &[(Vec<usize>, f64)],
    counts: &std::collections::HashMap<Vec<usize>, usize>,
) -> f64 {
    let draws: usize = counts.values().sum();
    let mut tv = 0.0;
    let mut covered = 0usize;
    for (a, p) in law {
        let c = counts.get(a).copied().unwrap_or(0);
        covered += c;
        tv += (c as f64 / draws as f64 - p).abs();
    }
    // draws outside the law's support
    tv += (draws - covered) as f64 / draws as f64;
    0.5 * tv
}
