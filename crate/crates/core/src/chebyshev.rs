//! Chebyshev polynomial approximations of the ideal low-pass graph filter.
//!
//! A filter lives on `[0, λ_max]`, mapped to `[-1, 1]` by
//! `x = 2λ/λ_max − 1`. Applying it to a signal uses the three-term
//! recurrence `T_{j+1}(x) = 2x T_j(x) − T_{j−1}(x)` with one sparse
//! matrix-vector product per degree, so `h̃(L)` is never formed.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::graph::SymmetricOperator;

/// Serializable description of a low-pass filter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FilterSpec {
    pub cutoff: f64,
    pub lambda_max: f64,
    pub degree: usize,
    #[serde(default = "default_jackson")]
    pub jackson: bool,
}

fn default_jackson() -> bool {
    true
}

impl FilterSpec {
    pub fn build(&self) -> Result<ChebyshevFilter> {
        fit_ideal_lowpass_with(self.cutoff, self.lambda_max, self.degree, self.jackson)
    }
}

/// Degree-`r` Chebyshev expansion `Σ_j c_j T_j(2λ/λ_max − 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebyshevFilter {
    coefficients: Vec<f64>,
    lambda_max: f64,
    cutoff: f64,
    jackson: bool,
}

/// Jackson damping factors `g_0..g_r`.
pub fn jackson_damping(r: usize) -> Vec<f64> {
    let a = PI / (r as f64 + 2.0);
    (0..=r)
        .map(|j| {
            let j = j as f64;
            ((r as f64 + 2.0 - j) * (j * a).cos() + (j * a).sin() / a.tan()) / (r as f64 + 2.0)
        })
        .collect()
}

/// Chebyshev coefficients of the indicator of `λ <= cutoff` on `[0, λ_max]`.
///
/// Cutoffs outside the interval are clamped, giving the zero filter below 0
/// and the identity above `λ_max`.
fn step_coefficients(cutoff: f64, lambda_max: f64, r: usize) -> Vec<f64> {
    let xc = (2.0 * cutoff / lambda_max - 1.0).clamp(-1.0, 1.0);
    let theta = xc.acos();
    let mut c = Vec::with_capacity(r + 1);
    c.push((PI - theta) / PI);
    for j in 1..=r {
        let j = j as f64;
        c.push(-2.0 * (j * theta).sin() / (j * PI));
    }
    c
}

/// Truncated Chebyshev expansion of the ideal low-pass `h(λ) = 1 iff λ <= λ_k`
/// with Jackson damping.
pub fn fit_ideal_lowpass(cutoff: f64, lambda_max: f64, r: usize) -> Result<ChebyshevFilter> {
    fit_ideal_lowpass_with(cutoff, lambda_max, r, true)
}

pub fn fit_ideal_lowpass_with(
    cutoff: f64,
    lambda_max: f64,
    r: usize,
    jackson: bool,
) -> Result<ChebyshevFilter> {
    if !(lambda_max > 0.0 && lambda_max.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "λ_max = {lambda_max} must be positive"
        )));
    }
    if !(cutoff > 0.0 && cutoff < lambda_max) {
        return Err(Error::InvalidArgument(format!(
            "cutoff {cutoff} must lie strictly inside (0, {lambda_max})"
        )));
    }
    if r == 0 {
        return Err(Error::InvalidArgument("filter degree must be >= 1".into()));
    }
    Ok(ChebyshevFilter::lowpass_clamped(
        cutoff, lambda_max, r, jackson,
    ))
}

impl ChebyshevFilter {
    /// Low-pass with any cutoff; see [`step_coefficients`] for clamping.
    pub(crate) fn lowpass_clamped(cutoff: f64, lambda_max: f64, r: usize, jackson: bool) -> Self {
        let mut coefficients = step_coefficients(cutoff, lambda_max, r);
        if jackson {
            for (c, g) in coefficients.iter_mut().zip(jackson_damping(r)) {
                *c *= g;
            }
        }
        Self {
            coefficients,
            lambda_max,
            cutoff,
            jackson,
        }
    }

    /// Filter from explicit coefficients on `[0, λ_max]`.
    pub fn from_coefficients(coefficients: Vec<f64>, lambda_max: f64) -> Result<Self> {
        if coefficients.is_empty() || !(lambda_max > 0.0) {
            return Err(Error::InvalidArgument(
                "empty filter or non-positive λ_max".into(),
            ));
        }
        Ok(Self {
            coefficients,
            lambda_max,
            cutoff: f64::NAN,
            jackson: false,
        })
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn lambda_max(&self) -> f64 {
        self.lambda_max
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    pub fn jackson(&self) -> bool {
        self.jackson
    }

    pub fn spec(&self) -> FilterSpec {
        FilterSpec {
            cutoff: self.cutoff,
            lambda_max: self.lambda_max,
            degree: self.degree(),
            jackson: self.jackson,
        }
    }

    /// Scalar response `h̃(λ)` by Clenshaw summation.
    pub fn evaluate(&self, lambda: f64) -> f64 {
        let x = 2.0 * lambda / self.lambda_max - 1.0;
        let (mut b1, mut b2) = (0.0, 0.0);
        for &c in self.coefficients[1..].iter().rev() {
            let b0 = c + 2.0 * x * b1 - b2;
            b2 = b1;
            b1 = b0;
        }
        self.coefficients[0] + x * b1 - b2
    }

    /// `h̃(L) x` with exactly `degree()` products by `L`.
    pub fn apply<A: SymmetricOperator + ?Sized>(&self, op: &A, x: &[f64]) -> Vec<f64> {
        let n = x.len();
        let scale = 2.0 / self.lambda_max;
        let c = &self.coefficients;
        let mut y: Vec<f64> = x.iter().map(|v| c[0] * v).collect();
        if c.len() == 1 {
            return y;
        }
        let mut prev = x.to_vec();
        let mut cur = vec![0.0; n];
        op.apply(x, &mut cur);
        for (ci, xi) in cur.iter_mut().zip(x) {
            *ci = scale * *ci - xi;
        }
        for (yi, ti) in y.iter_mut().zip(&cur) {
            *yi += c[1] * ti;
        }
        let mut lx = vec![0.0; n];
        for &cj in &c[2..] {
            op.apply(&cur, &mut lx);
            // next = 2 (scale L − I) cur − prev, written into prev
            for i in 0..n {
                prev[i] = 2.0 * (scale * lx[i] - cur[i]) - prev[i];
            }
            std::mem::swap(&mut prev, &mut cur);
            for (yi, ti) in y.iter_mut().zip(&cur) {
                *yi += cj * ti;
            }
        }
        y
    }

    /// Filters every column; results keep input order.
    pub fn apply_many<A: SymmetricOperator + ?Sized>(
        &self,
        op: &A,
        columns: &[Vec<f64>],
        exec: Execution,
    ) -> Vec<Vec<f64>> {
        exec.map(columns.len(), |j| self.apply(op, &columns[j]))
    }
}

/// `h̃(L) x`.
pub fn apply_filter<A: SymmetricOperator + ?Sized>(
    f: &ChebyshevFilter,
    op: &A,
    x: &[f64],
) -> Vec<f64> {
    f.apply(op, x)
}

/// Chebyshev moments `μ_j = Σ_c ⟨r_c, T_j(L̃) r_c⟩`, `j = 0..=2r`, of a
/// probe block.
///
/// With them, `‖p(L) R‖_F²` for any degree-`r` polynomial `p` costs
/// `O(r²)` instead of `r` products per probe, since
/// `⟨T_i R, T_j R⟩ = (μ_{i+j} + μ_{|i−j|}) / 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebyshevMoments {
    moments: Vec<f64>,
    lambda_max: f64,
}

impl ChebyshevMoments {
    pub fn compute<A: SymmetricOperator + ?Sized>(
        op: &A,
        lambda_max: f64,
        r: usize,
        probes: &[Vec<f64>],
        exec: Execution,
    ) -> Self {
        let scale = 2.0 / lambda_max;
        let per_probe = exec.map(probes.len(), |p| {
            let x = &probes[p];
            let n = x.len();
            let mut mu = vec![0.0; 2 * r + 1];
            let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(u, v)| u * v).sum::<f64>();
            let mut t_prev = x.clone();
            let mut t_cur = vec![0.0; n];
            let mut lx = vec![0.0; n];
            // ⟨T_j, T_j⟩ and ⟨T_{j+1}, T_j⟩ for j = 0..r
            let mut sq = vec![0.0; r + 1];
            let mut cross = vec![0.0; r + 1];
            sq[0] = dot(&t_prev, &t_prev);
            if r >= 1 {
                op.apply(x, &mut t_cur);
                for (c, xi) in t_cur.iter_mut().zip(x) {
                    *c = scale * *c - xi;
                }
                cross[0] = dot(&t_cur, &t_prev);
                sq[1] = dot(&t_cur, &t_cur);
                for j in 1..r {
                    op.apply(&t_cur, &mut lx);
                    for i in 0..n {
                        t_prev[i] = 2.0 * (scale * lx[i] - t_cur[i]) - t_prev[i];
                    }
                    std::mem::swap(&mut t_prev, &mut t_cur);
                    cross[j] = dot(&t_cur, &t_prev);
                    sq[j + 1] = dot(&t_cur, &t_cur);
                }
            }
            mu[0] = sq[0];
            if r >= 1 {
                mu[1] = cross[0];
            }
            for j in 1..=r {
                mu[2 * j] = 2.0 * sq[j] - mu[0];
            }
            for j in 1..r {
                mu[2 * j + 1] = 2.0 * cross[j] - mu[1];
            }
            mu
        });
        let mut moments = vec![0.0; 2 * r + 1];
        for mu in &per_probe {
            for (m, v) in moments.iter_mut().zip(mu) {
                *m += v;
            }
        }
        Self {
            moments,
            lambda_max,
        }
    }

    pub fn degree(&self) -> usize {
        (self.moments.len() - 1) / 2
    }

    pub fn lambda_max(&self) -> f64 {
        self.lambda_max
    }

    /// `‖p(L) R‖_F²` for the polynomial with the given Chebyshev coefficients.
    pub fn squared_norm(&self, coefficients: &[f64]) -> f64 {
        assert!(coefficients.len() <= self.degree() + 1);
        let mut total = 0.0;
        for (i, ci) in coefficients.iter().enumerate() {
            for (j, cj) in coefficients.iter().enumerate() {
                total += ci * cj * 0.5 * (self.moments[i + j] + self.moments[i.abs_diff(j)]);
            }
        }
        total
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use crate::spectral::dense_smallest;
    use nalgebra::{DMatrix, DVector};

    fn grid(lmax: f64) -> Vec<f64> {
        (0..1000).map(|i| lmax * i as f64 / 999.0).collect()
    }

    /// Far-from-cutoff sup error against the ideal step.
    fn far_error(f: &ChebyshevFilter, margin: f64) -> f64 {
        grid(f.lambda_max())
            .into_iter()
            .filter(|l| (l - f.cutoff()).abs() > margin)
            .map(|l| {
                let ideal = if l <= f.cutoff() { 1.0 } else { 0.0 };
                (f.evaluate(l) - ideal).abs()
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn endpoint_values_and_bounded() {
        for r in [10, 25, 50, 100] {
            let lmax = 7.0;
            let margin = 5.0 * lmax / r as f64;
            for &cut in &[margin, lmax / 3.0, lmax / 2.0, lmax - margin] {
                let f = fit_ideal_lowpass(cut, lmax, r).unwrap();
                let h0 = f.evaluate(0.0);
                let h1 = f.evaluate(lmax);
                assert!((0.8..=1.2).contains(&h0), "r={r} cut={cut} h(0)={h0}");
                assert!((-0.2..=0.2).contains(&h1), "r={r} cut={cut} h(max)={h1}");
                for l in grid(lmax) {
                    let v = f.evaluate(l);
                    assert!(v.is_finite() && v.abs() <= 2.0);
                }
            }
        }
    }

    #[test]
    fn half_cutoff_far_error_below_five_percent() {
        let f = fit_ideal_lowpass(0.5, 1.0, 50).unwrap();
        assert!(far_error(&f, 0.1) < 0.05);
    }

    #[test]
    fn far_error_does_not_grow_with_degree() {
        let mut prev = f64::INFINITY;
        for r in [10, 25, 50, 100] {
            let e = far_error(&fit_ideal_lowpass(0.5, 1.0, r).unwrap(), 0.1);
            assert!(e <= prev + 1e-15, "r={r}: {e} > {prev}");
            prev = e;
        }
    }

    #[test]
    fn degree_one_is_decreasing() {
        for jackson in [true, false] {
            let f = fit_ideal_lowpass_with(0.4, 1.0, 1, jackson).unwrap();
            assert!(f.evaluate(0.0) > f.evaluate(1.0));
        }
    }

    #[test]
    fn clamped_extremes() {
        let zero = ChebyshevFilter::lowpass_clamped(-1e-9, 3.0, 20, true);
        assert!(zero.coefficients().iter().all(|c| c.abs() < 1e-15));
        let one = ChebyshevFilter::lowpass_clamped(3.0, 3.0, 20, true);
        assert!((one.evaluate(1.7) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_out_of_range_cutoff() {
        assert!(fit_ideal_lowpass(0.0, 1.0, 10).is_err());
        assert!(fit_ideal_lowpass(1.0, 1.0, 10).is_err());
        assert!(fit_ideal_lowpass(0.5, 1.0, 0).is_err());
    }

    #[test]
    fn apply_matches_dense_spectral_oracle() {
        let g = Graph::cycle(10).unwrap();
        let l = g.laplacian();
        let (u, lam) = dense_smallest(&l.to_dense(), 10);
        let f = fit_ideal_lowpass(1.5, 4.1, 30).unwrap();
        let x: Vec<f64> = (0..10).map(|i| ((i * 7 % 5) as f64) - 1.3).collect();
        let h = DMatrix::from_diagonal(&DVector::from_iterator(
            10,
            lam.iter().map(|&v| f.evaluate(v)),
        ));
        let expected = &u * h * u.transpose() * DVector::from_column_slice(&x);
        let got = f.apply(&l, &x);
        for (a, b) in got.iter().zip(expected.iter()) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn moments_reproduce_filtered_norm() {
        let l = Graph::cliques(&[4, 6, 5]).unwrap().laplacian();
        let probes: Vec<Vec<f64>> = (0..3)
            .map(|p| {
                (0..15)
                    .map(|i| ((i * 31 + p * 17) % 11) as f64 - 5.0)
                    .collect()
            })
            .collect();
        let f = fit_ideal_lowpass(2.0, 6.5, 25).unwrap();
        let direct: f64 = probes
            .iter()
            .map(|x| f.apply(&l, x).iter().map(|v| v * v).sum::<f64>())
            .sum();
        let mom = ChebyshevMoments::compute(&l, 6.5, 25, &probes, Execution::Sequential);
        let via = mom.squared_norm(f.coefficients());
        assert!(
            (direct - via).abs() <= 1e-9 * direct.abs(),
            "{direct} vs {via}"
        );
    }

    #[test]
    fn spec_round_trip() {
        let f = fit_ideal_lowpass(0.3, 2.0, 12).unwrap();
        let json = serde_json::to_string(&f.spec()).unwrap();
        let back: FilterSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back.build().unwrap(), f);
    }
}
