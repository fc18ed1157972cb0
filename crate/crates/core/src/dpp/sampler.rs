use nalgebra::{DMatrix, DVector};
use rand::Rng;

use super::{ProjectionKernel, SampleSet};
use crate::error::{Error, Result};

/// Scores in `[-NEGATIVE_FLOOR, 0)` are roundoff and clamp to zero; anything
/// more negative means the kernel is not a projector.
pub const NEGATIVE_FLOOR: f64 = 1e-10;

/// Chooses the next node from the current scores.
pub trait Selector {
    fn select(&mut self, step: usize, p: &[f64], total: f64) -> Result<usize>;
}

/// Draws `s` with probability `p(s) / Σ p` by inverse CDF on the running sum.
pub struct RandomSelector<'a, R: ?Sized>(pub &'a mut R);

impl<R: Rng + ?Sized> Selector for RandomSelector<'_, R> {
    fn select(&mut self, step: usize, p: &[f64], total: f64) -> Result<usize> {
        if !(total > 0.0) {
            return Err(Error::NumericalBreakdown {
                step,
                message: format!("scores sum to {total}"),
            });
        }
        let u = self.0.random::<f64>() * total;
        let mut acc = 0.0;
        let mut last_positive = None;
        for (i, &v) in p.iter().enumerate() {
            if v > 0.0 {
                acc += v;
                last_positive = Some(i);
                if u < acc {
                    return Ok(i);
                }
            }
        }
        last_positive.ok_or(Error::NumericalBreakdown {
            step,
            message: "no positive score".into(),
        })
    }
}

/// Deterministic argmax, ties to the lowest index.
pub struct GreedySelector;

impl Selector for GreedySelector {
    fn select(&mut self, _step: usize, p: &[f64], _total: f64) -> Result<usize> {
        Ok(argmax(p, |_| true))
    }
}

pub(crate) fn argmax(p: &[f64], allowed: impl Fn(usize) -> bool) -> usize {
    let mut best = usize::MAX;
    let mut best_v = f64::NEG_INFINITY;
    for (i, &v) in p.iter().enumerate() {
        if allowed(i) && (best == usize::MAX || v > best_v) {
            best = i;
            best_v = v;
        }
    }
    best
}

/// Replays a fixed selection sequence.
pub struct ForcedSelector<'a>(pub &'a [usize]);

impl Selector for ForcedSelector<'_> {
    fn select(&mut self, step: usize, _p: &[f64], _total: f64) -> Result<usize> {
        self.0.get(step).copied().ok_or_else(|| {
            Error::InvalidArgument(format!("forced sequence too short for step {step}"))
        })
    }
}

/// Operation counts of one sampler run.
///
/// `kernel` counts multiply-adds spent reading the implicit kernel
/// (`K_ij = ⟨x_i, x_j⟩`), which both samplers pay identically per column;
/// `arithmetic` counts the sampler's own update work.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OpCounter {
    pub kernel: u64,
    pub arithmetic: u64,
}

impl OpCounter {
    pub fn total(&self) -> u64 {
        self.kernel + self.arithmetic
    }
}

/// Per-step scores `p_0..p_m` and, for the fast sampler, the normalized
/// columns `f_1..f_m`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SamplerTrace {
    pub p: Vec<Vec<f64>>,
    pub f: Vec<Vec<f64>>,
}

fn floor_scores(p: &mut [f64], step: usize) -> Result<()> {
    for (i, v) in p.iter_mut().enumerate() {
        if *v < 0.0 {
            if *v < -NEGATIVE_FLOOR {
                return Err(Error::NumericalBreakdown {
                    step,
                    message: format!("score p({i}) = {v:e} below floor"),
                });
            }
            *v = 0.0;
        }
    }
    Ok(())
}

fn check_size(kernel: &ProjectionKernel, m: usize) -> Result<()> {
    if m > kernel.rank() {
        return Err(Error::SampleSizeExceedsRank {
            m,
            rank: kernel.rank(),
        });
    }
    Ok(())
}

/// Schur-complement sampler with `K_S^{-1}` maintained by bordered
/// (rank-one) inverse updates.
pub fn run_reference<S: Selector + ?Sized>(
    kernel: &ProjectionKernel,
    m: usize,
    selector: &mut S,
    record: bool,
    ops: &mut OpCounter,
) -> Result<(SampleSet, Option<SamplerTrace>)> {
    check_size(kernel, m)?;
    let n = kernel.n();
    let d = kernel.rank() as u64;
    let p0 = kernel.diagonal();
    ops.kernel += n as u64 * d;
    let mut p = p0.clone();
    let mut trace = record.then(|| SamplerTrace {
        p: vec![p.clone()],
        f: Vec::new(),
    });
    let mut selected: Vec<usize> = Vec::with_capacity(m);
    // K_{s_l, :} for every selected s_l
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(m);
    let mut inv = DMatrix::<f64>::zeros(0, 0);
    for step in 0..m {
        let total: f64 = p.iter().sum();
        let s = selector.select(step, &p, total)?;
        if selected.contains(&s) {
            return Err(Error::DuplicateSample(s));
        }
        let row = kernel.column(s);
        ops.kernel += n as u64 * d;
        let nb = selected.len();
        // Bordered inverse: [[A, b], [b^T, c]]^{-1}
        let b = DVector::from_iterator(nb, rows.iter().map(|r| r[s]));
        let u = &inv * &b;
        let schur = row[s] - b.dot(&u);
        ops.arithmetic += (nb * nb + nb) as u64;
        if !(schur > NEGATIVE_FLOOR) {
            return Err(Error::NumericalBreakdown {
                step,
                message: format!("K_S is numerically singular (Schur complement {schur:e})"),
            });
        }
        let mut next = DMatrix::<f64>::zeros(nb + 1, nb + 1);
        for i in 0..nb {
            for j in 0..nb {
                next[(i, j)] = inv[(i, j)] + u[i] * u[j] / schur;
            }
            next[(i, nb)] = -u[i] / schur;
            next[(nb, i)] = -u[i] / schur;
        }
        next[(nb, nb)] = 1.0 / schur;
        ops.arithmetic += (nb * nb) as u64;
        inv = next;
        rows.push(row);
        selected.push(s);

        let size = selected.len();
        let mut v = DVector::<f64>::zeros(size);
        for i in 0..n {
            for (l, r) in rows.iter().enumerate() {
                v[l] = r[i];
            }
            let w = &inv * &v;
            p[i] = p0[i] - v.dot(&w);
        }
        ops.arithmetic += (n * (size * size + size + 1)) as u64;
        for &t in &selected {
            p[t] = 0.0;
        }
        floor_scores(&mut p, step)?;
        if let Some(tr) = trace.as_mut() {
            tr.p.push(p.clone());
        }
    }
    Ok((SampleSet::from_distinct(selected), trace))
}

/// Orthogonalized-column sampler: `f_n = k_{s_n} − Σ_l f_l f_l(s_n)`,
/// normalized by `√f_n(s_n)`, then `p(i) -= f_n(i)²`.
pub fn run_fast<S: Selector + ?Sized>(
    kernel: &ProjectionKernel,
    m: usize,
    selector: &mut S,
    record: bool,
    ops: &mut OpCounter,
) -> Result<(SampleSet, Option<SamplerTrace>)> {
    check_size(kernel, m)?;
    let n = kernel.n();
    let d = kernel.rank() as u64;
    let mut p = kernel.diagonal();
    ops.kernel += n as u64 * d;
    let mut trace = record.then(|| SamplerTrace {
        p: vec![p.clone()],
        f: Vec::new(),
    });
    let mut selected: Vec<usize> = Vec::with_capacity(m);
    let mut fs: Vec<Vec<f64>> = Vec::with_capacity(m);
    for step in 0..m {
        let total: f64 = p.iter().sum();
        let s = selector.select(step, &p, total)?;
        if selected.contains(&s) {
            return Err(Error::DuplicateSample(s));
        }
        let mut f = kernel.column(s);
        ops.kernel += n as u64 * d;
        for fl in &fs {
            let c = fl[s];
            for (a, b) in f.iter_mut().zip(fl) {
                *a -= c * b;
            }
        }
        ops.arithmetic += (n * fs.len()) as u64;
        let pivot = f[s];
        if !(pivot > 0.0) {
            return Err(Error::NumericalBreakdown {
                step,
                message: format!("f_n(s_n) = {pivot:e} <= 0"),
            });
        }
        let scale = pivot.sqrt().recip();
        for (pi, fi) in p.iter_mut().zip(f.iter_mut()) {
            *fi *= scale;
            *pi -= *fi * *fi;
        }
        ops.arithmetic += 3 * n as u64;
        selected.push(s);
        for &t in &selected {
            p[t] = 0.0;
        }
        floor_scores(&mut p, step)?;
        if let Some(tr) = trace.as_mut() {
            tr.p.push(p.clone());
            tr.f.push(f.clone());
        }
        fs.push(f);
    }
    Ok((SampleSet::from_distinct(selected), trace))
}

/// m-DPP draw with the Schur-complement sampler, `O(N m³)`.
pub fn sample_mdpp_reference<R: Rng + ?Sized>(
    kernel: &ProjectionKernel,
    m: usize,
    rng: &mut R,
) -> Result<(SampleSet, SamplerTrace)> {
    let (a, t) = run_reference(
        kernel,
        m,
        &mut RandomSelector(rng),
        true,
        &mut OpCounter::default(),
    )?;
    Ok((a, t.unwrap_or_default()))
}

/// m-DPP draw with the orthogonalized-column sampler, `O(N m²)`.
pub fn sample_mdpp_fast<R: Rng + ?Sized>(
    kernel: &ProjectionKernel,
    m: usize,
    rng: &mut R,
) -> Result<(SampleSet, SamplerTrace)> {
    let (a, t) = run_fast(
        kernel,
        m,
        &mut RandomSelector(rng),
        true,
        &mut OpCounter::default(),
    )?;
    Ok((a, t.unwrap_or_default()))
}

/// Greedy mode: each step takes the node of highest conditional score.
pub fn sample_mdpp_greedy(kernel: &ProjectionKernel, m: usize) -> Result<SampleSet> {
    run_fast(
        kernel,
        m,
        &mut GreedySelector,
        false,
        &mut OpCounter::default(),
    )
    .map(|(a, _)| a)
}
