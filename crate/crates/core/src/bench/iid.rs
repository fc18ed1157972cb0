use rand::seq::index;
use rand::Rng;

use crate::dpp::SampleSet;
use crate::error::{Error, Result};

/// Uniform random `m`-subset of `0..n`, without replacement.
pub fn sample_uniform_iid<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> Result<SampleSet> {
    if m > n {
        return Err(Error::InvalidArgument(format!(
            "cannot draw {m} of {n} nodes"
        )));
    }
    Ok(SampleSet::from_distinct(
        index::sample(rng, n, m).into_vec(),
    ))
}

/// Sequential weighted draws without replacement, renormalizing after each.
pub fn sample_weighted_iid<R: Rng + ?Sized>(
    weights: &[f64],
    m: usize,
    rng: &mut R,
) -> Result<SampleSet> {
    if weights.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
        return Err(Error::InvalidArgument(
            "weights must be finite and >= 0".into(),
        ));
    }
    let positive = weights.iter().filter(|&&w| w > 0.0).count();
    if positive < m {
        return Err(Error::InvalidArgument(format!(
            "only {positive} positive weights for {m} draws"
        )));
    }
    let mut w = weights.to_vec();
    let mut out = Vec::with_capacity(m);
    for _ in 0..m {
        let total: f64 = w.iter().sum();
        let u = rng.random::<f64>() * total;
        let mut acc = 0.0;
        let mut pick = None;
        for (i, &v) in w.iter().enumerate() {
            if v > 0.0 {
                acc += v;
                pick = Some(i);
                if u < acc {
                    break;
                }
            }
        }
        let s = pick.expect("a positive weight remains");
        w[s] = 0.0;
        out.push(s);
    }
    Ok(SampleSet::from_distinct(out))
}
