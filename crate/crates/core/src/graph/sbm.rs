use rand::Rng;
use serde::{Deserialize, Serialize};

use super::Graph;
use crate::error::{Error, Result};

/// Stochastic block model with `q` equal-size communities.
///
/// `epsilon_ratio` is the inter/intra connection ratio expressed as a
/// fraction of the detectability threshold, so `epsilon_ratio = 0.25`
/// gives `ε = ε_c / 4`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SbmConfig {
    pub n_nodes: usize,
    pub n_communities: usize,
    pub epsilon_ratio: f64,
    #[serde(default = "default_average_degree")]
    pub average_degree: f64,
    #[serde(default)]
    pub seed: u64,
}

fn default_average_degree() -> f64 {
    16.0
}

/// Solved connection probabilities of an [`SbmConfig`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SbmProbabilities {
    pub epsilon: f64,
    pub p_in: f64,
    pub p_out: f64,
}

/// Detectability threshold `ε_c = (c - √c) / (c + √c (q - 1))` for average
/// degree `c` and `q` equal blocks.
pub fn detectability_threshold(c: f64, q: usize) -> f64 {
    let s = c.sqrt();
    (c - s) / (c + s * (q as f64 - 1.0))
}

impl SbmConfig {
    pub fn new(n_nodes: usize, n_communities: usize, epsilon_ratio: f64, seed: u64) -> Self {
        Self {
            n_nodes,
            n_communities,
            epsilon_ratio,
            average_degree: default_average_degree(),
            seed,
        }
    }

    pub fn community_size(&self) -> usize {
        self.n_nodes / self.n_communities
    }

    pub fn community_of(&self, node: usize) -> usize {
        node / self.community_size()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.n_nodes < 2 {
            return bad(format!("SBM needs at least 2 nodes, got {}", self.n_nodes));
        }
        if self.n_communities == 0 || !self.n_nodes.is_multiple_of(self.n_communities) {
            return bad(format!(
                "{} nodes cannot be split into {} equal communities",
                self.n_nodes, self.n_communities
            ));
        }
        if !(0.0..=1.0).contains(&self.epsilon_ratio) {
            return bad(format!(
                "epsilon_ratio {} outside [0, 1]",
                self.epsilon_ratio
            ));
        }
        if !(self.average_degree > 1.0) || !self.average_degree.is_finite() {
            return bad(format!(
                "average degree {} must exceed 1",
                self.average_degree
            ));
        }
        Ok(())
    }

    /// Solves `p_in`, `p_out = ε p_in` so the expected degree equals `c`.
    pub fn probabilities(&self) -> Result<SbmProbabilities> {
        self.validate()?;
        let q = self.n_communities;
        let epsilon = if q > 1 {
            self.epsilon_ratio * detectability_threshold(self.average_degree, q)
        } else {
            0.0
        };
        let size = self.community_size() as f64;
        let n = self.n_nodes as f64;
        let p_in = self.average_degree / ((size - 1.0) + epsilon * (n - size));
        if !(p_in <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "average degree {} needs p_in = {p_in:.4} > 1",
                self.average_degree
            )));
        }
        Ok(SbmProbabilities {
            epsilon,
            p_in,
            p_out: epsilon * p_in,
        })
    }

    /// Draws a realization from the config's own seed.
    pub fn generate(&self) -> Result<Graph> {
        let mut rng = crate::seeds::stream(self.seed, &[0x5b3]);
        generate_sbm(self, &mut rng)
    }
}

/// Draws an unweighted SBM graph.
pub fn generate_sbm<R: Rng + ?Sized>(cfg: &SbmConfig, rng: &mut R) -> Result<Graph> {
    let probs = cfg.probabilities()?;
    let n = cfg.n_nodes;
    let mut pairs = Vec::new();
    for i in 0..n {
        let ci = cfg.community_of(i);
        for j in i + 1..n {
            let p = if cfg.community_of(j) == ci {
                probs.p_in
            } else {
                probs.p_out
            };
            if p > 0.0 && rng.random::<f64>() < p {
                pairs.push((i, j));
            }
        }
    }
    Graph::unweighted(n, pairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_epsilon_has_no_inter_edges() {
        let cfg = SbmConfig::new(100, 4, 0.0, 1);
        let g = cfg.generate().unwrap();
        assert!(g.n_edges() > 0);
        for &(i, j, _) in g.edges() {
            assert_eq!(cfg.community_of(i), cfg.community_of(j));
        }
    }

    #[test]
    fn single_block_is_erdos_renyi() {
        let cfg = SbmConfig::new(200, 1, 0.25, 1);
        let p = cfg.probabilities().unwrap();
        assert!((p.p_in - 16.0 / 199.0).abs() < 1e-15);
        assert_eq!(p.p_out, 0.0);
    }

    #[test]
    fn inter_probability_below_intra() {
        let cfg = SbmConfig::new(1000, 10, 0.25, 1);
        let p = cfg.probabilities().unwrap();
        assert!(p.p_out < p.p_in);
        let eps_c = detectability_threshold(16.0, 10);
        assert!((eps_c - 12.0 / 52.0).abs() < 1e-15);
        assert!((p.epsilon - eps_c / 4.0).abs() < 1e-15);
    }

    #[test]
    fn average_degree_close_to_target() {
        // Monte-Carlo over 20 seeds: each realization within 10% of c = 16.
        let cfg = SbmConfig::new(1000, 10, 0.25, 0);
        let mut total = 0.0;
        for seed in 0..20 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let d = generate_sbm(&cfg, &mut rng).unwrap().average_degree();
            assert!((d - 16.0).abs() < 1.6, "seed {seed}: {d}");
            total += d;
        }
        assert!((total / 20.0 - 16.0).abs() < 0.2);
    }

    #[test]
    fn invalid_configs() {
        assert!(SbmConfig::new(10, 3, 0.25, 0).validate().is_err());
        assert!(SbmConfig::new(10, 2, 1.5, 0).validate().is_err());
        let mut cfg = SbmConfig::new(10, 2, 0.25, 0);
        cfg.average_degree = 30.0;
        assert!(matches!(cfg.probabilities(), Err(Error::InvalidConfig(_))));
    }
}
