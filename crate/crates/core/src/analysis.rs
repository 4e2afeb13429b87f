//! Occupancy formulas for a PTrie filled with uniformly random keys, and a
//! Monte Carlo harness that measures the same quantities on live tries.
//!
//! With `P = 2^K` and `q = P^-L`, each of the `P^L` prefixes of `L` chunks
//! receives a Binomial(`N`, `q`) share of the keys. A layer exists at level
//! `L` for every prefix shared by at least two keys, which gives
//! `P^L (1 - (1-q)^N) - N (1-q)^(N-1)` expected layers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::PTrieConfig;
use crate::par::{self, Exec};
use crate::ptrie::PTrie;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error("degree must be at least 2, got {0}")]
    Degree(u64),
    #[error("occupancy {g} exceeds key count {n}")]
    Occupancy { g: u64, n: u64 },
    #[error("at least two trials are needed for a standard error")]
    Trials,
}

fn ln_choose(n: u64, g: u64) -> f64 {
    let g = g.min(n - g);
    (1..=g).map(|i| ((n - g + i) as f64 / i as f64).ln()).sum()
}

/// Probability that exactly `g` of `n` random keys share one particular
/// prefix of `l` chunks in a trie of degree `p`:
/// `C(n,g) p^(-g l) (1 - p^(-l))^(n-g)`.
pub fn prob_exact_occupancy(n: u64, p: u64, l: u32, g: u64) -> Result<f64, AnalysisError> {
    if p < 2 {
        return Err(AnalysisError::Degree(p));
    }
    if g > n {
        return Err(AnalysisError::Occupancy { g, n });
    }
    if l == 0 {
        // One prefix, the empty one, holds every key.
        return Ok(if g == n { 1.0 } else { 0.0 });
    }
    let ln_q = -(l as f64) * (p as f64).ln();
    let ln_miss = (-ln_q.exp()).ln_1p();
    let ln = ln_choose(n, g) + g as f64 * ln_q + (n - g) as f64 * ln_miss;
    Ok(ln.exp())
}

/// Expected number of layers at level `l` (root = 0) for `n` random keys:
/// `p^l (1 - (1-p^-l)^n) - n (1-p^-l)^(n-1)`.
pub fn expected_layers_at_level(n: u64, p: u64, l: u32) -> Result<f64, AnalysisError> {
    if p < 2 {
        return Err(AnalysisError::Degree(p));
    }
    if n == 0 {
        return Ok(0.0);
    }
    if l == 0 {
        // q = 1: p^0 (1 - 0^n) - n 0^(n-1)
        return Ok(if n == 1 { 0.0 } else { 1.0 });
    }
    let prefixes = (p as f64).powi(l as i32);
    let ln_miss = (-(1.0 / prefixes)).ln_1p();
    let none_hit = -(n as f64 * ln_miss).exp_m1();
    let single = n as f64 * ((n - 1) as f64 * ln_miss).exp();
    Ok(prefixes * none_hit - single)
}

/// Sum of [`expected_layers_at_level`] over levels `0..levels`.
pub fn expected_total_layers(n: u64, p: u64, levels: u32) -> Result<f64, AnalysisError> {
    (0..levels).map(|l| expected_layers_at_level(n, p, l)).sum()
}

/// Sample mean with its standard deviation and standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub mean: f64,
    pub sd: f64,
    pub se: f64,
}

impl Moments {
    pub fn from_samples(xs: impl Iterator<Item = f64> + Clone) -> Self {
        let n = xs.clone().count() as f64;
        let mean = xs.clone().sum::<f64>() / n;
        let var = if n > 1.0 {
            xs.map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        let sd = var.sqrt();
        Self {
            mean,
            sd,
            se: sd / n.sqrt(),
        }
    }

    /// Distance of `expected` from the mean in standard errors. When every
    /// sample was equal the spread says nothing, so the Poisson error
    /// `sqrt(expected / trials)` of a count with that mean stands in.
    pub fn z_score(&self, expected: f64, trials: usize) -> f64 {
        let diff = (self.mean - expected).abs();
        let se = if self.se > 0.0 { self.se } else { (expected / trials as f64).sqrt() };
        if diff < 1e-12 {
            0.0
        } else if se > 0.0 {
            diff / se
        } else {
            f64::INFINITY
        }
    }
}

/// Observed layer counts over independent random tries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerSimulation {
    pub keys: u64,
    pub trials: usize,
    pub per_level: Vec<Moments>,
    pub total: Moments,
}

/// Layer counts per level for one trie built from `n` uniform keys.
pub fn sample_layer_counts(n: u64, config: PTrieConfig, rng: &mut impl Rng) -> Vec<usize> {
    let mut trie = PTrie::new(config);
    let max = config.max_key();
    for _ in 0..n {
        let key = if max == u64::MAX { rng.gen() } else { rng.gen_range(0..=max) };
        trie.insert(key, ()).expect("key drawn within range");
    }
    trie.layers_per_depth()
}

/// Builds `trials` tries of `n` uniform keys (duplicates allowed) and
/// reports per-level and total layer-count moments. Trial `i` uses stream
/// `i` of a ChaCha generator seeded with `seed`.
pub fn simulate_layers(
    n: u64,
    config: PTrieConfig,
    trials: usize,
    seed: u64,
    exec: Exec,
) -> Result<LayerSimulation, AnalysisError> {
    if trials < 2 {
        return Err(AnalysisError::Trials);
    }
    let samples = par::map_range(exec, trials, |i| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);
        sample_layer_counts(n, config, &mut rng)
    });
    let levels = config.depth_max();
    let per_level = (0..levels)
        .map(|l| Moments::from_samples(samples.iter().map(move |s| s[l] as f64)))
        .collect();
    let total = Moments::from_samples(samples.iter().map(|s| s.iter().sum::<usize>() as f64));
    Ok(LayerSimulation {
        keys: n,
        trials,
        per_level,
        total,
    })
}
