//! Hermite–Genocchi Monte Carlo: `exp[x_0..x_n] = E[exp(Σ λ_i x_i)] / n!`
//! for `λ` uniform on the standard simplex.
//!
//! Samples are drawn in fixed-size blocks. Block `b` uses ChaCha8 seeded with
//! `seed` on stream `b`, and block statistics are merged in block order, so
//! the estimate depends only on `(nodes, samples, seed)` and not on how many
//! threads run the blocks.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{argument, Result};
use crate::nodes::NodeMultiset;

const BLOCK: usize = 1 << 15;

/// Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: usize,
}

impl Estimate {
    /// Comparison window used throughout: `mean ± 4·stderr`.
    pub const SIGMAS: f64 = 4.0;

    /// Whether `value` lies in the comparison window. The window is widened
    /// by rounding-level slack so that exact (zero-variance) estimates match.
    pub fn contains(&self, value: f64) -> bool {
        (value - self.mean).abs() <= Self::SIGMAS * self.stderr + 1e-13 * self.mean.abs()
    }

    /// `|value - mean| / stderr`; `0` or `inf` when the estimate is exact.
    pub fn z_score(&self, value: f64) -> f64 {
        let d = (value - self.mean).abs();
        if d == 0.0 {
            0.0
        } else {
            d / self.stderr
        }
    }
}

/// Uniform point on the standard simplex `Δ_n` (normalized `Exp(1)` draws).
pub fn simplex_sample<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    let mut lambda: Vec<f64> = (0..=n).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let total: f64 = lambda.iter().sum();
    for l in &mut lambda {
        *l /= total;
    }
    lambda
}

#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    count: f64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.count += 1.0;
        let d = x - self.mean;
        self.mean += d / self.count;
        self.m2 += d * (x - self.mean);
    }

    fn merge(self, o: Moments) -> Moments {
        if self.count == 0.0 {
            return o;
        }
        let count = self.count + o.count;
        let d = o.mean - self.mean;
        Moments {
            count,
            mean: self.mean + d * o.count / count,
            m2: self.m2 + o.m2 + d * d * self.count * o.count / count,
        }
    }
}

/// Estimates `exp[x_0..x_n]` from `samples` simplex draws.
pub fn hg_monte_carlo(nodes: &NodeMultiset, samples: usize, seed: u64) -> Result<Estimate> {
    if samples == 0 {
        return Err(argument("samples must be at least 1"));
    }
    let flat = nodes.flat();
    let n = flat.len() - 1;
    let mu = flat.iter().sum::<f64>() / flat.len() as f64;
    let y: Vec<f64> = flat.iter().map(|&x| x - mu).collect();
    let blocks = samples.div_ceil(BLOCK);
    let stats: Vec<Moments> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b as u64);
            let count = BLOCK.min(samples - b * BLOCK);
            let mut m = Moments::default();
            for _ in 0..count {
                let lambda = simplex_sample(n, &mut rng);
                let s: f64 = lambda.iter().zip(&y).map(|(l, v)| l * v).sum();
                m.push(s.exp());
            }
            m
        })
        .collect();
    let total = stats.into_iter().fold(Moments::default(), Moments::merge);
    let ln_fact: f64 = (1..=n).map(|k| (k as f64).ln()).sum();
    let scale = (mu - ln_fact).exp();
    let var = if samples > 1 { total.m2 / (samples - 1) as f64 } else { 0.0 };
    Ok(Estimate {
        mean: total.mean * scale,
        stderr: (var / samples as f64).sqrt() * scale,
        samples,
    })
}
