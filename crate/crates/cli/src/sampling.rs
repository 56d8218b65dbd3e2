//! Random inputs for the randomized commands.
//!
//! Every trial owns a ChaCha8 stream selected by its index, so results do
//! not depend on how trials are spread over threads.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const NODE_RANGE: f64 = 10.0;
pub const DUPLICATE_PROBABILITY: f64 = 0.2;
pub const CLUSTER_PROBABILITY: f64 = 0.1;
pub const CLUSTER_GAP: f64 = 1e-6;

pub fn trial_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Draws nodes uniform in `[-10, 10]`. After the first node, a draw repeats
/// an earlier node with probability 0.2, or lands `1e-6` from one with
/// probability 0.1.
pub struct NodeSampler<'r, R: Rng> {
    rng: &'r mut R,
    drawn: Vec<f64>,
    allow_duplicates: bool,
}

impl<'r, R: Rng> NodeSampler<'r, R> {
    pub fn new(rng: &'r mut R) -> Self {
        Self { rng, drawn: Vec::new(), allow_duplicates: true }
    }

    /// Turns duplicate draws into cluster draws, for checks that need
    /// distinct points.
    pub fn distinct(mut self) -> Self {
        self.allow_duplicates = false;
        self
    }

    pub fn draw(&mut self) -> f64 {
        let x = if self.drawn.is_empty() {
            self.uniform()
        } else {
            let u: f64 = self.rng.gen();
            if u < DUPLICATE_PROBABILITY + CLUSTER_PROBABILITY {
                let base = self.drawn[self.rng.gen_range(0..self.drawn.len())];
                if u < DUPLICATE_PROBABILITY && self.allow_duplicates {
                    base
                } else {
                    self.cluster(base)
                }
            } else {
                self.uniform()
            }
        };
        self.drawn.push(x);
        x
    }

    pub fn draw_n(&mut self, n: usize) -> Vec<f64> {
        (0..n).map(|_| self.draw()).collect()
    }

    pub fn draw_sorted(&mut self, n: usize) -> Vec<f64> {
        let mut v = self.draw_n(n);
        v.sort_by(f64::total_cmp);
        v
    }

    pub fn rng(&mut self) -> &mut R {
        self.rng
    }

    fn uniform(&mut self) -> f64 {
        self.rng.gen_range(-NODE_RANGE..=NODE_RANGE)
    }

    /// A point `k·1e-6` away from `base` for a small nonzero `k`, avoiding
    /// every point drawn so far. `k` starts in `±{1,2,3}` and the range
    /// widens only when those are taken.
    fn cluster(&mut self, base: f64) -> f64 {
        let mut reach = 3;
        loop {
            for _ in 0..8 {
                let k = self.rng.gen_range(1..=reach) as f64 * if self.rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                let x = (base + k * CLUSTER_GAP).clamp(-NODE_RANGE, NODE_RANGE);
                if !self.drawn.contains(&x) {
                    return x;
                }
            }
            reach += 3;
        }
    }
}
