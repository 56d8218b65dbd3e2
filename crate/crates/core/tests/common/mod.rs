#![allow(dead_code)]

use expdd::NodeMultiset;
use rand::Rng;

/// Random multiset of at most `max_q + 1` nodes in `[lo, hi]` with
/// multiplicities up to `max_mult`.
pub fn random_multiset<R: Rng>(rng: &mut R, max_q: usize, lo: f64, hi: f64, max_mult: usize) -> NodeMultiset {
    let total = rng.gen_range(1..=max_q + 1);
    let mut pairs = Vec::new();
    let mut used = 0;
    while used < total {
        let m = rng.gen_range(1..=max_mult).min(total - used);
        pairs.push((rng.gen_range(lo..=hi), m));
        used += m;
    }
    NodeMultiset::from_pairs(&pairs).unwrap()
}

/// Random flat node list of exactly `len` nodes in `[lo, hi]`.
pub fn random_nodes<R: Rng>(rng: &mut R, len: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..len).map(|_| rng.gen_range(lo..=hi)).collect()
}
