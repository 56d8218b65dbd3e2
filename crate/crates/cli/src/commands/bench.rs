//! Full evaluation against incremental appends.
//!
//! Nodes ascend with spacing `ln(q+1) + 2` plus jitter, and the largest is
//! appended last. On such sequences every Newton level shrinks the error
//! bound, so the append stays on its O(q) path. On clustered nodes an append
//! falls back to a full recompute and the two timings coincide.

use std::hint::black_box;
use std::time::{Duration, Instant};

use expdd::{dd_append, dd_exp_flat, DDTable};
use rand::Rng;
use serde_json::json;

use crate::args::BenchArgs;
use crate::error::{CliError, Outcome};
use crate::output::Emitter;
use crate::sampling::trial_rng;

const ROUND: Duration = Duration::from_millis(20);
const ROUNDS: usize = 5;

#[derive(Debug, Clone, Copy)]
pub struct Timing {
    pub q: usize,
    /// Median time of one full evaluation of `q + 1` nodes.
    pub recompute: Duration,
    /// Median time of appending the last node to a table of `q` nodes.
    pub append: Duration,
}

impl Timing {
    pub fn ratio(&self) -> f64 {
        self.recompute.as_secs_f64() / self.append.as_secs_f64().max(1e-12)
    }
}

/// Median over rounds of the mean time per call, with the call count per
/// round fixed so that one round takes about [`ROUND`].
fn time_per_call(mut f: impl FnMut() -> Result<(), CliError>) -> Result<Duration, CliError> {
    let t0 = Instant::now();
    f()?;
    let once = t0.elapsed().max(Duration::from_nanos(1));
    let reps = (ROUND.as_nanos() / once.as_nanos()).clamp(1, 1_000_000) as u32;
    let mut samples = Vec::with_capacity(ROUNDS);
    for _ in 0..ROUNDS {
        let t = Instant::now();
        for _ in 0..reps {
            f()?;
        }
        samples.push(t.elapsed() / reps);
    }
    samples.sort();
    Ok(samples[ROUNDS / 2])
}

pub fn time_size(q: usize, seed: u64) -> Result<Timing, CliError> {
    let mut rng = trial_rng(seed, q as u64);
    let spacing = (q as f64 + 1.0).ln() + 2.0;
    let nodes: Vec<f64> = (0..=q).map(|j| spacing * (j as f64 + rng.gen_range(0.0..0.5))).collect();
    let (head, last) = (&nodes[..q], nodes[q]);
    let recompute = time_per_call(|| {
        black_box(dd_exp_flat(black_box(&nodes), 1.0)?);
        Ok(())
    })?;
    let append = if q == 0 {
        recompute
    } else {
        let table = DDTable::new(head, 1.0)?;
        time_per_call(|| {
            black_box(dd_append(black_box(&table), last)?);
            Ok(())
        })?
    };
    Ok(Timing { q, recompute, append })
}

pub fn run(args: &BenchArgs, seed: u64, out: &mut Emitter) -> Result<Outcome, CliError> {
    if args.sizes.is_empty() {
        return Err(CliError::usage("--sizes needs at least one order"));
    }
    let mut sizes = args.sizes.clone();
    sizes.sort_unstable();
    sizes.dedup();
    let timings = sizes.iter().map(|&q| time_size(q, seed)).collect::<Result<Vec<_>, _>>()?;
    if !out.is_jsonl() {
        out.line(format!("{:>6} {:>14} {:>14} {:>9}", "q", "dd_exp ns", "dd_append ns", "ratio"))?;
    }
    for t in &timings {
        if out.is_jsonl() {
            out.record(&json!({
                "q": t.q,
                "dd_exp_ns": t.recompute.as_nanos() as u64,
                "dd_append_ns": t.append.as_nanos() as u64,
                "ratio": t.ratio(),
            }))?;
        } else {
            out.line(format!(
                "{:>6} {:>14} {:>14} {:>9.2}",
                t.q,
                t.recompute.as_nanos(),
                t.append.as_nanos(),
                t.ratio()
            ))?;
        }
    }
    let pass = match (timings.first(), timings.last()) {
        (Some(a), Some(b)) if timings.len() > 1 => b.ratio() > a.ratio(),
        _ => true,
    };
    if !out.is_jsonl() {
        out.line(if pass { "append advantage grows with q" } else { "FAIL: append advantage does not grow with q" })?;
    }
    Ok(Outcome::from_pass(pass))
}
