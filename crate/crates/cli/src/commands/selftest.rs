//! Identity residuals over a seeded battery.
//!
//! Each identity gets `trials` inputs with 1 to 9 nodes uniform in
//! `[-5, 5]` (the second node repeats the first with probability 0.2) and
//! `τ` uniform in `[0, 3)`. Identity-specific parameters:
//!
//! * convolution: split point `j` uniform, `β = τ`, 64 Gauss–Legendre points;
//! * leibniz: `t1 = τ`, `t2` uniform in `[0, 3)`;
//! * parametric derivative: central step `1e-5·τ`;
//! * rescaling: `|α|` uniform in `[0.1, 10)` with a random sign.

use expdd::identities::{
    convolution_residual, double_sum_residual, leibniz_residual, parametric_derivative_residual, repeated_sum_residual,
    rescaling_residual, weighted_sum_residual, Residual, DEFAULT_QUAD_POINTS,
};
use rand::Rng;
use rayon::prelude::*;
use serde_json::json;

use crate::args::RunConfig;
use crate::error::{CliError, Outcome};
use crate::output::{decimals, Emitter};
use crate::sampling::trial_rng;

pub const DEFAULT_TRIALS: u64 = 1000;
pub const DEFAULT_TOLERANCE: f64 = 1e-8;
/// The finite-difference check is held to this multiple of the tolerance.
pub const FINITE_DIFFERENCE_FACTOR: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Identity {
    Convolution,
    RepeatedSum,
    WeightedSum,
    ParametricDerivative,
    DoubleSum,
    Leibniz,
    Rescaling,
}

impl Identity {
    pub const ALL: [Identity; 7] = [
        Identity::Convolution,
        Identity::RepeatedSum,
        Identity::WeightedSum,
        Identity::ParametricDerivative,
        Identity::DoubleSum,
        Identity::Leibniz,
        Identity::Rescaling,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Identity::Convolution => "convolution",
            Identity::RepeatedSum => "repeated_sum",
            Identity::WeightedSum => "weighted_sum",
            Identity::ParametricDerivative => "parametric_derivative",
            Identity::DoubleSum => "double_sum",
            Identity::Leibniz => "leibniz",
            Identity::Rescaling => "rescaling",
        }
    }

    pub fn tolerance(self, base: f64) -> f64 {
        match self {
            Identity::ParametricDerivative => base * FINITE_DIFFERENCE_FACTOR,
            _ => base,
        }
    }

    fn min_nodes(self) -> usize {
        match self {
            Identity::Convolution | Identity::ParametricDerivative => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Check {
    pub identity: Identity,
    pub trial: u64,
    pub nodes: Vec<f64>,
    pub tau: f64,
    pub residual: Residual,
}

impl Check {
    pub fn q(&self) -> usize {
        self.nodes.len() - 1
    }
}

pub fn check(identity: Identity, seed: u64, trial: u64) -> Result<Check, CliError> {
    let stream = (Identity::ALL.iter().position(|&i| i == identity).unwrap_or(0) as u64) << 40 | trial;
    let mut rng = trial_rng(seed, stream);
    let len = rng.gen_range(identity.min_nodes()..=9);
    let mut nodes: Vec<f64> = (0..len).map(|_| rng.gen_range(-5.0..=5.0)).collect();
    if len > 1 && rng.gen_bool(0.2) {
        nodes[1] = nodes[0];
    }
    let tau = rng.gen_range(0.0..3.0);
    let residual = match identity {
        Identity::Convolution => {
            let j = rng.gen_range(0..len - 1);
            convolution_residual(&nodes, j, tau, DEFAULT_QUAD_POINTS)?
        }
        Identity::RepeatedSum => repeated_sum_residual(&nodes, tau)?,
        Identity::WeightedSum => weighted_sum_residual(&nodes, tau)?,
        Identity::ParametricDerivative => parametric_derivative_residual(&nodes, tau, 1e-5 * tau)?,
        Identity::DoubleSum => double_sum_residual(&nodes, tau)?,
        Identity::Leibniz => leibniz_residual(&nodes, tau, rng.gen_range(0.0..3.0))?,
        Identity::Rescaling => {
            let alpha = rng.gen_range(0.1..10.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            rescaling_residual(&nodes, alpha, tau)?
        }
    };
    Ok(Check { identity, trial, nodes, tau, residual })
}

/// Max residual per identity, in [`Identity::ALL`] order.
#[derive(Debug, Clone)]
pub struct Row {
    pub identity: Identity,
    pub checks: usize,
    pub max_rel_residual: f64,
    pub tolerance: f64,
}

impl Row {
    pub fn pass(&self) -> bool {
        self.max_rel_residual <= self.tolerance
    }
}

pub fn battery(cfg: &RunConfig) -> Result<Vec<Check>, CliError> {
    let jobs: Vec<(Identity, u64)> = Identity::ALL
        .iter()
        .flat_map(|&id| (0..cfg.trials).map(move |t| (id, t)))
        .collect();
    cfg.install(|| {
        jobs.par_iter()
            .map(|&(id, t)| check(id, cfg.seed, t))
            .collect::<Result<Vec<_>, _>>()
    })?
}

pub fn rows(checks: &[Check], tolerance: f64) -> Vec<Row> {
    Identity::ALL
        .iter()
        .map(|&identity| {
            let mine = checks.iter().filter(|c| c.identity == identity);
            let (n, max) = mine.fold((0, 0.0f64), |(n, m), c| (n + 1, m.max(c.residual.rel_residual)));
            Row { identity, checks: n, max_rel_residual: max, tolerance: identity.tolerance(tolerance) }
        })
        .collect()
}

pub fn run(cfg: &RunConfig, out: &mut Emitter) -> Result<Outcome, CliError> {
    let checks = battery(cfg)?;
    let rows = rows(&checks, cfg.tolerance);
    if out.is_jsonl() {
        for c in &checks {
            out.record(&json!({
                "identity": c.identity.name(),
                "trial": c.trial,
                "q": c.q(),
                "tau": c.tau,
                "nodes": decimals(&c.nodes),
                "residual": c.residual.rel_residual,
                "pass": c.residual.rel_residual <= c.identity.tolerance(cfg.tolerance),
            }))?;
        }
    } else {
        out.line(format!("{:<22} {:>7} {:>14} {:>10}", "identity", "checks", "max rel", "tolerance"))?;
        for r in &rows {
            out.line(format!(
                "{:<22} {:>7} {:>14.3e} {:>10.0e} {}",
                r.identity.name(),
                r.checks,
                r.max_rel_residual,
                r.tolerance,
                if r.pass() { "ok" } else { "FAIL" }
            ))?;
        }
    }
    Ok(Outcome::from_pass(rows.iter().all(Row::pass)))
}
