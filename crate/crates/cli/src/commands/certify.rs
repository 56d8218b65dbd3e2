//! Randomized falsification sweeps for the inequality theorems.
//!
//! Input distributions, per trial:
//!
//! * `tn2`, `supermodular`: prefix of 0 to 6 nodes, `p, q ∈ {1, 2, 3}`, and a
//!   rectangle `x1 ≤ x2`, `y1 ≤ y2` from sorted draws.
//! * `fourpoint`: four draws in draw order.
//! * `triangle`: three sorted draws.
//! * `phiproduct`: the three gaps between four sorted draws.
//! * `hproduct`: four sorted distinct draws.
//! * `sandwich`: 2 to 31 draws.
//!
//! Draws come from [`NodeSampler`]. A trial fails when its margin is below
//! `-tolerance` (relative to the largest term, or absolute for the
//! log-domain `tn2` and `sandwich`). Failures are re-evaluated with the
//! extended-precision oracle to separate roundoff from genuine violations.

use expdd::bounds::sandwich_check;
use expdd::inequalities::{
    four_point_f, h_product_margin, phi_product_margin, supermodular_margin, tn2_margin, triangle_h_margin, KernelSpec,
    Margin,
};
use expdd::oracle::{newton_highprec_ext, Extended};
use expdd::{NodeMultiset, ScaledValue};
use rand::Rng;
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::args::{CertifyArgs, RunConfig, Target};
use crate::error::{CliError, Outcome};
use crate::output::{decimals, Emitter};
use crate::sampling::{trial_rng, NodeSampler};

pub const DEFAULT_TRIALS: u64 = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    /// Below tolerance in `f64`, but not at oracle precision.
    NegativeAtWorkingPrecision,
    /// Below tolerance at oracle precision as well.
    ConfirmedNegative,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::NegativeAtWorkingPrecision => "negative_at_working_precision",
            Status::ConfirmedNegative => "confirmed_negative",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Trial {
    pub index: u64,
    /// Integer parameters of the input (kernel shape), if any.
    pub params: Map<String, Value>,
    pub inputs: Vec<f64>,
    pub margin: f64,
    pub scale: f64,
    /// Margin over scale, or the margin itself for log-domain targets.
    pub relative: f64,
    pub oracle_relative: Option<f64>,
    pub status: Status,
}

impl Trial {
    pub fn record(&self, target: Target) -> Value {
        json!({
            "target": target.name(),
            "trial": self.index,
            "params": self.params,
            "inputs": decimals(&self.inputs),
            "margin": self.margin,
            "scale": self.scale,
            "relative": self.relative,
            "oracle_relative": self.oracle_relative,
            "status": self.status.name(),
        })
    }
}

#[derive(Debug, Clone)]
pub struct CertifyReport {
    pub target: Target,
    pub seed: u64,
    pub tolerance: f64,
    pub trials: Vec<Trial>,
}

impl CertifyReport {
    pub fn passed(&self) -> usize {
        self.trials.iter().filter(|t| t.status == Status::Pass).count()
    }

    pub fn count(&self, status: Status) -> usize {
        self.trials.iter().filter(|t| t.status == status).count()
    }

    pub fn pass(&self) -> bool {
        self.passed() == self.trials.len()
    }

    /// Trial with the smallest relative margin.
    pub fn worst(&self) -> &Trial {
        self.trials
            .iter()
            .min_by(|a, b| a.relative.total_cmp(&b.relative))
            .expect("at least one trial")
    }

    pub fn summary(&self) -> Value {
        let w = self.worst();
        json!({
            "summary": self.target.name(),
            "seed": self.seed,
            "trials": self.trials.len(),
            "passed": self.passed(),
            "negative_at_working_precision": self.count(Status::NegativeAtWorkingPrecision),
            "confirmed_negative": self.count(Status::ConfirmedNegative),
            "tolerance": self.tolerance,
            "min_relative_margin": w.relative,
            "argmin_trial": w.index,
            "argmin_inputs": decimals(&w.inputs),
        })
    }
}

struct Eval {
    params: Map<String, Value>,
    inputs: Vec<f64>,
    margin: f64,
    scale: f64,
    relative: f64,
}

impl Eval {
    fn from_margin(m: &Margin, params: Map<String, Value>, inputs: Vec<f64>) -> Self {
        let relative = if m.kind.is_log_domain() { m.value } else { relative(m.value, m.scale) };
        Eval { params, inputs, margin: m.value, scale: m.scale, relative }
    }
}

fn relative(value: f64, scale: f64) -> f64 {
    if scale > 0.0 && scale.is_finite() {
        value / scale
    } else {
        value
    }
}

fn kernel_params(spec: &KernelSpec) -> Map<String, Value> {
    let mut p = Map::new();
    p.insert("prefix_len".into(), json!(spec.prefix().len()));
    p.insert("p".into(), json!(spec.p()));
    p.insert("q".into(), json!(spec.q()));
    p
}

/// `(spec, [x1, x2, y1, y2])`
fn draw_kernel<R: Rng>(rng: &mut R) -> Result<(KernelSpec, [f64; 4]), CliError> {
    let n = rng.gen_range(0..=6);
    let p = rng.gen_range(1..=3);
    let q = rng.gen_range(1..=3);
    let mut s = NodeSampler::new(rng);
    let prefix = s.draw_n(n);
    let x = s.draw_sorted(2);
    let y = s.draw_sorted(2);
    Ok((KernelSpec::new(&prefix, p, q)?, [x[0], x[1], y[0], y[1]]))
}

fn evaluate(target: Target, seed: u64, index: u64) -> Result<Eval, CliError> {
    let mut rng = trial_rng(seed, index);
    let none = Map::new;
    Ok(match target {
        Target::Tn2 | Target::Supermodular => {
            let (spec, [x1, x2, y1, y2]) = draw_kernel(&mut rng)?;
            let m = if target == Target::Tn2 {
                tn2_margin(&spec, x1, x2, y1, y2)?
            } else {
                supermodular_margin(&spec, x1, x2, y1, y2)?
            };
            let mut inputs = spec.prefix().to_vec();
            inputs.extend([x1, x2, y1, y2]);
            Eval::from_margin(&m, kernel_params(&spec), inputs)
        }
        Target::Fourpoint => {
            let v = NodeSampler::new(&mut rng).draw_n(4);
            Eval::from_margin(&four_point_f(v[0], v[1], v[2], v[3])?, none(), v)
        }
        Target::Triangle => {
            let v = NodeSampler::new(&mut rng).draw_sorted(3);
            Eval::from_margin(&triangle_h_margin(v[0], v[1], v[2])?, none(), v)
        }
        Target::Phiproduct => {
            let s = NodeSampler::new(&mut rng).draw_sorted(4);
            let v = vec![s[1] - s[0], s[2] - s[1], s[3] - s[2]];
            Eval::from_margin(&phi_product_margin(v[0], v[1], v[2])?, none(), v)
        }
        Target::Hproduct => {
            let v = NodeSampler::new(&mut rng).distinct().draw_sorted(4);
            Eval::from_margin(&h_product_margin(v[0], v[1], v[2], v[3])?, none(), v)
        }
        Target::Sandwich => {
            let len = rng.gen_range(2..=31);
            let v = NodeSampler::new(&mut rng).draw_n(len);
            let r = sandwich_check(&NodeMultiset::from_flat(&v)?, f64::INFINITY)?;
            let margin = r.slack_lower.min(r.slack_upper);
            Eval { params: none(), inputs: v, margin, scale: 1.0, relative: margin }
        }
    })
}

fn run_trial(target: Target, cfg: &RunConfig, index: u64) -> Result<Trial, CliError> {
    let e = evaluate(target, cfg.seed, index)?;
    let (status, oracle_relative) = if e.relative >= -cfg.tolerance {
        (Status::Pass, None)
    } else {
        let r = oracle_relative(target, &e, cfg.precision_bits)?;
        let status = if r < -cfg.tolerance { Status::ConfirmedNegative } else { Status::NegativeAtWorkingPrecision };
        (status, Some(r))
    };
    Ok(Trial {
        index,
        params: e.params,
        inputs: e.inputs,
        margin: e.margin,
        scale: e.scale,
        relative: e.relative,
        oracle_relative,
        status,
    })
}

/// Runs trials `start .. start + cfg.trials`.
pub fn certify(target: Target, cfg: &RunConfig, start: u64) -> Result<CertifyReport, CliError> {
    let end = start
        .checked_add(cfg.trials)
        .ok_or_else(|| CliError::usage("trial range overflows"))?;
    let trials = cfg.install(|| {
        (start..end)
            .into_par_iter()
            .map(|i| run_trial(target, cfg, i))
            .collect::<Result<Vec<_>, _>>()
    })??;
    Ok(CertifyReport { target, seed: cfg.seed, tolerance: cfg.tolerance, trials })
}

pub fn run(args: &CertifyArgs, cfg: &RunConfig, out: &mut Emitter) -> Result<Outcome, CliError> {
    let report = certify(args.target, cfg, args.start)?;
    if out.is_jsonl() {
        for t in &report.trials {
            out.record(&t.record(args.target))?;
        }
        out.record(&report.summary())?;
    } else {
        let w = report.worst();
        out.line(format!("target        {}", args.target.name()))?;
        out.line(format!("seed          {}", cfg.seed))?;
        out.line(format!("trials        {}", report.trials.len()))?;
        out.line(format!("passed        {}", report.passed()))?;
        out.line(format!("tolerance     {:e}", cfg.tolerance))?;
        out.line(format!("min margin    {:e} (trial {})", w.relative, w.index))?;
        out.line(format!("argmin input  [{}]", decimals(&w.inputs).join(", ")))?;
        if !w.params.is_empty() {
            out.line(format!("argmin params {}", Value::Object(w.params.clone())))?;
        }
        out.line(format!("replay        --seed {} certify {} --start {} --trials 1", cfg.seed, args.target.name(), w.index))?;
        for t in report.trials.iter().filter(|t| t.status != Status::Pass) {
            out.line(format!(
                "FAIL trial {} [{}] relative {:e}, oracle {}: {}",
                t.index,
                decimals(&t.inputs).join(", "),
                t.relative,
                t.oracle_relative.map_or("-".into(), |r| format!("{r:e}")),
                t.status.name()
            ))?;
        }
        out.line(if report.pass() { "PASS" } else { "FAIL" })?;
    }
    Ok(Outcome::from_pass(report.pass()))
}

fn xdd(nodes: &[f64], bits: usize) -> Result<Extended, CliError> {
    Ok(newton_highprec_ext(&NodeMultiset::from_flat(nodes)?, bits)?)
}

fn xnum(x: f64, bits: usize) -> Extended {
    Extended::from_f64(x, bits)
}

/// `h(x,y) = (y-x)²·exp[x,x,y,y]`
fn xh(x: f64, y: f64, bits: usize) -> Result<Extended, CliError> {
    let d = xnum(y, bits).sub(&xnum(x, bits));
    Ok(d.mul(&d).mul(&xdd(&[x, x, y, y], bits)?))
}

/// `φ(u) = h(-u, u)/2 = 2u²·exp[-u,-u,u,u]`
fn xphi(u: f64, bits: usize) -> Result<Extended, CliError> {
    Ok(xnum(2.0 * u * u, bits).mul(&xdd(&[-u, -u, u, u], bits)?))
}

fn ratio(num: &Extended, den: f64) -> f64 {
    relative(num.to_scaled().to_f64(), den)
}

fn oracle_relative(target: Target, e: &Eval, bits: usize) -> Result<f64, CliError> {
    let v = &e.inputs;
    Ok(match target {
        Target::Tn2 | Target::Supermodular => {
            let p = e.params["p"].as_u64().unwrap_or(1) as usize;
            let q = e.params["q"].as_u64().unwrap_or(1) as usize;
            let (prefix, rect) = v.split_at(v.len() - 4);
            let k = |x: f64, y: f64| {
                let mut nodes = prefix.to_vec();
                nodes.extend(std::iter::repeat_n(x, p));
                nodes.extend(std::iter::repeat_n(y, q));
                xdd(&nodes, bits)
            };
            let (k11, k12) = (k(rect[0], rect[2])?, k(rect[0], rect[3])?);
            let (k21, k22) = (k(rect[1], rect[2])?, k(rect[1], rect[3])?);
            if target == Target::Tn2 {
                let cross = k12.mul(&k21);
                let diag = k11.mul(&k22);
                let r = cross.sub(&diag).to_scaled() / diag.to_scaled();
                r.to_f64().ln_1p()
            } else {
                let m = k11.add(&k22).sub(&k12).sub(&k21);
                let scale = [&k11, &k12, &k21, &k22].iter().map(|k| k.to_scaled()).fold(ScaledValue::ZERO, |a, b| {
                    if b.ln_abs() > a.ln_abs() || a.is_zero() {
                        b
                    } else {
                        a
                    }
                });
                (m.to_scaled() / scale).to_f64()
            }
        }
        Target::Fourpoint => {
            let (a, b, c, d) = (v[0], v[1], v[2], v[3]);
            let t1 = xdd(&[a, a, b, c], bits)?.mul(&xdd(&[d, d, b, c], bits)?);
            let t2 = xdd(&[b, b, a, d], bits)?.mul(&xdd(&[c, c, a, d], bits)?);
            let s = xdd(&[a, b, c, d], bits)?;
            ratio(&t1.add(&t2).sub(&s.mul(&s)), e.scale)
        }
        Target::Triangle => {
            let (a, b, c) = (v[0], v[1], v[2]);
            let m = xh(a, c, bits)?.sub(&xh(a, b, bits)?).sub(&xh(b, c, bits)?);
            ratio(&m, e.scale)
        }
        Target::Phiproduct => {
            let (x, y, z) = (v[0], v[1], v[2]);
            let t1 = xphi(x + y, bits)?.mul(&xphi(y + z, bits)?);
            let t2 = xphi(x, bits)?.mul(&xphi(z, bits)?);
            let t3 = xphi(y, bits)?.mul(&xphi(x + y + z, bits)?);
            ratio(&t1.sub(&t2).sub(&t3), e.scale)
        }
        Target::Hproduct => {
            let (a, b, c, d) = (v[0], v[1], v[2], v[3]);
            let t1 = xh(a, c, bits)?.mul(&xh(b, d, bits)?);
            let t2 = xh(b, c, bits)?.mul(&xh(a, d, bits)?);
            let t3 = xh(a, b, bits)?.mul(&xh(c, d, bits)?);
            ratio(&t1.sub(&t2).sub(&t3), e.scale)
        }
        Target::Sandwich => {
            let nodes = NodeMultiset::from_flat(v)?;
            let r = sandwich_check(&nodes, f64::INFINITY)?;
            let ln_fact: f64 = (1..=nodes.order()).map(|k| (k as f64).ln()).sum();
            let ln_v = newton_highprec_ext(&nodes, bits)?.to_scaled().ln_abs() + ln_fact;
            (ln_v - r.lower.ln_abs()).min(r.upper.ln_abs() - ln_v)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::args::OutputFormat;

    fn cfg(trials: u64, threads: Option<usize>) -> RunConfig {
        RunConfig {
            seed: 3,
            trials,
            tolerance: 1e-12,
            format: OutputFormat::Jsonl,
            precision_bits: 200,
            threads,
        }
    }

    #[test]
    fn oracle_agrees_with_working_precision_on_passing_inputs() {
        let c = cfg(1, None);
        for target in [Target::Tn2, Target::Supermodular, Target::Fourpoint, Target::Triangle, Target::Phiproduct, Target::Hproduct, Target::Sandwich] {
            for i in 0..20 {
                let e = evaluate(target, c.seed, i).unwrap();
                let r = oracle_relative(target, &e, 200).unwrap();
                assert!((r - e.relative).abs() <= 1e-11 * (1.0 + e.relative.abs()), "{target:?} {i}: {r} vs {}", e.relative);
            }
        }
    }

    #[test]
    fn results_do_not_depend_on_threads() {
        for target in [Target::Fourpoint, Target::Tn2] {
            let a = certify(target, &cfg(300, Some(1)), 0).unwrap();
            let b = certify(target, &cfg(300, Some(4)), 0).unwrap();
            let ra: Vec<_> = a.trials.iter().map(|t| t.record(target)).collect();
            let rb: Vec<_> = b.trials.iter().map(|t| t.record(target)).collect();
            assert_eq!(ra, rb);
        }
    }

    #[test]
    fn start_offset_replays_a_trial() {
        let all = certify(Target::Triangle, &cfg(10, None), 0).unwrap();
        let one = certify(Target::Triangle, &cfg(1, None), 7).unwrap();
        assert_eq!(one.trials[0].inputs, all.trials[7].inputs);
        assert_eq!(one.trials[0].margin, all.trials[7].margin);
    }
}
