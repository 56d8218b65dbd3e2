use expdd::bounds::{sandwich_check, summary};
use serde_json::json;

use crate::args::{GlobalArgs, NodeArgs};
use crate::error::{CliError, Outcome};
use crate::input;
use crate::output::{decimals, Emitter};

pub const DEFAULT_TOLERANCE: f64 = 1e-10;

pub fn run(args: &NodeArgs, global: &GlobalArgs, out: &mut Emitter) -> Result<Outcome, CliError> {
    let tolerance = global.tolerance.unwrap_or(DEFAULT_TOLERANCE);
    if !(tolerance > 0.0 && tolerance.is_finite()) {
        return Err(CliError::usage(format!("--tolerance must be positive and finite, got {tolerance}")));
    }
    let nodes = input::collect(args)?;
    let st = summary(&nodes)?;
    let r = sandwich_check(&nodes, tolerance)?;
    if out.is_jsonl() {
        out.record(&json!({
            "nodes": decimals(&nodes.flat()),
            "n": st.n,
            "mu": st.mu,
            "sigma": st.sigma(),
            "ln_lower": r.lower.ln_abs(),
            "ln_value": r.value.ln_abs(),
            "ln_upper": r.upper.ln_abs(),
            "slack_lower": r.slack_lower,
            "slack_upper": r.slack_upper,
            "tolerance": tolerance,
            "pass": r.pass,
        }))?;
    } else {
        out.line(format!("n            {}", st.n))?;
        out.line(format!("mu           {:?}", st.mu))?;
        out.line(format!("sigma        {:?}", st.sigma()))?;
        out.line(format!("lower        {}", show(r.lower)))?;
        out.line(format!("n!*dd        {}", show(r.value)))?;
        out.line(format!("upper        {}", show(r.upper)))?;
        out.line(format!("slack_lower  {:e}", r.slack_lower))?;
        out.line(format!("slack_upper  {:e}", r.slack_upper))?;
        out.line(if r.pass { "PASS" } else { "FAIL" })?;
    }
    Ok(Outcome::from_pass(r.pass))
}

fn show(v: expdd::ScaledValue) -> String {
    match v.to_f64_checked() {
        Some(x) => format!("{x:?}"),
        None => v.to_string(),
    }
}
