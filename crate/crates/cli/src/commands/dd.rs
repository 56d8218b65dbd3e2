use expdd::{dd_exp, dd_exp_factorial};
use serde_json::json;

use crate::args::DdArgs;
use crate::error::{CliError, Outcome};
use crate::input;
use crate::output::{decimal, decimals, Emitter};

pub fn run(args: &DdArgs, out: &mut Emitter) -> Result<Outcome, CliError> {
    if !args.t.is_finite() {
        return Err(CliError::usage(format!("t must be finite, got {}", args.t)));
    }
    let nodes = input::collect(&args.nodes)?;
    let value = if args.factorial && args.t == 1.0 {
        dd_exp_factorial(&nodes)?
    } else if args.factorial {
        let ln_fact: f64 = (1..=nodes.order()).map(|k| (k as f64).ln()).sum();
        dd_exp(&nodes, args.t)?.scale_exp(ln_fact)
    } else {
        dd_exp(&nodes, args.t)?
    };
    let value = value.normalized();
    let plain = value.to_f64_checked();
    if out.is_jsonl() {
        out.record(&json!({
            "nodes": decimals(&nodes.flat()),
            "t": decimal(args.t),
            "factorial": args.factorial,
            "mantissa": value.mantissa(),
            "log_shift": value.log_shift(),
            "value": plain,
        }))?;
    } else {
        out.line(format!("mantissa   {:?}", value.mantissa()))?;
        out.line(format!("log_shift  {}", value.log_shift()))?;
        match plain {
            Some(v) => out.line(format!("value      {v:?}"))?,
            None => out.line(format!("value      {value} (outside f64 range)"))?,
        }
    }
    Ok(Outcome::Pass)
}
