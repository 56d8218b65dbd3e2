//! Divided differences of `x ↦ e^{tx}` over real node multisets.

mod engine;
mod table;

pub(crate) use engine::{factorials, TwoSum};
pub use table::{dd_append, DDTable};

use crate::error::{domain, DdError, Result};
use crate::nodes::NodeMultiset;
use crate::scaled::ScaledValue;

/// `e^{t[x_0, ..., x_q]}`, the divided difference of `x ↦ e^{tx}`.
///
/// Strictly positive for `t > 0`; for `t < 0` the sign is `(-1)^q`, and for
/// `t = 0` the value is `1` on a single node and `0` otherwise. The result is
/// a function of the multiset only: the input is canonicalized by sorting.
pub fn dd_exp(nodes: &NodeMultiset, t: f64) -> Result<ScaledValue> {
    let flat = nodes.flat();
    let values = prefixes_sorted(&flat, t)?;
    Ok(values[values.len() - 1])
}

/// [`dd_exp`] on a flat node list.
pub fn dd_exp_flat(nodes: &[f64], t: f64) -> Result<ScaledValue> {
    dd_exp(&NodeMultiset::from_flat(nodes)?, t)
}

/// `n! · exp[x_0, ..., x_n]` (scale `t = 1`).
///
/// Skips the `1/n!` factor entirely, so for `n+1` copies of `x` the result is
/// `e^x` up to the rounding of the exponential.
pub fn dd_exp_factorial(nodes: &NodeMultiset) -> Result<ScaledValue> {
    let flat = nodes.flat();
    let ev = engine::evolve(&flat)?;
    let n = flat.len() - 1;
    let (m, e) = ev.factorial_scaled(n);
    finite(ScaledValue::from_binary(m, e).scale_exp(ev.mu))
}

/// Splits `nodes` into `mu + centered` with `centered` of mean zero.
///
/// `dd_exp(nodes, 1) = e^mu · dd_exp(centered, 1)`.
pub fn shift_normalize(nodes: &NodeMultiset) -> (NodeMultiset, f64) {
    let flat = nodes.flat();
    let mu = engine::mean(&flat);
    let centered: Vec<f64> = flat.iter().map(|&x| x - mu).collect();
    let centered = NodeMultiset::from_flat(&centered).expect("centering keeps nodes finite");
    (centered, mu)
}

/// `e^{t[x_0..x_i]}` for every prefix `i = 0..=q` of an ordered node sequence.
pub fn dd_exp_prefixes(seq: &[f64], t: f64) -> Result<Vec<ScaledValue>> {
    check_scale(t)?;
    if let Some(bad) = seq.iter().find(|x| !x.is_finite()) {
        return Err(domain(format!("non-finite node {bad}")));
    }
    if seq.is_empty() {
        return Err(DdError::Argument("node list is empty".into()));
    }
    if t == 0.0 {
        let mut out = vec![ScaledValue::ZERO; seq.len()];
        out[0] = ScaledValue::ONE;
        return Ok(out);
    }
    let z: Vec<f64> = seq.iter().map(|&x| t * x).collect();
    let ev = engine::evolve(&z)?;
    let facts = factorials(seq.len() - 1);
    let ln_t = t.abs().ln();
    let mut out = Vec::with_capacity(seq.len());
    for (i, &(fm, fe)) in facts.iter().enumerate().take(ev.len()) {
        let (m, e) = ev.factorial_scaled(i);
        let sign = if t < 0.0 && i % 2 == 1 { -1.0 } else { 1.0 };
        let v = ScaledValue::from_binary(sign * m / fm, e - fe).scale_exp(ev.mu + i as f64 * ln_t);
        out.push(finite(v)?);
    }
    Ok(out)
}

fn prefixes_sorted(sorted_flat: &[f64], t: f64) -> Result<Vec<ScaledValue>> {
    if t < 0.0 {
        // keep the evaluated sequence ascending in t·x
        let rev: Vec<f64> = sorted_flat.iter().rev().copied().collect();
        dd_exp_prefixes(&rev, t)
    } else {
        dd_exp_prefixes(sorted_flat, t)
    }
}

fn check_scale(t: f64) -> Result<()> {
    if t.is_finite() {
        Ok(())
    } else {
        Err(domain(format!("non-finite scale t = {t}")))
    }
}

fn finite(v: ScaledValue) -> Result<ScaledValue> {
    ScaledValue::from_parts(v.mantissa(), v.log_shift())
}
