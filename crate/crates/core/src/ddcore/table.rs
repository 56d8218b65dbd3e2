//! Incremental divided-difference tables.

use super::dd_exp_prefixes;
use crate::error::{domain, Result};
use crate::scaled::ScaledValue;

/// Divided differences of `x ↦ e^{tx}` along an ordered node sequence.
///
/// `frontier[j] = e^{t[x_0..x_j]}` and `back[j] = e^{t[x_j..x_q]}`. The back
/// diagonal is what a Newton sweep needs to append a node. Tables are
/// immutable; [`DDTable::append`] returns a new one.
#[derive(Debug, Clone)]
pub struct DDTable {
    nodes: Vec<f64>,
    t: f64,
    shift: f64,
    frontier: Vec<ScaledValue>,
    back: Vec<ScaledValue>,
}

impl DDTable {
    /// Full evaluation of both diagonals by the engine.
    pub fn new(nodes: &[f64], t: f64) -> Result<Self> {
        let frontier = dd_exp_prefixes(nodes, t)?;
        let rev: Vec<f64> = nodes.iter().rev().copied().collect();
        let mut back = dd_exp_prefixes(&rev, t)?;
        back.reverse();
        let shift = nodes.iter().sum::<f64>() / nodes.len() as f64;
        Ok(Self { nodes: nodes.to_vec(), t, shift, frontier, back })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// Mean of the nodes the table was created from.
    pub fn shift(&self) -> f64 {
        self.shift
    }

    pub fn frontier(&self) -> &[ScaledValue] {
        &self.frontier
    }

    /// `e^{t[x_0..x_q]}` over all nodes.
    pub fn value(&self) -> ScaledValue {
        self.frontier[self.frontier.len() - 1]
    }

    /// Appends `x` with one Newton sweep over the back diagonal.
    ///
    /// The sweep carries a running relative error bound. When it passes
    /// [`APPEND_TOLERANCE`], or `x` repeats a stored node that is followed by
    /// different ones, the back diagonal is recomputed by the engine instead.
    pub fn append(&self, x: f64) -> Result<DDTable> {
        if !x.is_finite() {
            return Err(domain(format!("non-finite node {x}")));
        }
        let mut nodes = self.nodes.clone();
        nodes.push(x);
        let back = match self.newton_back(x) {
            Some(back) => back,
            None => {
                let rev: Vec<f64> = nodes.iter().rev().copied().collect();
                let mut back = dd_exp_prefixes(&rev, self.t)?;
                back.reverse();
                back
            }
        };
        let mut frontier = self.frontier.clone();
        frontier.push(back[0]);
        Ok(DDTable { nodes, t: self.t, shift: self.shift, frontier, back })
    }

    fn newton_back(&self, x: f64) -> Option<Vec<ScaledValue>> {
        let q = self.nodes.len() - 1;
        let t = self.t;
        let mut back = vec![ScaledValue::ZERO; q + 2];
        // e^{tx} relative to the table shift keeps the frame near the data
        back[q + 1] = ScaledValue::exp(t * self.shift).scale_exp(t * (x - self.shift));
        let mut err = f64::EPSILON;
        let mut tail_confluent = true;
        for j in (0..=q).rev() {
            let xj = self.nodes[j];
            tail_confluent &= xj == x;
            if xj == x {
                if !tail_confluent {
                    return None;
                }
                // e^{t[x^(m+1)]} = t^m e^{tx} / m!
                back[j] = confluent(x, t, q + 1 - j);
                err = 4.0 * f64::EPSILON;
                continue;
            }
            let (a, b) = (back[j + 1], self.back[j]);
            let diff = a.sub(b);
            if diff.is_zero() {
                return None;
            }
            let amp = |v: ScaledValue| if v.is_zero() { 0.0 } else { (v.ln_abs() - diff.ln_abs()).exp() };
            err = amp(a) * err + amp(b) * ENGINE_TOLERANCE + 2.0 * f64::EPSILON;
            if err > APPEND_TOLERANCE {
                return None;
            }
            back[j] = diff.mul_f64(1.0 / (x - xj));
        }
        Some(back)
    }
}

/// Relative error assumed for engine values in the append error bound.
const ENGINE_TOLERANCE: f64 = 1e-14;
/// Largest propagated error bound accepted from a Newton sweep.
pub const APPEND_TOLERANCE: f64 = 1e-12;

fn confluent(x: f64, t: f64, m: usize) -> ScaledValue {
    if t == 0.0 {
        return if m == 0 { ScaledValue::ONE } else { ScaledValue::ZERO };
    }
    let ln_fact: f64 = (1..=m).map(|k| (k as f64).ln()).sum();
    let sign = if t < 0.0 && m % 2 == 1 { -1.0 } else { 1.0 };
    ScaledValue::from_ln(sign, t * x + m as f64 * t.abs().ln() - ln_fact)
}

/// Functional form of [`DDTable::append`].
pub fn dd_append(table: &DDTable, x: f64) -> Result<DDTable> {
    table.append(x)
}
