//! The kernel `K(x, y) = exp[a_1..a_n, x^(p), y^(q)]`.

use crate::ddcore::dd_exp;
use crate::error::{argument, Result};
use crate::nodes::NodeMultiset;
use crate::scaled::ScaledValue;

use super::{Margin, MarginKind, DEFAULT_TOLERANCE};

#[derive(Debug, Clone, PartialEq)]
pub struct KernelSpec {
    prefix: Vec<f64>,
    p: usize,
    q: usize,
}

impl KernelSpec {
    /// The prefix is stored sorted; divided differences ignore node order.
    pub fn new(prefix: &[f64], p: usize, q: usize) -> Result<Self> {
        if p == 0 || q == 0 {
            return Err(argument("kernel multiplicities p, q must be at least 1"));
        }
        if let Some(bad) = prefix.iter().find(|x| !x.is_finite()) {
            return Err(crate::error::domain(format!("non-finite prefix node {bad}")));
        }
        let mut prefix = prefix.to_vec();
        prefix.sort_by(f64::total_cmp);
        Ok(Self { prefix, p, q })
    }

    pub fn prefix(&self) -> &[f64] {
        &self.prefix
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.q
    }

    /// The same kernel with `p` and `q` each raised by one.
    pub fn bumped(&self) -> KernelSpec {
        Self { prefix: self.prefix.clone(), p: self.p + 1, q: self.q + 1 }
    }

    pub fn nodes(&self, x: f64, y: f64) -> Result<NodeMultiset> {
        let mut flat = self.prefix.clone();
        flat.extend(std::iter::repeat_n(x, self.p));
        flat.extend(std::iter::repeat_n(y, self.q));
        NodeMultiset::from_flat(&flat)
    }
}

pub fn kernel_eval(spec: &KernelSpec, x: f64, y: f64) -> Result<ScaledValue> {
    dd_exp(&spec.nodes(x, y)?, 1.0)
}

fn check_rectangle(x1: f64, x2: f64, y1: f64, y2: f64) -> Result<()> {
    if !(x1 <= x2 && y1 <= y2) {
        return Err(argument(format!("rectangle needs x1 ≤ x2 and y1 ≤ y2, got ({x1}, {x2}) × ({y1}, {y2})")));
    }
    Ok(())
}

struct Corners {
    k11: ScaledValue,
    k12: ScaledValue,
    k21: ScaledValue,
    k22: ScaledValue,
}

fn corners(spec: &KernelSpec, x1: f64, x2: f64, y1: f64, y2: f64) -> Result<Corners> {
    check_rectangle(x1, x2, y1, y2)?;
    Ok(Corners {
        k11: kernel_eval(spec, x1, y1)?,
        k12: kernel_eval(spec, x1, y2)?,
        k21: kernel_eval(spec, x2, y1)?,
        k22: kernel_eval(spec, x2, y2)?,
    })
}

/// `ln K(x1,y2) + ln K(x2,y1) - ln K(x1,y1) - ln K(x2,y2)`.
///
/// Terms are paired so that a degenerate rectangle cancels bit-exactly.
pub fn tn2_margin(spec: &KernelSpec, x1: f64, x2: f64, y1: f64, y2: f64) -> Result<Margin> {
    let c = corners(spec, x1, x2, y1, y2)?;
    let value = (c.k12.ln_abs() - c.k22.ln_abs()) + (c.k21.ln_abs() - c.k11.ln_abs());
    Ok(Margin::new(MarginKind::Tn2, value, 1.0, vec![x1, x2, y1, y2], None))
}

/// `K(x1,y1) + K(x2,y2) - K(x1,y2) - K(x2,y1)` in the frame of the largest
/// corner; `pass` is decided in that frame so it stays meaningful when the
/// corners overflow `f64`.
pub fn supermodular_margin(spec: &KernelSpec, x1: f64, x2: f64, y1: f64, y2: f64) -> Result<Margin> {
    let c = corners(spec, x1, x2, y1, y2)?;
    let all = [c.k11, c.k12, c.k21, c.k22];
    let frame = ScaledValue::common_frame(&all);
    let [k11, k12, k21, k22] = all.map(|k| k.in_frame(frame));
    let value = (k11 - k21) + (k22 - k12);
    let scale = [k11, k12, k21, k22].iter().fold(0.0f64, |m, k| m.max(k.abs()));
    let pass = value >= -DEFAULT_TOLERANCE * scale;
    let unframe = |v: f64| ScaledValue::from_parts(v, frame).map_or(v, |s| s.to_f64());
    Ok(Margin {
        value: unframe(value),
        scale: unframe(scale),
        kind: MarginKind::Supermodular,
        inputs: vec![x1, x2, y1, y2],
        alternate: None,
        pass,
    })
}
