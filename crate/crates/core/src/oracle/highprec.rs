//! Confluent Newton divided-difference tables in extended precision.

use astro_float::{BigFloat, Consts, RoundingMode};

use crate::error::{argument, DdError, Result};
use crate::nodes::NodeMultiset;
use crate::scaled::ScaledValue;

const RM: RoundingMode = RoundingMode::ToEven;
const MAX_WORKING_BITS: usize = 1 << 16;

/// An arbitrary-precision real carrying its own precision.
#[derive(Debug, Clone)]
pub struct Extended {
    value: BigFloat,
    bits: usize,
}

impl Extended {
    pub fn from_f64(x: f64, bits: usize) -> Self {
        Self { value: BigFloat::from_f64(x, bits), bits }
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn add(&self, o: &Extended) -> Extended {
        let bits = self.bits.max(o.bits);
        Self { value: self.value.add(&o.value, bits, RM), bits }
    }

    pub fn sub(&self, o: &Extended) -> Extended {
        let bits = self.bits.max(o.bits);
        Self { value: self.value.sub(&o.value, bits, RM), bits }
    }

    pub fn mul(&self, o: &Extended) -> Extended {
        let bits = self.bits.max(o.bits);
        Self { value: self.value.mul(&o.value, bits, RM), bits }
    }

    pub fn signum(&self) -> f64 {
        if self.value.is_zero() {
            0.0
        } else if self.value.is_negative() {
            -1.0
        } else {
            1.0
        }
    }

    /// Rounds to a [`ScaledValue`] (the binary exponent is kept exactly).
    pub fn to_scaled(&self) -> ScaledValue {
        if self.value.is_zero() {
            return ScaledValue::ZERO;
        }
        let e = self.value.exponent().unwrap_or(0) as i64;
        let mut m = self.value.clone();
        m.set_exponent(0);
        let mf: f64 = m.to_string().parse().unwrap_or(f64::NAN);
        ScaledValue::from_binary(mf, e)
    }

    /// `|self - other| / |other|` expressed as `-log2` (bits of agreement).
    pub fn agreement_bits(&self, other: &Extended) -> f64 {
        let bits = self.bits.max(other.bits);
        let d = self.value.sub(&other.value, bits, RM);
        if d.is_zero() {
            return bits as f64;
        }
        let rel = d.div(&other.value, bits, RM);
        let e = rel.exponent().unwrap_or(0) as f64;
        let mut m = rel.abs();
        m.set_exponent(0);
        let mf: f64 = m.to_string().parse().unwrap_or(1.0);
        -(mf.log2() + e)
    }
}

/// Guard bits covering the cancellation of the distinct-node divisions.
fn guard_bits(flat: &[f64]) -> usize {
    let q = flat.len() - 1;
    if q == 0 {
        return 32;
    }
    let spread = flat[q] - flat[0];
    let min_gap = flat
        .windows(2)
        .map(|w| w[1] - w[0])
        .filter(|&g| g > 0.0)
        .fold(f64::INFINITY, f64::min);
    let per_level = if min_gap.is_finite() { (2.0 / min_gap).log2().max(1.0) } else { 1.0 };
    let log2_fact: f64 = (1..=q).map(|k| (k as f64).log2()).sum();
    let g = 32.0 + 1.45 * spread + log2_fact + q as f64 * per_level.ceil();
    (g.ceil() as usize).min(MAX_WORKING_BITS)
}

/// `exp[x_0..x_n]` by a confluent Newton table at `precision_bits`.
pub fn newton_highprec(nodes: &NodeMultiset, precision_bits: usize) -> Result<ScaledValue> {
    Ok(newton_highprec_ext(nodes, precision_bits)?.to_scaled())
}

/// [`newton_highprec`] without the final rounding.
///
/// Nodes are sorted, so `x_i = x_j` implies every node between them is equal
/// and the entry is `e^{x_i} / (j-i)!`. Otherwise the entry is the usual
/// quotient of neighbouring entries by `x_j - x_i`, an exact-input
/// subtraction at the working precision.
pub fn newton_highprec_ext(nodes: &NodeMultiset, precision_bits: usize) -> Result<Extended> {
    if precision_bits < 64 {
        return Err(argument(format!("precision {precision_bits} below 64 bits")));
    }
    let flat = nodes.flat();
    let bits = precision_bits + guard_bits(&flat);
    let mut cc = Consts::new().map_err(|e| DdError::Range(format!("constant cache: {e:?}")))?;
    let xs: Vec<BigFloat> = flat.iter().map(|&x| BigFloat::from_f64(x, bits)).collect();
    let ex: Vec<BigFloat> = xs.iter().map(|x| x.exp(bits, RM, &mut cc)).collect();
    let mut d = ex.clone();
    let q = flat.len() - 1;
    let mut inv_fact = BigFloat::from_word(1, bits);
    for level in 1..=q {
        inv_fact = inv_fact.div(&BigFloat::from_word(level as u64, bits), bits, RM);
        for i in 0..=(q - level) {
            let j = i + level;
            d[i] = if flat[i] == flat[j] {
                ex[i].mul(&inv_fact, bits, RM)
            } else {
                let num = d[i + 1].sub(&d[i], bits, RM);
                let den = xs[j].sub(&xs[i], bits, RM);
                num.div(&den, bits, RM)
            };
        }
    }
    let value = d.swap_remove(0);
    if value.is_nan() || value.is_inf() {
        return Err(DdError::Range("extended-precision overflow".into()));
    }
    Ok(Extended { value, bits: precision_bits })
}
