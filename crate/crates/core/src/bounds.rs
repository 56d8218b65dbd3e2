//! Mean/variance sandwich bounds for `n!·exp[x_0..x_n]`, the lower incomplete
//! gamma function they are built from, and large-`n` asymptotics.
//!
//! With `μ`, `σ²` the mean and population variance of the nodes,
//! `a_0 = √n·σ` and `a = (n+1)σ/√n`:
//!
//! ```text
//! e^μ L_n(σ) ≤ n!·exp[x_0..x_n] ≤ e^μ M_n(σ)
//! L_n(σ) = e^{-a_0} Σ_m n/(n+m) · a^m/m!
//! M_n(σ) = e^{a_0-a} Σ_k a^k / ((n+1)(n+2)…(n+k))
//! ```
//!
//! Both sums have positive terms and are evaluated in the log domain.

use crate::ddcore::{dd_exp_factorial, TwoSum};
use crate::error::{argument, DdError, Result};
use crate::nodes::NodeMultiset;
use crate::scaled::ScaledValue;

const TRUNCATION: f64 = 1e-16;
const MAX_TERMS: usize = 100_000;
const RESCALE: f64 = 1e250;

/// Order, mean and population variance of a node multiset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SummaryStats {
    pub n: usize,
    pub mu: f64,
    pub sigma2: f64,
    pub a0: f64,
    pub a: f64,
}

impl SummaryStats {
    pub fn sigma(&self) -> f64 {
        self.sigma2.sqrt()
    }
}

fn scale_params(n: usize, sigma: f64) -> (f64, f64) {
    let rn = (n as f64).sqrt();
    (rn * sigma, (n + 1) as f64 * sigma / rn)
}

pub fn summary(nodes: &NodeMultiset) -> Result<SummaryStats> {
    let n = nodes.order();
    if n == 0 {
        return Err(argument("summary statistics need at least two nodes"));
    }
    let count = (n + 1) as f64;
    let mut s = TwoSum::new(0.0);
    for &(x, m) in nodes.entries() {
        s.add(x * m as f64);
    }
    let mu = s.value() / count;
    let mut v = TwoSum::new(0.0);
    for &(x, m) in nodes.entries() {
        let d = x - mu;
        v.add(d * d * m as f64);
    }
    let sigma2 = v.value() / count;
    let (a0, a) = scale_params(n, sigma2.sqrt());
    Ok(SummaryStats { n, mu, sigma2, a0, a })
}

/// `ln Σ_k w(k)·t_k` with `t_0 = 1`, `t_k = t_{k-1}·ratio(k)`.
///
/// `ratio` must eventually drop below 1 and `weight` must be nonincreasing.
fn ln_series(ratio: impl Fn(usize) -> f64, weight: impl Fn(usize) -> f64) -> Result<f64> {
    let mut t = 1.0;
    let mut sum = weight(0);
    let mut shift = 0.0;
    for k in 1..MAX_TERMS {
        let r = ratio(k);
        t *= r;
        let term = weight(k) * t;
        sum += term;
        if r < 1.0 && term <= TRUNCATION * sum {
            return Ok(sum.ln() + shift);
        }
        if t > RESCALE {
            t /= RESCALE;
            sum /= RESCALE;
            shift += RESCALE.ln();
        }
    }
    Err(DdError::Convergence(format!("series did not converge in {MAX_TERMS} terms")))
}

/// `ln L_n(σ)`.
pub fn ln_bound_l(n: usize, sigma: f64) -> Result<f64> {
    check_bound_args(n, sigma)?;
    if sigma == 0.0 {
        return Ok(0.0);
    }
    let (a0, a) = scale_params(n, sigma);
    let nf = n as f64;
    Ok(-a0 + ln_series(|m| a / m as f64, |m| nf / (nf + m as f64))?)
}

/// `ln M_n(σ)`.
pub fn ln_bound_m(n: usize, sigma: f64) -> Result<f64> {
    check_bound_args(n, sigma)?;
    if sigma == 0.0 {
        return Ok(0.0);
    }
    let (a0, a) = scale_params(n, sigma);
    let nf = n as f64;
    Ok(a0 - a + ln_series(|k| a / (nf + k as f64), |_| 1.0)?)
}

#[allow(non_snake_case)]
pub fn bound_L(n: usize, sigma: f64) -> Result<f64> {
    Ok(ln_bound_l(n, sigma)?.exp())
}

#[allow(non_snake_case)]
pub fn bound_M(n: usize, sigma: f64) -> Result<f64> {
    Ok(ln_bound_m(n, sigma)?.exp())
}

fn check_bound_args(n: usize, sigma: f64) -> Result<()> {
    if n < 1 {
        return Err(argument("order must be at least 1"));
    }
    if !(sigma >= 0.0) || !sigma.is_finite() {
        return Err(argument(format!("sigma must be finite and nonnegative, got {sigma}")));
    }
    Ok(())
}

/// `γ(n, z)` as a [`ScaledValue`], valid for either sign of `z`.
///
/// ```text
/// z < 0:  γ(n,z) = z^n Σ_m |z|^m / ((n+m)·m!)
/// z > 0:  γ(n,z) = z^n e^{-z} Σ_k z^k / (n(n+1)…(n+k))
/// ```
pub fn ln_lower_incomplete_gamma(n: usize, z: f64) -> Result<ScaledValue> {
    let (sign, prefix, ln_sum) = gamma_parts(n, z)?;
    if prefix == f64::NEG_INFINITY {
        return Ok(ScaledValue::ZERO);
    }
    Ok(ScaledValue::from_ln(sign, prefix + ln_sum))
}

fn gamma_parts(n: usize, z: f64) -> Result<(f64, f64, f64)> {
    if n < 1 {
        return Err(argument("gamma order must be at least 1"));
    }
    if !z.is_finite() {
        return Err(crate::error::domain(format!("gamma argument {z} is not finite")));
    }
    if z == 0.0 {
        return Ok((0.0, f64::NEG_INFINITY, 0.0));
    }
    let nf = n as f64;
    let x = z.abs();
    let sign = if z < 0.0 && n % 2 == 1 { -1.0 } else { 1.0 };
    if z < 0.0 {
        let s = ln_series(|m| x / m as f64, |m| 1.0 / (nf + m as f64))?;
        Ok((sign, nf * x.ln(), s))
    } else {
        let s = ln_series(|k| x / (nf + k as f64), |_| 1.0 / nf)?;
        Ok((sign, nf * x.ln() - x, s))
    }
}

pub fn lower_incomplete_gamma(n: usize, z: f64) -> Result<f64> {
    let (sign, prefix, ln_sum) = gamma_parts(n, z)?;
    if sign == 0.0 {
        return Ok(0.0);
    }
    // Direct products keep the relative error independent of |ln γ|.
    if let Ok(k) = i32::try_from(n) {
        let damp = if z > 0.0 { (-z).exp() } else { 1.0 };
        let direct = z.powi(k) * damp * ln_sum.exp();
        if direct.is_normal() {
            return Ok(direct);
        }
    }
    Ok(sign * (prefix + ln_sum).exp())
}

/// Which bound an extremal two-level configuration attains.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Upper,
    Lower,
}

/// The two-level node set attaining `M_n` (upper) or `L_n` (lower) at the
/// given mean and standard deviation.
pub fn extremal_config(n: usize, mu: f64, sigma: f64, side: Side) -> Result<NodeMultiset> {
    check_bound_args(n, sigma)?;
    let (a0, _) = scale_params(n, sigma);
    let s = match side {
        Side::Upper => 1.0,
        Side::Lower => -1.0,
    };
    NodeMultiset::from_pairs(&[(mu + s * a0, 1), (mu - s * a0 / n as f64, n)])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SandwichReport {
    /// `e^μ·L_n(σ)`
    pub lower: ScaledValue,
    /// `n!·exp[x_0..x_n]`
    pub value: ScaledValue,
    /// `e^μ·M_n(σ)`
    pub upper: ScaledValue,
    pub slack_lower: f64,
    pub slack_upper: f64,
    pub pass: bool,
}

pub fn sandwich_check(nodes: &NodeMultiset, tolerance: f64) -> Result<SandwichReport> {
    let st = summary(nodes)?;
    let sigma = st.sigma();
    let ln_l = st.mu + ln_bound_l(st.n, sigma)?;
    let ln_m = st.mu + ln_bound_m(st.n, sigma)?;
    let value = dd_exp_factorial(nodes)?;
    let ln_v = value.ln_abs();
    let slack_lower = ln_v - ln_l;
    let slack_upper = ln_m - ln_v;
    Ok(SandwichReport {
        lower: ScaledValue::from_ln(1.0, ln_l),
        value,
        upper: ScaledValue::from_ln(1.0, ln_m),
        slack_lower,
        slack_upper,
        pass: slack_lower >= -tolerance && slack_upper >= -tolerance,
    })
}

/// `exp(μ + σ²/(2n))`, the large-`n` estimate of `n!·exp[x_0..x_n]`.
pub fn asymptotic_estimate(nodes: &NodeMultiset) -> Result<ScaledValue> {
    let st = summary(nodes)?;
    Ok(ScaledValue::exp(st.mu + st.sigma2 / (2.0 * st.n as f64)))
}

/// Three-term expansions `1 + σ²/(2n) ∓ σ³/(3n^{3/2})` of `(L_n, M_n)`.
pub fn bound_expansion(n: usize, sigma: f64) -> Result<(f64, f64)> {
    check_bound_args(n, sigma)?;
    let nf = n as f64;
    let base = 1.0 + sigma * sigma / (2.0 * nf);
    let cubic = sigma.powi(3) / (3.0 * nf.powf(1.5));
    Ok((base - cubic, base + cubic))
}
