//! Closed-form identities as residual evaluators.
//!
//! Notation: `e^{t[x_0..x_q]}` is the divided difference of `x ↦ e^{tx}`.
//! Identities that single out `x_0` or split the node list take an ordered
//! slice; the order given is the order used.

mod quadrature;

pub use quadrature::{gauss_legendre, integrate};

use crate::ddcore::{dd_exp_flat, dd_exp_prefixes, TwoSum};
use crate::error::{argument, Result};
use crate::scaled::ScaledValue;

/// Denominator floor for relative residuals.
pub const RESIDUAL_FLOOR: f64 = f64::MIN_POSITIVE * 1e10;
pub const DEFAULT_TOLERANCE: f64 = 1e-8;
pub const FINITE_DIFFERENCE_TOLERANCE: f64 = 1e-7;
pub const DEFAULT_QUAD_POINTS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residual {
    pub lhs: f64,
    pub rhs: f64,
    pub abs_residual: f64,
    pub rel_residual: f64,
    pub pass: bool,
}

impl Residual {
    pub fn new(lhs: f64, rhs: f64, tolerance: f64) -> Self {
        let abs_residual = (lhs - rhs).abs();
        let rel_residual = if abs_residual == 0.0 {
            0.0
        } else {
            abs_residual / lhs.abs().max(rhs.abs()).max(RESIDUAL_FLOOR)
        };
        Residual { lhs, rhs, abs_residual, rel_residual, pass: rel_residual <= tolerance }
    }

    pub fn passes(&self, tolerance: f64) -> bool {
        self.rel_residual <= tolerance
    }
}

fn dd(nodes: &[f64], t: f64) -> Result<f64> {
    Ok(dd_exp_flat(nodes, t)?.to_f64())
}

fn check_nodes(nodes: &[f64]) -> Result<()> {
    if nodes.is_empty() {
        return Err(argument("node list is empty"));
    }
    Ok(())
}

fn appended(nodes: &[f64], extra: &[f64]) -> Vec<f64> {
    let mut v = nodes.to_vec();
    v.extend_from_slice(extra);
    v
}

/// `∫_0^β e^{-τ[x_{j+1}..x_q]} e^{-(β-τ)[x_0..x_j]} dτ = -e^{-β[x_0..x_q]}`
pub fn convolution_residual(nodes: &[f64], j: usize, beta: f64, quad_points: usize) -> Result<Residual> {
    check_nodes(nodes)?;
    let q = nodes.len() - 1;
    if j >= q {
        return Err(argument(format!("split index {j} must be below q = {q}")));
    }
    if !(beta >= 0.0) || !beta.is_finite() {
        return Err(argument(format!("beta must be finite and nonnegative, got {beta}")));
    }
    if quad_points < 8 {
        return Err(argument("at least 8 quadrature points are required"));
    }
    let (head, tail) = nodes.split_at(j + 1);
    let lhs = integrate(quad_points, 0.0, beta, |tau| Ok(dd(tail, -tau)? * dd(head, -(beta - tau))?))?;
    let rhs = -dd(nodes, -beta)?;
    Ok(Residual::new(lhs, rhs, DEFAULT_TOLERANCE))
}

/// `Σ_j e^{-τ[x_0..x_q, x_j]} = -τ e^{-τ[x_0..x_q]}`
pub fn repeated_sum_residual(nodes: &[f64], tau: f64) -> Result<Residual> {
    check_nodes(nodes)?;
    let mut lhs = TwoSum::new(0.0);
    for &xj in nodes {
        lhs.add(dd(&appended(nodes, &[xj]), -tau)?);
    }
    let rhs = -tau * dd(nodes, -tau)?;
    Ok(Residual::new(lhs.value(), rhs, DEFAULT_TOLERANCE))
}

/// `Σ_j x_j e^{-τ[x_0..x_q, x_j]}` against its derivative-free closed form
/// `(-x_0 τ - q) e^{-τ[x_0..x_q]} - τ e^{-τ[x_1..x_q]}` (`-τ x_0 e^{-τ x_0}` at `q = 0`).
pub fn weighted_sum_residual(nodes: &[f64], tau: f64) -> Result<Residual> {
    check_nodes(nodes)?;
    let q = nodes.len() - 1;
    let x0 = nodes[0];
    let mut lhs = TwoSum::new(0.0);
    for &xj in nodes {
        lhs.add(xj * dd(&appended(nodes, &[xj]), -tau)?);
    }
    let rhs = if q == 0 {
        -tau * x0 * (-tau * x0).exp()
    } else {
        let mut r = TwoSum::new((-x0 * tau - q as f64) * dd(nodes, -tau)?);
        r.add(-tau * dd(&nodes[1..], -tau)?);
        r.value()
    };
    Ok(Residual::new(lhs.value(), rhs, DEFAULT_TOLERANCE))
}

/// `∂_τ e^{-τ[x_0..x_q]} = -x_0 e^{-τ[x_0..x_q]} - e^{-τ[x_1..x_q]}` for `q > 0`,
/// with the derivative taken by central differences of width `fd_step`.
pub fn parametric_derivative_residual(nodes: &[f64], tau: f64, fd_step: f64) -> Result<Residual> {
    check_nodes(nodes)?;
    if nodes.len() < 2 {
        return Err(argument("the parametric derivative identity needs q > 0"));
    }
    if !(fd_step > 0.0) || !fd_step.is_finite() {
        return Err(argument(format!("finite-difference step must be positive, got {fd_step}")));
    }
    let lhs = (dd(nodes, -(tau + fd_step))? - dd(nodes, -(tau - fd_step))?) / (2.0 * fd_step);
    let rhs = -nodes[0] * dd(nodes, -tau)? - dd(&nodes[1..], -tau)?;
    Ok(Residual::new(lhs, rhs, FINITE_DIFFERENCE_TOLERANCE))
}

/// `Σ_{i≤j} x_i e^{-τ[x_0..x_q, x_i, x_j]}` against
/// `(τ² x_0/2) e^{-τ[x_0..x_q]} + (τ²/2) e^{-τ[x_1..x_q]} - Σ_{i≥1} i·e^{-τ[x_0..x_q, x_i]}`
/// (`(τ² x_0/2) e^{-τ x_0}` at `q = 0`).
pub fn double_sum_residual(nodes: &[f64], tau: f64) -> Result<Residual> {
    check_nodes(nodes)?;
    let q = nodes.len() - 1;
    let mut lhs = TwoSum::new(0.0);
    for (i, &xi) in nodes.iter().enumerate() {
        for &xj in &nodes[i..] {
            lhs.add(xi * dd(&appended(nodes, &[xi, xj]), -tau)?);
        }
    }
    let t2 = tau * tau / 2.0;
    let x0 = nodes[0];
    let rhs = if q == 0 {
        t2 * x0 * (-tau * x0).exp()
    } else {
        let mut r = TwoSum::new(t2 * x0 * dd(nodes, -tau)?);
        r.add(t2 * dd(&nodes[1..], -tau)?);
        for (i, &xi) in nodes.iter().enumerate().skip(1) {
            r.add(-(i as f64) * dd(&appended(nodes, &[xi]), -tau)?);
        }
        r.value()
    };
    Ok(Residual::new(lhs.value(), rhs, DEFAULT_TOLERANCE))
}

/// `e^{(t1+t2)[x_0..x_q]} = Σ_j e^{t1[x_0..x_j]} e^{t2[x_j..x_q]}`
pub fn leibniz_residual(nodes: &[f64], t1: f64, t2: f64) -> Result<Residual> {
    check_nodes(nodes)?;
    let heads = dd_exp_prefixes(nodes, t1)?;
    let reversed: Vec<f64> = nodes.iter().rev().copied().collect();
    let mut tails = dd_exp_prefixes(&reversed, t2)?;
    tails.reverse();
    let mut rhs = TwoSum::new(0.0);
    for (f, g) in heads.iter().zip(&tails) {
        rhs.add((*f * *g).to_f64());
    }
    let lhs = dd(nodes, t1 + t2)?;
    Ok(Residual::new(lhs, rhs.value(), DEFAULT_TOLERANCE))
}

/// `α^q e^{t[αx_0..αx_q]} = e^{αt[x_0..x_q]}`
pub fn rescaling_residual(nodes: &[f64], alpha: f64, t: f64) -> Result<Residual> {
    check_nodes(nodes)?;
    if alpha == 0.0 || !alpha.is_finite() {
        return Err(argument(format!("alpha must be finite and nonzero, got {alpha}")));
    }
    let q = nodes.len() - 1;
    let scaled: Vec<f64> = nodes.iter().map(|x| alpha * x).collect();
    let lhs = dd_exp_flat(&scaled, t)? * ScaledValue::from_f64(alpha).powi(q as i32);
    let rhs = dd_exp_flat(nodes, alpha * t)?;
    Ok(Residual::new(lhs.to_f64(), rhs.to_f64(), DEFAULT_TOLERANCE))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn convolution_examples() {
        let r = convolution_residual(&[0.0, 1.0], 0, 1.0, 64).unwrap();
        assert_relative_eq!(r.lhs, 1.0 - (-1.0f64).exp(), max_relative = 1e-14);
        assert_relative_eq!(r.rhs, 1.0 - (-1.0f64).exp(), max_relative = 1e-14);
        let r = convolution_residual(&[0.5, -1.0, 2.0], 1, 0.0, 16).unwrap();
        assert_eq!((r.lhs, r.rhs, r.rel_residual), (0.0, 0.0, 0.0));
        assert!(r.pass);
        assert!(convolution_residual(&[0.0, 1.0], 1, 1.0, 64).is_err());
        assert!(convolution_residual(&[0.0, 1.0], 0, 1.0, 4).is_err());
    }

    #[test]
    fn repeated_sum_examples() {
        let r = repeated_sum_residual(&[0.0], 1.0).unwrap();
        assert_relative_eq!(r.lhs, -1.0, max_relative = 1e-15);
        assert_relative_eq!(r.rhs, -1.0, max_relative = 1e-15);
        let r = repeated_sum_residual(&[0.3, -2.0, 1.0], 0.0).unwrap();
        assert_eq!(r.lhs, 0.0);
        assert!(r.pass);
    }

    #[test]
    fn weighted_sum_examples() {
        let r = weighted_sum_residual(&[2.0], 1.0).unwrap();
        assert_relative_eq!(r.lhs, -2.0 * (-2.0f64).exp(), max_relative = 1e-15);
        assert!(r.pass);
        let r = weighted_sum_residual(&[0.0, 0.0, 0.0, 0.0], 0.8).unwrap();
        assert_eq!(r.lhs, 0.0);
        // -q·(-τ)^q/q! - τ·(-τ)^{q-1}/(q-1)! with q = 3
        let tau: f64 = 0.8;
        let expected = -3.0 * (-tau).powi(3) / 6.0 - tau * (-tau).powi(2) / 2.0;
        assert!((r.rhs - expected).abs() <= 1e-15);
    }

    #[test]
    fn parametric_derivative_examples() {
        let r = parametric_derivative_residual(&[0.0, 1.0], 1.0, 1e-5).unwrap();
        assert_relative_eq!(r.rhs, -(-1.0f64).exp(), max_relative = 1e-14);
        assert!(r.rel_residual <= 1e-9, "{r:?}");
        assert!(parametric_derivative_residual(&[1.0], 1.0, 1e-5).is_err());
    }

    #[test]
    fn double_sum_examples() {
        let r = double_sum_residual(&[1.0], 2.0).unwrap();
        assert_relative_eq!(r.lhs, 2.0 * (-2.0f64).exp(), max_relative = 1e-15);
        assert_relative_eq!(r.rhs, 2.0 * (-2.0f64).exp(), max_relative = 1e-15);
        let r = double_sum_residual(&[0.0], 2.0).unwrap();
        assert_eq!((r.lhs, r.rhs), (0.0, 0.0));
    }

    #[test]
    fn leibniz_examples() {
        let e = std::f64::consts::E;
        let r = leibniz_residual(&[0.0, 1.0], 1.0, 1.0).unwrap();
        assert_relative_eq!(r.lhs, e * e - 1.0, max_relative = 1e-14);
        assert_relative_eq!(r.rhs, e * e - 1.0, max_relative = 1e-14);
        let r = leibniz_residual(&[0.4, -0.3, 1.5, 2.0], 0.7, 0.0).unwrap();
        assert!(r.rel_residual <= 1e-14);
    }

    #[test]
    fn rescaling_examples() {
        let r = rescaling_residual(&[0.2, 1.4, -0.6], 1.0, 0.9).unwrap();
        assert_eq!(r.abs_residual, 0.0);
        // -e^{[0,-1]} = e^{-[0,1]} = -(1 - e^{-1})
        let r = rescaling_residual(&[0.0, 1.0], -1.0, 1.0).unwrap();
        assert_relative_eq!(r.lhs, (-1.0f64).exp() - 1.0, max_relative = 1e-14);
        assert!(r.pass);
        assert!(rescaling_residual(&[0.0, 1.0], 0.0, 1.0).is_err());
    }
}
