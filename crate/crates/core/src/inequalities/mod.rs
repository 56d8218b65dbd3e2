//! Inequalities for exponential divided differences as computable margins.
//!
//! Every check returns a [`Margin`]: a value the underlying theorem says is
//! nonnegative, together with the magnitude of the largest term that went
//! into it so that roundoff can be judged relative to the inputs.

mod fourpoint;
mod kernel;

use std::fmt;

pub use fourpoint::{
    four_point_f, four_point_h_form, h, h_product_margin, phi, phi_product_margin, triangle_h_margin, FOUR_POINT_GROUP,
};
pub use kernel::{kernel_eval, supermodular_margin, tn2_margin, KernelSpec};

/// Relative tolerance applied by [`Margin::pass`] unless a caller re-checks.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MarginKind {
    Tn2,
    Supermodular,
    FourPoint,
    TriangleH,
    PhiProduct,
    HProduct,
}

impl MarginKind {
    pub fn name(self) -> &'static str {
        match self {
            MarginKind::Tn2 => "tn2",
            MarginKind::Supermodular => "supermodular",
            MarginKind::FourPoint => "four_point",
            MarginKind::TriangleH => "triangle_h",
            MarginKind::PhiProduct => "phi_product",
            MarginKind::HProduct => "h_product",
        }
    }

    /// Whether [`Margin::value`] is a difference of logarithms.
    pub fn is_log_domain(self) -> bool {
        matches!(self, MarginKind::Tn2)
    }
}

impl fmt::Display for MarginKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Margin {
    pub value: f64,
    /// Largest term magnitude; `1` for log-domain margins.
    pub scale: f64,
    pub kind: MarginKind,
    pub inputs: Vec<f64>,
    /// The same quantity by an independent formula, where one applies.
    pub alternate: Option<f64>,
    pub pass: bool,
}

impl Margin {
    pub(crate) fn new(kind: MarginKind, value: f64, scale: f64, inputs: Vec<f64>, alternate: Option<f64>) -> Self {
        let mut m = Margin { value, scale, kind, inputs, alternate, pass: false };
        m.pass = m.passes(DEFAULT_TOLERANCE);
        m
    }

    /// `value ≥ -tolerance·scale`.
    pub fn passes(&self, tolerance: f64) -> bool {
        self.value >= -tolerance * self.scale
    }

    /// Relative disagreement with the alternate evaluation.
    pub fn alternate_discrepancy(&self) -> Option<f64> {
        self.alternate.map(|alt| {
            let d = (self.value - alt).abs();
            if d == 0.0 {
                0.0
            } else {
                d / self.value.abs().max(alt.abs())
            }
        })
    }
}
