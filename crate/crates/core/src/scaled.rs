//! `mantissa · e^log_shift` values.
//!
//! Exponential divided differences span hundreds of orders of magnitude
//! (`e^700 / 30!` and `e^-700 / 30!` both occur), so every engine result is
//! carried with a separate natural-log shift.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Div, Mul, Neg};

use crate::error::{DdError, Result};

const E: f64 = std::f64::consts::E;
const INV_E: f64 = 1.0 / std::f64::consts::E;
const E_SQUARED: f64 = E * E;

/// A real number stored as `mantissa · e^log_shift`.
///
/// Zero is `0 · e^0`. Non-zero values keep `|mantissa|` within `[e^-1, e^2]`
/// after every operation; [`ScaledValue::normalized`] tightens that to `[1, e)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledValue {
    mantissa: f64,
    log_shift: f64,
}

impl ScaledValue {
    pub const ZERO: ScaledValue = ScaledValue { mantissa: 0.0, log_shift: 0.0 };
    pub const ONE: ScaledValue = ScaledValue { mantissa: 1.0, log_shift: 0.0 };

    /// Checked constructor.
    pub fn from_parts(mantissa: f64, log_shift: f64) -> Result<Self> {
        if !mantissa.is_finite() || !log_shift.is_finite() {
            return Err(DdError::Range(format!(
                "non-finite scaled value {mantissa} * e^{log_shift}"
            )));
        }
        Ok(Self::raw(mantissa, log_shift))
    }

    pub(crate) fn raw(mantissa: f64, log_shift: f64) -> Self {
        if mantissa == 0.0 {
            return Self::ZERO;
        }
        let s = Self { mantissa, log_shift };
        let a = mantissa.abs();
        if (INV_E..=E_SQUARED).contains(&a) {
            s
        } else {
            s.normalized()
        }
    }

    pub fn from_f64(value: f64) -> Self {
        Self::raw(value, 0.0)
    }

    /// `e^x`, exact in log space.
    pub fn exp(x: f64) -> Self {
        Self::raw(1.0, x)
    }

    /// `mantissa · 2^exp2`.
    pub fn from_binary(mantissa: f64, exp2: i64) -> Self {
        Self::raw(mantissa, exp2 as f64 * std::f64::consts::LN_2)
    }

    /// Builds `sign · e^ln_abs`.
    pub fn from_ln(sign: f64, ln_abs: f64) -> Self {
        if sign == 0.0 || ln_abs == f64::NEG_INFINITY {
            return Self::ZERO;
        }
        Self::raw(sign.signum(), ln_abs)
    }

    pub fn mantissa(&self) -> f64 {
        self.mantissa
    }

    pub fn log_shift(&self) -> f64 {
        self.log_shift
    }

    /// Rescales so that `|mantissa| ∈ [1, e)`.
    pub fn normalized(self) -> Self {
        if self.mantissa == 0.0 {
            return Self::ZERO;
        }
        let mut m = self.mantissa;
        let mut s = self.log_shift;
        let k = m.abs().ln().floor();
        if k != 0.0 {
            m *= (-k).exp();
            s += k;
        }
        // one correction step absorbs rounding at the interval ends
        if m.abs() < 1.0 {
            m *= E;
            s -= 1.0;
        } else if m.abs() >= E {
            m *= INV_E;
            s += 1.0;
        }
        Self { mantissa: m, log_shift: s }
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa == 0.0
    }

    pub fn is_positive(&self) -> bool {
        self.mantissa > 0.0
    }

    /// `-1`, `0` or `1`.
    pub fn signum(&self) -> f64 {
        if self.mantissa == 0.0 {
            0.0
        } else {
            self.mantissa.signum()
        }
    }

    pub fn abs(self) -> Self {
        Self { mantissa: self.mantissa.abs(), log_shift: self.log_shift }
    }

    /// `ln |value|`; `-inf` for zero.
    pub fn ln_abs(&self) -> f64 {
        if self.mantissa == 0.0 {
            f64::NEG_INFINITY
        } else {
            self.mantissa.abs().ln() + self.log_shift
        }
    }

    /// Plain `f64`; saturates to `±inf` or `0` outside the representable range.
    pub fn to_f64(&self) -> f64 {
        if self.mantissa == 0.0 {
            return 0.0;
        }
        if self.log_shift > 709.0 || self.log_shift < -708.0 {
            return self.mantissa.signum() * self.ln_abs().exp();
        }
        self.mantissa * self.log_shift.exp()
    }

    /// `Some(value)` when the plain value is a finite normal `f64`.
    pub fn to_f64_checked(&self) -> Option<f64> {
        let v = self.to_f64();
        (v.is_finite() && (v == 0.0) == self.is_zero() && (v == 0.0 || v.is_normal())).then_some(v)
    }

    /// Multiplies by `e^x`.
    pub fn scale_exp(self, x: f64) -> Self {
        if self.is_zero() {
            return self;
        }
        Self { mantissa: self.mantissa, log_shift: self.log_shift + x }
    }

    pub fn mul_f64(self, k: f64) -> Self {
        Self::raw(self.mantissa * k, self.log_shift)
    }

    pub fn powi(self, k: i32) -> Self {
        if k == 0 {
            return Self::ONE;
        }
        if self.is_zero() {
            return Self::ZERO;
        }
        let sign = if k % 2 == 0 { 1.0 } else { self.mantissa.signum() };
        let m = self.mantissa.abs();
        Self::raw(sign, k as f64 * (m.ln() + self.log_shift))
    }

    /// Mantissa of `self` expressed relative to `e^frame`.
    pub fn in_frame(&self, frame: f64) -> f64 {
        if self.mantissa == 0.0 {
            0.0
        } else {
            self.mantissa * (self.log_shift - frame).exp()
        }
    }

    /// Common frame for a set of values: the largest `ln |v|` among non-zero ones.
    pub fn common_frame(values: &[ScaledValue]) -> f64 {
        values
            .iter()
            .filter(|v| !v.is_zero())
            .map(|v| v.ln_abs())
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Signed sum, evaluated in the frame of the largest term with
    /// compensated accumulation.
    pub fn sum(values: &[ScaledValue]) -> ScaledValue {
        let frame = Self::common_frame(values);
        if frame == f64::NEG_INFINITY {
            return Self::ZERO;
        }
        let mut acc = crate::ddcore::TwoSum::default();
        for v in values {
            acc.add(v.in_frame(frame));
        }
        Self::raw(acc.value(), frame)
    }

    /// `|self - other| / |other|` via the quotient, so magnitudes far outside
    /// the `f64` range compare correctly.
    pub fn relative_difference(&self, other: &ScaledValue) -> f64 {
        if other.is_zero() {
            return if self.is_zero() { 0.0 } else { f64::INFINITY };
        }
        ((*self / *other).to_f64() - 1.0).abs()
    }

    pub fn add(self, other: ScaledValue) -> ScaledValue {
        Self::sum(&[self, other])
    }

    pub fn sub(self, other: ScaledValue) -> ScaledValue {
        Self::sum(&[self, -other])
    }
}

impl Mul for ScaledValue {
    type Output = ScaledValue;

    fn mul(self, rhs: ScaledValue) -> ScaledValue {
        if self.is_zero() || rhs.is_zero() {
            return Self::ZERO;
        }
        Self::raw(self.mantissa * rhs.mantissa, self.log_shift + rhs.log_shift)
    }
}

impl Div for ScaledValue {
    type Output = ScaledValue;

    /// Division by zero yields a non-finite mantissa; callers guard it.
    fn div(self, rhs: ScaledValue) -> ScaledValue {
        if self.is_zero() {
            return Self::ZERO;
        }
        Self {
            mantissa: self.mantissa / rhs.mantissa,
            log_shift: self.log_shift - rhs.log_shift,
        }
        .renormalize_if_finite()
    }
}

impl ScaledValue {
    fn renormalize_if_finite(self) -> Self {
        if self.mantissa.is_finite() {
            Self::raw(self.mantissa, self.log_shift)
        } else {
            self
        }
    }
}

impl Neg for ScaledValue {
    type Output = ScaledValue;

    fn neg(self) -> ScaledValue {
        Self { mantissa: -self.mantissa, log_shift: self.log_shift }
    }
}

impl PartialOrd for ScaledValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        let (sa, sb) = (self.signum(), other.signum());
        if sa != sb {
            return sa.partial_cmp(&sb);
        }
        if sa == 0.0 {
            return Some(Ordering::Equal);
        }
        let ord = self.ln_abs().partial_cmp(&other.ln_abs())?;
        Some(if sa > 0.0 { ord } else { ord.reverse() })
    }
}

impl fmt::Display for ScaledValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.normalized();
        write!(f, "{} * e^{}", n.mantissa, n.log_shift)
    }
}
