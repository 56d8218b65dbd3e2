//! The four-point inequality and the `φ`, `h` functions behind it.
//!
//! ```text
//! φ(u) = cosh u - sinh u / u,   φ(0) = 0
//! h(x, y) = e^x + e^y - 2 exp[x, y] = 2 e^{(x+y)/2} φ((x-y)/2)
//! f(a,b,c,d) = exp[a,a,b,c]exp[d,d,b,c] + exp[b,b,a,d]exp[c,c,a,d] - exp[a,b,c,d]^2
//! ```

use crate::ddcore::{dd_exp_flat, TwoSum};
use crate::error::{argument, Result};

use super::{Margin, MarginKind};

const TAYLOR_BAND: f64 = 0.5;
const ASYMPTOTIC_BAND: f64 = 20.0;
const H_FORM_MIN_GAP: f64 = 1e-6;

/// `Σ_{k≥1} u^{2k}·2k/(2k+1)!`
fn phi_taylor(u: f64) -> f64 {
    let u2 = u * u;
    let mut t = u2 / 6.0;
    let mut sum = 2.0 * t;
    let mut k = 1.0;
    loop {
        k += 1.0;
        t *= u2 / ((2.0 * k) * (2.0 * k + 1.0));
        let term = 2.0 * k * t;
        sum += term;
        if term <= 1e-17 * sum {
            return sum;
        }
    }
}

pub fn phi(u: f64) -> f64 {
    let a = u.abs();
    if a < TAYLOR_BAND {
        phi_taylor(a)
    } else {
        a.cosh() - a.sinh() / a
    }
}

fn ln_phi(u: f64) -> f64 {
    let a = u.abs();
    if a > ASYMPTOTIC_BAND {
        a - std::f64::consts::LN_2 + (1.0 - 1.0 / a + (-2.0 * a).exp() * (1.0 + 1.0 / a)).ln()
    } else {
        phi(a).ln()
    }
}

pub fn h(x: f64, y: f64) -> f64 {
    let u = (x - y) / 2.0;
    if u == 0.0 {
        return 0.0;
    }
    let mid = (x + y) / 2.0;
    if u.abs() > ASYMPTOTIC_BAND {
        (std::f64::consts::LN_2 + mid + ln_phi(u)).exp()
    } else {
        2.0 * mid.exp() * phi(u)
    }
}

fn dd(nodes: &[f64]) -> Result<f64> {
    Ok(dd_exp_flat(nodes, 1.0)?.to_f64())
}

/// The permutations under which `f` is invariant, as index maps on `(a,b,c,d)`:
/// id, (ad), (bc), (ad)(bc), (ab)(cd), (ac)(bd), (abdc), (acdb).
pub const FOUR_POINT_GROUP: [[usize; 4]; 8] = [
    [0, 1, 2, 3],
    [3, 1, 2, 0],
    [0, 2, 1, 3],
    [3, 2, 1, 0],
    [1, 0, 3, 2],
    [2, 3, 0, 1],
    [2, 0, 3, 1],
    [1, 3, 0, 2],
];

/// `f(a,b,c,d)` from its definition, cross-checked against the `h`-form
/// when every denominator factor is at least `1e-6` in magnitude.
pub fn four_point_f(a: f64, b: f64, c: f64, d: f64) -> Result<Margin> {
    let t1 = dd(&[a, a, b, c])? * dd(&[d, d, b, c])?;
    let t2 = dd(&[b, b, a, d])? * dd(&[c, c, a, d])?;
    let t3 = dd(&[a, b, c, d])?.powi(2);
    let value = (t1 + t2) - t3;
    let scale = t1.max(t2).max(t3);
    Ok(Margin::new(MarginKind::FourPoint, value, scale, vec![a, b, c, d], four_point_h_form(a, b, c, d)))
}

/// `[h(a,c)h(b,d) + h(a,b)h(c,d) - h(b,c)h(a,d)] / [2(a-b)(a-c)(b-d)(c-d)]`,
/// or `None` near coincident points.
pub fn four_point_h_form(a: f64, b: f64, c: f64, d: f64) -> Option<f64> {
    let factors = [a - b, a - c, b - d, c - d];
    if factors.iter().any(|g| g.abs() < H_FORM_MIN_GAP) {
        return None;
    }
    let mut num = TwoSum::new(h(a, c) * h(b, d));
    num.add(h(a, b) * h(c, d));
    num.add(-(h(b, c) * h(a, d)));
    Some(num.value() / (2.0 * factors.iter().product::<f64>()))
}

fn require_sorted(points: &[f64], strict: bool) -> Result<()> {
    let ok = points.windows(2).all(|w| if strict { w[0] < w[1] } else { w[0] <= w[1] });
    if !ok || points.iter().any(|x| !x.is_finite()) {
        let rel = if strict { "strictly increasing" } else { "nondecreasing" };
        return Err(argument(format!("points {points:?} must be finite and {rel}")));
    }
    Ok(())
}

/// `h(a,c) - h(a,b) - h(b,c)` for `a ≤ b ≤ c`; the alternate is
/// `2(b-a)(c-b)·exp[a,b,b,c]`.
pub fn triangle_h_margin(a: f64, b: f64, c: f64) -> Result<Margin> {
    require_sorted(&[a, b, c], false)?;
    let (hac, hab, hbc) = (h(a, c), h(a, b), h(b, c));
    let value = (hac - hab) - hbc;
    let alt = 2.0 * (b - a) * (c - b) * dd(&[a, b, b, c])?;
    Ok(Margin::new(MarginKind::TriangleH, value, hac.max(hab).max(hbc), vec![a, b, c], Some(alt)))
}

/// `φ(x+y)φ(y+z) - φ(x)φ(z) - φ(y)φ(x+y+z)` for `x, y, z ≥ 0`.
pub fn phi_product_margin(x: f64, y: f64, z: f64) -> Result<Margin> {
    if !(x >= 0.0 && y >= 0.0 && z >= 0.0) || !(x + y + z).is_finite() {
        return Err(argument(format!("phi product needs finite x, y, z ≥ 0, got ({x}, {y}, {z})")));
    }
    let t1 = phi(x + y) * phi(y + z);
    let t2 = phi(x) * phi(z);
    let t3 = phi(y) * phi(x + y + z);
    let value = (t1 - t2) - t3;
    Ok(Margin::new(MarginKind::PhiProduct, value, t1.max(t2).max(t3), vec![x, y, z], None))
}

/// `h(a,c)h(b,d) - h(b,c)h(a,d) - h(a,b)h(c,d)` for `a < b < c < d`; the
/// alternate is `4e^{(a+b+c+d)/2}·Q((b-a)/2, (c-b)/2, (d-c)/2)`.
pub fn h_product_margin(a: f64, b: f64, c: f64, d: f64) -> Result<Margin> {
    require_sorted(&[a, b, c, d], true)?;
    let t1 = h(a, c) * h(b, d);
    let t2 = h(b, c) * h(a, d);
    let t3 = h(a, b) * h(c, d);
    let value = (t1 - t2) - t3;
    let q = phi_product_margin((b - a) / 2.0, (c - b) / 2.0, (d - c) / 2.0)?.value;
    let alt = 4.0 * ((a + b + c + d) / 2.0).exp() * q;
    Ok(Margin::new(MarginKind::HProduct, value, t1.max(t2).max(t3), vec![a, b, c, d], Some(alt)))
}
