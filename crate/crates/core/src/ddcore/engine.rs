//! Division-free evaluation of all prefix divided differences of `exp`.
//!
//! For the lower-bidiagonal matrix `A` with diagonal `y_0..y_q` and unit
//! subdiagonal, column 0 of `exp(τA)` holds `e^{τ[y_0..y_i]}` in row `i`.
//! The nodes are centered on their mean, `τ` runs from 0 to 1 in `2^k` steps
//! of length `h` with `h·max|y| ≤ 1/2`, and each step applies a Taylor
//! expansion of `exp(hA)` to the current column. Every entry of `exp(hA)` is
//! non-negative, so the steps combine positive quantities; the only
//! cancellation is inside one step and is bounded by `e^{2h·max|y|} ≤ e`.
//!
//! Component `i` is stored as `v_i · 2^{e_i} · h^i / i!` with `v_i ∈ [0.5, 1)`.
//! All rescaling is by exact powers of two, so the representation never
//! overflows or underflows regardless of `q`.

use crate::error::{DdError, Result};

/// Relative size below which a component's Taylor tail is dropped.
const DROP: f64 = 1e-22;
/// Upper bound on `2^k` steps.
const MAX_STEPS_LOG2: u32 = 22;

/// Compensated (TwoSum/Neumaier) accumulator.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct TwoSum {
    hi: f64,
    lo: f64,
}

impl TwoSum {
    pub(crate) fn new(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    #[inline]
    pub(crate) fn add(&mut self, x: f64) {
        let s = self.hi + x;
        let bp = s - self.hi;
        let err = (self.hi - (s - bp)) + (x - bp);
        self.hi = s;
        self.lo += err;
    }

    #[inline]
    pub(crate) fn value(&self) -> f64 {
        self.hi + self.lo
    }
}

/// `x · 2^e`, splitting large exponents so intermediate powers stay finite.
pub(crate) fn ldexp(mut x: f64, mut e: i64) -> f64 {
    fn pow2(e: i64) -> f64 {
        f64::from_bits(((e + 1023) as u64) << 52)
    }
    while e > 1023 {
        x *= pow2(1023);
        e -= 1023;
        if x.is_infinite() {
            return x;
        }
    }
    if e >= -1022 {
        return x * pow2(e);
    }
    while e < -2044 {
        x *= pow2(-1022);
        e += 1022;
        if x == 0.0 {
            return x;
        }
    }
    // two factors so that only the last multiplication can round
    let a = e / 2;
    x * pow2(a) * pow2(e - a)
}

/// Splits `x` into `m · 2^e` with `|m| ∈ [0.5, 1)`.
pub(crate) fn frexp(x: f64) -> (f64, i64) {
    if x == 0.0 || !x.is_finite() {
        return (x, 0);
    }
    let bits = x.to_bits();
    let biased = ((bits >> 52) & 0x7ff) as i64;
    if biased == 0 {
        let (m, e) = frexp(x * 18446744073709551616.0);
        return (m, e - 64);
    }
    let m = f64::from_bits((bits & !(0x7ff_u64 << 52)) | (1022_u64 << 52));
    (m, biased - 1022)
}

/// `i!` for `i = 0..=q` as `(mantissa, exp2)` pairs, accumulated in
/// double-double so each entry carries a single final rounding.
pub(crate) fn factorials(q: usize) -> Vec<(f64, i64)> {
    let mut out = Vec::with_capacity(q + 1);
    let (mut hi, mut lo, mut ex) = (1.0_f64, 0.0_f64, 0_i64);
    out.push((1.0, 0));
    for i in 1..=q {
        let k = i as f64;
        let p = hi * k;
        let err = hi.mul_add(k, -p);
        let lo2 = lo.mul_add(k, err);
        let s = p + lo2;
        let l = lo2 - (s - p);
        let (m, e) = frexp(s);
        let scale = ldexp(1.0, -e);
        hi = m;
        lo = l * scale;
        ex += e;
        out.push((hi + lo, ex));
    }
    out
}

/// Result of evolving the node column to `τ = 1`.
#[derive(Debug, Clone)]
pub(crate) struct Evolution {
    /// Mean that was subtracted from the nodes.
    pub mu: f64,
    /// `log2` of the step count.
    pub halvings: u32,
    v: Vec<f64>,
    e: Vec<i64>,
}

impl Evolution {
    /// `i! · exp[y_0..y_i]` for the centered nodes, as `(mantissa, exp2)`.
    pub(crate) fn factorial_scaled(&self, i: usize) -> (f64, i64) {
        (self.v[i], self.e[i] - self.halvings as i64 * i as i64)
    }

    pub(crate) fn len(&self) -> usize {
        self.v.len()
    }
}

/// `2^d`, flushing to zero below the normal range and saturating above it.
#[inline]
fn pow2(d: i64) -> f64 {
    if d < -1022 {
        0.0
    } else if d > 1023 {
        f64::INFINITY
    } else {
        f64::from_bits(((d + 1023) as u64) << 52)
    }
}

/// `a·2^ga + b·2^gb` as a mantissa and offset, renormalized when the
/// mantissa drifts far from 1.
#[inline]
fn combine(a: f64, ga: i64, b: f64, gb: i64) -> (f64, i64) {
    let (s, g) = if b == 0.0 {
        (a, ga)
    } else if a == 0.0 {
        (b, gb)
    } else if ga >= gb {
        (a + b * pow2(gb - ga), ga)
    } else {
        (a * pow2(ga - gb) + b, gb)
    };
    let m = s.abs();
    if s != 0.0 && !(1e-150..=1e150).contains(&m) {
        let (f, e) = frexp(s);
        (f, g + e)
    } else {
        (s, g)
    }
}

/// Compensated mean.
pub(crate) fn mean(z: &[f64]) -> f64 {
    let mut acc = TwoSum::default();
    for &x in z {
        acc.add(x);
    }
    acc.value() / z.len() as f64
}

/// Runs the stepping scheme on `z` (in the given order).
pub(crate) fn evolve(z: &[f64]) -> Result<Evolution> {
    if z.is_empty() {
        return Err(DdError::Argument("empty node sequence".into()));
    }
    if let Some(bad) = z.iter().find(|x| !x.is_finite()) {
        return Err(DdError::Range(format!("scaled node {bad} is not finite")));
    }
    let mu = mean(z);
    if !mu.is_finite() {
        return Err(DdError::Range("node mean overflows".into()));
    }
    let y: Vec<f64> = z.iter().map(|&x| x - mu).collect();
    let ymax = y.iter().fold(0.0_f64, |m, &x| m.max(x.abs()));
    let mut halvings = 0_u32;
    while ldexp(1.0, halvings as i64) < 2.0 * ymax {
        halvings += 1;
        if halvings > MAX_STEPS_LOG2 {
            return Err(DdError::Range(format!(
                "centered node spread {ymax:e} needs more than 2^{MAX_STEPS_LOG2} steps"
            )));
        }
    }
    let steps = 1_u64 << halvings;
    let h = ldexp(1.0, -(halvings as i64));
    let hy: Vec<f64> = y.iter().map(|&x| x * h).collect();

    let q = z.len() - 1;
    let mut v = vec![0.0_f64; q + 1];
    let mut e = vec![0_i64; q + 1];
    v[0] = 1.0;
    let mut w = vec![0.0_f64; q + 1];
    let mut coef = vec![0.0_f64; q + 1];
    let mut acc = vec![TwoSum::default(); q + 1];
    // Terms carry their own binary offset: a term in transit up the chain
    // can be far below its host component before it is amplified.
    let mut g = vec![0_i64; q + 1];
    let mut g0 = vec![0_i64; q + 1];

    for m in 0..steps {
        let first = m == 0;
        if !first {
            // pre-scale to the expected magnitude after the step
            let growth = ((m + 1) as f64 / m as f64).log2();
            for i in 1..=q {
                let adj = (i as f64 * growth).floor() as i64;
                e[i] += adj;
                g0[i] = -adj;
            }
        }
        for i in 1..=q {
            coef[i] = ldexp(i as f64, e[i - 1] - e[i]);
        }
        w.copy_from_slice(&v);
        g.copy_from_slice(&g0);
        for i in 0..=q {
            acc[i] = TwoSum::new(ldexp(v[i], g0[i]));
        }
        let mut lo = 0_usize;
        let mut r = 1_usize;
        let cap = q + 100_000;
        while lo <= q {
            let top = if first { q.min(r) } else { q };
            let rf = r as f64;
            for i in (lo..=top).rev() {
                let own = hy[i] * w[i];
                let feed = if i > lo { coef[i] * w[i - 1] } else { 0.0 };
                let (t, gi) = combine(own, g[i], feed, if i > lo { g[i - 1] } else { g[i] });
                let t = t / rf;
                w[i] = t;
                g[i] = gi;
                acc[i].add(t * pow2(gi));
            }
            if !w[top].is_finite() || !acc[top].hi.is_finite() {
                return Err(DdError::Range("Taylor term overflow".into()));
            }
            // The feed from `lo` into `lo + k` is amplified by at most
            // Π (lo+j) / ((m+1)(r+j)), which is ≤ 1 once lo ≤ (m+1)·r.
            let reach = (m + 1).saturating_mul(r as u64);
            while lo <= top
                && lo as u64 <= reach
                && acc[lo].hi != 0.0
                && (w[lo] == 0.0 || w[lo].abs() * pow2(g[lo]) <= DROP * acc[lo].hi.abs())
            {
                lo += 1;
            }
            r += 1;
            if r > cap {
                return Err(DdError::Convergence("Taylor step did not converge".into()));
            }
        }
        for i in 0..=q {
            let (mant, ex) = frexp(acc[i].value());
            v[i] = mant;
            e[i] += ex;
        }
    }
    Ok(Evolution { mu, halvings, v, e })
}
