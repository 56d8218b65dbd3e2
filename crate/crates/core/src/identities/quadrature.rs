//! Gauss–Legendre rules.

/// Nodes and weights of the `n`-point rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        for _ in 0..100 {
            let (p, d) = legendre(n, z);
            let dz = p / d;
            z -= dz;
            if dz.abs() <= 1e-16 {
                break;
            }
        }
        let dp = legendre(n, z).1;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// `(P_n(z), P_n'(z))` by the three-term recurrence.
fn legendre(n: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// `∫_a^b f` with the `n`-point rule.
pub fn integrate<E>(n: usize, a: f64, b: f64, mut f: impl FnMut(f64) -> Result<f64, E>) -> Result<f64, E> {
    let (x, w) = gauss_legendre(n);
    let half = (b - a) / 2.0;
    let mid = (b + a) / 2.0;
    let mut acc = crate::ddcore::TwoSum::new(0.0);
    for (xi, wi) in x.iter().zip(&w) {
        acc.add(wi * f(mid + half * xi)?);
    }
    Ok(acc.value() * half)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn weights_sum_to_two_and_nodes_are_symmetric() {
        for n in [1, 2, 5, 8, 32, 64, 100] {
            let (x, w) = gauss_legendre(n);
            assert_relative_eq!(w.iter().sum::<f64>(), 2.0, max_relative = 1e-14);
            for i in 0..n {
                assert_eq!(x[i], -x[n - 1 - i]);
            }
        }
    }

    #[test]
    fn exact_for_polynomials() {
        let v: Result<f64, ()> = integrate(8, 0.0, 2.0, |t| Ok(t.powi(15)));
        assert_relative_eq!(v.unwrap(), 2f64.powi(16) / 16.0, max_relative = 1e-14);
    }

    #[test]
    fn exponential_to_machine_precision() {
        let v: Result<f64, ()> = integrate(64, -1.0, 3.0, |t| Ok((2.0 * t).exp()));
        assert_relative_eq!(v.unwrap(), ((6.0f64).exp() - (-2.0f64).exp()) / 2.0, max_relative = 1e-14);
    }
}
