mod common;

use common::random_nodes;
use expdd::identities::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn battery(seed: u64, min_len: usize, mut check: impl FnMut(&[f64], f64, &mut ChaCha8Rng) -> Residual, tol: f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let len = rng.gen_range(min_len..=9);
        let mut nodes = random_nodes(&mut rng, len, -5.0, 5.0);
        if len > 1 && rng.gen_bool(0.2) {
            nodes[1] = nodes[0];
        }
        let tau = rng.gen_range(0.0..3.0);
        let r = check(&nodes, tau, &mut rng);
        worst = worst.max(r.rel_residual);
        assert!(r.passes(tol), "{nodes:?} tau={tau}: {r:?}");
    }
    assert!(worst <= tol);
}

#[test]
fn convolution_battery() {
    battery(1, 2, |x, tau, rng| convolution_residual(x, rng.gen_range(0..x.len() - 1), tau, 64).unwrap(), 1e-8);
}

#[test]
fn repeated_sum_battery() {
    battery(2, 1, |x, tau, _| repeated_sum_residual(x, tau).unwrap(), 1e-8);
}

#[test]
fn weighted_sum_battery() {
    battery(3, 1, |x, tau, _| weighted_sum_residual(x, tau).unwrap(), 1e-8);
}

#[test]
fn parametric_derivative_battery() {
    battery(4, 2, |x, tau, _| parametric_derivative_residual(x, tau, 1e-5 * tau).unwrap(), 1e-7);
}

#[test]
fn double_sum_battery() {
    battery(5, 1, |x, tau, _| double_sum_residual(x, tau).unwrap(), 1e-8);
}

#[test]
fn leibniz_battery() {
    battery(6, 1, |x, tau, rng| leibniz_residual(x, tau, rng.gen_range(0.0..3.0)).unwrap(), 1e-8);
}

#[test]
fn rescaling_battery() {
    battery(
        7,
        1,
        |x, tau, rng| {
            let alpha = rng.gen_range(0.1..10.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            rescaling_residual(x, alpha, tau).unwrap()
        },
        1e-8,
    );
}

#[test]
fn spot_checks_at_stated_sizes() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..50 {
        let x4 = random_nodes(&mut rng, 4, -3.0, 3.0);
        assert!(convolution_residual(&x4, 1, 2.0, 64).unwrap().rel_residual <= 1e-10);
        let x5 = random_nodes(&mut rng, 5, -3.0, 3.0);
        assert!(repeated_sum_residual(&x5, 1.7).unwrap().rel_residual <= 1e-10);
        assert!(weighted_sum_residual(&x4, 0.9).unwrap().rel_residual <= 1e-10);
        let x6 = random_nodes(&mut rng, 6, -3.0, 3.0);
        assert!(parametric_derivative_residual(&x6, 2.0, 1e-4).unwrap().rel_residual <= 1e-7);
        assert!(double_sum_residual(&x4, 1.3).unwrap().rel_residual <= 1e-9);
        assert!(leibniz_residual(&x5, 0.3, -1.1).unwrap().rel_residual <= 1e-10);
        assert!(rescaling_residual(&x6, 2.5, 1.0).unwrap().rel_residual <= 1e-10);
    }
}

#[test]
fn asymmetric_identities_hold_for_every_rotation() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let base = random_nodes(&mut rng, 6, -4.0, 4.0);
    for k in 0..base.len() {
        let mut x = base.clone();
        x.rotate_left(k);
        assert!(weighted_sum_residual(&x, 1.1).unwrap().pass);
        assert!(parametric_derivative_residual(&x, 1.1, 1e-4).unwrap().pass);
        assert!(double_sum_residual(&x, 1.1).unwrap().pass);
        assert!(repeated_sum_residual(&x, 1.1).unwrap().pass);
        assert!(leibniz_residual(&x, 0.4, 0.9).unwrap().pass);
    }
}

#[test]
fn convolution_converges_with_quadrature_order() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..100 {
        let len = rng.gen_range(2..=7);
        let x = random_nodes(&mut rng, len, -5.0, 5.0);
        let j = rng.gen_range(0..len - 1);
        let beta = rng.gen_range(0.1..3.0);
        let r32 = convolution_residual(&x, j, beta, 32).unwrap().rel_residual;
        let r64 = convolution_residual(&x, j, beta, 64).unwrap().rel_residual;
        assert!(r64 <= 1e-12, "{x:?}: {r64:e}");
        assert!(r64 <= r32 || r64 <= 1e-13);
    }
}

#[test]
fn degenerate_inputs_do_not_produce_nan() {
    let r = convolution_residual(&[1.0, 2.0, 3.0], 0, 0.0, 8).unwrap();
    assert!(r.pass && r.rel_residual == 0.0);
    let r = double_sum_residual(&[0.0, 0.0], 0.0).unwrap();
    assert!(r.pass && !r.rel_residual.is_nan());
}
