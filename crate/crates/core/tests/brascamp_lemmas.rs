use std::f64::consts::PI;

use gdecouple::brascamp::{
    detb_identity_check, eb_objective, eb_optimize, eb_upper_bound, gaussian_extremal_check, matrix_b,
    minkowski_check, ostrowski_bound,
};
use gdecouple::covmodel::CovarianceMatrix;
use gdecouple::decoupling::decoupling_coefficient;
use gdecouple::random::{random_diagonally_dominant, random_spd, random_spd_in};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Golden-section maximization of `g` on `[lo, hi]`.
fn golden_max(g: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let (mut f1, mut f2) = (g(x1), g(x2));
    while hi - lo > 1e-13 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = g(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = g(x1);
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn scalar_optimum_matches_golden_section() {
    for (beta, p) in [(1.0, 2.0), (0.3, 1.5), (4.0, 3.7), (0.05, 9.0)] {
        let b = DMatrix::from_element(1, 1, beta);
        let prob = eb_optimize(&b, p).unwrap().into_result().unwrap();
        let u_star = golden_max(|u| eb_objective(&b, p, &[u.exp()]).unwrap(), -30.0, 30.0);
        let golden_value = eb_objective(&b, p, &[u_star.exp()]).unwrap();
        assert!((prob.eb_log - golden_value).abs() <= 1e-8, "{beta} {p}");
        assert!((prob.b_opt[0] / u_star.exp() - 1.0).abs() <= 1e-6, "{beta} {p}");
        // Stationarity gives b* = β/(p-1) in one dimension.
        assert!((prob.b_opt[0] / (beta / (p - 1.0)) - 1.0).abs() <= 1e-8);
    }
}

#[test]
fn eb_sandwich_on_random_problems() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..60 {
        let n = rng.random_range(1..7);
        let b = random_spd_in(&mut rng, n, -1.0, 1.0);
        let p = rng.random_range(1.2..8.0);
        let prob = eb_optimize(&b, p).unwrap();
        assert!(prob.converged, "n={n} p={p} residual={}", prob.residual);
        assert!(prob.eb_log <= prob.upper_log + 1e-9);
        assert!((prob.upper_log - eb_upper_bound(&b, p).unwrap()).abs() < 1e-15);
    }
}

#[test]
fn matrix_b_boundary() {
    let c = CovarianceMatrix::equicorrelated(4, 0.3).unwrap();
    let p_x = decoupling_coefficient(&c);
    assert!(matrix_b(&c, 2.0 * p_x).is_ok());
    assert!(matrix_b(&c, 1.0).is_err());
}

#[test]
fn scalar_extremal_value() {
    let b = DMatrix::identity(1, 1);
    let (integral, closed) = gaussian_extremal_check(&b, 2.0, &[1.0]).unwrap();
    // (2π)^{1/2} 2^{-1/2} / (2π/2)^{1/4} = √π / π^{1/4}.
    let oracle = (PI.sqrt() / PI.powf(0.25)).ln();
    assert!((integral - oracle).abs() < 1e-14);
    assert!((closed - oracle).abs() < 1e-14);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn ostrowski_lower_bound(seed in any::<u64>(), n in 1usize..13) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_diagonally_dominant(&mut rng, n);
        let bound = ostrowski_bound(&a).unwrap();
        let det = a.clone().lu().determinant().abs().ln();
        prop_assert!(det >= bound - 1e-10 * (1.0 + bound.abs()), "{det} < {bound}");
    }

    #[test]
    fn minkowski_concavity(seed in any::<u64>(), n in 1usize..13, lambda in 0.0f64..=1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = random_spd(&mut rng, n);
        let v = random_spd(&mut rng, n);
        let (lhs, rhs) = minkowski_check(&u, &v, lambda).unwrap();
        prop_assert!(lhs >= rhs - 1e-10 * (1.0 + rhs.abs()));
    }

    #[test]
    fn detb_identity(seed in any::<u64>(), n in 1usize..13, extra in 0.0f64..2.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = CovarianceMatrix::build_dense(random_spd_in(&mut rng, n, -1.0, 1.0)).unwrap();
        let p = 2.0 * decoupling_coefficient(&c) * (1.0 + extra);
        let (direct, factored) = detb_identity_check(&c, p).unwrap();
        prop_assert!((direct.exp() / factored.exp() - 1.0).abs() < 1e-8 || (direct - factored).abs() < 1e-8);
    }

    #[test]
    fn gaussian_extremality(seed in any::<u64>(), n in 1usize..8, p in 1.1f64..6.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = random_spd_in(&mut rng, n, -1.0, 1.0);
        let d: Vec<f64> = (0..n).map(|_| 10f64.powf(rng.random_range(-1.0..1.0))).collect();
        let (integral, closed) = gaussian_extremal_check(&b, p, &d).unwrap();
        prop_assert!((integral - closed).abs() < 1e-12 * (1.0 + closed.abs()));
    }
}
