use std::f64::consts::LN_2;

use gdecouple::covmodel::{inverse_power_gamma_sequence, toeplitz, CovarianceMatrix, MovingAverageSpec};
use gdecouple::decoupling::{
    central_probability, corollary1_log_bound, decoupling_coefficient, refined_constant,
    stationary_decoupling_coefficient, stationary_p_bounds, theorem1_log_constant, DecouplingBound,
};
use gdecouple::random::{random_spd, random_summable_gamma};
use gdecouple::Error;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Generic constant evaluated in linear space, term by term.
fn generic_constant_oracle(c: &CovarianceMatrix, p: f64) -> f64 {
    let n = c.dim() as f64;
    let det = c.entries().clone().lu().determinant();
    let sig: f64 = c.sigmas().iter().product();
    2f64.powf(0.5 * n * (1.0 - 1.0 / p)) * sig.powf(1.0 / p) / det.powf(1.0 / (2.0 * p))
}

#[test]
fn generic_constant_worked_example() {
    let c = CovarianceMatrix::equicorrelated(2, 0.5).unwrap();
    let k = theorem1_log_constant(&c, 3.0).unwrap().exp();
    assert!((k - generic_constant_oracle(&c, 3.0)).abs() < 1e-13);
    assert!((k - 1.665_366_355_311_208_6).abs() < 1e-12);
}

#[test]
fn refined_constant_worked_example() {
    let c = CovarianceMatrix::equicorrelated(2, 0.5).unwrap();
    let r = refined_constant(&c, 3.0).unwrap();
    // 3^{2/3} / (3.75^{1/3} 0.75^{1/6}).
    let oracle = 3f64.powf(2.0 / 3.0) / (3.75f64.powf(1.0 / 3.0) * 0.75f64.powf(1.0 / 6.0));
    assert!((r.log_constant.exp() - oracle).abs() < 1e-13);
    assert!((oracle - 1.404_624_383_763_993).abs() < 1e-12);
    assert!(r.log_ratio_to_generic <= 0.0);
}

#[test]
fn condition_is_strict() {
    let c = CovarianceMatrix::equicorrelated(3, 0.5).unwrap();
    let p_x = decoupling_coefficient(&c);
    assert!((p_x - 2.0).abs() < 1e-15);
    assert!(theorem1_log_constant(&c, 4.0).is_ok());
    assert!(matches!(
        theorem1_log_constant(&c, 4.0 - 1e-12),
        Err(Error::ConditionViolated { .. })
    ));
}

#[test]
fn identity_coefficient_is_one() {
    for n in [1, 2, 7, 30] {
        let c = CovarianceMatrix::identity(n);
        assert_eq!(decoupling_coefficient(&c), 1.0);
        let k = theorem1_log_constant(&c, 2.0).unwrap();
        assert!((k - 0.25 * n as f64 * LN_2).abs() < 1e-14);
    }
}

#[test]
fn stationary_sandwich_on_random_sequences() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..500 {
        let n = rng.random_range(2..40);
        let gamma = random_summable_gamma(&mut rng, n);
        let p = stationary_decoupling_coefficient(&gamma, n);
        let (s, two_s) = stationary_p_bounds(&gamma, n);
        assert!(s <= p + 1e-12 && p <= 1.0 + two_s + 1e-12, "{s} {p} {two_s}");
        let t = toeplitz(&gamma);
        let dense: f64 = (0..n)
            .map(|i| (0..n).map(|j| t[(i, j)].abs()).sum::<f64>())
            .fold(f64::NEG_INFINITY, f64::max)
            / gamma[0];
        assert!((p - dense).abs() < 1e-12 * dense);
    }
}

#[test]
fn ma1_coefficient() {
    let ma = MovingAverageSpec::ma1(0.5).unwrap();
    let gamma = ma.autocovariance(10);
    let p = stationary_decoupling_coefficient(&gamma, 10);
    assert!((p - 1.8).abs() < 1e-15);
}

#[test]
fn inverse_power_growth_is_logarithmic_squared() {
    for n in [100usize, 1000, 10_000] {
        let gamma = inverse_power_gamma_sequence(n, 1.0);
        let p = stationary_decoupling_coefficient(&gamma, n);
        let l = (n as f64).ln();
        assert!(p <= 4.0 * l * l, "n={n}: {p}");
        assert!(p > l);
    }
}

#[test]
fn central_probability_limits() {
    assert_eq!(central_probability(1.0, f64::INFINITY), 1.0);
    assert!((central_probability(2.0, 2.0) - 0.682_689_492_137_085_9).abs() < 1e-15);
}

#[test]
fn corollary_bound_matches_theorem_with_indicators() {
    let c = CovarianceMatrix::equicorrelated(3, 0.4).unwrap();
    let p = 2.0 * decoupling_coefficient(&c);
    let eps = [0.5, 1.0, 2.0];
    let log_bound = corollary1_log_bound(&c, p, &eps).unwrap();
    // Generic constant times Π P^{1/p} equals the box-probability form.
    let sig = c.sigmas();
    let log_norms: f64 = sig
        .iter()
        .zip(&eps)
        .map(|(&s, &e)| central_probability(s, e).ln() / p)
        .sum();
    let via_theorem = theorem1_log_constant(&c, p).unwrap() + log_norms;
    assert!((log_bound - via_theorem).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn refined_never_exceeds_generic(seed in any::<u64>(), n in 1usize..10, extra in 0.0f64..3.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = CovarianceMatrix::build_dense(random_spd(&mut rng, n)).unwrap();
        let p = 2.0 * decoupling_coefficient(&c) * (1.0 + extra);
        let bound = DecouplingBound::compute(&c, p).unwrap();
        prop_assert!(bound.valid);
        let generic = bound.log_constant_generic.unwrap();
        prop_assert!(bound.log_constant_refined.unwrap() <= generic + 1e-10);
        let oracle = generic_constant_oracle(&c, p).ln();
        prop_assert!((generic - oracle).abs() <= 1e-9 * (1.0 + oracle.abs()));
    }

    #[test]
    fn coefficient_bounds(seed in any::<u64>(), n in 1usize..12) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = CovarianceMatrix::build_dense(random_spd(&mut rng, n)).unwrap();
        let p = decoupling_coefficient(&c);
        // Row sums dominate the spectral radius of the normalized matrix.
        let sig = c.sigmas();
        let corr = nalgebra::DMatrix::from_fn(n, n, |i, j| c.get(i, j) / (sig[i] * sig[j]));
        let lambda_max = corr.symmetric_eigen().eigenvalues.max();
        prop_assert!(p >= 1.0);
        prop_assert!(p <= n as f64 * c.variances().iter().cloned().fold(0.0, f64::max)
            / c.variances().iter().cloned().fold(f64::INFINITY, f64::min) + 1e-12);
        prop_assert!(lambda_max <= p * c.variances().iter().cloned().fold(0.0, f64::max).sqrt()
            / c.variances().iter().cloned().fold(f64::INFINITY, f64::min).sqrt() + 1e-9);
    }
}
