use gdecouple::covmodel::{CovarianceMatrix, MovingAverageSpec};
use gdecouple::decoupling::theorem1_log_constant;
use gdecouple::szego::{
    b_constant, condition_report, exact_toeplitz_log_det, geometric_mean, szego_asymptote, theorem2_constant,
    SpectralSymbol, DEFAULT_GRID,
};
use gdecouple::Error;

/// `D_n = (1 + a²) D_{n-1} - a² D_{n-2}` for the MA(1) Toeplitz sections.
fn tridiagonal_dets(a: f64, n_max: usize) -> Vec<f64> {
    let mut d = vec![1.0, 1.0 + a * a];
    for n in 2..=n_max {
        d.push((1.0 + a * a) * d[n - 1] - a * a * d[n - 2]);
    }
    d
}

#[test]
fn ma1_exact_determinant_matches_recurrence() {
    let sym = SpectralSymbol::ma1(0.5, DEFAULT_GRID).unwrap();
    let oracle = tridiagonal_dets(0.5, 200);
    for n in 1..=200 {
        let exact = exact_toeplitz_log_det(&sym, n).unwrap().exp();
        assert!((exact / oracle[n] - 1.0).abs() < 1e-10, "n={n}");
    }
}

#[test]
fn ma1_constants_and_ratio() {
    let sym = SpectralSymbol::ma1(0.5, DEFAULT_GRID).unwrap();
    assert!((geometric_mean(&sym).unwrap() - 1.0).abs() < 1e-10);
    assert!((b_constant(&sym).unwrap() - 4.0 / 3.0).abs() < 1e-8);
    let est = szego_asymptote(&sym, 50).unwrap();
    assert!((est.ratio.unwrap() - 1.0).abs() < 1e-5);
    let est = szego_asymptote(&sym, 10).unwrap();
    let expected = 1.0 - 0.25f64.powi(11);
    assert!((est.ratio.unwrap() - expected).abs() < 1e-12);
}

#[test]
fn ma1_ratio_converges_for_moderate_coefficients() {
    for a in [-0.9, -0.6, -0.2, 0.1, 0.4, 0.7, 0.9] {
        let sym = SpectralSymbol::ma1(a, DEFAULT_GRID).unwrap();
        let b = b_constant(&sym).unwrap();
        assert!((b - 1.0 / (1.0 - a * a)).abs() < 1e-8 * b, "a={a}");
        let mut last = f64::INFINITY;
        for n in [10usize, 40, 160] {
            let gap = (szego_asymptote(&sym, n).unwrap().ratio.unwrap() - 1.0).abs();
            let exact_gap = a.abs().powi(2 * (n as i32 + 1));
            assert!((gap - exact_gap).abs() < 1e-9, "a={a} n={n}");
            if exact_gap > 1e-13 {
                assert!(gap <= last);
            }
            last = gap;
        }
    }
}

#[test]
fn constant_symbol_ratio_is_one() {
    let sym = SpectralSymbol::constant(2.5, 256).unwrap();
    for n in [1usize, 5, 50, 129] {
        let est = szego_asymptote(&sym, n).unwrap();
        assert!((est.ratio.unwrap() - 1.0).abs() < 1e-12);
        assert!((est.g - 2.5).abs() < 1e-13);
        assert!((est.b - 1.0).abs() < 1e-14);
    }
}

#[test]
fn non_positive_symbol_is_rejected() {
    let sym = SpectralSymbol::ma1(1.0, 256).unwrap();
    assert!(matches!(geometric_mean(&sym), Err(Error::NonPositiveSymbol { .. })));
    let sym = SpectralSymbol::from_fn(256, |t| t.cos()).unwrap();
    assert!(matches!(szego_asymptote(&sym, 5), Err(Error::NonPositiveSymbol { .. })));
}

#[test]
fn trigonometric_polynomial_recovery() {
    let sym = SpectralSymbol::from_fn(64, |t| 2.0 + t.cos() + 0.5 * (3.0 * t).cos()).unwrap();
    let expected = [2.0, 0.5, 0.0, 0.25, 0.0, 0.0];
    for (k, e) in expected.iter().enumerate() {
        assert!((sym.d(k as i64).re - e).abs() < 1e-14, "k={k}");
        assert!((sym.d(-(k as i64)).re - e).abs() < 1e-14);
    }
}

#[test]
fn log_coefficients_roundtrip() {
    let c = [0.3, 0.2, -0.1, 0.05];
    let sym = SpectralSymbol::from_log_coefficients(&c, 128).unwrap();
    for (k, v) in c.iter().enumerate() {
        assert!((sym.c(k as i64).unwrap().re - v).abs() < 1e-13);
    }
    let s2: f64 = c.iter().enumerate().map(|(k, v)| k as f64 * v * v).sum();
    assert!((b_constant(&sym).unwrap() - s2.exp()).abs() < 1e-12);
    assert!(condition_report(&sym).unwrap().pass());
}

#[test]
fn theorem2_agrees_with_theorem1_for_long_sections() {
    let sym = SpectralSymbol::ma1(0.5, DEFAULT_GRID).unwrap();
    let n = 50;
    let gamma: Vec<f64> = MovingAverageSpec::ma1(0.5)
        .unwrap()
        .autocovariance(n)
        .iter()
        .map(|g| g / 1.25)
        .collect();
    let c = CovarianceMatrix::from_stationary(&gamma, n).unwrap();
    for p in [3.6, 5.0, 10.0] {
        let t2 = theorem2_constant(&sym, n, p).unwrap();
        let t1 = theorem1_log_constant(&c, p).unwrap();
        assert!((t2.log_constant - t1).abs() < 1e-8, "p={p}: {} vs {t1}", t2.log_constant);
        assert!(t2.normalized);
    }
    assert!(matches!(
        theorem2_constant(&sym, n, 3.0),
        Err(Error::ConditionViolated { .. })
    ));
}

#[test]
fn inverse_power_symbol_matches_covariance_model() {
    let sym = SpectralSymbol::inverse_power(2.0, 1024).unwrap();
    let gamma = gdecouple::covmodel::inverse_power_gamma_sequence(20, 2.0);
    for (k, g) in gamma.iter().enumerate() {
        assert!((sym.d(k as i64).re - g).abs() < 1e-10 * gamma[0]);
    }
}
