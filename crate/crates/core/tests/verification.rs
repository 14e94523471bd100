use gdecouple::covmodel::{CovarianceMatrix, MovingAverageSpec};
use gdecouple::decoupling::decoupling_coefficient;
use gdecouple::verify::{
    independence_check, marginal_p_norm, sample_gaussian, verify_kls, verify_theorem1, GaussianSampler,
    TestFunctionSpec, Verdict,
};
use nalgebra::DMatrix;

fn kinds() -> Vec<TestFunctionSpec> {
    vec![
        TestFunctionSpec::Indicator { eps: 0.8 },
        TestFunctionSpec::ShiftedIndicator { shift: 0.5, eps: 0.7 },
        TestFunctionSpec::Cosine { omega: 1.3 },
        TestFunctionSpec::BoundedPoly {
            coeffs: vec![0.2, -0.5, 0.3, 0.1, -0.05],
            clip: 1.5,
        },
        TestFunctionSpec::Grid {
            half_width: 2.0,
            values: vec![0.0, 0.4, 1.0, -0.3, 0.8, 0.0],
        },
    ]
}

#[test]
fn identity_sample_covariance() {
    let n = 3;
    let total = 1_000_000;
    let s = sample_gaussian(&CovarianceMatrix::identity(n), total, 42);
    let cov = s.transpose() * &s / total as f64;
    let dev = (cov - DMatrix::<f64>::identity(n, n)).amax();
    assert!(dev < 0.004, "{dev}");
}

#[test]
fn sampling_is_bitwise_reproducible() {
    let c = CovarianceMatrix::equicorrelated(4, 0.6).unwrap();
    assert_eq!(sample_gaussian(&c, 20_000, 9), sample_gaussian(&c, 20_000, 9));
}

#[test]
fn quadrature_matches_large_monte_carlo() {
    let sigma = 1.7;
    let p = 2.5;
    let c = CovarianceMatrix::build_dense(DMatrix::from_element(1, 1, sigma * sigma)).unwrap();
    let fns = kinds();
    let k = fns.len();
    let est = GaussianSampler::new(&c, 1234).estimate(10_000_000, k, |x, out| {
        for (o, f) in out.iter_mut().zip(&fns) {
            *o = f.eval(x[0]).abs().powf(p);
        }
    });
    for (f, e) in fns.iter().zip(est) {
        let q = marginal_p_norm(f, sigma, p).unwrap().powf(p);
        assert!((q - e.mean).abs() <= 4.0 * e.stderr, "{f}: {q} vs {} ± {}", e.mean, e.stderr);
    }
}

#[test]
fn independence_for_diagonal_covariance() {
    let c = CovarianceMatrix::build_dense(DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
        0.5, 1.0, 2.0, 1.5, 0.8,
    ])))
    .unwrap();
    for seed in 0..4 {
        let r = independence_check(&c, &kinds(), 200_000, seed).unwrap();
        assert!(r.deviation() <= 4.0 * r.combined_stderr, "seed {seed}");
    }
}

#[test]
fn theorem1_mixed_functions_pass() {
    let ma = MovingAverageSpec::ma1(0.8).unwrap();
    let c = CovarianceMatrix::from_moving_average(&ma, 5).unwrap();
    let p = 2.0 * decoupling_coefficient(&c);
    let r = verify_theorem1(&c, p, &kinds(), 100_000, 3).unwrap();
    assert_eq!(r.verdict, Verdict::Pass);
    assert_eq!(r.slack, r.rhs - r.lhs_mc);
}

#[test]
fn kls_inverse_power_r2() {
    let gamma = gdecouple::covmodel::inverse_power_gamma_sequence(100_000, 2.0);
    let fns = vec![TestFunctionSpec::Indicator { eps: 1.0 }; 6];
    let r = verify_kls(&gamma, 6, &fns, 100_000, 11).unwrap();
    assert_eq!(r.verdict, Verdict::Pass);
}
