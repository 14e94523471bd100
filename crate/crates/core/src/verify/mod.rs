//! Monte Carlo checks of the decoupling inequalities.
//!
//! Every check compares a left side against a right side, one of which is a
//! Monte Carlo mean, and grades the gap in standard errors.

mod functions;
mod quadrature;
mod sampler;

use serde::{Deserialize, Serialize};

pub use functions::{marginal_p_norm, TestFunctionSpec};
pub use quadrature::{GaussHermite, HERMITE_NODES};
pub use sampler::{sample_gaussian, Estimate, GaussianSampler, STREAM_ROWS};

use crate::covmodel::CovarianceMatrix;
use crate::decoupling::{
    central_probability, corollary1_log_bound, decoupling_coefficient, theorem1_log_constant,
};
use crate::error::{Error, Result};

/// `lhs <= rhs + PASS_SIGMAS * stderr` passes.
pub const PASS_SIGMAS: f64 = 3.0;
/// `lhs > rhs + HARD_FAIL_SIGMAS * stderr` is a hard failure.
pub const HARD_FAIL_SIGMAS: f64 = 6.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    StatisticalFail,
    HardFail,
}

impl Verdict {
    pub fn grade(lhs: f64, rhs: f64, stderr: f64) -> Self {
        if lhs <= rhs + PASS_SIGMAS * stderr {
            Verdict::Pass
        } else if lhs > rhs + HARD_FAIL_SIGMAS * stderr {
            Verdict::HardFail
        } else {
            Verdict::StatisticalFail
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::StatisticalFail => "statistical_fail",
            Verdict::HardFail => "hard_fail",
        }
    }
}

/// Outcome of one inequality check `lhs <= rhs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check: String,
    pub lhs_mc: f64,
    pub lhs_stderr: f64,
    pub rhs: f64,
    pub slack: f64,
    pub z_score: f64,
    pub n_samples: usize,
    pub seed: u64,
    pub verdict: Verdict,
}

impl VerificationReport {
    pub fn new(check: impl Into<String>, lhs: f64, stderr: f64, rhs: f64, n_samples: usize, seed: u64) -> Self {
        let slack = rhs - lhs;
        let z_score = if stderr > 0.0 {
            slack / stderr
        } else if slack == 0.0 {
            0.0
        } else {
            slack.signum() * f64::INFINITY
        };
        Self {
            check: check.into(),
            lhs_mc: lhs,
            lhs_stderr: stderr,
            rhs,
            slack,
            z_score,
            n_samples,
            seed,
            verdict: Verdict::grade(lhs, rhs, stderr),
        }
    }
}

fn validate_inputs(n: usize, fns: &[TestFunctionSpec], samples: usize) -> Result<()> {
    if fns.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: fns.len(),
        });
    }
    if samples == 0 {
        return Err(Error::InvalidSpec("sample count must be positive".into()));
    }
    fns.iter().try_for_each(TestFunctionSpec::validate)
}

/// `E ∏ f_i(X_i)` for `X ~ N(0, C)`.
pub fn product_expectation(c: &CovarianceMatrix, fns: &[TestFunctionSpec], samples: usize, seed: u64) -> Result<Estimate> {
    validate_inputs(c.dim(), fns, samples)?;
    let est = GaussianSampler::new(c, seed).estimate(samples, 1, |x, out| {
        out[0] = fns.iter().zip(x).map(|(f, &xi)| f.eval(xi)).product();
    });
    Ok(est[0])
}

/// Checks `|E ∏ f_i(X_i)| <= K(C, p) ∏ ‖f_i(X_i)‖_p`.
pub fn verify_theorem1(
    c: &CovarianceMatrix,
    p: f64,
    fns: &[TestFunctionSpec],
    samples: usize,
    seed: u64,
) -> Result<VerificationReport> {
    verify_theorem1_with(c, p, fns, samples, seed, false)
}

/// `K(C, p) ∏ ‖f_i(X_i)‖_p`; with `negate_constant` the constant is replaced
/// by its reciprocal, which must be caught as a failure on correlated inputs.
pub fn theorem1_rhs(c: &CovarianceMatrix, p: f64, fns: &[TestFunctionSpec], negate_constant: bool) -> Result<f64> {
    if fns.len() != c.dim() {
        return Err(Error::DimensionMismatch {
            expected: c.dim(),
            got: fns.len(),
        });
    }
    let mut log_k = theorem1_log_constant(c, p)?;
    if negate_constant {
        log_k = -log_k;
    }
    let mut log_norms = 0.0;
    for (f, s) in fns.iter().zip(c.sigmas()) {
        log_norms += marginal_p_norm(f, s, p)?.ln();
    }
    Ok((log_k + log_norms).exp())
}

/// As [`verify_theorem1`], optionally with the reciprocal constant.
pub fn verify_theorem1_with(
    c: &CovarianceMatrix,
    p: f64,
    fns: &[TestFunctionSpec],
    samples: usize,
    seed: u64,
    negate_constant: bool,
) -> Result<VerificationReport> {
    validate_inputs(c.dim(), fns, samples)?;
    let rhs = theorem1_rhs(c, p, fns, negate_constant)?;
    let est = product_expectation(c, fns, samples, seed)?;
    Ok(VerificationReport::new("theorem1", est.mean.abs(), est.stderr, rhs, samples, seed))
}

/// Reports of the probability sandwich around `P{|X_i| <= ε_i ∀i}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KhatriSidakReports {
    pub center: Estimate,
    /// `∏ P{|X_i| <= ε_i} <= center`.
    pub lower: VerificationReport,
    /// `center <= box-probability bound`.
    pub upper: VerificationReport,
    /// `center <= ∏ P{|X_i| <= ε_i}^{1/p_KLS}`, when a KLS exponent is given.
    pub kls_form: Option<VerificationReport>,
}

pub fn verify_khatri_sidak(
    c: &CovarianceMatrix,
    eps: &[f64],
    p: f64,
    samples: usize,
    seed: u64,
    kls_p: Option<f64>,
) -> Result<KhatriSidakReports> {
    let n = c.dim();
    if eps.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: eps.len(),
        });
    }
    if let Some(i) = eps.iter().position(|e| !(*e > 0.0)) {
        return Err(Error::InvalidSpec(format!("eps[{i}] must be positive")));
    }
    let p_x = decoupling_coefficient(c);
    if !(p >= 2.0 && p >= 2.0 * p_x) {
        return Err(Error::ConditionViolated { p, p_x });
    }
    let upper_rhs = corollary1_log_bound(c, p, eps)?.exp();
    let sigmas = c.sigmas();
    let log_prod_p: f64 = sigmas
        .iter()
        .zip(eps)
        .map(|(&s, &e)| central_probability(s, e).ln())
        .sum();
    let center = GaussianSampler::new(c, seed).estimate(samples, 1, |x, out| {
        out[0] = x.iter().zip(eps).all(|(xi, e)| xi.abs() <= *e) as u8 as f64;
    })[0];
    let lower = VerificationReport::new(
        "khatri_sidak_lower",
        log_prod_p.exp(),
        center.stderr,
        center.mean,
        samples,
        seed,
    );
    let upper = VerificationReport::new("corollary1_upper", center.mean, center.stderr, upper_rhs, samples, seed);
    let kls_form = kls_p.map(|q| {
        VerificationReport::new(
            "kls_probability_upper",
            center.mean,
            center.stderr,
            (log_prod_p / q).exp(),
            samples,
            seed,
        )
    });
    Ok(KhatriSidakReports {
        center,
        lower,
        upper,
        kls_form,
    })
}

/// `Σ_{h>=0} |γ(h)| / γ(0)` over the whole supplied sequence.
pub fn kls_coefficient(gamma: &[f64]) -> Result<f64> {
    match gamma.first() {
        Some(&g0) if g0 > 0.0 => Ok(gamma.iter().map(|g| g.abs()).sum::<f64>() / g0),
        Some(&g0) => Err(Error::NonPositiveDiagonal { index: 0, value: g0 }),
        None => Err(Error::InvalidSpec("empty autocovariance".into())),
    }
}

/// Checks `|E ∏ f_j(X_j)| <= ∏ ‖f_j(X_0)‖_{p_KLS}` for the `n`-section of a
/// stationary sequence, rescaled to unit variance. `gamma_full` supplies the
/// autocovariance far beyond `n` so that `p_KLS` sees the whole tail.
pub fn verify_kls(
    gamma_full: &[f64],
    n: usize,
    fns: &[TestFunctionSpec],
    samples: usize,
    seed: u64,
) -> Result<VerificationReport> {
    let p_kls = kls_coefficient(gamma_full)?;
    let g0 = gamma_full[0];
    if gamma_full.len() < n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: gamma_full.len(),
        });
    }
    let unit: Vec<f64> = gamma_full[..n].iter().map(|g| g / g0).collect();
    let c = CovarianceMatrix::from_stationary(&unit, n)?;
    let mut log_rhs = 0.0;
    for f in fns {
        log_rhs += marginal_p_norm(f, 1.0, p_kls)?.ln();
    }
    let est = product_expectation(&c, fns, samples, seed)?;
    Ok(VerificationReport::new(
        "kls_decoupling",
        est.mean.abs(),
        est.stderr,
        log_rhs.exp(),
        samples,
        seed,
    ))
}

/// Joint and marginal means from one sample run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndependenceCheck {
    pub joint: Estimate,
    pub marginals: Vec<Estimate>,
    pub product_of_marginals: f64,
    /// Delta-method standard error of `joint - product_of_marginals`.
    pub combined_stderr: f64,
}

impl IndependenceCheck {
    pub fn deviation(&self) -> f64 {
        (self.joint.mean - self.product_of_marginals).abs()
    }
}

pub fn independence_check(
    c: &CovarianceMatrix,
    fns: &[TestFunctionSpec],
    samples: usize,
    seed: u64,
) -> Result<IndependenceCheck> {
    let n = c.dim();
    validate_inputs(n, fns, samples)?;
    let est = GaussianSampler::new(c, seed).estimate(samples, n + 1, |x, out| {
        let mut prod = 1.0;
        for (i, (f, &xi)) in fns.iter().zip(x).enumerate() {
            let v = f.eval(xi);
            out[i + 1] = v;
            prod *= v;
        }
        out[0] = prod;
    });
    let joint = est[0];
    let marginals = est[1..].to_vec();
    let product_of_marginals: f64 = marginals.iter().map(|e| e.mean).product();
    let mut var = joint.stderr.powi(2);
    for i in 0..n {
        let others: f64 = (0..n).filter(|&j| j != i).map(|j| marginals[j].mean).product();
        var += (others * marginals[i].stderr).powi(2);
    }
    Ok(IndependenceCheck {
        joint,
        marginals,
        product_of_marginals,
        combined_stderr: var.sqrt(),
    })
}
