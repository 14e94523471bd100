//! Decoupling coefficient `p(X)` and the bound constants of the general
//! decoupling inequality, all carried in log space.

use std::f64::consts::{LN_2, SQRT_2};

use serde::{Deserialize, Serialize};
use libm::erf;

use crate::covmodel::CovarianceMatrix;
use crate::error::{Error, Result};
use crate::linalg::Cholesky;

/// `max_i Σ_j |C_ij| / C_ii`, the diagonal term included.
pub fn decoupling_coefficient(c: &CovarianceMatrix) -> f64 {
    row_sum_coefficient(c.entries())
}

/// The same row-sum ratio for a raw square array with positive diagonal,
/// without requiring a factorization.
pub fn row_sum_coefficient(m: &nalgebra::DMatrix<f64>) -> f64 {
    let n = m.nrows();
    (0..n)
        .map(|i| (0..n).map(|j| m[(i, j)].abs()).sum::<f64>() / m[(i, i)])
        .fold(f64::NEG_INFINITY, f64::max)
}

/// `p(X)` of the `n`-section of a stationary sequence, in `O(n)` without
/// forming the matrix. Entries of `gamma` past its end count as zero.
pub fn stationary_decoupling_coefficient(gamma: &[f64], n: usize) -> f64 {
    assert!(n >= 1 && !gamma.is_empty() && gamma[0] > 0.0);
    // prefix[h] = Σ_{k<=h} |γ(k)|
    let mut prefix = Vec::with_capacity(n);
    let mut acc = 0.0;
    for h in 0..n {
        acc += gamma.get(h).map_or(0.0, |g| g.abs());
        prefix.push(acc);
    }
    let g0 = gamma[0].abs();
    (0..n)
        .map(|i| prefix[i] + prefix[n - 1 - i] - g0)
        .fold(f64::NEG_INFINITY, f64::max)
        / gamma[0]
}

/// `(S, 2S)` with `S = Σ_{1<=h<=n-1} |γ(h)|/γ(0)`.
///
/// The decoupling coefficient of the section satisfies `S <= p(X) <= 1 + 2S`;
/// the `+1` is the diagonal term.
pub fn stationary_p_bounds(gamma: &[f64], n: usize) -> (f64, f64) {
    assert!(!gamma.is_empty() && gamma[0] > 0.0);
    let s: f64 = (1..n)
        .map(|h| gamma.get(h).map_or(0.0, |g| g.abs()))
        .sum::<f64>()
        / gamma[0];
    (s, 2.0 * s)
}

fn check_condition(c: &CovarianceMatrix, p: f64) -> Result<f64> {
    let p_x = decoupling_coefficient(c);
    if p >= 2.0 * p_x {
        Ok(p_x)
    } else {
        Err(Error::ConditionViolated { p, p_x })
    }
}

fn sum_log_sigma(c: &CovarianceMatrix) -> f64 {
    0.5 * c.variances().iter().map(|v| v.ln()).sum::<f64>()
}

/// `log[2^{(n/2)(1-1/p)} (Π σ_i)^{1/p} / det(C)^{1/(2p)}]`.
pub fn theorem1_log_constant(c: &CovarianceMatrix, p: f64) -> Result<f64> {
    check_condition(c, p)?;
    let n = c.dim() as f64;
    Ok(0.5 * n * (1.0 - 1.0 / p) * LN_2 + sum_log_sigma(c) / p - c.log_det() / (2.0 * p))
}

pub fn theorem1_constant(c: &CovarianceMatrix, p: f64) -> Result<f64> {
    theorem1_log_constant(c, p).map(f64::exp)
}

/// `p·diag(σ²) - C`.
pub fn shifted_matrix(c: &CovarianceMatrix, p: f64) -> nalgebra::DMatrix<f64> {
    let mut m = -c.entries().clone();
    for i in 0..c.dim() {
        m[(i, i)] += p * c.get(i, i);
    }
    m
}

/// Constant that keeps the exact `det(p diag(σ²) - C)` instead of its
/// diagonal-dominance lower bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RefinedConstant {
    /// `log[p^{(n/2)(1-1/p)} Π σ_i / (det(pI(γ)-C)^{(1/2)(1-1/p)} det(C)^{1/(2p)})]`.
    pub log_constant: f64,
    /// `log(refined / generic)`; never positive when the condition holds.
    pub log_ratio_to_generic: f64,
}

pub fn refined_constant(c: &CovarianceMatrix, p: f64) -> Result<RefinedConstant> {
    let generic = theorem1_log_constant(c, p)?;
    let n = c.dim() as f64;
    let shifted_log_det = Cholesky::factor(&shifted_matrix(c, p))?.log_det();
    let log_constant = 0.5 * n * (1.0 - 1.0 / p) * p.ln() + sum_log_sigma(c)
        - 0.5 * (1.0 - 1.0 / p) * shifted_log_det
        - c.log_det() / (2.0 * p);
    Ok(RefinedConstant {
        log_constant,
        log_ratio_to_generic: log_constant - generic,
    })
}

/// `P{|X| <= eps}` for `X ~ N(0, σ²)`.
pub fn central_probability(sigma: f64, eps: f64) -> f64 {
    if eps.is_infinite() {
        1.0
    } else {
        erf(eps / (sigma * SQRT_2))
    }
}

/// Log of `2^{n/2} det(C)^{-1/(2p)} Π (σ_i/√2 · P{|X_i| <= ε_i})^{1/p}`.
pub fn corollary1_log_bound(c: &CovarianceMatrix, p: f64, eps: &[f64]) -> Result<f64> {
    if eps.len() != c.dim() {
        return Err(Error::DimensionMismatch {
            expected: c.dim(),
            got: eps.len(),
        });
    }
    if eps.iter().any(|e| !(*e > 0.0)) {
        return Err(Error::InvalidSpec("every epsilon must be positive".into()));
    }
    check_condition(c, p)?;
    if p < 2.0 {
        return Err(Error::ConditionViolated {
            p,
            p_x: decoupling_coefficient(c),
        });
    }
    let n = c.dim() as f64;
    let prod: f64 = c
        .sigmas()
        .iter()
        .zip(eps)
        .map(|(&s, &e)| s.ln() - 0.5 * LN_2 + central_probability(s, e).ln())
        .sum();
    Ok(0.5 * n * LN_2 - c.log_det() / (2.0 * p) + prod / p)
}

pub fn corollary1_bound(c: &CovarianceMatrix, p: f64, eps: &[f64]) -> Result<f64> {
    corollary1_log_bound(c, p, eps).map(f64::exp)
}

/// Everything the general decoupling inequality needs for one `(C, p)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecouplingBound {
    pub n: usize,
    pub p_x: f64,
    pub p: f64,
    /// `p >= 2 p(X)`.
    pub valid: bool,
    pub log_det: f64,
    pub log_constant_generic: Option<f64>,
    pub log_constant_refined: Option<f64>,
    pub constant_generic: Option<f64>,
    pub constant_refined: Option<f64>,
}

impl DecouplingBound {
    pub fn compute(c: &CovarianceMatrix, p: f64) -> Result<Self> {
        let p_x = decoupling_coefficient(c);
        let valid = p >= 2.0 * p_x;
        let (generic, refined) = if valid {
            (
                Some(theorem1_log_constant(c, p)?),
                Some(refined_constant(c, p)?.log_constant),
            )
        } else {
            (None, None)
        };
        Ok(Self {
            n: c.dim(),
            p_x,
            p,
            valid,
            log_det: c.log_det(),
            log_constant_generic: generic,
            log_constant_refined: refined,
            constant_generic: generic.map(f64::exp),
            constant_refined: refined.map(f64::exp),
        })
    }
}
