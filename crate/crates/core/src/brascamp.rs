//! Brascamp–Lieb constant `E_B` for the Gaussian-weighted Hölder inequality
//! and the determinant facts used to bound it.
//!
//! `E_B = (2π)^{(n/2)(1-1/p)} p^{n/(2p)} sup_{b>0} Π b_i^{1/(2p)} / det(B + diag b)^{1/2}`.
//! The supremum is found by a damped fixed point on the stationarity
//! condition `b_i = 1 / (p [(B + diag b)^{-1}]_ii)`, run in `log b`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::covmodel::CovarianceMatrix;
use crate::decoupling::shifted_matrix;
use crate::error::{Error, Result};
use crate::linalg::Cholesky;

/// Fixed-point solver settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EbSolverOptions {
    pub starts: usize,
    pub max_iter: usize,
    /// Stop once `max_i |1 - p b_i M_ii| < tol`.
    pub tol: f64,
    /// Starts must agree on the log value to this tolerance.
    pub agreement: f64,
    pub damping: f64,
    pub seed: u64,
}

impl Default for EbSolverOptions {
    fn default() -> Self {
        Self {
            starts: 8,
            max_iter: 10_000,
            tol: 1e-10,
            agreement: 1e-6,
            damping: 0.5,
            seed: 0x5eed_eb,
        }
    }
}

/// Result of maximizing the `E_B` ratio for one `(B, p)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EbProblem {
    pub n: usize,
    pub p: f64,
    pub b_opt: Vec<f64>,
    /// `log[Π b_i^{1/(2p)} / det(B + diag b)^{1/2}]` at `b_opt`.
    pub value_log: f64,
    /// `log E_B` with the `(2π)^{(n/2)(1-1/p)} p^{n/(2p)}` prefactor.
    pub eb_log: f64,
    /// Log of the determinant upper bound `(2π)^{(n/2)(1-1/p)} / det(B)^{(1/2)(1-1/p)}`.
    pub upper_log: f64,
    pub converged: bool,
    /// `max_i |1 - p b_i M_ii|` at the best start.
    pub residual: f64,
    /// `max_i |1/(2p b_i) - M_ii/2|` at the best start.
    pub stationarity_residual: f64,
    pub iterations: usize,
    /// Largest log-value gap between the best start and any other start.
    pub start_spread: f64,
}

impl EbProblem {
    pub fn into_result(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::NonConverged {
                residual: self.residual,
                best_log: self.eb_log,
            })
        }
    }
}

fn eb_prefactor_log(n: usize, p: f64) -> f64 {
    let n = n as f64;
    0.5 * n * (1.0 - 1.0 / p) * (2.0 * PI).ln() + n / (2.0 * p) * p.ln()
}

fn check_square(b: &DMatrix<f64>) -> Result<usize> {
    if b.nrows() != b.ncols() {
        return Err(Error::NotSquare {
            rows: b.nrows(),
            cols: b.ncols(),
        });
    }
    Ok(b.nrows())
}

fn with_diagonal(b: &DMatrix<f64>, d: &[f64]) -> DMatrix<f64> {
    let mut m = b.clone();
    for (i, v) in d.iter().enumerate() {
        m[(i, i)] += v;
    }
    m
}

/// `B = C^{-1} - (1/p) diag(1/σ²)`, checked positive definite.
pub fn matrix_b(c: &CovarianceMatrix, p: f64) -> Result<DMatrix<f64>> {
    let mut b = c.cholesky().inverse();
    for (i, v) in c.variances().iter().enumerate() {
        b[(i, i)] -= 1.0 / (p * v);
    }
    Cholesky::factor(&b).map_err(|e| {
        e.with_note(format!(
            "B = C^-1 - I/(p sigma^2) is not positive definite at p = {p}"
        ))
    })?;
    Ok(b)
}

/// Log of the full `E_B` integrand ratio, prefactor included.
pub fn eb_objective(b_mat: &DMatrix<f64>, p: f64, b: &[f64]) -> Result<f64> {
    let n = check_square(b_mat)?;
    if b.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: b.len(),
        });
    }
    if b.iter().any(|v| !(*v > 0.0)) {
        return Err(Error::InvalidSpec("every b_i must be positive".into()));
    }
    let log_det = Cholesky::factor(&with_diagonal(b_mat, b))?.log_det();
    let sum_log_b: f64 = b.iter().map(|v| v.ln()).sum();
    Ok(eb_prefactor_log(n, p) + sum_log_b / (2.0 * p) - 0.5 * log_det)
}

/// `log[(2π)^{(n/2)(1-1/p)} / det(B)^{(1/2)(1-1/p)}]`.
pub fn eb_upper_bound(b_mat: &DMatrix<f64>, p: f64) -> Result<f64> {
    let n = check_square(b_mat)? as f64;
    let log_det = Cholesky::factor(b_mat)?.log_det();
    Ok((1.0 - 1.0 / p) * (0.5 * n * (2.0 * PI).ln() - 0.5 * log_det))
}

struct StartOutcome {
    log_b: Vec<f64>,
    value_log: f64,
    residual: f64,
    stationarity: f64,
    iterations: usize,
}

fn run_start(b_mat: &DMatrix<f64>, p: f64, mut u: Vec<f64>, opts: &EbSolverOptions) -> Result<StartOutcome> {
    let n = u.len();
    let mut iterations = 0;
    loop {
        let b: Vec<f64> = u.iter().map(|v| v.exp()).collect();
        let chol = Cholesky::factor(&with_diagonal(b_mat, &b))?;
        let m = chol.inverse_diagonal();
        let residual = (0..n)
            .map(|i| (1.0 - p * b[i] * m[i]).abs())
            .fold(0.0, f64::max);
        let stationarity = (0..n)
            .map(|i| (1.0 / (2.0 * p * b[i]) - 0.5 * m[i]).abs())
            .fold(0.0, f64::max);
        if residual < opts.tol || iterations >= opts.max_iter {
            let sum_log_b: f64 = u.iter().sum();
            return Ok(StartOutcome {
                value_log: sum_log_b / (2.0 * p) - 0.5 * chol.log_det(),
                log_b: u,
                residual,
                stationarity,
                iterations,
            });
        }
        for i in 0..n {
            let target = -(p * m[i]).ln();
            u[i] = (1.0 - opts.damping) * target + opts.damping * u[i];
        }
        iterations += 1;
    }
}

pub fn eb_optimize(b_mat: &DMatrix<f64>, p: f64) -> Result<EbProblem> {
    eb_optimize_with(b_mat, p, &EbSolverOptions::default())
}

pub fn eb_optimize_with(b_mat: &DMatrix<f64>, p: f64, opts: &EbSolverOptions) -> Result<EbProblem> {
    let n = check_square(b_mat)?;
    if !(p > 1.0) {
        return Err(Error::InvalidSpec("E_B needs p > 1".into()));
    }
    let upper_log = eb_upper_bound(b_mat, p)?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let ln10 = 10f64.ln();
    let starts: Vec<Vec<f64>> = (0..opts.starts.max(1))
        .map(|_| (0..n).map(|_| rng.random_range(-3.0..3.0) * ln10).collect())
        .collect();
    let outcomes = starts
        .into_par_iter()
        .map(|u| run_start(b_mat, p, u, opts))
        .collect::<Result<Vec<_>>>()?;
    let best = outcomes
        .iter()
        .max_by(|a, b| a.value_log.total_cmp(&b.value_log))
        .expect("at least one start");
    let start_spread = outcomes
        .iter()
        .map(|o| best.value_log - o.value_log)
        .fold(0.0, f64::max);
    let converged = outcomes.iter().all(|o| o.residual < opts.tol) && start_spread <= opts.agreement;
    Ok(EbProblem {
        n,
        p,
        b_opt: best.log_b.iter().map(|v| v.exp()).collect(),
        value_log: best.value_log,
        eb_log: eb_prefactor_log(n, p) + best.value_log,
        upper_log,
        converged,
        residual: best.residual,
        stationarity_residual: best.stationarity,
        iterations: outcomes.iter().map(|o| o.iterations).max().unwrap_or(0),
        start_spread,
    })
}

/// Both sides of `det(λU + (1-λ)V) >= det(U)^λ det(V)^{1-λ}` in log space.
pub fn minkowski_check(u: &DMatrix<f64>, v: &DMatrix<f64>, lambda: f64) -> Result<(f64, f64)> {
    let n = check_square(u)?;
    if check_square(v)? != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: v.nrows(),
        });
    }
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::InvalidSpec("lambda must lie in [0, 1]".into()));
    }
    let lu = Cholesky::factor(u)?.log_det();
    let lv = Cholesky::factor(v)?.log_det();
    let mix = u * lambda + v * (1.0 - lambda);
    let lhs = Cholesky::factor(&mix)?.log_det();
    Ok((lhs, lambda * lu + (1.0 - lambda) * lv))
}

/// Log of `Π_i (|a_ii| - Σ_{j≠i} |a_ij|)`, a lower bound on `|det A|` for
/// strictly diagonally dominant `A`; `None` when some row is not dominant.
pub fn ostrowski_bound(a: &DMatrix<f64>) -> Option<f64> {
    let n = a.nrows();
    if a.ncols() != n {
        return None;
    }
    let mut acc = 0.0;
    for i in 0..n {
        let off: f64 = (0..n).filter(|&j| j != i).map(|j| a[(i, j)].abs()).sum();
        let margin = a[(i, i)].abs() - off;
        if !(margin > 0.0) {
            return None;
        }
        acc += margin.ln();
    }
    Some(acc)
}

/// `log det(B)` directly and through `det(pI(γ) - C) / (pⁿ det(C) Π σ_i²)`.
pub fn detb_identity_check(c: &CovarianceMatrix, p: f64) -> Result<(f64, f64)> {
    let direct = Cholesky::factor(&matrix_b(c, p)?)?.log_det();
    let shifted = Cholesky::factor(&shifted_matrix(c, p))?.log_det();
    let n = c.dim() as f64;
    let sum_log_var: f64 = c.variances().iter().map(|v| v.ln()).sum();
    Ok((direct, shifted - n * p.ln() - c.log_det() - sum_log_var))
}

/// The Gaussian-input ratio computed from its two integrals versus the
/// closed form of the objective.
pub fn gaussian_extremal_check(b_mat: &DMatrix<f64>, p: f64, b: &[f64]) -> Result<(f64, f64)> {
    let n = check_square(b_mat)?;
    if !(p > 1.0) {
        return Err(Error::InvalidSpec("needs p > 1".into()));
    }
    let closed = eb_objective(b_mat, p, b)?;
    let m = with_diagonal(b_mat, b);
    // Numerator ∫ exp(-½ xᵀ(B + diag b)x) dx = (2π)^{n/2} det^{-1/2}; LU route.
    let det = m.clone().lu().determinant();
    if !(det > 0.0) {
        Cholesky::factor(&m)?;
    }
    let numerator = 0.5 * n as f64 * (2.0 * PI).ln() - 0.5 * det.ln();
    // Denominator Π (∫ exp(-½ p b_i x²) dx)^{1/p} = Π (2π/(p b_i))^{1/(2p)}.
    let denominator: f64 = b
        .iter()
        .map(|bi| (2.0 * PI / (p * bi)).ln() / (2.0 * p))
        .sum();
    Ok((numerator - denominator, closed))
}
