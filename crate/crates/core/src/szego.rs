//! Spectral symbols, Toeplitz determinants and their strong Szegő asymptote.
//!
//! A symbol `f` on `[-π, π)` is held as `2K` uniform grid samples. Its Fourier
//! coefficients `d_k` (the autocovariances) and the coefficients `c_k` of
//! `log f` come from a single FFT each, so every `|k| <= K` is available.
//! Conventions: `G(f) = exp(c_0)` and `b(f) = exp(Σ_{k≥1} k c_k c_{-k})`.

use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::covmodel::{inverse_power_gamma_sequence, CovarianceMatrix};
use crate::decoupling::stationary_decoupling_coefficient;
use crate::error::{Error, Result};

/// Default grid size `2K`.
pub const DEFAULT_GRID: usize = 4096;
/// Smallest admissible `K`.
pub const MIN_HALF_GRID: usize = 8;
/// Exact Toeplitz determinants are only formed up to this order.
pub const EXACT_DET_LIMIT: usize = 2048;
/// A grid value must exceed this for `log f` to be taken.
pub const POSITIVITY_FLOOR: f64 = 1e-300;
/// Tolerance on the estimated tail of `Σ k |c_k|²` for [`b_constant`].
pub const B_TAIL_TOL: f64 = 1e-12;

const EVEN_REL_TOL: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralSymbol {
    grid: Vec<f64>,
    half: usize,
    /// `d_k` for `k = 0..=K`; `d_{-k} = conj(d_k)`.
    d: Vec<Complex64>,
    /// `c_k` for `k = 0..=K` when the symbol is strictly positive.
    c: Option<Vec<Complex64>>,
    strictly_positive: bool,
    even: bool,
    min_value: f64,
}

fn grid_point(j: usize, half: usize) -> f64 {
    -PI + j as f64 * PI / half as f64
}

/// `x_k = (1/N) Σ_j v_j e^{-i k t_j}` for `k = 0..=N/2` with `t_j` on the grid.
fn forward_coefficients(values: &[f64]) -> Vec<Complex64> {
    let n = values.len();
    let half = n / 2;
    let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    (0..=half)
        .map(|k| {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let mut x = buf[k] * (sign / n as f64);
            if k == half {
                // The Nyquist bin carries d_K + d_{-K}; split it evenly.
                x *= 0.5;
            }
            x
        })
        .collect()
}

/// Grid values of the real trigonometric series `a_0 + 2 Σ_{k=1}^{K-1} a_k cos(k t)`.
fn even_series_on_grid(coeffs: &[f64], half: usize) -> Vec<f64> {
    let n = 2 * half;
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    for (k, &a) in coeffs.iter().enumerate().take(half) {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        buf[k] += a * sign;
        if k > 0 {
            buf[n - k] += a * sign;
        }
    }
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    buf.into_iter().map(|z| z.re).collect()
}

impl SpectralSymbol {
    /// Build a symbol from `2K` samples on the uniform grid `t_j = -π + jπ/K`.
    pub fn from_grid(values: &[f64]) -> Result<Self> {
        let n = values.len();
        if n % 2 != 0 || n / 2 < MIN_HALF_GRID {
            return Err(Error::InvalidSpec(format!(
                "symbol grid needs an even number of samples >= {}, got {n}",
                2 * MIN_HALF_GRID
            )));
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteInput { index });
        }
        let half = n / 2;
        let scale = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let even = (1..n).all(|j| (values[j] - values[n - j]).abs() <= EVEN_REL_TOL * scale);
        let mut d = forward_coefficients(values);
        if even {
            d.iter_mut().for_each(|z| z.im = 0.0);
        }
        let min_value = values.iter().copied().fold(f64::INFINITY, f64::min);
        let strictly_positive = min_value > POSITIVITY_FLOOR;
        let c = if strictly_positive {
            let logs: Vec<f64> = values.iter().map(|v| v.ln()).collect();
            let mut c = forward_coefficients(&logs);
            if even {
                c.iter_mut().for_each(|z| z.im = 0.0);
            }
            Some(c)
        } else {
            None
        };
        Ok(Self {
            grid: values.to_vec(),
            half,
            d,
            c,
            strictly_positive,
            even,
            min_value,
        })
    }

    /// Sample `f` on a grid of `grid_len = 2K` points.
    pub fn from_fn(grid_len: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let half = grid_len / 2;
        let values: Vec<f64> = (0..grid_len).map(|j| f(grid_point(j, half))).collect();
        Self::from_grid(&values)
    }

    pub fn constant(value: f64, grid_len: usize) -> Result<Self> {
        Self::from_fn(grid_len, |_| value)
    }

    /// `f(t) = |1 + a e^{it}|² = 1 + a² + 2a cos t`.
    pub fn ma1(a: f64, grid_len: usize) -> Result<Self> {
        Self::from_fn(grid_len, |t| 1.0 + a * a + 2.0 * a * t.cos())
    }

    /// Symbol whose first `K` Fourier coefficients are the autocovariances of
    /// the inverse-power moving average `c_m = |m|^{-r}`.
    pub fn inverse_power(r: f64, grid_len: usize) -> Result<Self> {
        if grid_len % 2 != 0 || grid_len / 2 < MIN_HALF_GRID {
            return Err(Error::InvalidSpec(format!("bad grid length {grid_len}")));
        }
        if !(r >= 1.0) {
            return Err(Error::InvalidSpec("inverse_power symbol needs r >= 1".into()));
        }
        let half = grid_len / 2;
        let gamma = inverse_power_gamma_sequence(half, r);
        Self::from_grid(&even_series_on_grid(&gamma, half))
    }

    /// `f = exp(c_0 + 2 Σ_{k≥1} c_k cos(k t))` for real even log-coefficients.
    pub fn from_log_coefficients(c: &[f64], grid_len: usize) -> Result<Self> {
        if grid_len % 2 != 0 || grid_len / 2 < MIN_HALF_GRID {
            return Err(Error::InvalidSpec(format!("bad grid length {grid_len}")));
        }
        let half = grid_len / 2;
        if c.len() > half {
            return Err(Error::InvalidSpec(format!(
                "{} log-coefficients do not fit a grid with K = {half}",
                c.len()
            )));
        }
        let logs = even_series_on_grid(c, half);
        Self::from_grid(&logs.iter().map(|v| v.exp()).collect::<Vec<_>>())
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    /// `K`, half the grid size.
    pub fn half_grid(&self) -> usize {
        self.half
    }

    pub fn strictly_positive(&self) -> bool {
        self.strictly_positive
    }

    pub fn is_even(&self) -> bool {
        self.even
    }

    pub fn min_value(&self) -> f64 {
        self.min_value
    }

    /// `d_k` for `|k| <= K`, zero beyond.
    pub fn d(&self, k: i64) -> Complex64 {
        let idx = k.unsigned_abs() as usize;
        match self.d.get(idx) {
            Some(z) if k >= 0 => *z,
            Some(z) => z.conj(),
            None => Complex64::new(0.0, 0.0),
        }
    }

    /// Real autocovariances `d_0, ..., d_{len-1}` (zero beyond `K`).
    pub fn autocovariance(&self, len: usize) -> Vec<f64> {
        (0..len as i64).map(|k| self.d(k).re).collect()
    }

    pub fn log_coefficients(&self) -> Option<&[Complex64]> {
        self.c.as_deref()
    }

    /// `c_k` for `|k| <= K`.
    pub fn c(&self, k: i64) -> Result<Complex64> {
        let c = self.require_c()?;
        let idx = k.unsigned_abs() as usize;
        Ok(match c.get(idx) {
            Some(z) if k >= 0 => *z,
            Some(z) => z.conj(),
            None => Complex64::new(0.0, 0.0),
        })
    }

    fn require_c(&self) -> Result<&[Complex64]> {
        self.c.as_deref().ok_or(Error::NonPositiveSymbol {
            min: self.min_value,
        })
    }

    /// `max |c_k|` over `K/2 <= |k| <= K`, a proxy for aliasing error.
    pub fn aliasing_bound(&self) -> Result<f64> {
        let c = self.require_c()?;
        Ok(c[self.half / 2..]
            .iter()
            .fold(0.0_f64, |m, z| m.max(z.norm())))
    }

    /// `Σ_{k=1}^K k c_k c_{-k}`.
    fn second_order_sum(&self) -> Result<f64> {
        let c = self.require_c()?;
        Ok(c.iter()
            .enumerate()
            .skip(1)
            .map(|(k, z)| k as f64 * z.norm_sqr())
            .sum())
    }
}

/// Return the symbol with its log-coefficients, or `NonPositiveSymbol`.
pub fn log_symbol_coefficients(sym: SpectralSymbol) -> Result<SpectralSymbol> {
    sym.require_c()?;
    Ok(sym)
}

/// `G(f) = exp(c_0)`.
pub fn geometric_mean(sym: &SpectralSymbol) -> Result<f64> {
    Ok(sym.c(0)?.re.exp())
}

/// `b(f) = exp(Σ_{k≥1} k c_k c_{-k})`, refusing when the tail of the series is
/// not resolved at this grid size.
pub fn b_constant(sym: &SpectralSymbol) -> Result<f64> {
    let report = condition_report(sym)?;
    if !(report.c2_tail <= B_TAIL_TOL) {
        return Err(Error::NonConvergent {
            tail: report.c2_tail,
        });
    }
    Ok(sym.second_order_sum()?.exp())
}

/// Partial sums for the summability conditions `Σ|c_k| < ∞` and `Σ|k||c_k|² < ∞`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    /// `Σ_{0<|k|<=K} |c_k|`.
    pub c1_sum: f64,
    /// `Σ_{0<|k|<=K} |k| |c_k|²`.
    pub c2_sum: f64,
    /// Extrapolated `Σ_{|k|>K} |c_k|`.
    pub c1_tail: f64,
    /// Extrapolated `Σ_{|k|>K} |k| |c_k|²`.
    pub c2_tail: f64,
    /// Fitted power-law decay exponent `s` in `|c_k| ~ k^{-s}`, when the
    /// coefficients in the fitting window are above round-off.
    pub decay_exponent: Option<f64>,
    pub c1_pass: bool,
    pub c2_pass: bool,
}

impl ConditionReport {
    pub fn pass(&self) -> bool {
        self.c1_pass && self.c2_pass
    }
}

pub fn condition_report(sym: &SpectralSymbol) -> Result<ConditionReport> {
    let c = sym.require_c()?;
    let half = sym.half_grid();
    let c1_sum: f64 = 2.0 * c.iter().skip(1).map(|z| z.norm()).sum::<f64>();
    let c2_sum: f64 = 2.0
        * c.iter()
            .enumerate()
            .skip(1)
            .map(|(k, z)| k as f64 * z.norm_sqr())
            .sum::<f64>();

    // Fit the last decade below the aliasing-affected upper half.
    let hi = half / 2;
    let lo = (hi / 10).max(1);
    let scale = c.iter().fold(1.0_f64, |m, z| m.max(z.norm()));
    let floor = 1e-13 * scale;
    let window: Vec<(f64, f64)> = (lo..=hi)
        .filter(|&k| c[k].norm() > floor)
        .map(|k| ((k as f64).ln(), c[k].norm().ln()))
        .collect();

    let (decay_exponent, c1_tail, c2_tail) = if window.len() * 2 < hi - lo + 1 {
        // Coefficients have reached round-off: nothing left to extrapolate.
        (None, 0.0, 0.0)
    } else {
        let m = window.len() as f64;
        let mx = window.iter().map(|p| p.0).sum::<f64>() / m;
        let my = window.iter().map(|p| p.1).sum::<f64>() / m;
        let sxx: f64 = window.iter().map(|p| (p.0 - mx).powi(2)).sum();
        let sxy: f64 = window.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let slope = sxy / sxx;
        let s = -slope;
        let kf = half as f64;
        let amp_at_k = (my + slope * (kf.ln() - mx)).exp();
        let t1 = if s > 1.0 {
            2.0 * amp_at_k * kf / (s - 1.0)
        } else {
            f64::INFINITY
        };
        let t2 = if s > 1.0 {
            2.0 * amp_at_k * amp_at_k * kf * kf / (2.0 * s - 2.0)
        } else {
            f64::INFINITY
        };
        (Some(s), t1, t2)
    };
    Ok(ConditionReport {
        c1_sum,
        c2_sum,
        c1_tail,
        c2_tail,
        decay_exponent,
        c1_pass: c1_tail.is_finite(),
        c2_pass: c2_tail.is_finite(),
    })
}

/// Exact and asymptotic Toeplitz log-determinants for one section size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SzegoEstimate {
    pub n: usize,
    /// Geometric mean `G(f)`.
    pub g: f64,
    pub b: f64,
    /// `n c_0 + Σ k c_k c_{-k}` (log space).
    pub asymptote_log: f64,
    pub asymptote: f64,
    pub exact_log_det: Option<f64>,
    pub exact_det: Option<f64>,
    /// `exp(exact_log_det - asymptote_log)`.
    pub ratio: Option<f64>,
    pub c1_sum: f64,
    pub c2_sum: f64,
}

pub fn szego_asymptote(sym: &SpectralSymbol, n: usize) -> Result<SzegoEstimate> {
    szego_asymptote_with_limit(sym, n, EXACT_DET_LIMIT)
}

pub fn szego_asymptote_with_limit(
    sym: &SpectralSymbol,
    n: usize,
    exact_limit: usize,
) -> Result<SzegoEstimate> {
    if n == 0 {
        return Err(Error::InvalidSpec("section size must be >= 1".into()));
    }
    let c0 = sym.c(0)?.re;
    let second = sym.second_order_sum()?;
    let report = condition_report(sym)?;
    let asymptote_log = n as f64 * c0 + second;
    let exact_log_det = if n <= exact_limit && n <= sym.half_grid() + 1 {
        Some(exact_toeplitz_log_det(sym, n)?)
    } else {
        None
    };
    Ok(SzegoEstimate {
        n,
        g: c0.exp(),
        b: second.exp(),
        asymptote_log,
        asymptote: asymptote_log.exp(),
        exact_log_det,
        exact_det: exact_log_det.map(f64::exp),
        ratio: exact_log_det.map(|e| (e - asymptote_log).exp()),
        c1_sum: report.c1_sum,
        c2_sum: report.c2_sum,
    })
}

/// `log det {d_{j-i}}_{i,j<n}` by Cholesky of the Toeplitz section.
pub fn exact_toeplitz_log_det(sym: &SpectralSymbol, n: usize) -> Result<f64> {
    if !sym.is_even() {
        return Err(Error::InvalidSpec(
            "exact Toeplitz determinant needs an even (real-coefficient) symbol".into(),
        ));
    }
    let gamma = sym.autocovariance(n);
    CovarianceMatrix::from_stationary(&gamma, n)
        .map(|c| c.log_det())
        .map_err(|e| {
            e.with_note(format!(
                "Toeplitz section of a symbol sampled with K = {}; refine the grid",
                sym.half_grid()
            ))
        })
}

/// Decoupling constant for stationary sections built from the strong Szegő asymptote.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Theorem2Bound {
    pub n: usize,
    pub p: f64,
    /// Decoupling coefficient of the unit-variance `n`-section.
    pub p_x: f64,
    /// `(n/2)(1-1/p) log 2 - (n c_0 + Σ k c_k c_{-k})/(2p) + log(1+δ̂)`.
    pub log_constant: f64,
    /// `log[(1+δ̂) 2^{n/2} / (2 b G)^{n/(2p)}]`, the form with `b^{n/(2p)}`.
    pub log_constant_as_stated: f64,
    /// Measured `δ̂_n = max(0, asymptote/exact - 1)`.
    pub delta_hat: f64,
    /// No exact determinant was available, so `δ̂_n = 0` was used.
    pub asymptotic_only: bool,
    /// The symbol was rescaled to unit variance (`d_0 != 1`).
    pub normalized: bool,
    pub d0: f64,
}

impl Theorem2Bound {
    pub fn constant(&self) -> f64 {
        self.log_constant.exp()
    }
}

pub fn theorem2_constant(sym: &SpectralSymbol, n: usize, p: f64) -> Result<Theorem2Bound> {
    theorem2_constant_with_limit(sym, n, p, EXACT_DET_LIMIT)
}

pub fn theorem2_constant_with_limit(
    sym: &SpectralSymbol,
    n: usize,
    p: f64,
    exact_limit: usize,
) -> Result<Theorem2Bound> {
    let c0 = sym.c(0)?.re;
    let report = condition_report(sym)?;
    if !report.pass() {
        return Err(Error::NonConvergent {
            tail: report.c1_tail.max(report.c2_tail),
        });
    }
    let d0 = sym.d(0).re;
    if !(d0 > 0.0) {
        return Err(Error::NonPositiveSymbol { min: sym.min_value() });
    }
    let gamma = sym.autocovariance(n);
    let p_x = stationary_decoupling_coefficient(&gamma, n);
    if !(p >= 2.0 * p_x) {
        return Err(Error::ConditionViolated { p, p_x });
    }
    let nf = n as f64;
    let log_d0 = d0.ln();
    let second = sym.second_order_sum()?;
    // Unit-variance symbol f/d_0: c_0 shifts by -log d_0, det by d_0^{-n}.
    let asym_log = nf * (c0 - log_d0) + second;
    let exact = if n <= exact_limit && n <= sym.half_grid() + 1 {
        Some(exact_toeplitz_log_det(sym, n)? - nf * log_d0)
    } else {
        None
    };
    let delta_hat = match exact {
        Some(e) => ((asym_log - e).exp() - 1.0).max(0.0),
        None => 0.0,
    };
    let log1d = delta_hat.ln_1p();
    let log_constant = 0.5 * nf * (1.0 - 1.0 / p) * LN_2 - asym_log / (2.0 * p) + log1d;
    let log_constant_as_stated =
        log1d + 0.5 * nf * LN_2 - nf / (2.0 * p) * (LN_2 + second + (c0 - log_d0));
    Ok(Theorem2Bound {
        n,
        p,
        p_x,
        log_constant,
        log_constant_as_stated,
        delta_hat,
        asymptotic_only: exact.is_none(),
        normalized: d0 != 1.0,
        d0,
    })
}
