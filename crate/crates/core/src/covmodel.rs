//! Covariance matrices from the generative models: dense input, stationary
//! autocovariance sequences, moving averages, Hilbert-type Gram matrices and
//! sparse-support moving averages.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{max_abs, Cholesky};
use crate::szego::SpectralSymbol;

/// Relative symmetry tolerance for [`CovarianceMatrix::build_dense`].
pub const SYMMETRY_REL_TOL: f64 = 1e-12;

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Harmonic numbers are summed directly up to this index.
pub const HARMONIC_DIRECT_LIMIT: u64 = 1_000_000;

/// A validated symmetric positive-definite covariance matrix.
///
/// Construction always runs the Cholesky factorization, so a value of this
/// type is positive definite by the pivot rule in [`crate::linalg`].
#[derive(Debug, Clone)]
pub struct CovarianceMatrix {
    entries: DMatrix<f64>,
    chol: Cholesky,
    log_det: f64,
}

impl CovarianceMatrix {
    /// Validate a dense array and factor it.
    pub fn build_dense(mut entries: DMatrix<f64>) -> Result<Self> {
        let n = entries.nrows();
        if entries.ncols() != n {
            return Err(Error::NotSquare {
                rows: n,
                cols: entries.ncols(),
            });
        }
        if n == 0 {
            return Err(Error::InvalidSpec("empty covariance matrix".into()));
        }
        if let Some(index) = entries.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteInput { index });
        }
        let scale = max_abs(&entries);
        let mut asym = 0.0_f64;
        for i in 0..n {
            for j in 0..i {
                asym = asym.max((entries[(i, j)] - entries[(j, i)]).abs());
            }
        }
        if asym > SYMMETRY_REL_TOL * scale {
            return Err(Error::NotSymmetric {
                max_asymmetry: asym,
            });
        }
        for i in 0..n {
            for j in 0..i {
                let m = 0.5 * (entries[(i, j)] + entries[(j, i)]);
                entries[(i, j)] = m;
                entries[(j, i)] = m;
            }
        }
        for i in 0..n {
            let d = entries[(i, i)];
            if !(d > 0.0) {
                return Err(Error::NonPositiveDiagonal { index: i, value: d });
            }
        }
        let chol = Cholesky::factor(&entries)?;
        let log_det = chol.log_det();
        Ok(Self {
            entries,
            chol,
            log_det,
        })
    }

    /// Toeplitz matrix with entries `gamma[|i-j|]`.
    pub fn from_stationary(gamma: &[f64], n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSpec("dimension must be positive".into()));
        }
        if gamma.len() < n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: gamma.len(),
            });
        }
        if !(gamma[0] > 0.0) {
            return Err(Error::NonPositiveDiagonal {
                index: 0,
                value: gamma[0],
            });
        }
        Self::build_dense(toeplitz(&gamma[..n]))
    }

    pub fn from_moving_average(spec: &MovingAverageSpec, n: usize) -> Result<Self> {
        let gamma = spec.autocovariance(n);
        Self::from_stationary(&gamma, n).map_err(|e| {
            e.with_note(format!(
                "moving-average support truncated with l2 tail bound {:e}",
                spec.tail_bound
            ))
        })
    }

    pub fn hilbert(spec: &HilbertSpec, n: usize) -> Result<Self> {
        if spec.a.len() < n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: spec.a.len(),
            });
        }
        let a = &spec.a[..n];
        let m = DMatrix::from_fn(n, n, |k, l| 1.0 / (a[k] + a[l]));
        Self::build_dense(m).map_err(|e| {
            let min_gap = a
                .windows(2)
                .map(|w| w[1] - w[0])
                .fold(f64::INFINITY, f64::min);
            e.with_note(format!(
                "Cauchy matrix numerically singular; smallest gap between consecutive a is {min_gap:e}"
            ))
        })
    }

    pub fn sparse_support(spec: &SparseSupportSpec, n: usize) -> Result<Self> {
        let gamma = spec.autocovariance(n)?;
        Self::from_stationary(&gamma, n)
    }

    pub fn identity(n: usize) -> Self {
        Self::build_dense(DMatrix::identity(n, n)).expect("identity is positive definite")
    }

    /// Unit-variance matrix with every off-diagonal entry equal to `rho`.
    pub fn equicorrelated(n: usize, rho: f64) -> Result<Self> {
        Self::build_dense(DMatrix::from_fn(n, n, |i, j| if i == j { 1.0 } else { rho }))
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[(i, j)]
    }

    pub fn cholesky(&self) -> &Cholesky {
        &self.chol
    }

    pub fn log_det(&self) -> f64 {
        self.log_det
    }

    /// Diagonal entries `σ_i²`.
    pub fn variances(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.entries[(i, i)]).collect()
    }

    /// Standard deviations `σ_i`.
    pub fn sigmas(&self) -> Vec<f64> {
        self.variances().into_iter().map(f64::sqrt).collect()
    }

    pub fn is_diagonal(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| (0..n).all(|j| i == j || self.entries[(i, j)] == 0.0))
    }

    /// Returns the first column when the matrix is exactly Toeplitz.
    pub fn toeplitz_gamma(&self) -> Option<Vec<f64>> {
        let n = self.dim();
        let gamma: Vec<f64> = (0..n).map(|h| self.entries[(h, 0)]).collect();
        for i in 0..n {
            for j in 0..n {
                if self.entries[(i, j)] != gamma[i.abs_diff(j)] {
                    return None;
                }
            }
        }
        Some(gamma)
    }
}

/// Symmetric Toeplitz matrix from its first column.
pub fn toeplitz(gamma: &[f64]) -> DMatrix<f64> {
    let n = gamma.len();
    DMatrix::from_fn(n, n, |i, j| gamma[i.abs_diff(j)])
}

/// Moving-average coefficients `c_m` for `m` in a contiguous index window.
///
/// `X_k = Σ_m c_m ξ_{k-m}`; anything outside the window is treated as zero and
/// its ℓ² mass is carried in `tail_bound`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MovingAverageSpec {
    /// Index of `coeffs[0]`.
    pub offset: i64,
    pub coeffs: Vec<f64>,
    /// Declared cutoff `M` when the support was truncated.
    pub cutoff: Option<u64>,
    /// Upper bound on `Σ_{|m|>M} c_m²`.
    pub tail_bound: f64,
}

impl MovingAverageSpec {
    /// Finite support, no truncation.
    pub fn finite(offset: i64, coeffs: Vec<f64>) -> Result<Self> {
        let spec = Self {
            offset,
            coeffs,
            cutoff: None,
            tail_bound: 0.0,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Build from a map `m -> c_m`.
    pub fn from_map(map: &BTreeMap<i64, f64>) -> Result<Self> {
        let (Some((&lo, _)), Some((&hi, _))) = (map.first_key_value(), map.last_key_value()) else {
            return Err(Error::InvalidSpec("empty moving-average support".into()));
        };
        let mut coeffs = vec![0.0; (hi - lo + 1) as usize];
        for (&m, &c) in map {
            coeffs[(m - lo) as usize] = c;
        }
        Self::finite(lo, coeffs)
    }

    /// `c_m = |m|^{-r}` for `1 <= |m| <= cutoff`, `c_0 = 0`.
    pub fn inverse_power(r: f64, cutoff: u64) -> Result<Self> {
        if !(r > 0.5) || cutoff == 0 {
            return Err(Error::InvalidSpec(
                "inverse-power coefficients need r > 1/2 and a positive cutoff".into(),
            ));
        }
        let m = cutoff as i64;
        let coeffs = (-m..=m)
            .map(|k| {
                if k == 0 {
                    0.0
                } else {
                    (k.unsigned_abs() as f64).powf(-r)
                }
            })
            .collect();
        // Σ_{|m|>M} m^{-2r} <= 2 ∫_M^∞ x^{-2r} dx.
        let tail_bound = 2.0 * (cutoff as f64).powf(1.0 - 2.0 * r) / (2.0 * r - 1.0);
        let spec = Self {
            offset: -m,
            coeffs,
            cutoff: Some(cutoff),
            tail_bound,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// `X_k = ξ_k + a ξ_{k-1}`.
    pub fn ma1(a: f64) -> Result<Self> {
        Self::finite(0, vec![1.0, a])
    }

    fn validate(&self) -> Result<()> {
        if self.coeffs.is_empty() {
            return Err(Error::InvalidSpec("empty moving-average support".into()));
        }
        if let Some(index) = self.coeffs.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFiniteInput { index });
        }
        if !self.tail_bound.is_finite() || self.tail_bound < 0.0 {
            return Err(Error::InvalidSpec("tail bound must be finite and >= 0".into()));
        }
        Ok(())
    }

    pub fn coefficient(&self, m: i64) -> f64 {
        let idx = m - self.offset;
        if idx < 0 {
            return 0.0;
        }
        self.coeffs.get(idx as usize).copied().unwrap_or(0.0)
    }

    pub fn l2_norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum()
    }

    /// `γ(h) = Σ_m c_m c_{m+h}` for `h = 0..len`.
    pub fn autocovariance(&self, len: usize) -> Vec<f64> {
        let c = &self.coeffs;
        (0..len)
            .map(|h| {
                if h >= c.len() {
                    0.0
                } else {
                    c[..c.len() - h]
                        .iter()
                        .zip(&c[h..])
                        .map(|(x, y)| x * y)
                        .sum()
                }
            })
            .collect()
    }
}

/// Positive, strictly increasing sequence defining `C_n = {1/(a_k + a_l)}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HilbertSpec {
    pub a: Vec<f64>,
}

impl HilbertSpec {
    pub fn new(a: Vec<f64>) -> Result<Self> {
        if a.is_empty() {
            return Err(Error::InvalidSpec("Hilbert sequence is empty".into()));
        }
        if let Some(i) = a.iter().position(|x| !(*x > 0.0) || !x.is_finite()) {
            return Err(Error::InvalidSpec(format!(
                "Hilbert sequence entry {i} is not a positive finite number"
            )));
        }
        if let Some(i) = a.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidSpec(format!(
                "Hilbert sequence is not strictly increasing at index {}",
                i + 1
            )));
        }
        Ok(Self { a })
    }

    /// `a = (1, 2, ..., n)`.
    pub fn natural(n: usize) -> Self {
        Self {
            a: (1..=n).map(|k| k as f64).collect(),
        }
    }
}

/// Moving average supported on `±A`: `X_k = Σ_{|m|∈A} b_{|m|} ξ_{k-m}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseSupportSpec {
    /// `a -> b_a` for each `a` in the support set `A`.
    pub weights: BTreeMap<u64, f64>,
}

impl SparseSupportSpec {
    pub fn new(weights: BTreeMap<u64, f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidSpec("support set A is empty".into()));
        }
        if weights.contains_key(&0) {
            return Err(Error::InvalidSpec("support set A must hold positive integers".into()));
        }
        if weights.values().any(|b| !b.is_finite()) {
            return Err(Error::InvalidSpec("non-finite weight".into()));
        }
        Ok(Self { weights })
    }

    /// Unit weights on the given support.
    pub fn unit(support: &[u64]) -> Result<Self> {
        Self::new(support.iter().map(|&a| (a, 1.0)).collect())
    }

    fn signed_support(&self) -> Vec<(i64, f64)> {
        let mut v: Vec<(i64, f64)> = self
            .weights
            .iter()
            .flat_map(|(&a, &b)| [(-(a as i64), b), (a as i64, b)])
            .collect();
        v.sort_by_key(|(m, _)| *m);
        v
    }

    fn weight(&self, m: i64) -> Option<f64> {
        self.weights.get(&m.unsigned_abs()).copied()
    }

    /// Non-negative elements of `(A ∪ -A) - (A ∪ -A)`.
    pub fn difference_set(&self) -> BTreeSet<u64> {
        let s = self.signed_support();
        let mut d = BTreeSet::new();
        for (x, _) in &s {
            for (y, _) in &s {
                d.insert((x - y).unsigned_abs());
            }
        }
        d
    }

    /// `γ(h) = Σ_{m ∈ ±A, m-h ∈ ±A} b_{|m|} b_{|m-h|}` for `h = 0..len`.
    pub fn autocovariance(&self, len: usize) -> Result<Vec<f64>> {
        if self.weights.is_empty() {
            return Err(Error::InvalidSpec("support set A is empty".into()));
        }
        let s = self.signed_support();
        Ok((0..len as i64)
            .map(|h| {
                s.iter()
                    .filter_map(|&(m, b)| self.weight(m - h).map(|b2| b * b2))
                    .sum()
            })
            .collect())
    }
}

/// `H_k = Σ_{j=1}^k 1/j`: direct summation up to 10⁶, asymptotic expansion above.
pub fn harmonic(k: u64) -> f64 {
    if k <= HARMONIC_DIRECT_LIMIT {
        (1..=k).rev().map(|j| 1.0 / j as f64).sum()
    } else {
        let x = k as f64;
        let x2 = x * x;
        x.ln() + EULER_GAMMA + 1.0 / (2.0 * x) - 1.0 / (12.0 * x2) + 1.0 / (120.0 * x2 * x2)
    }
}

/// Riemann zeta for real `s > 1`, Euler–Maclaurin with 64 direct terms.
pub fn zeta(s: f64) -> f64 {
    assert!(s > 1.0, "zeta needs s > 1");
    const N: u64 = 64;
    let direct: f64 = (1..N).rev().map(|k| (k as f64).powf(-s)).sum();
    let n = N as f64;
    let ns = n.powf(-s);
    direct + n.powf(1.0 - s) / (s - 1.0) + 0.5 * ns + s * ns / (12.0 * n)
        - s * (s + 1.0) * (s + 2.0) * ns / (720.0 * n * n * n)
        + s * (s + 1.0) * (s + 2.0) * (s + 3.0) * (s + 4.0) * ns / (30240.0 * n.powi(5))
}

/// `Σ_{ν≥1} ν^{-r} (ν+μ)^{-r}` for `r > 1`, direct to `V` then an
/// Euler–Maclaurin tail built from the binomial expansion in `μ/x`.
fn shifted_power_sum(mu: f64, r: f64) -> f64 {
    let v = (4.0 * mu).max(1000.0).ceil();
    let g = |x: f64| x.powf(-r) * (x + mu).powf(-r);
    let direct: f64 = (1..v as u64).rev().map(|k| g(k as f64)).sum();
    // ∫_V^∞ x^{-2r} (1 + μ/x)^{-r} dx = Σ_j binom(-r, j) μ^j V^{1-2r-j} / (2r + j - 1)
    let ratio = mu / v;
    let mut coef = 1.0;
    let mut pow = 1.0;
    let mut integral = 0.0;
    for j in 0..60 {
        let term = coef * pow / (2.0 * r + j as f64 - 1.0);
        integral += term;
        if term.abs() < 1e-18 * integral.abs() {
            break;
        }
        coef *= (-r - j as f64) / (j as f64 + 1.0);
        pow *= ratio;
    }
    integral *= v.powf(1.0 - 2.0 * r);
    // Σ_{k≥V} g(k) ≈ ∫_V^∞ g + g(V)/2 - g'(V)/12
    let h = 1e-3 * v;
    let dg = (g(v + h) - g(v - h)) / (2.0 * h);
    direct + integral + 0.5 * g(v) - dg / 12.0
}

/// Autocovariance `γ(μ)` of the inverse-power moving average `c_m = |m|^{-r}`.
///
/// Closed forms for `r = 1`, `(2/μ)(H_μ + H_{μ-1})` with `π²/3` at `μ = 0`,
/// and for `r = 2`, `2π²/(3μ²) - 6/μ⁴` with `π⁴/45` at `μ = 0`. Other `r > 1`
/// go through [`inverse_power_gamma_series`].
pub fn inverse_power_gamma(mu: u64, r: f64) -> f64 {
    assert!(r >= 1.0, "inverse_power_gamma needs r >= 1");
    if r == 1.0 {
        if mu == 0 {
            PI * PI / 3.0
        } else {
            2.0 / mu as f64 * (harmonic(mu) + harmonic(mu - 1))
        }
    } else if r == 2.0 {
        if mu == 0 {
            PI.powi(4) / 45.0
        } else {
            let m2 = (mu as f64).powi(2);
            2.0 * PI * PI / (3.0 * m2) - 6.0 / (m2 * m2)
        }
    } else {
        inverse_power_gamma_series(mu, r)
    }
}

/// `γ(μ)` for `r > 1` by direct summation with a tail estimate; `O(μ)` work.
pub fn inverse_power_gamma_series(mu: u64, r: f64) -> f64 {
    assert!(r > 1.0, "series path needs r > 1");
    if mu == 0 {
        return 2.0 * zeta(2.0 * r);
    }
    let m = mu as f64;
    let inner: f64 = (1..mu)
        .map(|k| (k as f64).powf(-r) * (m - k as f64).powf(-r))
        .sum();
    2.0 * shifted_power_sum(m, r) + inner
}

/// `γ(0), ..., γ(len-1)` for the inverse-power model.
///
/// The `r = 1` branch runs the harmonic recursion once, so a length of 10⁵ is
/// cheap and agrees with [`inverse_power_gamma`] term by term.
pub fn inverse_power_gamma_sequence(len: usize, r: f64) -> Vec<f64> {
    if r == 1.0 {
        let mut out = Vec::with_capacity(len);
        let mut h_prev = 0.0; // H_{μ-1}
        for mu in 0..len as u64 {
            if mu == 0 {
                out.push(PI * PI / 3.0);
                continue;
            }
            let h = if mu <= HARMONIC_DIRECT_LIMIT {
                h_prev + 1.0 / mu as f64
            } else {
                harmonic(mu)
            };
            out.push(2.0 / mu as f64 * (h + h_prev));
            h_prev = h;
        }
        out
    } else {
        (0..len as u64).map(|mu| inverse_power_gamma(mu, r)).collect()
    }
}

/// Convenience wrapper matching the grid-symbol entry point of this module.
pub fn symbol_from_grid(values: &[f64]) -> Result<SpectralSymbol> {
    SpectralSymbol::from_grid(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn identity_has_zero_log_det() {
        let c = CovarianceMatrix::build_dense(DMatrix::identity(3, 3)).unwrap();
        assert_eq!(c.log_det(), 0.0);
    }

    #[test]
    fn two_by_two_log_det() {
        let c = CovarianceMatrix::build_dense(DMatrix::from_row_slice(
            2,
            2,
            &[1.0, 0.5, 0.5, 1.0],
        ))
        .unwrap();
        assert_relative_eq!(c.log_det(), 0.75_f64.ln(), epsilon = 1e-15);
    }

    #[test]
    fn rejects_indefinite_and_asymmetric() {
        let bad = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(matches!(
            CovarianceMatrix::build_dense(bad),
            Err(Error::NotPositiveDefinite { .. })
        ));
        let asym = DMatrix::from_row_slice(2, 2, &[1.0, 0.2, 0.3, 1.0]);
        assert!(matches!(
            CovarianceMatrix::build_dense(asym),
            Err(Error::NotSymmetric { .. })
        ));
        let neg = DMatrix::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, 1.0]);
        assert!(matches!(
            CovarianceMatrix::build_dense(neg),
            Err(Error::NonPositiveDiagonal { index: 0, .. })
        ));
        let rect = DMatrix::<f64>::zeros(2, 3);
        assert!(matches!(
            CovarianceMatrix::build_dense(rect),
            Err(Error::NotSquare { .. })
        ));
    }

    #[test]
    fn stationary_examples() {
        let c = CovarianceMatrix::from_stationary(&[1.0, 0.0, 0.0], 3).unwrap();
        assert_eq!(c.entries(), &DMatrix::identity(3, 3));

        // Tridiagonal recurrence Δ_k = 1.25 Δ_{k-1} - 0.25 Δ_{k-2}.
        let c = CovarianceMatrix::from_stationary(&[1.25, 0.5, 0.0], 3).unwrap();
        assert_relative_eq!(c.log_det().exp(), 1.328125, max_relative = 1e-14);

        assert!(matches!(
            CovarianceMatrix::from_stationary(&[1.0, 1.0, 1.0], 3),
            Err(Error::NotPositiveDefinite { .. })
        ));
    }

    #[test]
    fn moving_average_examples() {
        let white = MovingAverageSpec::finite(0, vec![1.0]).unwrap();
        let c = CovarianceMatrix::from_moving_average(&white, 4).unwrap();
        assert_eq!(c.entries(), &DMatrix::identity(4, 4));

        let ma = MovingAverageSpec::ma1(0.5).unwrap();
        assert_eq!(ma.autocovariance(4), vec![1.25, 0.5, 0.0, 0.0]);
    }

    #[test]
    fn inverse_power_variance_with_truncation() {
        let spec = MovingAverageSpec::inverse_power(1.0, 1_000_000).unwrap();
        let g0 = spec.autocovariance(1)[0];
        assert!((g0 - PI * PI / 3.0).abs() < 2e-6);
        assert!(spec.tail_bound <= 2.0e-6 + 1e-12);
        assert!(PI * PI / 3.0 - g0 <= spec.tail_bound);
    }

    #[test]
    fn inverse_power_gamma_values() {
        assert_relative_eq!(inverse_power_gamma(1, 1.0), 2.0, epsilon = 1e-14);
        assert_relative_eq!(inverse_power_gamma(2, 1.0), 2.5, epsilon = 1e-14);
        assert_relative_eq!(inverse_power_gamma(0, 1.0), 3.289_868_133_696_453, epsilon = 1e-14);
        // ζ(4) = π⁴/90.
        assert_relative_eq!(inverse_power_gamma(0, 2.0), 2.0 * PI.powi(4) / 90.0, epsilon = 1e-14);
    }

    #[test]
    fn inverse_power_gamma_r2_against_long_sum() {
        // Direct two-sided sum to 2·10⁶ with an integral tail.
        for mu in [1u64, 3, 17, 400] {
            let m = mu as f64;
            let big = 2_000_000i64;
            let mut s = 0.0;
            for k in (-big..=big).rev() {
                if k == 0 || k == mu as i64 {
                    continue;
                }
                let kf = k as f64;
                s += 1.0 / (kf * kf * (kf - m) * (kf - m));
            }
            s += 2.0 / (3.0 * (big as f64).powi(3));
            assert_relative_eq!(inverse_power_gamma(mu, 2.0), s, max_relative = 1e-10);
        }
    }

    #[test]
    fn sequence_matches_pointwise() {
        let seq = inverse_power_gamma_sequence(300, 1.0);
        for (mu, g) in seq.iter().enumerate() {
            assert_relative_eq!(*g, inverse_power_gamma(mu as u64, 1.0), max_relative = 1e-13);
        }
    }

    #[test]
    fn harmonic_switches_smoothly() {
        let direct: f64 = (1..=HARMONIC_DIRECT_LIMIT + 1).rev().map(|j| 1.0 / j as f64).sum();
        assert_relative_eq!(harmonic(HARMONIC_DIRECT_LIMIT + 1), direct, max_relative = 1e-14);
    }

    #[test]
    fn hilbert_determinants() {
        let c = CovarianceMatrix::hilbert(&HilbertSpec::new(vec![1.0, 2.0, 3.0]).unwrap(), 3)
            .unwrap();
        assert_relative_eq!(c.log_det().exp(), 1.0 / 43200.0, max_relative = 1e-12);
        let c = CovarianceMatrix::hilbert(&HilbertSpec::natural(1), 1).unwrap();
        assert_eq!(c.get(0, 0), 0.5);
        let c = CovarianceMatrix::hilbert(&HilbertSpec::natural(2), 2).unwrap();
        assert_relative_eq!(c.log_det().exp(), 1.0 / 72.0, max_relative = 1e-13);
        assert!(HilbertSpec::new(vec![1.0, 1.0]).is_err());
        assert!(HilbertSpec::new(vec![0.0, 1.0]).is_err());
    }

    #[test]
    fn sparse_support_examples() {
        let spec = SparseSupportSpec::unit(&[1]).unwrap();
        assert_eq!(spec.autocovariance(3).unwrap(), vec![2.0, 0.0, 1.0]);

        let spec = SparseSupportSpec::unit(&[1, 4]).unwrap();
        let d = spec.difference_set();
        assert_eq!(d.iter().copied().collect::<Vec<_>>(), vec![0, 2, 3, 5, 8]);
        let g = spec.autocovariance(12).unwrap();
        for (h, v) in g.iter().enumerate() {
            if !d.contains(&(h as u64)) {
                assert_eq!(*v, 0.0, "h = {h}");
            } else {
                assert!(*v > 0.0);
            }
        }

        assert!(matches!(
            SparseSupportSpec::new(BTreeMap::new()),
            Err(Error::InvalidSpec(_))
        ));
    }

    #[test]
    fn equicorrelated_determinant() {
        let c = CovarianceMatrix::equicorrelated(4, 0.3).unwrap();
        let exact = 0.7_f64.powi(3) * (1.0 + 3.0 * 0.3);
        assert_relative_eq!(c.log_det(), exact.ln(), epsilon = 1e-13);
        assert_eq!(c.toeplitz_gamma().unwrap(), vec![1.0, 0.3, 0.3, 0.3]);
    }
}
