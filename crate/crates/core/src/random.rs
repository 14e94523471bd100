//! Random instances for property sweeps.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

/// `Q Λ Qᵀ` with `Q` from the QR factorization of a standard Gaussian matrix
/// and eigenvalues log-uniform in `[10^-2, 10^2]`.
pub fn random_spd<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DMatrix<f64> {
    random_spd_in(rng, n, -2.0, 2.0)
}

/// Same as [`random_spd`] with eigenvalues log-uniform in `[10^lo, 10^hi]`.
pub fn random_spd_in<R: Rng + ?Sized>(rng: &mut R, n: usize, lo: f64, hi: f64) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    let q = g.qr().q();
    let lambda = DVector::from_fn(n, |_, _| 10f64.powf(rng.random_range(lo..=hi)));
    let m = &q * DMatrix::from_diagonal(&lambda) * q.transpose();
    // Exact symmetry.
    DMatrix::from_fn(n, n, |i, j| 0.5 * (m[(i, j)] + m[(j, i)]))
}

/// Autocovariance with `γ(0) = 1` and geometrically decaying, randomly signed
/// lags. Not necessarily positive definite.
pub fn random_summable_gamma<R: Rng + ?Sized>(rng: &mut R, len: usize) -> Vec<f64> {
    let rate: f64 = rng.random_range(0.05..0.9);
    let amp: f64 = rng.random_range(0.0..0.6);
    (0..len)
        .map(|h| {
            if h == 0 {
                1.0
            } else {
                let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
                sign * amp * rate.powi(h as i32) * rng.random_range(0.0..1.0)
            }
        })
        .collect()
}

/// Random strictly diagonally dominant matrix (rows need not be symmetric).
pub fn random_diagonally_dominant<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DMatrix<f64> {
    let mut a = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0_f64));
    for i in 0..n {
        let off: f64 = (0..n).filter(|&j| j != i).map(|j| a[(i, j)].abs()).sum();
        let margin = rng.random_range(1e-3..2.0);
        let sign = if rng.random_bool(0.8) { 1.0 } else { -1.0 };
        a[(i, i)] = sign * (off + margin);
    }
    a
}
