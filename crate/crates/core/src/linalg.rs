//! Dense symmetric positive-definite kernels.
//!
//! The lower Cholesky factor is stored row-packed (row `i` holds `L[i][0..=i]`)
//! so that the inner products of the Crout recurrence run over contiguous
//! memory. This matters for the Toeplitz sections up to n = 2048.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Relative pivot threshold: a pivot must exceed `PIVOT_REL_TOL * trace / n`.
pub const PIVOT_REL_TOL: f64 = 1e-12;

/// Lower-triangular Cholesky factor in packed row storage.
#[derive(Debug, Clone, PartialEq)]
pub struct Cholesky {
    n: usize,
    packed: Vec<f64>,
}

#[inline]
fn row_start(i: usize) -> usize {
    i * (i + 1) / 2
}

impl Cholesky {
    /// Factor a symmetric matrix, reading only its lower triangle.
    ///
    /// Fails with `NotPositiveDefinite` as soon as a squared pivot drops to or
    /// below `PIVOT_REL_TOL * trace(a) / n`.
    pub fn factor(a: &DMatrix<f64>) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::NotSquare {
                rows: n,
                cols: a.ncols(),
            });
        }
        let trace: f64 = (0..n).map(|i| a[(i, i)]).sum();
        let threshold = if n == 0 {
            0.0
        } else {
            PIVOT_REL_TOL * trace.abs() / n as f64
        };
        let mut packed = vec![0.0; row_start(n)];
        for i in 0..n {
            let ri = row_start(i);
            for j in 0..=i {
                let rj = row_start(j);
                let dot: f64 = packed[ri..ri + j]
                    .iter()
                    .zip(&packed[rj..rj + j])
                    .map(|(x, y)| x * y)
                    .sum();
                let s = a[(i, j)] - dot;
                if i == j {
                    if !(s > threshold) {
                        return Err(Error::NotPositiveDefinite {
                            pivot: i,
                            value: s,
                            threshold,
                            note: None,
                        });
                    }
                    packed[ri + i] = s.sqrt();
                } else {
                    packed[ri + j] = s / packed[rj + j];
                }
            }
        }
        Ok(Self { n, packed })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if j > i {
            0.0
        } else {
            self.packed[row_start(i) + j]
        }
    }

    /// `log det(A) = 2 Σ log L_ii`.
    pub fn log_det(&self) -> f64 {
        2.0 * (0..self.n).map(|i| self.get(i, i).ln()).sum::<f64>()
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j))
    }

    /// `y = L x`.
    pub fn mul_lower(&self, x: &[f64], out: &mut [f64]) {
        for i in 0..self.n {
            let ri = row_start(i);
            out[i] = self.packed[ri..=ri + i]
                .iter()
                .zip(x)
                .map(|(l, v)| l * v)
                .sum();
        }
    }

    /// Solve `A x = b` in place.
    pub fn solve_in_place(&self, b: &mut [f64]) {
        let n = self.n;
        for i in 0..n {
            let ri = row_start(i);
            let s: f64 = self.packed[ri..ri + i]
                .iter()
                .zip(&b[..i])
                .map(|(l, v)| l * v)
                .sum();
            b[i] = (b[i] - s) / self.packed[ri + i];
        }
        for i in (0..n).rev() {
            let mut s = b[i];
            for k in i + 1..n {
                s -= self.packed[row_start(k) + i] * b[k];
            }
            b[i] = s / self.packed[row_start(i) + i];
        }
    }

    pub fn inverse(&self) -> DMatrix<f64> {
        let n = self.n;
        let mut inv = DMatrix::zeros(n, n);
        let mut col = vec![0.0; n];
        for j in 0..n {
            col.iter_mut().for_each(|v| *v = 0.0);
            col[j] = 1.0;
            self.solve_in_place(&mut col);
            for i in 0..n {
                inv[(i, j)] = col[i];
            }
        }
        // Symmetrize away round-off.
        for i in 0..n {
            for j in 0..i {
                let m = 0.5 * (inv[(i, j)] + inv[(j, i)]);
                inv[(i, j)] = m;
                inv[(j, i)] = m;
            }
        }
        inv
    }

    /// Diagonal of `A^{-1}` via `[A^{-1}]_ii = ||L^{-1} e_i||^2`.
    pub fn inverse_diagonal(&self) -> Vec<f64> {
        let n = self.n;
        // Invert L column by column; (L^{-1})_{ki} for k >= i.
        let mut diag = vec![0.0; n];
        let mut w = vec![0.0; n];
        for i in 0..n {
            for k in 0..n {
                w[k] = 0.0;
            }
            w[i] = 1.0 / self.get(i, i);
            for k in i + 1..n {
                let rk = row_start(k);
                let s: f64 = (i..k).map(|m| self.packed[rk + m] * w[m]).sum();
                w[k] = -s / self.packed[rk + k];
            }
            for k in i..n {
                diag[i] += w[k] * w[k];
            }
        }
        diag
    }
}

/// Largest absolute entry.
pub fn max_abs(a: &DMatrix<f64>) -> f64 {
    a.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
}

/// Log-determinant of a symmetric positive-definite matrix.
pub fn spd_log_det(a: &DMatrix<f64>) -> Result<f64> {
    Ok(Cholesky::factor(a)?.log_det())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn sample() -> DMatrix<f64> {
        DMatrix::from_row_slice(3, 3, &[4.0, 2.0, 0.6, 2.0, 5.0, 1.0, 0.6, 1.0, 3.0])
    }

    #[test]
    fn factor_reproduces_matrix() {
        let a = sample();
        let l = Cholesky::factor(&a).unwrap().to_matrix();
        let r = &l * l.transpose();
        for (x, y) in r.iter().zip(a.iter()) {
            assert_relative_eq!(x, y, max_relative = 1e-14);
        }
    }

    #[test]
    fn log_det_matches_lu() {
        let a = sample();
        let lu = a.clone().lu().determinant();
        assert_relative_eq!(spd_log_det(&a).unwrap(), lu.ln(), epsilon = 1e-13);
    }

    #[test]
    fn inverse_and_diagonal_agree() {
        let a = sample();
        let ch = Cholesky::factor(&a).unwrap();
        let inv = ch.inverse();
        let id = &a * &inv;
        for i in 0..3 {
            for j in 0..3 {
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((id[(i, j)] - e).abs() < 1e-13);
            }
        }
        for (i, d) in ch.inverse_diagonal().iter().enumerate() {
            assert_relative_eq!(*d, inv[(i, i)], max_relative = 1e-13);
        }
    }

    #[test]
    fn rejects_indefinite() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(matches!(
            Cholesky::factor(&a),
            Err(Error::NotPositiveDefinite { pivot: 1, .. })
        ));
    }

    #[test]
    fn mul_lower_matches_dense() {
        let a = sample();
        let ch = Cholesky::factor(&a).unwrap();
        let x = [0.3, -1.2, 2.0];
        let mut y = [0.0; 3];
        ch.mul_lower(&x, &mut y);
        let dense = ch.to_matrix() * nalgebra::DVector::from_column_slice(&x);
        for i in 0..3 {
            assert_relative_eq!(y[i], dense[i], epsilon = 1e-14);
        }
    }
}
