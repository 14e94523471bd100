//! Reproducible parallel Gaussian sampling.
//!
//! Row block `s` is drawn from `ChaCha8Rng` seeded with `seed` on stream `s`,
//! so the sample set does not depend on the number of worker threads.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::covmodel::CovarianceMatrix;
use crate::linalg::Cholesky;

/// Rows drawn per RNG stream.
pub const STREAM_ROWS: usize = 4096;

/// Mean and standard error of a Monte Carlo average.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
}

/// Running mean and centered second moment.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    count: f64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.count += 1.0;
        let delta = x - self.mean;
        self.mean += delta / self.count;
        self.m2 += delta * (x - self.mean);
    }

    fn merge(a: Self, b: Self) -> Self {
        if a.count == 0.0 {
            return b;
        }
        if b.count == 0.0 {
            return a;
        }
        let count = a.count + b.count;
        let delta = b.mean - a.mean;
        Self {
            count,
            mean: a.mean + delta * b.count / count,
            m2: a.m2 + b.m2 + delta * delta * a.count * b.count / count,
        }
    }

    fn estimate(&self) -> Estimate {
        let var = if self.count > 1.0 {
            self.m2 / (self.count - 1.0)
        } else {
            0.0
        };
        Estimate {
            mean: self.mean,
            stderr: (var / self.count).sqrt(),
        }
    }
}

fn pairwise_merge(mut blocks: Vec<Vec<Moments>>) -> Vec<Moments> {
    while blocks.len() > 1 {
        let mut next = Vec::with_capacity(blocks.len().div_ceil(2));
        let mut it = blocks.into_iter();
        while let Some(a) = it.next() {
            match it.next() {
                Some(b) => next.push(a.into_iter().zip(b).map(|(x, y)| Moments::merge(x, y)).collect()),
                None => next.push(a),
            }
        }
        blocks = next;
    }
    blocks.pop().unwrap_or_default()
}

/// Draws rows of `L z` for a fixed covariance.
#[derive(Debug, Clone)]
pub struct GaussianSampler {
    chol: Cholesky,
    seed: u64,
}

impl GaussianSampler {
    pub fn new(c: &CovarianceMatrix, seed: u64) -> Self {
        Self {
            chol: c.cholesky().clone(),
            seed,
        }
    }

    pub fn dim(&self) -> usize {
        self.chol.dim()
    }

    fn stream(&self, s: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(s as u64);
        rng
    }

    /// Visits rows `start..start + len` of the sample in order.
    fn for_each_row(&self, s: usize, len: usize, mut visit: impl FnMut(&[f64])) {
        let n = self.dim();
        let mut rng = self.stream(s);
        let mut z = vec![0.0; n];
        let mut x = vec![0.0; n];
        for _ in 0..len {
            for zi in z.iter_mut() {
                *zi = StandardNormal.sample(&mut rng);
            }
            self.chol.mul_lower(&z, &mut x);
            visit(&x);
        }
    }

    fn blocks(total: usize) -> impl IndexedParallelIterator<Item = (usize, usize)> {
        let count = total.div_ceil(STREAM_ROWS);
        (0..count)
            .into_par_iter()
            .map(move |s| (s, STREAM_ROWS.min(total - s * STREAM_ROWS)))
    }

    /// `N × n` sample matrix.
    pub fn sample(&self, total: usize) -> DMatrix<f64> {
        let n = self.dim();
        let chunks: Vec<Vec<f64>> = Self::blocks(total)
            .map(|(s, len)| {
                let mut rows = Vec::with_capacity(len * n);
                self.for_each_row(s, len, |x| rows.extend_from_slice(x));
                rows
            })
            .collect();
        let flat: Vec<f64> = chunks.concat();
        DMatrix::from_row_slice(total, n, &flat)
    }

    /// Monte Carlo means of `k` statistics, where `stat(x, out)` writes the
    /// statistics of one row into `out`.
    pub fn estimate<F>(&self, total: usize, k: usize, stat: F) -> Vec<Estimate>
    where
        F: Fn(&[f64], &mut [f64]) + Sync,
    {
        let blocks: Vec<Vec<Moments>> = Self::blocks(total)
            .map(|(s, len)| {
                let mut acc = vec![Moments::default(); k];
                let mut out = vec![0.0; k];
                self.for_each_row(s, len, |x| {
                    stat(x, &mut out);
                    for (a, v) in acc.iter_mut().zip(&out) {
                        a.push(*v);
                    }
                });
                acc
            })
            .collect();
        let mut merged = pairwise_merge(blocks);
        merged.resize(k, Moments::default());
        merged.iter().map(Moments::estimate).collect()
    }
}

/// Rows are i.i.d. `N(0, C)` draws; deterministic in `seed`.
pub fn sample_gaussian(c: &CovarianceMatrix, total: usize, seed: u64) -> DMatrix<f64> {
    GaussianSampler::new(c, seed).sample(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moments_merge_matches_single_pass() {
        let xs: Vec<f64> = (0..1000).map(|i| ((i * 37) % 101) as f64 * 0.1).collect();
        let mut whole = Moments::default();
        xs.iter().for_each(|&x| whole.push(x));
        let mut parts: Vec<Vec<Moments>> = Vec::new();
        for chunk in xs.chunks(77) {
            let mut m = Moments::default();
            chunk.iter().for_each(|&x| m.push(x));
            parts.push(vec![m]);
        }
        let merged = pairwise_merge(parts)[0];
        assert!((merged.mean - whole.mean).abs() < 1e-12);
        assert!((merged.m2 - whole.m2).abs() < 1e-9 * whole.m2);
    }

    #[test]
    fn sample_is_deterministic_and_thread_independent() {
        let c = CovarianceMatrix::equicorrelated(3, 0.4).unwrap();
        let a = sample_gaussian(&c, 10_000, 7);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| sample_gaussian(&c, 10_000, 7));
        assert_eq!(a, b);
        let other = sample_gaussian(&c, 10_000, 8);
        assert_ne!(a, other);
    }

    #[test]
    fn estimate_uses_the_same_rows_as_sample() {
        let c = CovarianceMatrix::equicorrelated(2, 0.3).unwrap();
        let s = sample_gaussian(&c, 9000, 3);
        let direct = s.column(0).iter().sum::<f64>() / 9000.0;
        let est = GaussianSampler::new(&c, 3).estimate(9000, 1, |x, out| out[0] = x[0]);
        assert!((est[0].mean - direct).abs() < 1e-14);
    }

    #[test]
    fn scalar_variance() {
        let c = CovarianceMatrix::build_dense(DMatrix::from_element(1, 1, 4.0)).unwrap();
        let est = GaussianSampler::new(&c, 11).estimate(1_000_000, 1, |x, out| out[0] = x[0] * x[0]);
        assert!((est[0].mean - 4.0).abs() < 0.023, "{}", est[0].mean);
    }
}
