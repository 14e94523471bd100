//! Gaussian expectations: Gauss–Hermite for smooth integrands, piecewise
//! Gauss–Legendre between known kinks otherwise.

use std::f64::consts::PI;
use std::sync::OnceLock;

use nalgebra::{DMatrix, SymmetricEigen};

/// Node count used for every Gaussian expectation in this crate.
pub const HERMITE_NODES: usize = 201;

/// Nodes and weights for `∫ g(x) e^{-x²} dx ≈ Σ w_i g(x_i)`.
#[derive(Debug, Clone)]
pub struct GaussHermite {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussHermite {
    /// Golub–Welsch eigenvalues of the Jacobi matrix, polished by Newton
    /// steps on the orthonormal Hermite recurrence, which also give the weights.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let jacobi = DMatrix::from_fn(n, n, |i, j| {
            if i.abs_diff(j) == 1 {
                (i.max(j) as f64 / 2.0).sqrt()
            } else {
                0.0
            }
        });
        let mut guesses: Vec<f64> = SymmetricEigen::new(jacobi).eigenvalues.iter().copied().collect();
        guesses.sort_by(|a, b| b.total_cmp(a));
        let mut nodes: Vec<f64> = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        for i in 0..n {
            // Enforce exact symmetry from the upper half.
            let mut z = if i < n / 2 {
                guesses[i]
            } else if 2 * i + 1 == n {
                0.0
            } else {
                -nodes[n - 1 - i]
            };
            let mut pp = 0.0;
            for _ in 0..8 {
                let (p1, d) = hermite_orthonormal(n, z);
                pp = d;
                let step = p1 / pp;
                z -= step;
                if step.abs() <= 1e-15 * z.abs().max(1.0) {
                    break;
                }
            }
            let (_, d) = hermite_orthonormal(n, z);
            if d != 0.0 {
                pp = d;
            }
            nodes.push(z);
            weights.push(2.0 / (pp * pp));
        }
        Self { nodes, weights }
    }

    /// Shared 201-point rule.
    pub fn standard() -> &'static GaussHermite {
        static RULE: OnceLock<GaussHermite> = OnceLock::new();
        RULE.get_or_init(|| GaussHermite::new(HERMITE_NODES))
    }

    /// `E g(σ Z)` for `Z ~ N(0, 1)`.
    pub fn expect(&self, sigma: f64, g: impl Fn(f64) -> f64) -> f64 {
        let scale = sigma * std::f64::consts::SQRT_2;
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * g(scale * x))
            .sum::<f64>()
            / PI.sqrt()
    }
}

/// Half-width of the integration window in standard deviations.
pub const WINDOW_SIGMAS: f64 = 12.0;
const LEGENDRE_NODES: usize = 20;

/// Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (mut p1, mut p2) = (1.0, 0.0);
                for j in 0..n {
                    let p3 = p2;
                    p2 = p1;
                    let jf = j as f64;
                    p1 = ((2.0 * jf + 1.0) * z * p2 - jf * p3) / (jf + 1.0);
                }
                dp = n as f64 * (z * p1 - p2) / (z * z - 1.0);
                let step = p1 / dp;
                z -= step;
                if step.abs() < 1e-16 {
                    break;
                }
            }
            nodes[i] = z;
            nodes[n - 1 - i] = -z;
            weights[i] = 2.0 / ((1.0 - z * z) * dp * dp);
            weights[n - 1 - i] = weights[i];
        }
        Self { nodes, weights }
    }

    pub fn standard() -> &'static GaussLegendre {
        static RULE: OnceLock<GaussLegendre> = OnceLock::new();
        RULE.get_or_init(|| GaussLegendre::new(LEGENDRE_NODES))
    }

    fn integrate(&self, a: f64, b: f64, g: &impl Fn(f64) -> f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        half * self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * g(mid + half * x))
            .sum::<f64>()
    }
}

/// `E g(σ Z)` for `g` smooth between the given breakpoints, by composite
/// Gauss–Legendre on `[-12σ, 12σ]` with panels no wider than `σ/4`.
pub fn piecewise_expectation(sigma: f64, breakpoints: &[f64], g: impl Fn(f64) -> f64) -> f64 {
    let lo = -WINDOW_SIGMAS * sigma;
    let hi = WINDOW_SIGMAS * sigma;
    let mut cuts: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|x| *x > lo && *x < hi)
        .collect();
    cuts.push(lo);
    cuts.push(hi);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let norm = 1.0 / (sigma * (2.0 * PI).sqrt());
    let weighted = |x: f64| g(x) * (-0.5 * (x / sigma).powi(2)).exp() * norm;
    let rule = GaussLegendre::standard();
    let max_panel = 0.25 * sigma;
    cuts.windows(2)
        .map(|w| {
            let panels = ((w[1] - w[0]) / max_panel).ceil().max(1.0) as usize;
            let h = (w[1] - w[0]) / panels as f64;
            (0..panels)
                .map(|k| rule.integrate(w[0] + k as f64 * h, w[0] + (k + 1) as f64 * h, &weighted))
                .sum::<f64>()
        })
        .sum()
}

/// Orthonormal Hermite value `p_n(z)` and derivative `p_n'(z)`.
fn hermite_orthonormal(n: usize, z: f64) -> (f64, f64) {
    let mut p1 = PI.powf(-0.25);
    let mut p2 = 0.0;
    for j in 0..n {
        let p3 = p2;
        p2 = p1;
        let jf = j as f64;
        p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
    }
    (p1, (2.0 * n as f64).sqrt() * p2)
}
