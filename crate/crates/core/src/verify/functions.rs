use std::f64::consts::SQRT_2;
use std::fmt;

use serde::{Deserialize, Serialize};
use libm::{erf, erfc};

use super::quadrature::{piecewise_expectation, GaussHermite, WINDOW_SIGMAS};
use crate::error::{Error, Result};

/// Bounded real test functions `f` applied coordinate-wise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TestFunctionSpec {
    /// `1{|x| <= eps}`.
    Indicator { eps: f64 },
    /// `1{|x - shift| <= eps}`.
    ShiftedIndicator { shift: f64, eps: f64 },
    /// `cos(omega x)`.
    Cosine { omega: f64 },
    /// Polynomial of degree at most 4 (`coeffs[k]` multiplies `x^k`),
    /// clipped to `[-clip, clip]`.
    BoundedPoly { coeffs: Vec<f64>, clip: f64 },
    /// Piecewise-linear interpolation of equally spaced `values` on
    /// `[-half_width, half_width]`, zero outside.
    Grid { half_width: f64, values: Vec<f64> },
}

impl TestFunctionSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidSpec(msg.to_string()));
        match self {
            Self::Indicator { eps } | Self::ShiftedIndicator { eps, .. } if !(*eps > 0.0) => {
                bad("indicator width must be positive")
            }
            Self::ShiftedIndicator { shift, .. } if !shift.is_finite() => bad("shift must be finite"),
            Self::Cosine { omega } if !omega.is_finite() => bad("omega must be finite"),
            Self::BoundedPoly { coeffs, clip } => {
                if coeffs.is_empty() || coeffs.len() > 5 {
                    bad("bounded_poly needs 1..=5 coefficients (degree <= 4)")
                } else if coeffs.iter().any(|c| !c.is_finite()) || !(clip.is_finite() && *clip > 0.0) {
                    bad("bounded_poly coefficients and clip must be finite, clip > 0")
                } else {
                    Ok(())
                }
            }
            Self::Grid { half_width, values } => {
                if values.len() < 2 || !(half_width.is_finite() && *half_width > 0.0) {
                    bad("grid needs >= 2 values and a positive half width")
                } else if values.iter().any(|v| !v.is_finite()) {
                    bad("grid values must be finite")
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Self::Indicator { eps } => (x.abs() <= *eps) as u8 as f64,
            Self::ShiftedIndicator { shift, eps } => ((x - shift).abs() <= *eps) as u8 as f64,
            Self::Cosine { omega } => (omega * x).cos(),
            Self::BoundedPoly { coeffs, clip } => coeffs
                .iter()
                .rev()
                .fold(0.0, |acc, c| acc * x + c)
                .clamp(-clip, *clip),
            Self::Grid { half_width, values } => {
                if x < -half_width || x > *half_width {
                    return 0.0;
                }
                let steps = (values.len() - 1) as f64;
                let pos = (x + half_width) / (2.0 * half_width) * steps;
                let i = (pos.floor() as usize).min(values.len() - 2);
                let frac = pos - i as f64;
                values[i] * (1.0 - frac) + values[i + 1] * frac
            }
        }
    }

    /// Points in `[-12σ, 12σ]` where `|f|` may fail to be smooth: grid
    /// knots, clip crossings and sign changes.
    pub fn kinks(&self, sigma: f64) -> Vec<f64> {
        match self {
            Self::Indicator { eps } => vec![-eps, *eps],
            Self::ShiftedIndicator { shift, eps } => vec![shift - eps, shift + eps],
            Self::Cosine { .. } => Vec::new(),
            Self::BoundedPoly { coeffs, clip } => {
                let poly = |x: f64| coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c);
                let mut out = Vec::new();
                for level in [-clip, 0.0, *clip] {
                    out.extend(crossings(|x| poly(x) - level, sigma));
                }
                out
            }
            Self::Grid { half_width, values } => {
                let steps = values.len() - 1;
                let h = 2.0 * half_width / steps as f64;
                let mut out: Vec<f64> = (0..=steps).map(|k| -half_width + k as f64 * h).collect();
                for k in 0..steps {
                    let (a, b) = (values[k], values[k + 1]);
                    if a * b < 0.0 {
                        out.push(-half_width + (k as f64 + a / (a - b)) * h);
                    }
                }
                out
            }
        }
    }

    /// Short label used in report tables.
    pub fn label(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for TestFunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Indicator { eps } => write!(f, "indicator(eps={eps})"),
            Self::ShiftedIndicator { shift, eps } => write!(f, "shifted_indicator(a={shift},eps={eps})"),
            Self::Cosine { omega } => write!(f, "cosine(omega={omega})"),
            Self::BoundedPoly { coeffs, clip } => {
                let cs: Vec<String> = coeffs.iter().map(|c| c.to_string()).collect();
                write!(f, "bounded_poly([{}],clip={clip})", cs.join(";"))
            }
            Self::Grid { half_width, values } => {
                write!(f, "grid(L={half_width},points={})", values.len())
            }
        }
    }
}

fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / SQRT_2)
}

/// Roots of `g` in the integration window, located by a 4096-cell scan and
/// bisection.
fn crossings(g: impl Fn(f64) -> f64, sigma: f64) -> Vec<f64> {
    const CELLS: usize = 4096;
    let lo = -WINDOW_SIGMAS * sigma;
    let h = 2.0 * WINDOW_SIGMAS * sigma / CELLS as f64;
    let mut out = Vec::new();
    let mut a = lo;
    let mut ga = g(a);
    for k in 1..=CELLS {
        let b = lo + k as f64 * h;
        let gb = g(b);
        if ga == 0.0 {
            out.push(a);
        } else if ga * gb < 0.0 {
            let (mut x0, mut x1, mut g0) = (a, b, ga);
            for _ in 0..200 {
                let mid = 0.5 * (x0 + x1);
                if mid <= x0 || mid >= x1 {
                    break;
                }
                let gm = g(mid);
                if gm == 0.0 {
                    x0 = mid;
                    x1 = mid;
                    break;
                }
                if g0 * gm < 0.0 {
                    x1 = mid;
                } else {
                    x0 = mid;
                    g0 = gm;
                }
            }
            out.push(0.5 * (x0 + x1));
        }
        a = b;
        ga = gb;
    }
    out
}

/// `(E|f(σZ)|^p)^{1/p}`: exact through `erf` for indicator kinds, 201-point
/// Gauss–Hermite for the cosine, piecewise Gauss–Legendre between the kinks
/// of clipped polynomials and grids.
pub fn marginal_p_norm(f: &TestFunctionSpec, sigma: f64, p: f64) -> Result<f64> {
    f.validate()?;
    if !(p >= 1.0) || !(sigma > 0.0) {
        return Err(Error::InvalidSpec("marginal norm needs p >= 1 and sigma > 0".into()));
    }
    let moment = match f {
        TestFunctionSpec::Indicator { eps } => {
            if eps.is_infinite() {
                1.0
            } else {
                erf(eps / (sigma * SQRT_2))
            }
        }
        TestFunctionSpec::ShiftedIndicator { shift, eps } => {
            normal_cdf((shift + eps) / sigma) - normal_cdf((shift - eps) / sigma)
        }
        TestFunctionSpec::Cosine { .. } => GaussHermite::standard().expect(sigma, |x| f.eval(x).abs().powf(p)),
        _ => piecewise_expectation(sigma, &f.kinks(sigma), |x| f.eval(x).abs().powf(p)),
    };
    Ok(moment.max(0.0).powf(1.0 / p))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indicator_norms() {
        let inf = TestFunctionSpec::Indicator { eps: f64::INFINITY };
        assert_eq!(marginal_p_norm(&inf, 1.3, 2.5).unwrap(), 1.0);
        let f = TestFunctionSpec::Indicator { eps: 2.0 };
        let v = marginal_p_norm(&f, 2.0, 1.0).unwrap();
        assert!((v - 0.682_689_492_137_085_9).abs() < 1e-14, "{v}");
        let v3 = marginal_p_norm(&f, 2.0, 3.0).unwrap();
        assert!((v3 - v.powf(1.0 / 3.0)).abs() < 1e-15);
    }

    #[test]
    fn cosine_second_moment() {
        for (omega, sigma) in [(1.0, 1.0), (0.5, 2.0), (3.0, 0.4)] {
            let f = TestFunctionSpec::Cosine { omega };
            let v = marginal_p_norm(&f, sigma, 2.0).unwrap();
            let exact = (0.5 + 0.5 * (-2.0 * omega * omega * sigma * sigma as f64).exp()).sqrt();
            assert!((v - exact).abs() < 1e-12, "{v} vs {exact}");
        }
    }

    #[test]
    fn shifted_indicator_matches_quadrature_of_smooth_limit() {
        let f = TestFunctionSpec::ShiftedIndicator { shift: 0.0, eps: 1.0 };
        let g = TestFunctionSpec::Indicator { eps: 1.0 };
        let a = marginal_p_norm(&f, 1.0, 2.0).unwrap();
        let b = marginal_p_norm(&g, 1.0, 2.0).unwrap();
        assert!((a - b).abs() < 1e-14);
    }

    #[test]
    fn eval_kinds() {
        let p = TestFunctionSpec::BoundedPoly { coeffs: vec![1.0, 0.0, -1.0], clip: 2.0 };
        assert_eq!(p.eval(0.0), 1.0);
        assert_eq!(p.eval(10.0), -2.0);
        let g = TestFunctionSpec::Grid { half_width: 1.0, values: vec![0.0, 1.0, 0.0] };
        assert_eq!(g.eval(0.0), 1.0);
        assert_eq!(g.eval(0.5), 0.5);
        assert_eq!(g.eval(1.5), 0.0);
        assert_eq!(g.eval(1.0), 0.0);
        assert!(TestFunctionSpec::BoundedPoly { coeffs: vec![0.0; 6], clip: 1.0 }
            .validate()
            .is_err());
        assert!(TestFunctionSpec::Indicator { eps: 0.0 }.validate().is_err());
    }

    #[test]
    fn serde_shape() {
        let f: TestFunctionSpec = serde_json::from_str(r#"{"kind":"cosine","omega":1.5}"#).unwrap();
        assert_eq!(f, TestFunctionSpec::Cosine { omega: 1.5 });
    }
}
