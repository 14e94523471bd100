use gdecouple::covmodel::CovarianceMatrix;
use gdecouple::decoupling::decoupling_coefficient;
use gdecouple::verify::{
    kls_coefficient, product_expectation, theorem1_rhs, verify_khatri_sidak, verify_kls, TestFunctionSpec,
    Verdict, VerificationReport,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::eb::MAX_DENSE_N;
use super::{cell_seed, error_text, Outcome};
use crate::config::{PPolicy, ScenarioConfig};
use crate::model::ModelSpec;

/// Which exponents are checked for each section.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PGrid {
    /// The single exponent given by the scenario's `p_policy`.
    #[default]
    Policy,
    /// `2p(X)`, `2p(X) + 1` and `4p(X)`.
    Sweep,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct VerifyOptions {
    pub p_grid: PGrid,
    /// Replace the decoupling constant by its reciprocal; a correct
    /// implementation must then report hard failures on correlated models.
    pub negate_constant: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyRow {
    pub model: String,
    pub n: usize,
    pub p: Option<f64>,
    /// `check:function`, e.g. `theorem1:cosine(omega=1)`.
    #[serde(rename = "function-suite")]
    pub function_suite: String,
    pub lhs: Option<f64>,
    pub stderr: Option<f64>,
    pub rhs: Option<f64>,
    pub slack: Option<f64>,
    pub z: Option<f64>,
    pub verdict: Option<Verdict>,
    pub seed: u64,
    pub samples: usize,
    pub error: Option<String>,
}

impl VerifyRow {
    fn from_report(model: &str, n: usize, p: Option<f64>, function: String, r: &VerificationReport) -> Self {
        Self {
            model: model.to_string(),
            n,
            p,
            function_suite: format!("{}:{function}", r.check),
            lhs: Some(r.lhs_mc),
            stderr: Some(r.lhs_stderr),
            rhs: Some(r.rhs),
            slack: Some(r.slack),
            z: Some(r.z_score).filter(|z| z.is_finite()),
            verdict: Some(r.verdict),
            samples: r.n_samples,
            seed: r.seed,
            error: None,
        }
    }

    fn failed(
        model: &str,
        n: usize,
        p: Option<f64>,
        check: &str,
        function: String,
        samples: usize,
        seed: u64,
        error: String,
    ) -> Self {
        Self {
            model: model.to_string(),
            n,
            p,
            function_suite: format!("{check}:{function}"),
            lhs: None,
            stderr: None,
            rhs: None,
            slack: None,
            z: None,
            verdict: None,
            samples,
            seed,
            error: Some(error),
        }
    }
}

fn p_values(config: &ScenarioConfig, grid: PGrid, p_x: f64) -> Vec<f64> {
    match (grid, config.p_policy) {
        (PGrid::Sweep, PPolicy::Auto2pX) => vec![2.0 * p_x, 2.0 * p_x + 1.0, 4.0 * p_x],
        (_, policy) => vec![policy.resolve(p_x)],
    }
}

/// Autocovariance long enough to capture the tail of `Σ |γ(h)|`, or `None`
/// for models without an absolutely summable stationary autocovariance.
fn kls_gamma(model: &ModelSpec, n: usize) -> anyhow::Result<Option<Vec<f64>>> {
    let len = match model {
        ModelSpec::InversePower { r } if *r <= 1.0 => return Ok(None),
        ModelSpec::InversePower { r } if *r == 2.0 => 100_000,
        ModelSpec::InversePower { .. } => 2_000,
        m if !m.is_stationary() => return Ok(None),
        _ => 4_096,
    };
    model.gamma(len.max(n))
}

fn homogeneous(f: &TestFunctionSpec, n: usize) -> Vec<TestFunctionSpec> {
    vec![f.clone(); n]
}

fn verify_section(config: &ScenarioConfig, opts: VerifyOptions, index: usize, n: usize) -> Vec<VerifyRow> {
    let model = config.model.to_string();
    let samples = config.mc_samples;
    let base = config.seed;
    let key = 1_000 * index as u64;
    let fail = |check: &str, function: String, p: Option<f64>, seed: u64, e: String| {
        VerifyRow::failed(&model, n, p, check, function, samples, seed, e)
    };
    if n > MAX_DENSE_N {
        let e = format!("n = {n} exceeds the dense limit {MAX_DENSE_N}");
        return vec![fail("theorem1", "-".into(), None, base, e)];
    }
    let c: CovarianceMatrix = match config.model.covariance(n) {
        Ok(c) => c,
        Err(e) => return vec![fail("theorem1", "-".into(), None, base, error_text(&e))],
    };
    let p_x = decoupling_coefficient(&c);
    let ps = p_values(config, opts.p_grid, p_x);
    let mut rows = Vec::new();

    for (fi, f) in config.functions.iter().enumerate() {
        let seed = cell_seed(base, key + fi as u64);
        let fns = homogeneous(f, n);
        let label = f.label();
        let est = match product_expectation(&c, &fns, samples, seed) {
            Ok(e) => e,
            Err(e) => {
                rows.push(fail("theorem1", label, None, seed, e.to_string()));
                continue;
            }
        };
        for &p in &ps {
            match theorem1_rhs(&c, p, &fns, opts.negate_constant) {
                Ok(rhs) => {
                    let r = VerificationReport::new("theorem1", est.mean.abs(), est.stderr, rhs, samples, seed);
                    rows.push(VerifyRow::from_report(&model, n, Some(p), label.clone(), &r));
                }
                Err(e) => rows.push(fail("theorem1", label.clone(), Some(p), seed, e.to_string())),
            }
        }
    }

    let box_label = format!("box(eps={})", config.eps);
    let eps = vec![config.eps; n];
    let gamma = match kls_gamma(&config.model, n) {
        Ok(g) => g,
        Err(e) => {
            rows.push(fail("kls", "-".into(), None, base, error_text(&e)));
            None
        }
    };
    let kls_p = gamma.as_deref().and_then(|g| kls_coefficient(g).ok());
    let ks_seed = cell_seed(base, key + 500);
    let mut lower_done = false;
    for &p in &ps {
        match verify_khatri_sidak(&c, &eps, p, samples, ks_seed, kls_p) {
            Ok(ks) => {
                if !lower_done {
                    rows.push(VerifyRow::from_report(&model, n, None, box_label.clone(), &ks.lower));
                    if let Some(k) = &ks.kls_form {
                        rows.push(VerifyRow::from_report(&model, n, kls_p, box_label.clone(), k));
                    }
                    lower_done = true;
                }
                rows.push(VerifyRow::from_report(&model, n, Some(p), box_label.clone(), &ks.upper));
            }
            Err(e) => rows.push(fail("corollary1_upper", box_label.clone(), Some(p), ks_seed, e.to_string())),
        }
    }

    if let Some(g) = gamma {
        for (fi, f) in config.functions.iter().enumerate() {
            let seed = cell_seed(base, key + 600 + fi as u64);
            let fns = homogeneous(f, n);
            match verify_kls(&g, n, &fns, samples, seed) {
                Ok(r) => rows.push(VerifyRow::from_report(&model, n, kls_p, f.label(), &r)),
                Err(e) => rows.push(fail("kls_decoupling", f.label(), kls_p, seed, e.to_string())),
            }
        }
    }
    rows
}

pub fn outcome(rows: &[VerifyRow]) -> Outcome {
    let mut out = Outcome::default();
    for r in rows {
        match (&r.error, r.verdict) {
            (Some(_), _) => out.errors += 1,
            (None, Some(Verdict::HardFail)) => out.hard_fails += 1,
            (None, Some(Verdict::StatisticalFail)) => out.statistical_fails += 1,
            _ => {}
        }
    }
    out
}

pub fn run(config: &ScenarioConfig, opts: VerifyOptions) -> (Vec<VerifyRow>, Outcome) {
    let rows: Vec<VerifyRow> = config
        .n_list
        .par_iter()
        .enumerate()
        .flat_map_iter(|(i, &n)| verify_section(config, opts, i, n))
        .collect();
    let out = outcome(&rows);
    (rows, out)
}

/// Scenarios of the built-in verification suite.
pub fn default_suite(samples: usize, seed: u64) -> Vec<ScenarioConfig> {
    let functions = vec![
        TestFunctionSpec::Indicator { eps: 1.0 },
        TestFunctionSpec::Cosine { omega: 1.0 },
        TestFunctionSpec::BoundedPoly {
            coeffs: vec![0.5, 1.0, -0.5],
            clip: 1.0,
        },
    ];
    let small = vec![2, 5, 10];
    let mut cases: Vec<(ModelSpec, Vec<usize>)> = vec![(ModelSpec::Identity, small.clone())];
    for rho in [0.3, 0.6, 0.9] {
        cases.push((ModelSpec::Equicorrelated { rho }, small.clone()));
    }
    for a in [0.3, 0.5, 0.8] {
        cases.push((ModelSpec::Ma1 { a }, small.clone()));
    }
    for r in [1.0, 2.0] {
        cases.push((ModelSpec::InversePower { r }, vec![5, 10, 20]));
    }
    cases.push((ModelSpec::Hilbert, vec![3, 5, 8]));
    cases
        .into_iter()
        .enumerate()
        .map(|(i, (model, n_list))| {
            let mut c = ScenarioConfig::new(model);
            c.n_list = n_list;
            c.functions = functions.clone();
            c.mc_samples = samples;
            c.seed = cell_seed(seed, i as u64);
            c
        })
        .collect()
}

pub fn run_suite(configs: &[ScenarioConfig], opts: VerifyOptions) -> (Vec<VerifyRow>, Outcome) {
    let mut rows = Vec::new();
    for c in configs {
        rows.extend(run(c, opts).0);
    }
    let out = outcome(&rows);
    (rows, out)
}
