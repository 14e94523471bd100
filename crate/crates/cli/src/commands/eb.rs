use gdecouple::brascamp::{eb_optimize, matrix_b};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{error_text, Outcome};
use crate::config::ScenarioConfig;

/// Dimension cap for commands that factor matrices.
pub const MAX_DENSE_N: usize = 2048;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EbRow {
    pub model: String,
    pub n: usize,
    pub p: Option<f64>,
    pub eb_log: Option<f64>,
    pub upper_log: Option<f64>,
    /// `upper_log - eb_log`; nonnegative when the sandwich holds.
    pub margin: Option<f64>,
    pub sandwich_holds: Option<bool>,
    pub converged: Option<bool>,
    pub residual: Option<f64>,
    pub stationarity_residual: Option<f64>,
    pub iterations: Option<usize>,
    pub start_spread: Option<f64>,
    pub error: Option<String>,
}

fn eb_one(config: &ScenarioConfig, n: usize) -> EbRow {
    let mut row = EbRow {
        model: config.model.to_string(),
        n,
        p: None,
        eb_log: None,
        upper_log: None,
        margin: None,
        sandwich_holds: None,
        converged: None,
        residual: None,
        stationarity_residual: None,
        iterations: None,
        start_spread: None,
        error: None,
    };
    if n > MAX_DENSE_N {
        row.error = Some(format!("n = {n} exceeds the dense limit {MAX_DENSE_N}"));
        return row;
    }
    let result = (|| -> anyhow::Result<_> {
        let c = config.model.covariance(n)?;
        let p = config.p_policy.resolve(gdecouple::decoupling::decoupling_coefficient(&c));
        let b = matrix_b(&c, p)?;
        Ok((p, eb_optimize(&b, p)?))
    })();
    match result {
        Ok((p, prob)) => {
            row.p = Some(p);
            row.eb_log = Some(prob.eb_log);
            row.upper_log = Some(prob.upper_log);
            row.margin = Some(prob.upper_log - prob.eb_log);
            row.sandwich_holds = Some(prob.eb_log <= prob.upper_log + 1e-9);
            row.converged = Some(prob.converged);
            row.residual = Some(prob.residual);
            row.stationarity_residual = Some(prob.stationarity_residual);
            row.iterations = Some(prob.iterations);
            row.start_spread = Some(prob.start_spread);
            if let Err(e) = prob.into_result() {
                row.error = Some(e.to_string());
            }
        }
        Err(e) => row.error = Some(error_text(&e)),
    }
    row
}

pub fn run(config: &ScenarioConfig) -> (Vec<EbRow>, Outcome) {
    let rows: Vec<EbRow> = config.n_list.par_iter().map(|&n| eb_one(config, n)).collect();
    let outcome = Outcome {
        errors: rows.iter().filter(|r| r.error.is_some()).count(),
        ..Outcome::default()
    };
    (rows, outcome)
}
