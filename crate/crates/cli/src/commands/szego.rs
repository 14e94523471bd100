use gdecouple::szego::{condition_report, szego_asymptote, theorem2_constant, SpectralSymbol};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{error_text, Outcome};
use crate::config::ScenarioConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SzegoRow {
    pub model: String,
    pub n: usize,
    pub grid: usize,
    pub g: Option<f64>,
    pub b: Option<f64>,
    pub asymptote_log: Option<f64>,
    pub exact_log_det: Option<f64>,
    pub ratio: Option<f64>,
    pub c1_sum: Option<f64>,
    pub c2_sum: Option<f64>,
    pub conditions_pass: Option<bool>,
    pub p: Option<f64>,
    pub log_constant: Option<f64>,
    pub log_constant_as_stated: Option<f64>,
    pub delta_hat: Option<f64>,
    pub error: Option<String>,
}

impl SzegoRow {
    fn empty(config: &ScenarioConfig, n: usize) -> Self {
        Self {
            model: config.model.to_string(),
            n,
            grid: config.grid,
            g: None,
            b: None,
            asymptote_log: None,
            exact_log_det: None,
            ratio: None,
            c1_sum: None,
            c2_sum: None,
            conditions_pass: None,
            p: None,
            log_constant: None,
            log_constant_as_stated: None,
            delta_hat: None,
            error: None,
        }
    }
}

fn szego_one(config: &ScenarioConfig, sym: &SpectralSymbol, n: usize) -> SzegoRow {
    let mut row = SzegoRow::empty(config, n);
    let est = match szego_asymptote(sym, n) {
        Ok(e) => e,
        Err(e) => {
            row.error = Some(e.to_string());
            return row;
        }
    };
    row.g = Some(est.g);
    row.b = Some(est.b);
    row.asymptote_log = Some(est.asymptote_log);
    row.exact_log_det = est.exact_log_det;
    row.ratio = est.ratio;
    row.c1_sum = Some(est.c1_sum);
    row.c2_sum = Some(est.c2_sum);
    row.conditions_pass = condition_report(sym).ok().map(|r| r.pass());
    let p_x = gdecouple::decoupling::stationary_decoupling_coefficient(&sym.autocovariance(n), n);
    let p = config.p_policy.resolve(p_x);
    row.p = Some(p);
    match theorem2_constant(sym, n, p) {
        Ok(t) => {
            row.log_constant = Some(t.log_constant);
            row.log_constant_as_stated = Some(t.log_constant_as_stated);
            row.delta_hat = Some(t.delta_hat);
        }
        Err(e) => row.error = Some(e.to_string()),
    }
    row
}

pub fn run(config: &ScenarioConfig) -> (Vec<SzegoRow>, Outcome) {
    let rows: Vec<SzegoRow> = match config.model.symbol(config.grid) {
        Ok(sym) => config.n_list.par_iter().map(|&n| szego_one(config, &sym, n)).collect(),
        Err(e) => config
            .n_list
            .iter()
            .map(|&n| {
                let mut row = SzegoRow::empty(config, n);
                row.error = Some(error_text(&e));
                row
            })
            .collect(),
    };
    let outcome = Outcome {
        errors: rows.iter().filter(|r| r.error.is_some()).count(),
        ..Outcome::default()
    };
    (rows, outcome)
}
