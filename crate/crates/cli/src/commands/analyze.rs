use gdecouple::decoupling::{decoupling_coefficient, stationary_decoupling_coefficient, DecouplingBound};
use gdecouple::szego::{theorem2_constant, SpectralSymbol, EXACT_DET_LIMIT};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{error_text, Outcome};
use crate::config::{PPolicy, ScenarioConfig};

/// Largest section handled through closed-form autocovariances.
pub const MAX_ANALYZE_N: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyzeRow {
    pub model: String,
    pub n: usize,
    pub p_x: Option<f64>,
    pub p: Option<f64>,
    pub condition_holds: Option<bool>,
    /// `4 (log n)²`.
    pub log_squared_reference: f64,
    pub p_over_n: Option<f64>,
    pub log_det: Option<f64>,
    pub log_constant_generic: Option<f64>,
    pub log_constant_refined: Option<f64>,
    pub constant_generic: Option<f64>,
    pub constant_refined: Option<f64>,
    /// Constant from the Toeplitz asymptote, for models with a spectral symbol.
    pub log_constant_szego: Option<f64>,
    pub note: Option<String>,
    pub error: Option<String>,
}

fn analyze_one(config: &ScenarioConfig, symbol: Option<&SpectralSymbol>, n: usize) -> AnalyzeRow {
    let l = (n as f64).ln();
    let mut row = AnalyzeRow {
        model: config.model.to_string(),
        n,
        p_x: None,
        p: None,
        condition_holds: None,
        log_squared_reference: 4.0 * l * l,
        p_over_n: None,
        log_det: None,
        log_constant_generic: None,
        log_constant_refined: None,
        constant_generic: None,
        constant_refined: None,
        log_constant_szego: None,
        note: None,
        error: None,
    };
    if n > MAX_ANALYZE_N {
        row.error = Some(format!("n = {n} exceeds the analyze limit {MAX_ANALYZE_N}"));
        return row;
    }
    let p_x = match config.model.decoupling_coefficient(n) {
        Ok(v) => v,
        Err(e) => {
            row.error = Some(error_text(&e));
            return row;
        }
    };
    let p = config.p_policy.resolve(p_x);
    row.p_x = Some(p_x);
    row.p = Some(p);
    row.p_over_n = Some(p_x / n as f64);
    row.condition_holds = Some(p >= 2.0 * p_x);
    if let Some(sym) = symbol.filter(|s| n <= s.half_grid()) {
        let p_sym = match config.p_policy {
            PPolicy::Auto2pX => 2.0 * stationary_decoupling_coefficient(&sym.autocovariance(n), n),
            PPolicy::Fixed(p) => p,
        };
        match theorem2_constant(sym, n, p_sym) {
            Ok(t) => row.log_constant_szego = Some(t.log_constant),
            Err(e) => row.note = Some(format!("asymptotic constant unavailable: {e}")),
        }
    }
    if n > EXACT_DET_LIMIT {
        row.note = Some(format!("determinants skipped above n = {EXACT_DET_LIMIT}"));
        return row;
    }
    // The dense row sums may differ from the closed form by an ulp; the
    // automatic exponent follows the matrix that is actually factored.
    let bound = config.model.covariance(n).and_then(|c| {
        let p_dense = config.p_policy.resolve(decoupling_coefficient(&c));
        Ok(DecouplingBound::compute(&c, p_dense)?)
    });
    match bound {
        Ok(b) => {
            row.log_det = Some(b.log_det);
            row.log_constant_generic = b.log_constant_generic;
            row.log_constant_refined = b.log_constant_refined;
            row.constant_generic = b.constant_generic;
            row.constant_refined = b.constant_refined;
        }
        Err(e) => row.error = Some(error_text(&e)),
    }
    row
}

pub fn run(config: &ScenarioConfig) -> (Vec<AnalyzeRow>, Outcome) {
    let symbol = config.model.symbol(config.grid).ok();
    let rows: Vec<AnalyzeRow> = config
        .n_list
        .par_iter()
        .map(|&n| analyze_one(config, symbol.as_ref(), n))
        .collect();
    let outcome = Outcome {
        errors: rows.iter().filter(|r| r.error.is_some()).count(),
        ..Outcome::default()
    };
    (rows, outcome)
}
