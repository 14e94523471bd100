//! Canned tables: logarithmic growth of `p(Xⁿ)` for the inverse-power model
//! and linear growth for the Hilbert-type family.

use serde::{Deserialize, Serialize};

use crate::model::ModelSpec;

pub const LOG_GROWTH_NS: [usize; 4] = [100, 1_000, 10_000, 100_000];
pub const HILBERT_NS: [usize; 6] = [10, 20, 40, 80, 160, 320];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExampleRow {
    pub table: String,
    pub n: usize,
    pub p_x: f64,
    /// `4 (log n)²` for the log-growth table, `n` for the Hilbert table.
    pub reference: f64,
    /// `(p_x - 4 (log n)²) / log n`, or `p_x / n`.
    pub ratio: f64,
}

pub fn log_growth_table() -> anyhow::Result<Vec<ExampleRow>> {
    let model = ModelSpec::InversePower { r: 1.0 };
    LOG_GROWTH_NS
        .iter()
        .map(|&n| {
            let p_x = model.decoupling_coefficient(n)?;
            let l = (n as f64).ln();
            Ok(ExampleRow {
                table: "inverse_power_r1".into(),
                n,
                p_x,
                reference: 4.0 * l * l,
                ratio: (p_x - 4.0 * l * l) / l,
            })
        })
        .collect()
}

pub fn hilbert_table() -> anyhow::Result<Vec<ExampleRow>> {
    HILBERT_NS
        .iter()
        .map(|&n| {
            let p_x = ModelSpec::Hilbert.decoupling_coefficient(n)?;
            Ok(ExampleRow {
                table: "hilbert".into(),
                n,
                p_x,
                reference: n as f64,
                ratio: p_x / n as f64,
            })
        })
        .collect()
}

pub fn render_text(log_rows: &[ExampleRow], hilbert_rows: &[ExampleRow]) -> String {
    let mut s = String::new();
    s.push_str("inverse_power r=1: p(X^n) against 4 (log n)^2\n");
    s.push_str(&format!("{:>8} {:>12} {:>14} {:>22}\n", "n", "p(X^n)", "4(log n)^2", "(p - 4log^2 n)/log n"));
    for r in log_rows {
        s.push_str(&format!("{:>8} {:>12.4} {:>14.4} {:>22.4}\n", r.n, r.p_x, r.reference, r.ratio));
    }
    s.push_str("\nhilbert a=1..n: p(X^n) / n\n");
    s.push_str(&format!("{:>8} {:>12} {:>10}\n", "n", "p(X^n)", "p/n"));
    for r in hilbert_rows {
        s.push_str(&format!("{:>8} {:>12.4} {:>10.5}\n", r.n, r.p_x, r.ratio));
    }
    s
}
