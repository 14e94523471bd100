use std::io::Write;
use std::path::Path;

use anyhow::Context;
use serde::Serialize;

use crate::config::Format;

/// Serializes `rows` as a pretty JSON array or a CSV table.
pub fn render<T: Serialize>(rows: &[T], format: Format) -> anyhow::Result<Vec<u8>> {
    match format {
        Format::Json => {
            let mut out = serde_json::to_vec_pretty(rows)?;
            out.push(b'\n');
            Ok(out)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for row in rows {
                w.serialize(row)?;
            }
            Ok(w.into_inner().context("flushing csv")?)
        }
    }
}

/// Writes to `path`, or to stdout when no path is given.
pub fn emit<T: Serialize>(rows: &[T], format: Format, path: Option<&Path>) -> anyhow::Result<()> {
    let bytes = render(rows, format)?;
    match path {
        Some(p) => std::fs::write(p, bytes).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(&bytes)?;
            Ok(())
        }
    }
}
