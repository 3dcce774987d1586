use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use edge_energy::report::Table;

use crate::args::Format;

/// Fixed-width rendering of a table for terminals.
pub fn aligned(table: &Table) -> String {
    let cells: Vec<Vec<String>> = table
        .rows
        .iter()
        .map(|row| row.iter().map(|c| c.text()).collect())
        .collect();
    let mut widths: Vec<usize> = table.columns.iter().map(|c| c.len()).collect();
    for row in &cells {
        for (w, c) in widths.iter_mut().zip(row) {
            *w = (*w).max(c.len());
        }
    }
    let mut out = String::new();
    for fields in std::iter::once(&table.columns).chain(&cells) {
        let line: Vec<String> = fields
            .iter()
            .zip(&widths)
            .map(|(f, w)| format!("{f:>w$}"))
            .collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    out
}

/// Render `table` in the requested format; `text` is used for `Format::Text`.
pub fn render(table: &Table, format: Format, text: impl FnOnce() -> String) -> String {
    match format {
        Format::Text => text(),
        Format::Csv => table.to_csv_string(),
        Format::Json => table.to_json_string(),
    }
}

pub fn emit(content: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => {
            let file =
                File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
            let mut w = BufWriter::new(file);
            w.write_all(content.as_bytes())
                .and_then(|_| w.flush())
                .with_context(|| format!("cannot write {}", path.display()))
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(content.as_bytes())
                .and_then(|_| lock.flush())
                .context("cannot write to stdout")
        }
    }
}
