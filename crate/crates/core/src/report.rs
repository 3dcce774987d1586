//! Tabular CSV/JSON output with fixed column order and fixed-point numbers.
//!
//! Energies carry one decimal (mJ), ratios three, durations three (ms),
//! costs six. Numbers are never written in exponent notation, so identical
//! inputs always produce byte-identical files.

use std::io::Write;

use crate::analytic::{EnergyBreakdown, PhaseTiming};
use crate::cost::{per_cycle_payload, CostCurve, CostSpec};
use crate::power::PowerProfile;
use crate::sweep::{CellOutcome, SweepGrid};
use crate::trace::AppKind;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(String),
    Text(String),
    Bool(bool),
    Null,
}

impl Cell {
    pub fn fixed(value: f64, decimals: usize) -> Self {
        // avoid "-0.0"
        let s = format!("{value:.decimals$}");
        if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
            Cell::Num(s[1..].to_string())
        } else {
            Cell::Num(s)
        }
    }

    /// Shortest round-trip decimal form; f64 `Display` never uses exponents.
    pub fn plain(value: f64) -> Self {
        Cell::Num(format!("{value}"))
    }

    pub fn int(value: impl Into<i128>) -> Self {
        Cell::Num(value.into().to_string())
    }

    /// Unquoted text of the cell; empty for `Null`.
    pub fn text(&self) -> String {
        match self {
            Cell::Num(s) | Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Null => String::new(),
        }
    }

    fn json_text(&self) -> String {
        match self {
            Cell::Num(s) => s.clone(),
            Cell::Text(s) => serde_json::Value::String(s.clone()).to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Null => "null".into(),
        }
    }
}

pub fn mj(value: f64) -> Cell {
    Cell::fixed(value, 1)
}

pub fn ms(value: f64) -> Cell {
    Cell::fixed(value, 3)
}

pub fn ratio(value: f64) -> Cell {
    Cell::fixed(value, 3)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn write_csv<W: Write>(&self, out: W) -> std::io::Result<()> {
        let mut writer = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        writer.write_record(&self.columns)?;
        for row in &self.rows {
            writer.write_record(row.iter().map(Cell::text))?;
        }
        writer.flush()
    }

    /// Array of objects, one per row, keys in column order.
    pub fn write_json<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "[")?;
        for (i, row) in self.rows.iter().enumerate() {
            let fields: Vec<String> = self
                .columns
                .iter()
                .zip(row)
                .map(|(k, v)| {
                    format!(
                        "{}: {}",
                        serde_json::Value::String(k.clone()),
                        v.json_text()
                    )
                })
                .collect();
            let sep = if i + 1 == self.rows.len() { "" } else { "," };
            writeln!(out, "  {{{}}}{sep}", fields.join(", "))?;
        }
        writeln!(out, "]")
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("write to memory");
        String::from_utf8(buf).expect("utf-8")
    }

    pub fn to_json_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_json(&mut buf).expect("write to memory");
        String::from_utf8(buf).expect("utf-8")
    }
}

pub const BREAKDOWN_COLUMNS: [&str; 13] = [
    "t_tx_ms",
    "t_w_ms",
    "t_rx_ms",
    "t_q_ms",
    "prom_tx",
    "prom_rx",
    "e_tx_mJ",
    "e_w_mJ",
    "e_rx_mJ",
    "e_q_mJ",
    "e_prom_tx_mJ",
    "e_prom_rx_mJ",
    "e_i_mJ",
];

pub fn breakdown_row(timing: &PhaseTiming, e: &EnergyBreakdown) -> Vec<Cell> {
    vec![
        ms(timing.t_tx),
        ms(timing.t_w),
        ms(timing.t_rx),
        ms(timing.t_q),
        Cell::Bool(timing.prom_tx),
        Cell::Bool(timing.prom_rx),
        mj(e.e_tx),
        mj(e.e_w),
        mj(e.e_rx),
        mj(e.e_q),
        mj(e.e_prom_tx),
        mj(e.e_prom_rx),
        mj(e.e_i),
    ]
}

pub fn breakdown_table(timing: &PhaseTiming, e: &EnergyBreakdown) -> Table {
    let mut t = Table::new(BREAKDOWN_COLUMNS);
    t.push(breakdown_row(timing, e));
    t
}

/// Columns after the axis values of a sweep table.
pub const SWEEP_COLUMNS: [&str; 10] = [
    "rho",
    "delta_rtt_ms",
    "e_w_edge_mJ",
    "e_w_cloud_mJ",
    "e_q_edge_mJ",
    "e_q_cloud_mJ",
    "e_i_edge_mJ",
    "e_i_cloud_mJ",
    "error",
    "deficit_ms",
];

/// One row per cell; overrun cells keep their coordinates, leave the
/// numeric columns empty and set `error = period_overrun`.
pub fn sweep_table(grid: &SweepGrid) -> Table {
    let columns = grid
        .axes
        .iter()
        .map(|a| a.name().to_string())
        .chain(SWEEP_COLUMNS.iter().map(|c| c.to_string()));
    let mut t = Table::new(columns);
    for cell in &grid.cells {
        let mut row: Vec<Cell> = cell.coords.iter().map(|&v| Cell::plain(v)).collect();
        match cell.outcome {
            CellOutcome::Ok(r) => row.extend([
                ratio(r.rho),
                ms(r.delta_rtt),
                mj(r.edge.e_w),
                mj(r.cloud.e_w),
                mj(r.edge.e_q),
                mj(r.cloud.e_q),
                mj(r.edge.e_i),
                mj(r.cloud.e_i),
                Cell::Null,
                Cell::Null,
            ]),
            CellOutcome::Overrun { deficit_ms } => {
                row.extend(std::iter::repeat_n(Cell::Null, 8));
                row.push(Cell::Text("period_overrun".into()));
                row.push(ms(deficit_ms));
            }
        }
        t.push(row);
    }
    t
}

pub const COST_COLUMNS: [&str; 7] = [
    "alpha",
    "t_i_ms",
    "payload_B",
    "e_total_mJ",
    "d_ms",
    "c",
    "is_min",
];

pub fn cost_table(spec: &CostSpec, curves: &[CostCurve]) -> Table {
    let mut t = Table::new(COST_COLUMNS);
    for curve in curves {
        for (i, p) in curve.points.iter().enumerate() {
            t.push(vec![
                Cell::plain(curve.alpha),
                Cell::plain(p.t_i),
                Cell::int(per_cycle_payload(spec.hourly_bytes, p.t_i)),
                mj(p.e_total),
                Cell::plain(p.d),
                Cell::fixed(p.c, 6),
                Cell::Bool(i == curve.argmin),
            ]);
        }
    }
    t
}

pub const TRACE_COLUMNS: [&str; 10] = [
    "app_kind",
    "file_size",
    "t_i",
    "c",
    "t_tx_ms",
    "t_w_ms",
    "t_rx_ms",
    "t_q_ms",
    "e_i_mJ",
    "rho",
];

/// One row of trace-analysis output.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub app_kind: AppKind,
    pub file_size: u64,
    pub t_i: f64,
    pub concurrency: u32,
    pub timing: PhaseTiming,
    pub e_i: f64,
    pub rho: Option<f64>,
}

pub fn trace_table(rows: &[TraceRow]) -> Table {
    let mut t = Table::new(TRACE_COLUMNS);
    for r in rows {
        t.push(vec![
            Cell::Text(r.app_kind.as_str().into()),
            Cell::int(r.file_size),
            Cell::plain(r.t_i),
            Cell::int(r.concurrency),
            ms(r.timing.t_tx),
            ms(r.timing.t_w),
            ms(r.timing.t_rx),
            ms(r.timing.t_q),
            mj(r.e_i),
            r.rho.map_or(Cell::Null, ratio),
        ]);
    }
    t
}

pub fn profile_table(p: &PowerProfile) -> Table {
    let mut t = Table::new(["parameter", "value", "unit"]);
    let mut add = |name: &str, value: f64, unit: &str| {
        t.push(vec![
            Cell::Text(name.into()),
            Cell::plain(value),
            Cell::Text(unit.into()),
        ]);
    };
    add("p_tx", p.p_tx, "mW");
    add("p_rx", p.p_rx, "mW");
    add("p_cr", p.p_cr, "mW");
    add("p_short", p.p_short, "mW");
    add("p_long", p.p_long, "mW");
    add("p_idle", p.p_idle, "mW");
    add("p_prom", p.p_prom, "mW");
    add("t_cr", p.t_cr, "ms");
    add("t_short", p.t_short, "ms");
    add("t_long", p.t_long, "ms");
    add("t_prom", p.t_prom, "ms");
    for (name, cycle) in [
        ("short_drx", p.short_drx),
        ("long_drx", p.long_drx),
        ("idle", p.idle),
    ] {
        if let Some(c) = cycle {
            add(&format!("{name}.wake_power"), c.wake_power, "mW");
            add(&format!("{name}.wake_duration"), c.wake_duration, "ms");
            add(&format!("{name}.period"), c.period, "ms");
            add(&format!("{name}.sleep_power"), c.sleep_power, "mW");
        }
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_point_formatting() {
        assert_eq!(mj(729.5), Cell::Num("729.5".into()));
        assert_eq!(mj(2258.858), Cell::Num("2258.9".into()));
        assert_eq!(Cell::fixed(-0.00001, 3), Cell::Num("0.000".into()));
        assert_eq!(
            Cell::plain(1e21),
            Cell::Num("1000000000000000000000".into())
        );
        assert_eq!(Cell::plain(0.000001), Cell::Num("0.000001".into()));
        assert_eq!(ratio(0.99125), Cell::Num("0.991".into()));
    }

    #[test]
    fn csv_and_json() {
        let mut t = Table::new(["a", "b", "c"]);
        t.push(vec![Cell::plain(1.5), Cell::Text("x,y".into()), Cell::Null]);
        t.push(vec![Cell::int(2u8), Cell::Bool(true), Cell::fixed(3.0, 1)]);
        assert_eq!(t.to_csv_string(), "a,b,c\n1.5,\"x,y\",\n2,true,3.0\n");
        assert_eq!(
            t.to_json_string(),
            "[\n  {\"a\": 1.5, \"b\": \"x,y\", \"c\": null},\n  {\"a\": 2, \"b\": true, \"c\": 3.0}\n]\n"
        );
        let v: serde_json::Value = serde_json::from_str(&t.to_json_string()).unwrap();
        assert_eq!(v[1]["c"], 3.0);
    }
}
