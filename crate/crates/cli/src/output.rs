//! CSV and JSON writers for traces and reports.
//!
//! Every CSV starts with its header row; the column sets are fixed so the
//! files can be checked by machine.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use clap::ValueEnum;
use dgo_core::TraceRecord;
use serde::Serialize;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

pub const TRACE_HEADER: &str = "iteration,bits_per_var,best_value,accepted,evals_total,wall_ns";
pub const SPEEDUP_HEADER: &str = "backend,workers,wall_ms,speedup";

/// One row of an optimizer trace file.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRow {
    pub iteration: u64,
    pub bits_per_var: u32,
    pub best_value: f64,
    pub accepted: bool,
    pub evals_total: u64,
    pub wall_ns: u64,
}

impl TraceRow {
    /// `with_walltime = false` zeroes the clock column so traces can be
    /// compared byte for byte.
    pub fn from_record(r: &TraceRecord, with_walltime: bool) -> Self {
        Self {
            iteration: r.iteration,
            bits_per_var: r.bits_per_var,
            best_value: r.best_value,
            accepted: r.accepted,
            evals_total: r.evals_total,
            wall_ns: if with_walltime { r.wall_ns } else { 0 },
        }
    }
}

/// Writes `rows` as CSV (header first) or as a JSON array.
pub fn write_rows<T: Serialize, W: Write>(out: W, rows: &[T], format: Format) -> Result<()> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for row in rows {
                w.serialize(row)?;
            }
            w.flush()?;
        }
        Format::Json => {
            let mut out = out;
            serde_json::to_writer_pretty(&mut out, rows)?;
            writeln!(out)?;
        }
    }
    Ok(())
}

pub fn write_rows_to_path<T: Serialize>(path: &Path, rows: &[T], format: Format) -> Result<()> {
    let file = File::create(path).with_context(|| format!("cannot write {}", path.display()))?;
    let mut out = BufWriter::new(file);
    write_rows(&mut out, rows, format)?;
    out.flush()
        .with_context(|| format!("cannot write {}", path.display()))
}

pub fn trace_rows(trace: &[TraceRecord], with_walltime: bool) -> Vec<TraceRow> {
    trace
        .iter()
        .map(|r| TraceRow::from_record(r, with_walltime))
        .collect()
}
