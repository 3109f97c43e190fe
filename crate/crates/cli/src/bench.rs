//! `dgo bench scaling` and `dgo bench speedup`.
//!
//! Timing uses the monotonic clock. Every configuration gets one untimed
//! warmup run, then the median of the timed repetitions is reported.

use std::io::Write;
use std::time::{Duration, Instant, SystemTime, UNIX_EPOCH};

use anyhow::{bail, Result};
use dgo_core::{child_count, run, EvalBackend, Objective, Quadratic, RunConfig};
use serde::Serialize;

use crate::cli::{ScalingArgs, SpeedupArgs};
use crate::output::{write_rows, write_rows_to_path, Format};
use crate::reference::TABLE1;
use crate::setup::{build_objective, resolve_bounds};

/// Where and how a report was measured.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchMeta {
    pub hardware: String,
    pub repetitions: usize,
    pub unix_time: u64,
}

impl BenchMeta {
    fn now(repetitions: usize) -> Self {
        Self {
            hardware: hardware_description(),
            repetitions,
            unix_time: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map_or(0, |d| d.as_secs()),
        }
    }
}

pub fn hardware_description() -> String {
    let model = std::fs::read_to_string("/proc/cpuinfo")
        .ok()
        .and_then(|info| {
            info.lines()
                .find(|l| l.starts_with("model name"))
                .and_then(|l| l.split(':').nth(1))
                .map(|m| m.trim().to_string())
        })
        .unwrap_or_else(|| "unknown cpu".into());
    format!(
        "{model}; {} logical cores; {}-{}",
        crate::setup::available_cores(),
        std::env::consts::ARCH,
        std::env::consts::OS
    )
}

pub fn median(values: &[f64]) -> f64 {
    assert!(!values.is_empty(), "median of nothing");
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    if v.len() % 2 == 1 {
        v[mid]
    } else {
        (v[mid - 1] + v[mid]) / 2.0
    }
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

// ---------------------------------------------------------------------------
// Scaling

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingPoint {
    pub dims: usize,
    pub bits: u32,
    /// `2 * dims * bits - 1`.
    pub evals_per_iteration: u64,
    /// Iterations of one run (identical across repetitions).
    pub iterations: u64,
    pub mean_iter_ns: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingReport {
    pub points: Vec<ScalingPoint>,
    pub loglog_slope: f64,
    pub meta: BenchMeta,
}

/// Row layout of the scaling CSV; the last row (`dims = fit`) carries the
/// slope and leaves the per-dimension columns empty.
#[derive(Debug, Serialize)]
struct ScalingRow {
    dims: String,
    bits: u32,
    evals_per_iteration: Option<u64>,
    iterations: Option<u64>,
    mean_iter_ns: Option<f64>,
    loglog_slope: Option<f64>,
}

impl ScalingReport {
    fn rows(&self) -> Vec<ScalingRow> {
        let bits = self.points.first().map_or(0, |p| p.bits);
        self.points
            .iter()
            .map(|p| ScalingRow {
                dims: p.dims.to_string(),
                bits: p.bits,
                evals_per_iteration: Some(p.evals_per_iteration),
                iterations: Some(p.iterations),
                mean_iter_ns: Some(p.mean_iter_ns),
                loglog_slope: None,
            })
            .chain(std::iter::once(ScalingRow {
                dims: "fit".into(),
                bits,
                evals_per_iteration: None,
                iterations: None,
                mean_iter_ns: None,
                loglog_slope: Some(self.loglog_slope),
            }))
            .collect()
    }
}

/// Times outer iterations of a sequential run on the quadratic at a fixed
/// resolution.
///
/// Only the span between the first and last trace rows is timed, so run
/// setup (start point, grid, segment table) is excluded.
struct IterationTimer {
    dims: usize,
    bits: u32,
    objective: Quadratic,
    cfg: RunConfig,
    iterations: u64,
}

impl IterationTimer {
    /// Builds the problem and does one untimed warm-up run.
    fn new(dims: usize, bits: u32, seed: u64) -> Result<Self> {
        let objective = Quadratic::centered(dims);
        let cfg = RunConfig::new(bits, bits).with_seed(seed);
        let iterations = run(&cfg, &objective, &EvalBackend::Sequential)?.iterations;
        if iterations < 2 {
            bail!("a run at {dims} dimensions has {iterations} iteration(s); nothing to time");
        }
        Ok(Self {
            dims,
            bits,
            objective,
            cfg,
            iterations,
        })
    }

    /// Nanoseconds per iteration, repeating the deterministic run until at
    /// least `min_rep` of iteration time has accumulated.
    fn sample(&self, min_rep: Duration) -> Result<f64> {
        let min_rep_ns = min_rep.as_nanos() as u64;
        let (mut ns, mut timed) = (0u64, 0u64);
        while timed == 0 || ns < min_rep_ns {
            let r = run(&self.cfg, &self.objective, &EvalBackend::Sequential)?;
            debug_assert_eq!(r.iterations, self.iterations);
            let (first, last) = (r.trace[0], r.trace[r.trace.len() - 1]);
            ns += last.wall_ns - first.wall_ns;
            timed += last.iteration - first.iteration;
        }
        Ok(ns as f64 / timed as f64)
    }
}

/// Median time per iteration for every dimension. Repetitions go round-robin
/// over the dimensions so slow drift in machine speed hits all of them alike.
pub fn time_per_iteration(
    dims: &[usize],
    bits: u32,
    reps: usize,
    min_rep: Duration,
    seed: u64,
) -> Result<Vec<ScalingPoint>> {
    let timers = dims
        .iter()
        .map(|&d| IterationTimer::new(d, bits, seed))
        .collect::<Result<Vec<_>>>()?;
    let mut samples = vec![Vec::with_capacity(reps); timers.len()];
    for _ in 0..reps {
        for (t, s) in timers.iter().zip(&mut samples) {
            s.push(t.sample(min_rep)?);
        }
    }
    Ok(timers
        .iter()
        .zip(samples)
        .map(|(t, s)| ScalingPoint {
            dims: t.dims,
            bits: t.bits,
            evals_per_iteration: child_count(t.dims * t.bits as usize) as u64,
            iterations: t.iterations,
            mean_iter_ns: median(&s),
        })
        .collect())
}

pub fn scaling(args: &ScalingArgs, out: &mut dyn Write) -> Result<ScalingReport> {
    if args.dims.len() < 3 {
        bail!("need at least 3 dimension values to fit a slope");
    }
    if args.dims.contains(&0) {
        bail!("dimension values must be at least 1");
    }
    if args.reps == 0 {
        bail!("--reps must be at least 1");
    }
    let min_rep = Duration::from_millis(args.min_rep_ms);
    let points = time_per_iteration(&args.dims, args.bits, args.reps, min_rep, args.seed)?;
    let xs: Vec<f64> = points.iter().map(|p| p.dims as f64).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.mean_iter_ns).collect();
    let report = ScalingReport {
        loglog_slope: loglog_slope(&xs, &ys),
        points,
        meta: BenchMeta::now(args.reps),
    };

    match (&args.out, args.format) {
        (Some(path), format) => {
            write_rows_to_path(path, &report.rows(), format)?;
            writeln!(
                out,
                "log-log slope {:.3} ({})",
                report.loglog_slope, report.meta.hardware
            )?;
        }
        (None, Format::Csv) => write_rows(&mut *out, &report.rows(), Format::Csv)?,
        (None, Format::Json) => writeln!(out, "{}", serde_json::to_string_pretty(&report)?)?,
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// Speedup

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpeedupRow {
    pub backend: String,
    pub workers: usize,
    pub wall_ms: f64,
    pub speedup: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpeedupReport {
    pub rows: Vec<SpeedupRow>,
    pub children_per_batch: usize,
    pub evals_per_run: u64,
    pub spin_ns: u64,
    pub meta: BenchMeta,
}

impl SpeedupReport {
    pub fn speedup(&self, workers: usize) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.workers == workers)
            .map(|r| r.speedup)
    }
}

/// Median wall time of one fixed run on a `workers`-thread pool.
fn time_run(
    cfg: &RunConfig,
    objective: &dyn Objective,
    workers: usize,
    reps: usize,
) -> Result<(f64, u64)> {
    let backend = EvalBackend::pool(workers)?;
    let warm = run(cfg, objective, &backend)?;
    let mut samples = Vec::with_capacity(reps);
    for _ in 0..reps {
        let start = Instant::now();
        let r = run(cfg, objective, &backend)?;
        samples.push(start.elapsed().as_secs_f64() * 1e3);
        debug_assert_eq!(r.evals, warm.evals);
    }
    Ok((median(&samples), warm.evals))
}

pub fn speedup(args: &SpeedupArgs, out: &mut dyn Write) -> Result<SpeedupReport> {
    if !args.workers.contains(&1) {
        bail!("the worker list must contain 1 (the speedup baseline)");
    }
    if args.workers.contains(&0) {
        bail!("worker counts must be at least 1");
    }
    if args.reps == 0 {
        bail!("--reps must be at least 1");
    }
    let bounds = resolve_bounds(args.objective, Some(args.dims), &[], &[])?;
    let dims = bounds.len();
    let objective = build_objective(args.objective, bounds, args.spin_ns)?;
    let cfg = RunConfig::new(args.bits, args.bits)
        .with_seed(args.seed)
        .with_max_evals(args.max_evals);
    cfg.validate()?;

    let mut workers = args.workers.clone();
    workers.sort_unstable();
    workers.dedup();
    let mut timings = Vec::with_capacity(workers.len());
    let mut evals = 0;
    for &w in &workers {
        let (ms, e) = time_run(&cfg, objective.as_ref(), w, args.reps)?;
        evals = e;
        timings.push((w, ms));
    }
    let baseline = timings[0].1;
    let rows = timings
        .iter()
        .map(|&(w, ms)| SpeedupRow {
            backend: "pool".into(),
            workers: w,
            wall_ms: ms,
            speedup: if w == 1 { 1.0 } else { baseline / ms },
        })
        .collect();
    let report = SpeedupReport {
        rows,
        children_per_batch: child_count(dims * args.bits as usize),
        evals_per_run: evals,
        spin_ns: args.spin_ns,
        meta: BenchMeta::now(args.reps),
    };

    if let Some(path) = &args.out {
        write_rows_to_path(path, &report.rows, args.format)?;
    }
    match args.format {
        Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&report)?)?,
        Format::Csv => {
            if args.out.is_none() {
                write_rows(&mut *out, &report.rows, Format::Csv)?;
            }
            print_table(&report, out)?;
        }
    }
    Ok(report)
}

/// Echoes the measurement in the historical table's layout, followed by the
/// historical figures for comparison.
fn print_table(report: &SpeedupReport, out: &mut dyn Write) -> Result<()> {
    writeln!(out)?;
    writeln!(
        out,
        "{:<28} {:>14} {:>8}",
        "Computer / PEs", "Time", "Speedup"
    )?;
    for r in &report.rows {
        let name = format!("this machine / {}", r.workers);
        writeln!(out, "{name:<28} {:>11.1} ms {:>8.2}", r.wall_ms, r.speedup)?;
    }
    writeln!(out, "reference (not reproducible here):")?;
    for e in TABLE1 {
        writeln!(
            out,
            "{:<28} {:>12.1} s {:>8.1}",
            e.label(),
            e.seconds,
            e.speedup
        )?;
    }
    writeln!(
        out,
        "{} children per batch, {} evals per run, {} ns spin per eval; {}",
        report.children_per_batch, report.evals_per_run, report.spin_ns, report.meta.hardware
    )?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_odd_and_even() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 3.0, 2.0]), 2.5);
    }

    #[test]
    fn slope_of_exact_power_laws() {
        let xs = [2.0, 3.0, 5.0, 8.0];
        for p in [1.0, 2.0, 2.5] {
            let ys: Vec<f64> = xs.iter().map(|x: &f64| 7.0 * x.powf(p)).collect();
            assert!((loglog_slope(&xs, &ys) - p).abs() < 1e-12);
        }
    }
}
