//! `dgo optimize`.

use std::io::Write;

use anyhow::{bail, Result};
use dgo_core::{run_multistart, RunConfig};
use serde::Serialize;

use crate::cli::{OptimizeArgs, SearchArgs};
use crate::output::{trace_rows, write_rows_to_path, Format};
use crate::setup::{build_objective, resolve_bounds};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizeSummary {
    pub objective: String,
    pub best_point: Vec<f64>,
    pub best_value: f64,
    pub best_cluster: usize,
    /// Evaluations summed over all clusters.
    pub evals: u64,
    pub iterations: u64,
    pub bits_per_var: u32,
    pub termination: String,
}

/// The run configuration implied by the search flags, with the budget
/// already divided among the clusters.
pub fn run_config(search: &SearchArgs, start: Option<Vec<f64>>) -> Result<RunConfig> {
    if search.clusters == 0 {
        bail!("--clusters must be at least 1");
    }
    let mut cfg = RunConfig::new(search.bits_init, search.bits_max)
        .with_seed(search.seed)
        .with_family(search.family.into());
    if let Some(total) = search.max_evals {
        let per_cluster = total / search.clusters as u64;
        if per_cluster == 0 {
            bail!(
                "--max-evals {total} leaves nothing for each of {} clusters",
                search.clusters
            );
        }
        cfg = cfg.with_max_evals(per_cluster);
    }
    if let Some(x) = start {
        cfg = cfg.with_initial_point(x);
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn optimize(args: &OptimizeArgs, out: &mut dyn Write) -> Result<OptimizeSummary> {
    let bounds = resolve_bounds(args.objective, args.dims, &args.lo, &args.hi)?;
    if let Some(x) = &args.start {
        if x.len() != bounds.len() {
            bail!(
                "--start has {} values for {} dimensions",
                x.len(),
                bounds.len()
            );
        }
    }
    let cfg = run_config(&args.search, args.start.clone())?;
    let backend = args.search.backend.resolve()?;
    let objective = build_objective(args.objective, bounds, args.spin_ns)?;
    let result = run_multistart(&cfg, objective.as_ref(), args.search.clusters, &backend)?;

    if let Some(path) = &args.output.trace {
        let rows = trace_rows(&result.best.trace, !args.output.no_walltime);
        write_rows_to_path(path, &rows, args.output.format)?;
    }

    let summary = OptimizeSummary {
        objective: format!("{:?}", args.objective).to_lowercase(),
        best_point: result.best.best_point.clone(),
        best_value: result.best.best_value,
        best_cluster: result.best_cluster,
        evals: result.clusters.iter().map(|c| c.evals).sum(),
        iterations: result.best.iterations,
        bits_per_var: result.best.best_bits_per_var,
        termination: format!("{:?}", result.best.termination).to_lowercase(),
    };
    match args.output.format {
        Format::Json => writeln!(out, "{}", serde_json::to_string(&summary)?)?,
        Format::Csv => {
            writeln!(
                out,
                "best_value {} at {:?} ({} bits/var, cluster {})",
                summary.best_value, summary.best_point, summary.bits_per_var, summary.best_cluster
            )?;
            writeln!(
                out,
                "{} evaluations, {} iterations, stopped on {}",
                summary.evals, summary.iterations, summary.termination
            )?;
        }
    }
    Ok(summary)
}
