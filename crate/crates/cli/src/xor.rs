//! `dgo train xor`: DGO against full-batch gradient descent.
//!
//! Both optimizers start from the same weights: the requested (or seeded
//! random) weights snapped to the DGO starting grid, so the two traces share
//! their step-0 SSE exactly.

use std::io::Write;
use std::path::PathBuf;

use anyhow::{bail, Result};
use dgo_core::objectives::XOR_WEIGHTS;
use dgo_core::{cluster_config, gd_train, run, xor_sse, Objective, Quantizer, XorNet, XorProblem};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cli::{OptimizerChoice, TrainXorArgs};
use crate::optimize::run_config;
use crate::output::{write_rows_to_path, Format};

/// All eight weights equal, on the 4-bit grid of the default box. The two
/// hidden units start identical, and gradient descent can never tell them
/// apart again: it is left with a one-hidden-unit network that cannot
/// represent XOR.
pub const SYMMETRIC_START: [f64; XOR_WEIGHTS] = [4.0 / 3.0; XOR_WEIGHTS];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct XorTraceRow {
    pub step: u64,
    pub evals: u64,
    pub sse: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizerSummary {
    pub optimizer: String,
    pub final_sse: f64,
    pub classifies_all: bool,
    pub evals: u64,
    pub weights: Vec<f64>,
    pub trace_file: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrainReport {
    /// Shared starting weights after snapping to the grid.
    pub start: Vec<f64>,
    pub start_sse: f64,
    pub dgo: Option<OptimizerSummary>,
    pub gd: Option<OptimizerSummary>,
    #[serde(skip)]
    pub dgo_trace: Vec<XorTraceRow>,
    #[serde(skip)]
    pub gd_trace: Vec<XorTraceRow>,
}

fn trace_path(args: &TrainXorArgs, name: &str) -> PathBuf {
    let ext = match args.format {
        Format::Csv => "csv",
        Format::Json => "json",
    };
    args.out_dir.join(format!("{name}_trace.{ext}"))
}

/// Best-so-far SSE against cumulative evaluations over all clusters, which
/// run one after another starting with cluster 0.
fn run_dgo(
    args: &TrainXorArgs,
    objective: &XorProblem,
    start: &[f64],
    start_sse: f64,
) -> Result<(OptimizerSummary, Vec<XorTraceRow>)> {
    let cfg = run_config(&args.search, Some(start.to_vec()))?;
    let backend = args.search.backend.resolve()?;
    let mut rows = vec![XorTraceRow {
        step: 0,
        evals: 1,
        sse: start_sse,
    }];
    let mut offset = 0;
    let mut best = (f64::INFINITY, Vec::new());
    for k in 0..args.search.clusters as u64 {
        let r = run(&cluster_config(&cfg, k), objective, &backend)?;
        for rec in &r.trace {
            let prev = rows.last().expect("step 0 present").sse;
            rows.push(XorTraceRow {
                step: rows.len() as u64,
                evals: offset + rec.evals_total,
                sse: prev.min(rec.best_value),
            });
        }
        if r.best_value < best.0 {
            best = (r.best_value, r.best_point);
        }
        offset += r.evals;
    }
    let summary = OptimizerSummary {
        optimizer: "dgo".into(),
        final_sse: best.0,
        classifies_all: XorNet::from_slice(&best.1)?.classifies_all(),
        evals: offset,
        weights: best.1,
        trace_file: trace_path(args, "dgo"),
    };
    Ok((summary, rows))
}

fn run_gd(args: &TrainXorArgs, start: &[f64]) -> Result<(OptimizerSummary, Vec<XorTraceRow>)> {
    let t = gd_train(start, args.lr, args.steps)?;
    let rows: Vec<XorTraceRow> = t
        .sse
        .iter()
        .enumerate()
        .map(|(k, &sse)| XorTraceRow {
            step: k as u64,
            evals: k as u64,
            sse,
        })
        .collect();
    let net = XorNet::from_slice(&t.weights)?;
    let summary = OptimizerSummary {
        optimizer: if t.diverged { "gd (diverged)" } else { "gd" }.into(),
        final_sse: *t.sse.last().expect("initial SSE recorded"),
        classifies_all: net.classifies_all(),
        evals: (t.sse.len() - 1) as u64,
        weights: t.weights.to_vec(),
        trace_file: trace_path(args, "gd"),
    };
    Ok((summary, rows))
}

pub fn train_xor(args: &TrainXorArgs, out: &mut dyn Write) -> Result<TrainReport> {
    let objective = XorProblem::new();
    let requested = match &args.init_weights {
        Some(w) if w.len() != XOR_WEIGHTS => {
            bail!("--init-weights needs {XOR_WEIGHTS} values, got {}", w.len())
        }
        Some(w) => w.clone(),
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(args.search.seed);
            (0..XOR_WEIGHTS)
                .map(|_| rng.gen_range(-1.0..=1.0))
                .collect()
        }
    };
    let q = Quantizer::new(objective.bounds().to_vec(), args.search.bits_init)?;
    let start = q.decode(&q.encode(&requested)?)?;
    let start_sse = xor_sse(&start)?;

    let want_dgo = args.optimizer != OptimizerChoice::Gd;
    let want_gd = args.optimizer != OptimizerChoice::Dgo;
    let (dgo, dgo_trace) = if want_dgo {
        let (s, t) = run_dgo(args, &objective, &start, start_sse)?;
        (Some(s), t)
    } else {
        (None, Vec::new())
    };
    let (gd, gd_trace) = if want_gd {
        let (s, t) = run_gd(args, &start)?;
        (Some(s), t)
    } else {
        (None, Vec::new())
    };

    if want_dgo || want_gd {
        std::fs::create_dir_all(&args.out_dir)?;
    }
    if let Some(s) = &dgo {
        write_rows_to_path(&s.trace_file, &dgo_trace, args.format)?;
    }
    if let Some(s) = &gd {
        write_rows_to_path(&s.trace_file, &gd_trace, args.format)?;
    }

    let report = TrainReport {
        start,
        start_sse,
        dgo,
        gd,
        dgo_trace,
        gd_trace,
    };
    match args.format {
        Format::Json => writeln!(out, "{}", serde_json::to_string(&report)?)?,
        Format::Csv => {
            writeln!(out, "start SSE {:.6}", report.start_sse)?;
            for s in report.dgo.iter().chain(&report.gd) {
                writeln!(
                    out,
                    "{}: final SSE {:.6} after {} evals, all four patterns {} ({})",
                    s.optimizer,
                    s.final_sse,
                    s.evals,
                    if s.classifies_all {
                        "correct"
                    } else {
                        "NOT correct"
                    },
                    s.trace_file.display()
                )?;
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_start_is_a_grid_point() {
        let q = Quantizer::new(XorProblem::new().bounds().to_vec(), 4).unwrap();
        let snapped = q.decode(&q.encode(&SYMMETRIC_START).unwrap()).unwrap();
        for (a, b) in snapped.iter().zip(SYMMETRIC_START) {
            assert!((a - b).abs() < 1e-12);
        }
        assert_eq!(
            q.indices(&q.encode(&SYMMETRIC_START).unwrap()).unwrap(),
            vec![8; 8]
        );
    }

    #[test]
    fn gradient_descent_keeps_hidden_units_identical() {
        let t = gd_train(&SYMMETRIC_START, 0.5, 2000).unwrap();
        let w = t.weights;
        assert_eq!(w[0], w[2]);
        assert_eq!(w[1], w[3]);
        assert_eq!(w[4], w[5]);
        assert_eq!(w[6], w[7]);
    }
}
