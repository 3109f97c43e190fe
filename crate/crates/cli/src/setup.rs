//! Turning command-line flags into objectives, bounds and backends.

use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::ValueEnum;
use dgo_core::objectives::{SHEKEL5_FOCI, SHEKEL5_SHIFTS};
use dgo_core::{
    Constant, EvalBackend, FnObjective, Multimodal1d, Objective, Quadratic, Shekel, SpinWork,
    Spinning, XorProblem,
};

/// Environment variable consulted by `--backend pool` without a size.
pub const WORKERS_ENV: &str = "DGO_WORKERS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ObjectiveKind {
    Quadratic,
    Shekel,
    Multimodal1d,
    Xor,
    Constant,
}

impl ObjectiveKind {
    fn fixed_dims(self) -> Option<usize> {
        match self {
            Self::Shekel => Some(4),
            Self::Multimodal1d => Some(1),
            Self::Xor => Some(8),
            Self::Quadratic | Self::Constant => None,
        }
    }

    fn default_bounds(self) -> (f64, f64) {
        match self {
            Self::Shekel => (0.0, 10.0),
            Self::Xor => (-20.0, 20.0),
            Self::Constant => (0.0, 1.0),
            Self::Quadratic | Self::Multimodal1d => (-5.0, 5.0),
        }
    }
}

/// `seq`, `pool` or `pool:W`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BackendSpec {
    Seq,
    Pool(Option<usize>),
}

impl BackendSpec {
    /// A pool without an explicit size reads `DGO_WORKERS`, then falls back
    /// to the machine's available parallelism.
    pub fn resolve(self) -> Result<EvalBackend> {
        match self {
            Self::Seq => Ok(EvalBackend::Sequential),
            Self::Pool(Some(w)) => Ok(EvalBackend::pool(w)?),
            Self::Pool(None) => {
                let w = match std::env::var(WORKERS_ENV) {
                    Ok(v) => v
                        .trim()
                        .parse()
                        .with_context(|| format!("{WORKERS_ENV}={v:?} is not a worker count"))?,
                    Err(_) => available_cores(),
                };
                Ok(EvalBackend::pool(w)?)
            }
        }
    }
}

impl FromStr for BackendSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "seq" => Ok(Self::Seq),
            "pool" => Ok(Self::Pool(None)),
            _ => match s.strip_prefix("pool:").map(str::parse::<usize>) {
                Some(Ok(w)) if w > 0 => Ok(Self::Pool(Some(w))),
                _ => Err(format!(
                    "expected seq, pool or pool:W with W >= 1, got {s:?}"
                )),
            },
        }
    }
}

impl fmt::Display for BackendSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Seq => f.write_str("seq"),
            Self::Pool(None) => f.write_str("pool"),
            Self::Pool(Some(w)) => write!(f, "pool:{w}"),
        }
    }
}

pub fn available_cores() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

/// Resolves the search box from `--dims`, `--lo` and `--hi`.
///
/// A single `--lo`/`--hi` value applies to every dimension; otherwise one
/// value per dimension is required.
pub fn resolve_bounds(
    kind: ObjectiveKind,
    dims: Option<usize>,
    lo: &[f64],
    hi: &[f64],
) -> Result<Vec<(f64, f64)>> {
    let dims = match (kind.fixed_dims(), dims) {
        (Some(fixed), Some(d)) if d != fixed => {
            bail!("objective {kind:?} has {fixed} dimensions, --dims {d} given")
        }
        (Some(fixed), _) => fixed,
        (None, Some(0)) => bail!("--dims must be at least 1"),
        (None, Some(d)) => d,
        (None, None) => [lo.len(), hi.len(), 2].into_iter().max().unwrap(),
    };
    let (dlo, dhi) = kind.default_bounds();
    let expand = |vals: &[f64], default: f64, name: &str| -> Result<Vec<f64>> {
        match vals.len() {
            0 => Ok(vec![default; dims]),
            1 => Ok(vec![vals[0]; dims]),
            n if n == dims => Ok(vals.to_vec()),
            n => bail!("{n} values for --{name} but the objective has {dims} dimensions"),
        }
    };
    let lo = expand(lo, dlo, "lo")?;
    let hi = expand(hi, dhi, "hi")?;
    let bounds: Vec<_> = lo.into_iter().zip(hi).collect();
    for (d, &(l, h)) in bounds.iter().enumerate() {
        if !(l.is_finite() && h.is_finite() && l < h) {
            bail!("dimension {d}: need finite lo < hi, got [{l}, {h}]");
        }
    }
    Ok(bounds)
}

/// Builds the objective over `bounds`, optionally with `spin_ns` of busy
/// work added to every evaluation.
pub fn build_objective(
    kind: ObjectiveKind,
    bounds: Vec<(f64, f64)>,
    spin_ns: u64,
) -> Result<Box<dyn Objective>> {
    let base: Box<dyn Objective> = match kind {
        ObjectiveKind::Quadratic => {
            let dims = bounds.len();
            Box::new(Quadratic::new(vec![0.0; dims], bounds)?)
        }
        ObjectiveKind::Shekel => Box::new(Shekel::new(
            SHEKEL5_FOCI.iter().map(|f| f.to_vec()).collect(),
            SHEKEL5_SHIFTS.to_vec(),
            bounds,
        )?),
        ObjectiveKind::Multimodal1d => {
            let f = Multimodal1d::new();
            Box::new(FnObjective::new(bounds, move |x: &[f64]| f.evaluate(x)))
        }
        ObjectiveKind::Xor => {
            let f = XorProblem::new();
            Box::new(FnObjective::new(bounds, move |x: &[f64]| f.evaluate(x)))
        }
        ObjectiveKind::Constant => Box::new(Constant::new(0.0, bounds)),
    };
    if spin_ns == 0 {
        return Ok(base);
    }
    let work = SpinWork::calibrate(Duration::from_nanos(spin_ns));
    Ok(Box::new(Spinning::new(base, work)))
}
