//! Argument definitions and dispatch for the `dgo` binary.

use std::io::Write;
use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, Parser, Subcommand, ValueEnum};
use dgo_core::MaskFamily;

use crate::output::Format;
use crate::setup::{BackendSpec, ObjectiveKind};
use crate::{bench, optimize, xor};

#[derive(Debug, Parser)]
#[command(
    name = "dgo",
    version,
    about = "Gray-coded segment-inversion global optimizer"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Minimize one objective and write its per-iteration trace.
    Optimize(OptimizeArgs),
    /// Timing reports.
    #[command(subcommand)]
    Bench(BenchCommand),
    /// Train a small network.
    #[command(subcommand)]
    Train(TrainCommand),
}

#[derive(Debug, Subcommand)]
pub enum BenchCommand {
    /// Time per iteration against problem dimension, with a log-log fit.
    Scaling(ScalingArgs),
    /// Wall time and speedup of a fixed run for several worker counts.
    Speedup(SpeedupArgs),
}

#[derive(Debug, Subcommand)]
pub enum TrainCommand {
    /// The 2-2-1 sigmoid network on XOR, by DGO and/or gradient descent.
    Xor(TrainXorArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Tree,
    Suffix,
}

impl From<FamilyArg> for MaskFamily {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Tree => MaskFamily::SegmentTree,
            FamilyArg::Suffix => MaskFamily::BitsAndSuffixes,
        }
    }
}

/// Flags shared by every optimizing subcommand.
#[derive(Debug, Clone, Args)]
pub struct SearchArgs {
    #[arg(long, default_value_t = 4)]
    pub bits_init: u32,
    #[arg(long, default_value_t = 12)]
    pub bits_max: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// `seq`, `pool` (size from DGO_WORKERS or the core count) or `pool:W`.
    #[arg(long, default_value = "seq")]
    pub backend: BackendSpec,
    /// Independent starts; the evaluation budget is split evenly among them.
    #[arg(long, default_value_t = 1)]
    pub clusters: usize,
    #[arg(long)]
    pub max_evals: Option<u64>,
    /// Segment family used to derive children.
    #[arg(long, value_enum, default_value_t = FamilyArg::Tree)]
    pub family: FamilyArg,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Trace output file.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write 0 in every wall-clock column.
    #[arg(long)]
    pub no_walltime: bool,
}

#[derive(Debug, Clone, Args)]
pub struct OptimizeArgs {
    #[arg(long, value_enum, default_value_t = ObjectiveKind::Quadratic)]
    pub objective: ObjectiveKind,
    #[arg(long)]
    pub dims: Option<usize>,
    /// Lower bound; give once for all dimensions or once per dimension.
    #[arg(long, allow_negative_numbers = true)]
    pub lo: Vec<f64>,
    /// Upper bound; give once for all dimensions or once per dimension.
    #[arg(long, allow_negative_numbers = true)]
    pub hi: Vec<f64>,
    /// Starting point (comma separated); random from the seed otherwise.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub start: Option<Vec<f64>>,
    /// Busy work added to each evaluation, in nanoseconds.
    #[arg(long, default_value_t = 0)]
    pub spin_ns: u64,
    #[command(flatten)]
    pub search: SearchArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ScalingArgs {
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "2,3,4,5,6,7,8,9,10,11,12"
    )]
    pub dims: Vec<usize>,
    /// Fixed bits per variable.
    #[arg(long, default_value_t = 8)]
    pub bits: u32,
    /// Timed repetitions per dimension (median is reported).
    #[arg(long, default_value_t = 5)]
    pub reps: usize,
    /// Minimum wall time of one repetition; short runs are repeated.
    #[arg(long, default_value_t = 50)]
    pub min_rep_ms: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct SpeedupArgs {
    /// Worker counts to time; must contain 1.
    #[arg(long, value_delimiter = ',', default_value = "1,2,4,8")]
    pub workers: Vec<usize>,
    #[arg(long, value_enum, default_value_t = ObjectiveKind::Quadratic)]
    pub objective: ObjectiveKind,
    #[arg(long, default_value_t = 4)]
    pub dims: usize,
    /// Fixed bits per variable (children per batch = 2 * dims * bits - 1).
    #[arg(long, default_value_t = 9)]
    pub bits: u32,
    /// Busy work added to each evaluation, in nanoseconds.
    #[arg(long, default_value_t = 1_000_000)]
    pub spin_ns: u64,
    /// Evaluation budget of the timed run.
    #[arg(long, default_value_t = 1000)]
    pub max_evals: u64,
    #[arg(long, default_value_t = 5)]
    pub reps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OptimizerChoice {
    Dgo,
    Gd,
    Both,
}

#[derive(Debug, Clone, Args)]
pub struct TrainXorArgs {
    #[arg(long, value_enum, default_value_t = OptimizerChoice::Both)]
    pub optimizer: OptimizerChoice,
    /// Gradient-descent learning rate.
    #[arg(long, default_value_t = 0.5)]
    pub lr: f64,
    /// Gradient-descent steps.
    #[arg(long, default_value_t = 20_000)]
    pub steps: usize,
    /// Eight comma-separated starting weights; random from the seed otherwise.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub init_weights: Option<Vec<f64>>,
    /// Directory receiving dgo_trace and gd_trace files.
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[command(flatten)]
    pub search: SearchArgs,
}

impl Cli {
    pub fn run(&self, out: &mut dyn Write) -> Result<()> {
        match &self.command {
            Command::Optimize(a) => optimize::optimize(a, out).map(drop),
            Command::Bench(BenchCommand::Scaling(a)) => bench::scaling(a, out).map(drop),
            Command::Bench(BenchCommand::Speedup(a)) => bench::speedup(a, out).map(drop),
            Command::Train(TrainCommand::Xor(a)) => xor::train_xor(a, out).map(drop),
        }
    }
}
