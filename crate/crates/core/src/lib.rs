//! Distributed global optimization over gray-coded fixed-point bit strings.
//!
//! A candidate point is a single [`BitString`] holding every variable's grid
//! index. Each iteration derives `2L - 1` children from the current parent by
//! inverting one segment of its gray code, evaluates them (sequentially or on
//! a worker pool), and moves to the best child only on strict improvement.
//! When no child improves, every variable gains one bit of resolution; the
//! run ends once the finest resolution yields no improvement.
//!
//! ```
//! use dgo_core::{run, EvalBackend, Quadratic, RunConfig};
//!
//! let objective = Quadratic::centered(2);
//! let config = RunConfig::new(4, 10).with_seed(7);
//! let result = run(&config, &objective, &EvalBackend::Sequential).unwrap();
//! assert!(result.best_value < 1e-3);
//! ```

pub mod bitcodec;
pub mod engine;
pub mod error;
pub mod neighborhood;
pub mod objectives;
pub mod parallel;

pub use bitcodec::{
    decode_point, encode_point, from_gray, requantize, to_gray, BitString, Quantizer,
    MAX_BITS_PER_VAR,
};
pub use engine::{
    dgo_step, increase_resolution, run, run_observed, RunConfig, RunResult, SearchState,
    StepOutcome, TerminationReason, TraceRecord,
};
pub use error::{DgoError, Result};
pub use neighborhood::{
    child_count, generate_children, generate_children_from, generate_children_with, segment_masks,
    ChildSet, MaskFamily, SegmentMask,
};
pub use objectives::{
    gd_train, multimodal1d, quadratic, shekel, xor_grad, xor_sse, Constant, FnObjective, GdTrace,
    Multimodal1d, Objective, Quadratic, Shekel, SpinWork, Spinning, XorNet, XorProblem,
};
pub use parallel::{
    cluster_config, evaluate_batch, partition_children, reduce_min, run_multistart, Assignment,
    ClusterSummary, EvalBackend, MultistartResult,
};
