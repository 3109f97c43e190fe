//! The optimization loop: generate children, evaluate them, keep the best
//! one if it strictly improves on the parent, otherwise refine the grid by
//! one bit per variable, and stop once the finest grid is exhausted or the
//! evaluation budget would be exceeded.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bitcodec::{requantize, BitString, Quantizer, MAX_BITS_PER_VAR};
use crate::error::{DgoError, Result};
use crate::neighborhood::{child_count, generate_children_from, ChildSet, MaskFamily};
use crate::objectives::Objective;
use crate::parallel::{evaluate_batch, reduce_min, EvalBackend};

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub bits_init: u32,
    pub bits_max: u32,
    /// Hard cap on objective evaluations; a batch that would overshoot it is
    /// never started.
    pub max_evals: u64,
    /// Seeds the random starting point when `initial_point` is `None`.
    pub seed: u64,
    pub initial_point: Option<Vec<f64>>,
    pub family: MaskFamily,
}

impl RunConfig {
    pub fn new(bits_init: u32, bits_max: u32) -> Self {
        Self {
            bits_init,
            bits_max,
            max_evals: u64::MAX,
            seed: 0,
            initial_point: None,
            family: MaskFamily::default(),
        }
    }

    pub fn with_family(mut self, family: MaskFamily) -> Self {
        self.family = family;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_max_evals(mut self, max_evals: u64) -> Self {
        self.max_evals = max_evals;
        self
    }

    pub fn with_initial_point(mut self, x: Vec<f64>) -> Self {
        self.initial_point = Some(x);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.bits_init == 0 || self.bits_init > self.bits_max {
            return Err(DgoError::InvalidConfig(format!(
                "need 1 <= bits_init <= bits_max, got bits_init = {}, bits_max = {}",
                self.bits_init, self.bits_max
            )));
        }
        if self.bits_max > MAX_BITS_PER_VAR {
            return Err(DgoError::InvalidResolution {
                bits: self.bits_max,
                max: MAX_BITS_PER_VAR,
            });
        }
        if self.max_evals == 0 {
            return Err(DgoError::InvalidConfig(
                "max_evals must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// The current parent and bookkeeping between steps.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchState {
    pub parent: BitString,
    pub parent_value: f64,
    pub quantizer: Quantizer,
    pub iteration: u64,
    pub evals: u64,
}

impl SearchState {
    /// Encodes `x` and evaluates it once.
    pub fn start<O: Objective + ?Sized>(
        x: &[f64],
        quantizer: Quantizer,
        objective: &O,
    ) -> Result<Self> {
        let parent = quantizer.encode(x)?;
        let parent_value = evaluate_point(&parent, &quantizer, objective)?;
        Ok(Self {
            parent,
            parent_value,
            quantizer,
            iteration: 0,
            evals: 1,
        })
    }

    pub fn point(&self) -> Vec<f64> {
        self.quantizer
            .decode(&self.parent)
            .expect("parent matches quantizer")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TerminationReason {
    /// The next batch or re-evaluation would exceed `max_evals`.
    Budget,
    /// No child improved at the finest allowed resolution.
    MaxResolution,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StepOutcome {
    Accepted {
        index: usize,
        parent: BitString,
        value: f64,
    },
    ResolutionIncreased {
        bits: u32,
    },
    Terminated(TerminationReason),
}

/// One row of the optimization trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRecord {
    pub iteration: u64,
    /// Resolution the iteration's batch was evaluated at.
    pub bits_per_var: u32,
    /// Best value seen so far in the run.
    pub best_value: f64,
    pub accepted: bool,
    pub evals_total: u64,
    /// Nanoseconds since the run started.
    pub wall_ns: u64,
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub best_point: Vec<f64>,
    pub best_value: f64,
    pub best_bits: BitString,
    /// Resolution of the grid `best_bits` lives on.
    pub best_bits_per_var: u32,
    pub final_bits_per_var: u32,
    pub trace: Vec<TraceRecord>,
    pub evals: u64,
    pub iterations: u64,
    pub termination: TerminationReason,
    pub wall: Duration,
}

fn evaluate_point<O: Objective + ?Sized>(
    s: &BitString,
    q: &Quantizer,
    objective: &O,
) -> Result<f64> {
    let v = objective.evaluate(&q.decode(s)?);
    Ok(if v.is_finite() { v } else { f64::INFINITY })
}

/// Picks the next move from a fully evaluated child batch.
pub fn dgo_step(
    state: &SearchState,
    bits_max: u32,
    children: &ChildSet,
    child_values: &[(usize, f64)],
) -> Result<StepOutcome> {
    let expected = child_count(state.parent.len());
    if child_values.len() != expected || children.len() != expected {
        return Err(DgoError::ChildCountMismatch {
            expected,
            actual: child_values.len().min(children.len()),
        });
    }
    if let Some(&(i, _)) = child_values.iter().find(|&&(i, _)| i >= expected) {
        return Err(DgoError::InvalidParameter(format!(
            "child index {i} out of range 0..{expected}"
        )));
    }
    let (index, value) = reduce_min(child_values)?;
    if value < state.parent_value {
        Ok(StepOutcome::Accepted {
            index,
            parent: children.child_string(index),
            value,
        })
    } else if state.quantizer.bits_per_var() < bits_max {
        Ok(StepOutcome::ResolutionIncreased {
            bits: state.quantizer.bits_per_var() + 1,
        })
    } else {
        Ok(StepOutcome::Terminated(TerminationReason::MaxResolution))
    }
}

/// Adds one bit to every variable, re-expresses the parent on the finer
/// grid and refreshes its value with one evaluation.
pub fn increase_resolution<O: Objective + ?Sized>(
    state: &SearchState,
    bits_max: u32,
    objective: &O,
) -> Result<SearchState> {
    let bits = state.quantizer.bits_per_var();
    if bits >= bits_max {
        return Err(DgoError::AtMaxResolution(bits_max));
    }
    let quantizer = state.quantizer.with_bits(bits + 1)?;
    let parent = requantize(&state.parent, &state.quantizer, &quantizer)?;
    let parent_value = evaluate_point(&parent, &quantizer, objective)?;
    Ok(SearchState {
        parent,
        parent_value,
        quantizer,
        iteration: state.iteration,
        evals: state.evals + 1,
    })
}

fn initial_point<O: Objective + ?Sized>(config: &RunConfig, objective: &O) -> Result<Vec<f64>> {
    match &config.initial_point {
        Some(x) if x.len() != objective.dims() => Err(DgoError::DimensionMismatch {
            expected: objective.dims(),
            actual: x.len(),
        }),
        Some(x) => Ok(x.clone()),
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            Ok(objective
                .bounds()
                .iter()
                .map(|&(lo, hi)| rng.gen_range(lo..=hi))
                .collect())
        }
    }
}

/// Runs the optimizer to termination.
pub fn run<O: Objective + ?Sized>(
    config: &RunConfig,
    objective: &O,
    backend: &EvalBackend,
) -> Result<RunResult> {
    run_observed(config, objective, backend, |_, _| {})
}

/// [`run`], calling `observe` with every step outcome and its trace row.
pub fn run_observed<O, F>(
    config: &RunConfig,
    objective: &O,
    backend: &EvalBackend,
    mut observe: F,
) -> Result<RunResult>
where
    O: Objective + ?Sized,
    F: FnMut(&StepOutcome, &TraceRecord),
{
    config.validate()?;
    let started = Instant::now();
    let quantizer = Quantizer::new(objective.bounds().to_vec(), config.bits_init)?;
    let mut state = SearchState::start(&initial_point(config, objective)?, quantizer, objective)?;

    let mut best_value = state.parent_value;
    let mut best_bits = state.parent.clone();
    let mut best_q = state.quantizer.clone();
    let mut trace = Vec::new();

    // masks only change with the resolution
    let mut masks = config.family.masks(state.parent.len())?;
    let termination = loop {
        let batch = child_count(state.parent.len()) as u64;
        if state.evals.saturating_add(batch) > config.max_evals {
            break TerminationReason::Budget;
        }
        let iteration_bits = state.quantizer.bits_per_var();
        if masks.len() as u64 != batch {
            masks = config.family.masks(state.parent.len())?;
        }
        let children = generate_children_from(&state.parent, &masks);
        let values = evaluate_batch(&children, objective, &state.quantizer, backend)?;
        state.evals += batch;

        let mut outcome = dgo_step(&state, config.bits_max, &children, &values)?;
        let mut stop = None;
        match &outcome {
            StepOutcome::Accepted { parent, value, .. } => {
                state.parent = parent.clone();
                state.parent_value = *value;
            }
            StepOutcome::ResolutionIncreased { .. } => {
                if state.evals < config.max_evals {
                    state = increase_resolution(&state, config.bits_max, objective)?;
                } else {
                    outcome = StepOutcome::Terminated(TerminationReason::Budget);
                    stop = Some(TerminationReason::Budget);
                }
            }
            StepOutcome::Terminated(reason) => stop = Some(*reason),
        }
        if state.parent_value < best_value {
            best_value = state.parent_value;
            best_bits = state.parent.clone();
            best_q = state.quantizer.clone();
        }

        let record = TraceRecord {
            iteration: state.iteration,
            bits_per_var: iteration_bits,
            best_value,
            accepted: matches!(outcome, StepOutcome::Accepted { .. }),
            evals_total: state.evals,
            wall_ns: started.elapsed().as_nanos() as u64,
        };
        state.iteration += 1;
        observe(&outcome, &record);
        trace.push(record);
        if let Some(reason) = stop {
            break reason;
        }
    };

    Ok(RunResult {
        best_point: best_q.decode(&best_bits)?,
        best_value,
        best_bits,
        best_bits_per_var: best_q.bits_per_var(),
        final_bits_per_var: state.quantizer.bits_per_var(),
        trace,
        evals: state.evals,
        iterations: state.iteration,
        termination,
        wall: started.elapsed(),
    })
}
