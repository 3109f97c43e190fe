//! Evaluation backends and the min-reduction.
//!
//! The driver thread owns the parent, hands each worker one contiguous chunk
//! of the child batch, gathers the values back in canonical index order and
//! reduces them itself. Workers never talk to each other.

use std::ops::Range;
use std::thread;

use crate::bitcodec::Quantizer;
use crate::engine::{run, RunConfig, RunResult};
use crate::error::{DgoError, Result};
use crate::neighborhood::ChildSet;
use crate::objectives::Objective;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EvalBackend {
    Sequential,
    /// Static data-parallel evaluation over `n` scoped worker threads.
    WorkerPool(usize),
}

impl EvalBackend {
    pub fn pool(workers: usize) -> Result<Self> {
        if workers == 0 {
            return Err(DgoError::ZeroWorkers);
        }
        Ok(Self::WorkerPool(workers))
    }

    pub fn workers(&self) -> usize {
        match *self {
            Self::Sequential => 1,
            Self::WorkerPool(w) => w,
        }
    }
}

/// Per-worker contiguous index ranges over a child batch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    pub ranges: Vec<Range<usize>>,
}

impl Assignment {
    pub fn max_chunk(&self) -> usize {
        self.ranges.iter().map(|r| r.len()).max().unwrap_or(0)
    }
}

/// Splits `count` children over `workers` as evenly as possible; the first
/// `count % workers` chunks carry one extra child.
pub fn partition_children(count: usize, workers: usize) -> Result<Assignment> {
    if workers == 0 {
        return Err(DgoError::ZeroWorkers);
    }
    if count == 0 {
        return Err(DgoError::InvalidParameter(
            "cannot partition an empty batch".into(),
        ));
    }
    let base = count / workers;
    let extra = count % workers;
    let mut start = 0;
    let ranges = (0..workers)
        .map(|w| {
            let len = base + usize::from(w < extra);
            let r = start..start + len;
            start += len;
            r
        })
        .collect();
    Ok(Assignment { ranges })
}

fn sanitize(v: f64) -> f64 {
    // -inf would win every reduction, so it is treated like NaN
    if v.is_finite() {
        v
    } else {
        f64::INFINITY
    }
}

fn evaluate_chunk<O: Objective + ?Sized>(
    set: &ChildSet,
    range: Range<usize>,
    objective: &O,
    q: &Quantizer,
    out: &mut [(usize, f64)],
) {
    let mut x = vec![0.0; q.dims()];
    for ((slot, child), i) in out.iter_mut().zip(set.range(range.clone())).zip(range) {
        q.decode_into(child, &mut x);
        *slot = (i, sanitize(objective.evaluate(&x)));
    }
}

/// Evaluates every child once. Values come back as `(index, value)` in
/// canonical order whatever the backend; non-finite values become `+inf`.
pub fn evaluate_batch<O: Objective + ?Sized>(
    children: &ChildSet,
    objective: &O,
    q: &Quantizer,
    backend: &EvalBackend,
) -> Result<Vec<(usize, f64)>> {
    if children.bit_len() != q.bit_len() {
        return Err(DgoError::LengthMismatch {
            expected: q.bit_len(),
            actual: children.bit_len(),
        });
    }
    let n = children.len();
    let mut values = vec![(0, f64::INFINITY); n];
    if n == 0 {
        return Ok(Vec::new());
    }
    match *backend {
        EvalBackend::Sequential => evaluate_chunk(children, 0..n, objective, q, &mut values),
        EvalBackend::WorkerPool(w) => {
            let assignment = partition_children(n, w)?;
            thread::scope(|scope| {
                let mut rest = values.as_mut_slice();
                let mut local = None;
                for range in assignment.ranges.into_iter().filter(|r| !r.is_empty()) {
                    let (chunk, tail) = rest.split_at_mut(range.len());
                    rest = tail;
                    // The driver evaluates the first chunk itself.
                    if local.is_none() {
                        local = Some((range, chunk));
                        continue;
                    }
                    scope.spawn(move || evaluate_chunk(children, range, objective, q, chunk));
                }
                if let Some((range, chunk)) = local {
                    evaluate_chunk(children, range, objective, q, chunk);
                }
            });
        }
    }
    Ok(values)
}

/// Minimum value, smallest index on ties. Independent of input order.
pub fn reduce_min(values: &[(usize, f64)]) -> Result<(usize, f64)> {
    values
        .iter()
        .map(|&(i, v)| (i, if v.is_nan() { f64::INFINITY } else { v }))
        .min_by(|a, b| {
            a.1.partial_cmp(&b.1)
                .expect("NaN removed")
                .then(a.0.cmp(&b.0))
        })
        .ok_or(DgoError::EmptyReduction)
}

/// The configuration cluster `k` of a multi-start run executes.
pub fn cluster_config(config: &RunConfig, k: u64) -> RunConfig {
    RunConfig {
        seed: config.seed.wrapping_add(k),
        initial_point: if k == 0 {
            config.initial_point.clone()
        } else {
            None
        },
        ..config.clone()
    }
}

/// Outcome of one cluster of a multi-start run.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterSummary {
    pub cluster: usize,
    pub seed: u64,
    pub best_value: f64,
    pub best_point: Vec<f64>,
    pub evals: u64,
    pub iterations: u64,
}

#[derive(Debug, Clone)]
pub struct MultistartResult {
    /// The winning cluster's full result.
    pub best: RunResult,
    pub best_cluster: usize,
    pub clusters: Vec<ClusterSummary>,
}

/// Runs `clusters` independent optimizations seeded `seed, seed + 1, ...`
/// and keeps the lowest final value (lowest cluster ordinal on ties).
///
/// Cluster 0 keeps `config.initial_point`; every other cluster draws its own
/// random start from its seed.
///
/// With a worker pool the clusters also run concurrently, one driver thread
/// each.
pub fn run_multistart<O: Objective + ?Sized>(
    config: &RunConfig,
    objective: &O,
    clusters: usize,
    backend: &EvalBackend,
) -> Result<MultistartResult> {
    if clusters == 0 {
        return Err(DgoError::InvalidParameter(
            "cluster count must be at least 1".into(),
        ));
    }
    let configs: Vec<RunConfig> = (0..clusters as u64)
        .map(|k| cluster_config(config, k))
        .collect();

    let results: Vec<Result<RunResult>> = match backend {
        EvalBackend::Sequential => configs.iter().map(|c| run(c, objective, backend)).collect(),
        EvalBackend::WorkerPool(_) => thread::scope(|scope| {
            let handles: Vec<_> = configs
                .iter()
                .map(|c| scope.spawn(move || run(c, objective, backend)))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("cluster thread panicked"))
                .collect()
        }),
    };
    let results = results.into_iter().collect::<Result<Vec<_>>>()?;

    let summaries = results
        .iter()
        .zip(&configs)
        .enumerate()
        .map(|(cluster, (r, c))| ClusterSummary {
            cluster,
            seed: c.seed,
            best_value: r.best_value,
            best_point: r.best_point.clone(),
            evals: r.evals,
            iterations: r.iterations,
        })
        .collect();

    let best_cluster = results
        .iter()
        .enumerate()
        .min_by(|a, b| {
            a.1.best_value
                .total_cmp(&b.1.best_value)
                .then(a.0.cmp(&b.0))
        })
        .map(|(i, _)| i)
        .expect("at least one cluster");
    let best = results
        .into_iter()
        .nth(best_cluster)
        .expect("index in range");
    Ok(MultistartResult {
        best,
        best_cluster,
        clusters: summaries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitcodec::BitString;
    use crate::neighborhood::generate_children;
    use crate::objectives::{FnObjective, Quadratic};

    #[test]
    fn partition_examples() {
        let a = partition_children(7, 7).unwrap();
        assert!(a.ranges.iter().all(|r| r.len() == 1));
        assert_eq!(partition_children(127, 64).unwrap().max_chunk(), 2);
        let sizes: Vec<_> = partition_children(7, 3)
            .unwrap()
            .ranges
            .iter()
            .map(|r| r.len())
            .collect();
        assert_eq!(sizes, vec![3, 2, 2]);
        assert_eq!(partition_children(7, 0), Err(DgoError::ZeroWorkers));
        assert!(partition_children(0, 3).is_err());
    }

    #[test]
    fn more_workers_than_children() {
        let a = partition_children(3, 5).unwrap();
        let sizes: Vec<_> = a.ranges.iter().map(|r| r.len()).collect();
        assert_eq!(sizes, vec![1, 1, 1, 0, 0]);
    }

    #[test]
    fn reduce_min_examples() {
        assert_eq!(
            reduce_min(&[(0, 3.0), (1, 2.0), (2, 2.0)]).unwrap(),
            (1, 2.0)
        );
        assert_eq!(
            reduce_min(&[(2, 2.0), (0, 3.0), (1, 2.0)]).unwrap(),
            (1, 2.0)
        );
        assert_eq!(reduce_min(&[(5, 7.7)]).unwrap(), (5, 7.7));
        assert_eq!(reduce_min(&[]), Err(DgoError::EmptyReduction));
        assert_eq!(reduce_min(&[(0, f64::NAN), (1, 9.0)]).unwrap(), (1, 9.0));
    }

    #[test]
    fn non_finite_values_become_infinite() {
        let q = Quantizer::new(vec![(-1.0, 1.0)], 3).unwrap();
        let f = FnObjective::new(vec![(-1.0, 1.0)], |x: &[f64]| {
            if x[0] > 0.0 {
                f64::NAN
            } else {
                f64::NEG_INFINITY
            }
        });
        let set = generate_children(&BitString::zeros(3).unwrap());
        let vals = evaluate_batch(&set, &f, &q, &EvalBackend::Sequential).unwrap();
        assert!(vals.iter().all(|&(_, v)| v == f64::INFINITY));
    }

    #[test]
    fn pool_matches_sequential_on_quadratic() {
        let obj = Quadratic::centered(3);
        let q = Quantizer::new(obj.bounds().to_vec(), 5).unwrap();
        let parent = q.encode(&[1.0, -2.0, 0.3]).unwrap();
        let set = generate_children(&parent);
        let seq = evaluate_batch(&set, &obj, &q, &EvalBackend::Sequential).unwrap();
        for w in [1, 2, 3, 4, 8, 64] {
            let par = evaluate_batch(&set, &obj, &q, &EvalBackend::WorkerPool(w)).unwrap();
            assert_eq!(seq, par, "workers = {w}");
        }
    }

    #[test]
    fn batch_rejects_mismatched_quantizer() {
        let q = Quantizer::new(vec![(0.0, 1.0)], 4).unwrap();
        let set = generate_children(&BitString::zeros(3).unwrap());
        let obj = Quadratic::centered(1);
        assert!(evaluate_batch(&set, &obj, &q, &EvalBackend::Sequential).is_err());
    }
}
