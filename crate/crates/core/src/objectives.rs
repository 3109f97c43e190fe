//! Objective functions: the n-dimensional quadratic benchmark, the Shekel
//! family, a one-dimensional multimodal sample, and the 2-2-1 XOR network
//! (with its backprop gradient and a gradient-descent baseline).

use std::f64::consts::PI;
use std::hint::black_box;
use std::time::{Duration, Instant};

use crate::error::{DgoError, Result};

/// A bounded, pure objective to be minimized.
///
/// Implementations are evaluated concurrently by the worker-pool backend and
/// must not carry shared mutable state.
pub trait Objective: Send + Sync {
    fn bounds(&self) -> &[(f64, f64)];

    fn evaluate(&self, x: &[f64]) -> f64;

    fn dims(&self) -> usize {
        self.bounds().len()
    }
}

impl<T: Objective + ?Sized> Objective for &T {
    fn bounds(&self) -> &[(f64, f64)] {
        (**self).bounds()
    }
    fn evaluate(&self, x: &[f64]) -> f64 {
        (**self).evaluate(x)
    }
}

impl<T: Objective + ?Sized> Objective for Box<T> {
    fn bounds(&self) -> &[(f64, f64)] {
        (**self).bounds()
    }
    fn evaluate(&self, x: &[f64]) -> f64 {
        (**self).evaluate(x)
    }
}

/// Wraps a plain function or closure with a bounding box.
pub struct FnObjective<F> {
    bounds: Vec<(f64, f64)>,
    f: F,
}

impl<F> FnObjective<F>
where
    F: Fn(&[f64]) -> f64 + Send + Sync,
{
    pub fn new(bounds: Vec<(f64, f64)>, f: F) -> Self {
        Self { bounds, f }
    }
}

impl<F> Objective for FnObjective<F>
where
    F: Fn(&[f64]) -> f64 + Send + Sync,
{
    fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }
    fn evaluate(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }
}

pub fn quadratic(x: &[f64], center: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), center.len());
    x.iter().zip(center).map(|(a, c)| (a - c) * (a - c)).sum()
}

/// `sum_j (x_j - c_j)^2` on a box.
#[derive(Debug, Clone)]
pub struct Quadratic {
    center: Vec<f64>,
    bounds: Vec<(f64, f64)>,
}

impl Quadratic {
    pub fn new(center: Vec<f64>, bounds: Vec<(f64, f64)>) -> Result<Self> {
        if center.len() != bounds.len() || center.is_empty() {
            return Err(DgoError::DimensionMismatch {
                expected: bounds.len(),
                actual: center.len(),
            });
        }
        Ok(Self { center, bounds })
    }

    /// Centered at the origin on `[-5, 5]^dims`.
    pub fn centered(dims: usize) -> Self {
        Self {
            center: vec![0.0; dims],
            bounds: vec![(-5.0, 5.0); dims],
        }
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }
}

impl Objective for Quadratic {
    fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }
    fn evaluate(&self, x: &[f64]) -> f64 {
        quadratic(x, &self.center)
    }
}

/// `-sum_j 1 / (|x - A_j|^2 + c_j)`.
pub fn shekel(x: &[f64], foci: &[Vec<f64>], shifts: &[f64]) -> f64 {
    -foci
        .iter()
        .zip(shifts)
        .map(|(a, c)| 1.0 / (quadratic(x, a) + c))
        .sum::<f64>()
}

/// Shekel foxholes with configurable foci and shifts.
#[derive(Debug, Clone)]
pub struct Shekel {
    foci: Vec<Vec<f64>>,
    shifts: Vec<f64>,
    bounds: Vec<(f64, f64)>,
}

/// Foci of the classic 4-D, five-hole configuration.
pub const SHEKEL5_FOCI: [[f64; 4]; 5] = [
    [4.0, 4.0, 4.0, 4.0],
    [1.0, 1.0, 1.0, 1.0],
    [8.0, 8.0, 8.0, 8.0],
    [6.0, 6.0, 6.0, 6.0],
    [3.0, 7.0, 3.0, 7.0],
];

pub const SHEKEL5_SHIFTS: [f64; 5] = [0.1, 0.2, 0.2, 0.4, 0.4];

impl Shekel {
    pub fn new(foci: Vec<Vec<f64>>, shifts: Vec<f64>, bounds: Vec<(f64, f64)>) -> Result<Self> {
        if foci.is_empty() || foci.len() != shifts.len() {
            return Err(DgoError::InvalidParameter(format!(
                "shekel needs one shift per focus ({} foci, {} shifts)",
                foci.len(),
                shifts.len()
            )));
        }
        if let Some(bad) = foci.iter().find(|a| a.len() != bounds.len()) {
            return Err(DgoError::DimensionMismatch {
                expected: bounds.len(),
                actual: bad.len(),
            });
        }
        if shifts.iter().any(|&c| c.is_nan() || c <= 0.0) {
            return Err(DgoError::InvalidParameter(
                "shekel shifts must be positive".into(),
            ));
        }
        Ok(Self {
            foci,
            shifts,
            bounds,
        })
    }

    /// The 4-D, m = 5 configuration on `[0, 10]^4`.
    pub fn default_4d() -> Self {
        Self {
            foci: SHEKEL5_FOCI.iter().map(|r| r.to_vec()).collect(),
            shifts: SHEKEL5_SHIFTS.to_vec(),
            bounds: vec![(0.0, 10.0); 4],
        }
    }

    /// Strict lower bound `-sum 1/c_j`.
    pub fn lower_bound(&self) -> f64 {
        -self.shifts.iter().map(|c| 1.0 / c).sum::<f64>()
    }
}

impl Default for Shekel {
    fn default() -> Self {
        Self::default_4d()
    }
}

impl Objective for Shekel {
    fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }
    fn evaluate(&self, x: &[f64]) -> f64 {
        shekel(x, &self.foci, &self.shifts)
    }
}

/// `1 - cos(3 pi x) + 0.1 x^2`: local minima near every `x = 2k/3`, global
/// minimum `f(0) = 0`.
pub fn multimodal1d(x: f64) -> f64 {
    1.0 - (3.0 * PI * x).cos() + 0.1 * x * x
}

pub fn multimodal1d_grad(x: f64) -> f64 {
    3.0 * PI * (3.0 * PI * x).sin() + 0.2 * x
}

#[derive(Debug, Clone)]
pub struct Multimodal1d {
    bounds: [(f64, f64); 1],
}

impl Multimodal1d {
    pub fn new() -> Self {
        Self {
            bounds: [(-5.0, 5.0)],
        }
    }
}

impl Default for Multimodal1d {
    fn default() -> Self {
        Self::new()
    }
}

impl Objective for Multimodal1d {
    fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }
    fn evaluate(&self, x: &[f64]) -> f64 {
        multimodal1d(x[0])
    }
}

/// Same value everywhere.
#[derive(Debug, Clone)]
pub struct Constant {
    value: f64,
    bounds: Vec<(f64, f64)>,
}

impl Constant {
    pub fn new(value: f64, bounds: Vec<(f64, f64)>) -> Self {
        Self { value, bounds }
    }
}

impl Objective for Constant {
    fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }
    fn evaluate(&self, _x: &[f64]) -> f64 {
        self.value
    }
}

// ---------------------------------------------------------------------------
// XOR network

pub const XOR_WEIGHTS: usize = 8;

/// Half-width of the XOR weight box. Without an output bias the network
/// cannot get its SSE below ~0.1 when every weight stays inside `[-10, 10]`.
pub const XOR_WEIGHT_LIMIT: f64 = 20.0;

/// A hand-built solution: hidden unit 1 ~ OR, hidden unit 2 a soft count
/// that saturates on (1,1), output ~ OR minus the count. SSE ~ 0.0085.
pub const XOR_REFERENCE_SOLUTION: [f64; XOR_WEIGHTS] =
    [20.0, 20.0, 2.0, 2.0, -10.0, -2.0, 14.0, -20.0];

/// Input patterns and targets.
pub const XOR_PATTERNS: [([f64; 2], f64); 4] = [
    ([0.0, 0.0], 0.0),
    ([0.0, 1.0], 1.0),
    ([1.0, 0.0], 1.0),
    ([1.0, 1.0], 0.0),
];

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// A 2-2-1 logistic network with hidden biases and no output bias.
///
/// Weight layout: `[w11, w12, w21, w22, b1, b2, v1, v2]`, where `wij` feeds
/// input `j` into hidden unit `i` and `vi` feeds hidden unit `i` to the output.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XorNet {
    pub weights: [f64; XOR_WEIGHTS],
}

struct Forward {
    hidden: [f64; 2],
    output: f64,
}

impl XorNet {
    pub fn from_slice(w: &[f64]) -> Result<Self> {
        let weights: [f64; XOR_WEIGHTS] =
            w.try_into().map_err(|_| DgoError::DimensionMismatch {
                expected: XOR_WEIGHTS,
                actual: w.len(),
            })?;
        Ok(Self { weights })
    }

    fn forward(&self, input: [f64; 2]) -> Forward {
        let [w11, w12, w21, w22, b1, b2, v1, v2] = self.weights;
        let h1 = sigmoid(w11 * input[0] + w12 * input[1] + b1);
        let h2 = sigmoid(w21 * input[0] + w22 * input[1] + b2);
        Forward {
            hidden: [h1, h2],
            output: sigmoid(v1 * h1 + v2 * h2),
        }
    }

    pub fn output(&self, input: [f64; 2]) -> f64 {
        self.forward(input).output
    }

    pub fn sse(&self) -> f64 {
        XOR_PATTERNS
            .iter()
            .map(|&(input, target)| {
                let e = self.forward(input).output - target;
                e * e
            })
            .sum()
    }

    pub fn gradient(&self) -> [f64; XOR_WEIGHTS] {
        let [_, _, _, _, _, _, v1, v2] = self.weights;
        let mut g = [0.0; XOR_WEIGHTS];
        for &(input, target) in &XOR_PATTERNS {
            let Forward { hidden, output } = self.forward(input);
            let d_out = 2.0 * (output - target) * output * (1.0 - output);
            let d_h1 = d_out * v1 * hidden[0] * (1.0 - hidden[0]);
            let d_h2 = d_out * v2 * hidden[1] * (1.0 - hidden[1]);
            g[0] += d_h1 * input[0];
            g[1] += d_h1 * input[1];
            g[2] += d_h2 * input[0];
            g[3] += d_h2 * input[1];
            g[4] += d_h1;
            g[5] += d_h2;
            g[6] += d_out * hidden[0];
            g[7] += d_out * hidden[1];
        }
        g
    }

    /// True when every pattern lands on the right side of 0.5.
    pub fn classifies_all(&self) -> bool {
        XOR_PATTERNS
            .iter()
            .all(|&(input, target)| (self.output(input) > 0.5) == (target > 0.5))
    }
}

/// Sum of squared errors of the XOR network over the four patterns.
pub fn xor_sse(w: &[f64]) -> Result<f64> {
    Ok(XorNet::from_slice(w)?.sse())
}

/// Backprop gradient of [`xor_sse`].
pub fn xor_grad(w: &[f64]) -> Result<[f64; XOR_WEIGHTS]> {
    Ok(XorNet::from_slice(w)?.gradient())
}

/// XOR training as a box-bounded objective, `[-20, 20]` per weight.
#[derive(Debug, Clone)]
pub struct XorProblem {
    bounds: Vec<(f64, f64)>,
}

impl XorProblem {
    pub fn new() -> Self {
        Self {
            bounds: vec![(-XOR_WEIGHT_LIMIT, XOR_WEIGHT_LIMIT); XOR_WEIGHTS],
        }
    }
}

impl Default for XorProblem {
    fn default() -> Self {
        Self::new()
    }
}

impl Objective for XorProblem {
    fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }
    fn evaluate(&self, x: &[f64]) -> f64 {
        XorNet::from_slice(x).map_or(f64::INFINITY, |n| n.sse())
    }
}

/// SSE trace of a gradient-descent run.
#[derive(Debug, Clone, PartialEq)]
pub struct GdTrace {
    /// SSE before the first step, then after every step.
    pub sse: Vec<f64>,
    pub weights: [f64; XOR_WEIGHTS],
    /// Set when the SSE went non-finite and the run stopped early.
    pub diverged: bool,
}

/// Full-batch gradient descent on the XOR network.
pub fn gd_train(w0: &[f64], lr: f64, steps: usize) -> Result<GdTrace> {
    if !(lr >= 0.0 && lr.is_finite()) {
        return Err(DgoError::InvalidParameter(format!(
            "learning rate must be a finite non-negative number, got {lr}"
        )));
    }
    let mut net = XorNet::from_slice(w0)?;
    let mut sse = Vec::with_capacity(steps + 1);
    sse.push(net.sse());
    for _ in 0..steps {
        let g = net.gradient();
        for (w, gi) in net.weights.iter_mut().zip(g) {
            *w -= lr * gi;
        }
        let e = net.sse();
        if !e.is_finite() {
            return Ok(GdTrace {
                sse,
                weights: net.weights,
                diverged: true,
            });
        }
        sse.push(e);
    }
    Ok(GdTrace {
        sse,
        weights: net.weights,
        diverged: false,
    })
}

// ---------------------------------------------------------------------------
// Busy-work

/// A fixed amount of CPU work, sized so that one call takes roughly a
/// target duration on the calibrating machine.
///
/// The work is a counted loop rather than a clock wait, so oversubscribed
/// threads cannot overlap their waiting and fake a speedup.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpinWork {
    pub iterations: u64,
}

impl SpinWork {
    pub fn none() -> Self {
        Self { iterations: 0 }
    }

    pub fn run(&self) -> u64 {
        let mut acc = 0x9e37_79b9_7f4a_7c15u64;
        for i in 0..self.iterations {
            acc = black_box(acc.rotate_left(5) ^ i).wrapping_mul(0x2545_f491_4f6c_dd1d);
        }
        acc
    }

    /// Measures the loop rate and returns the work for `target` per call.
    pub fn calibrate(target: Duration) -> Self {
        if target.is_zero() {
            return Self::none();
        }
        let mut probe = Self {
            iterations: 1 << 14,
        };
        let mut elapsed;
        loop {
            let start = Instant::now();
            black_box(probe.run());
            elapsed = start.elapsed();
            if elapsed >= Duration::from_millis(20) || probe.iterations >= 1 << 40 {
                break;
            }
            probe.iterations *= 2;
        }
        let per_iter = elapsed.as_secs_f64() / probe.iterations as f64;
        Self {
            iterations: (target.as_secs_f64() / per_iter).ceil().max(1.0) as u64,
        }
    }
}

/// Adds [`SpinWork`] to every evaluation of an inner objective.
pub struct Spinning<O> {
    inner: O,
    work: SpinWork,
}

impl<O: Objective> Spinning<O> {
    pub fn new(inner: O, work: SpinWork) -> Self {
        Self { inner, work }
    }
}

impl<O: Objective> Objective for Spinning<O> {
    fn bounds(&self) -> &[(f64, f64)] {
        self.inner.bounds()
    }
    fn evaluate(&self, x: &[f64]) -> f64 {
        black_box(self.work.run());
        self.inner.evaluate(x)
    }
}
