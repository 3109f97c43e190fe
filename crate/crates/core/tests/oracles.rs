//! Brute-force reference optima for the test objectives.
//!
//! The exhaustive Shekel sweep evaluates 256^4 grid points, so it is ignored
//! by default; its output is frozen into `SHEKEL_ARGMIN` / `SHEKEL_MIN` and
//! re-checked cheaply by `frozen_shekel_optimum_is_stationary`. Regenerate with
//! `cargo test --release -p dgo-core --test oracles -- --ignored --nocapture`.

use dgo_core::objectives::{multimodal1d, shekel, SHEKEL5_FOCI, SHEKEL5_SHIFTS};

pub const SHEKEL_ARGMIN: [f64; 4] = [
    4.000037151224473,
    4.000133275985718,
    4.00003715356191,
    4.000133275985718,
];
pub const SHEKEL_MIN: f64 = -10.153199679058229;

fn shekel5(x: &[f64]) -> f64 {
    let foci: Vec<Vec<f64>> = SHEKEL5_FOCI.iter().map(|r| r.to_vec()).collect();
    shekel(x, &foci, &SHEKEL5_SHIFTS)
}

/// Compass search with a shrinking step, down to `tol`.
fn refine(f: impl Fn(&[f64]) -> f64, mut x: Vec<f64>, mut step: f64, tol: f64) -> (Vec<f64>, f64) {
    let mut fx = f(&x);
    while step > tol {
        let mut improved = false;
        for d in 0..x.len() {
            for dir in [-1.0, 1.0] {
                let mut y = x.clone();
                y[d] += dir * step;
                let fy = f(&y);
                if fy < fx {
                    x = y;
                    fx = fy;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    (x, fx)
}

fn grid(lo: f64, hi: f64, bits: u32) -> Vec<f64> {
    let max = (1u64 << bits) - 1;
    (0..=max)
        .map(|k| lo + (hi - lo) * k as f64 / max as f64)
        .collect()
}

#[test]
#[ignore]
fn shekel_exhaustive_grid_then_refine() {
    let g = grid(0.0, 10.0, 8);
    let mut best = (f64::INFINITY, [0.0; 4]);
    for &a in &g {
        for &b in &g {
            for &c in &g {
                for &d in &g {
                    let x = [a, b, c, d];
                    let v = shekel5(&x);
                    if v < best.0 {
                        best = (v, x);
                    }
                }
            }
        }
    }
    println!("grid best {:?} at {:?}", best.0, best.1);
    let (x, v) = refine(shekel5, best.1.to_vec(), 10.0 / 255.0, 1e-13);
    println!("refined argmin {x:?}");
    println!("refined min {v:?}");
}

#[test]
fn frozen_shekel_optimum_is_stationary() {
    let (x, v) = refine(shekel5, SHEKEL_ARGMIN.to_vec(), 1e-3, 1e-13);
    assert!((v - SHEKEL_MIN).abs() < 1e-12);
    for (a, b) in x.iter().zip(SHEKEL_ARGMIN) {
        assert!((a - b).abs() < 1e-6);
    }
}

#[test]
fn multimodal_grid_then_refine() {
    let g = grid(-5.0, 5.0, 8);
    let (v0, x0) = g
        .iter()
        .map(|&x| (multimodal1d(x), x))
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .unwrap();
    assert!(v0 < 0.05);
    let (x, v) = refine(|x| multimodal1d(x[0]), vec![x0], 10.0 / 255.0, 1e-13);
    assert!(x[0].abs() < 1e-6, "argmin {x:?}");
    assert!(v < 1e-12);
    // second-best well at 2/3 is strictly shallower
    let (_, v2) = refine(|x| multimodal1d(x[0]), vec![0.66], 0.01, 1e-13);
    assert!(v2 > 0.04);
}
