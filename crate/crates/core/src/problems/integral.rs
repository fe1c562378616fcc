use std::f64::consts::PI;
use std::sync::Arc;

use super::ProblemInstance;
use crate::error::{invalid, Result};
use crate::linalg::DenseMatrix;

const MIN_SIZE: usize = 8;

/// Uniform grid of `n` points on `[lo, hi]`, endpoints included, and the
/// quadrature weight `h = (hi - lo) / (n - 1)`.
fn grid(lo: f64, hi: f64, n: usize) -> (Vec<f64>, f64) {
    let h = (hi - lo) / (n - 1) as f64;
    ((0..n).map(|i| lo + h * i as f64).collect(), h)
}

/// Nyström matrix `A_ij = h K(s_i, t_j)` on a shared grid.
fn nystrom(points: &[f64], h: f64, kernel: impl Fn(f64, f64) -> f64) -> DenseMatrix {
    let n = points.len();
    DenseMatrix::from_fn(n, n, |i, j| h * kernel(points[i], points[j]))
}

fn check_size(name: &str, n: usize) -> Result<()> {
    if n < MIN_SIZE {
        return Err(invalid(format!("{name} needs n >= {MIN_SIZE}, got {n}")));
    }
    Ok(())
}

fn phillips_bump(x: f64) -> f64 {
    if x.abs() < 3.0 {
        1.0 + (PI * x / 3.0).cos()
    } else {
        0.0
    }
}

/// Phillips' test problem on `[-6, 6]`.
///
/// Kernel `K(s, t) = φ(s - t)` and solution `x(t) = φ(t)` with
/// `φ(x) = 1 + cos(πx/3)` for `|x| < 3` and zero elsewhere.
pub fn phillips(n: usize) -> Result<ProblemInstance> {
    check_size("phillips", n)?;
    let (t, h) = grid(-6.0, 6.0, n);
    let a = nystrom(&t, h, |s, t| phillips_bump(s - t));
    let x_true = t.iter().map(|&x| phillips_bump(x)).collect();
    Ok(ProblemInstance::new("phillips", Arc::new(a), x_true, None))
}

fn shaw_kernel(s: f64, t: f64) -> f64 {
    let c = s.cos() + t.cos();
    let u = PI * (s.sin() + t.sin());
    let sinc = if u == 0.0 { 1.0 } else { u.sin() / u };
    c * c * sinc * sinc
}

/// Shaw's 1D image restoration problem on `[-π/2, π/2]`.
pub fn shaw(n: usize) -> Result<ProblemInstance> {
    check_size("shaw", n)?;
    let (t, h) = grid(-PI / 2.0, PI / 2.0, n);
    let a = nystrom(&t, h, shaw_kernel);
    let x_true = t
        .iter()
        .map(|&x| 2.0 * (-6.0 * (x - 0.8).powi(2)).exp() + (-2.0 * (x + 0.5).powi(2)).exp())
        .collect();
    Ok(ProblemInstance::new("shaw", Arc::new(a), x_true, None))
}
