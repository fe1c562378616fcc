use std::sync::Arc;

use super::ProblemInstance;
use crate::error::{invalid, Result};
use crate::linalg::{DenseMatrix, KroneckerOperator};

/// PSF width used when none is given.
pub const DEFAULT_SIGMA: f64 = 3.0;
/// `ceil(3 σ)` for the default width.
pub const DEFAULT_BAND: usize = 9;

/// Symmetric banded Toeplitz matrix of a sampled 1D Gaussian.
///
/// Entries are `c exp(-k^2 / (2 σ^2))` for offsets `|k| < band`, with `c`
/// chosen so a full row sums to one. Rows near the boundary are truncated
/// (zero boundary conditions) and sum to less than one.
pub fn gaussian_toeplitz(n: usize, band: usize, sigma: f64) -> DenseMatrix {
    let weights: Vec<f64> = (0..band)
        .map(|k| (-((k * k) as f64) / (2.0 * sigma * sigma)).exp())
        .collect();
    let total: f64 = weights[0] + 2.0 * weights[1..].iter().sum::<f64>();
    DenseMatrix::from_fn(n, n, |i, j| {
        let k = i.abs_diff(j);
        if k < band {
            weights[k] / total
        } else {
            0.0
        }
    })
}

/// Piecewise-constant `size x size` test image, values in `[0, 1]`,
/// returned column-major.
///
/// A large dim rectangle, a bright bar overlapping it, and a grid of dots.
pub fn test_image(size: usize) -> Vec<f64> {
    let s = size as f64;
    let mut img = vec![0.0; size * size];
    let mut fill = |r0: f64, r1: f64, c0: f64, c1: f64, value: f64| {
        let (r0, r1) = ((r0 * s) as usize, ((r1 * s) as usize).min(size));
        let (c0, c1) = ((c0 * s) as usize, ((c1 * s) as usize).min(size));
        for c in c0..c1 {
            for r in r0..r1 {
                img[r + c * size] = value;
            }
        }
    };
    fill(0.15, 0.55, 0.10, 0.60, 0.5);
    fill(0.30, 0.45, 0.35, 0.85, 1.0);
    fill(0.65, 0.85, 0.20, 0.40, 0.8);
    let step = (size / 8).max(2);
    let start = (0.65 * s) as usize;
    for c in (start..size.saturating_sub(1)).step_by(step) {
        for r in (start..size.saturating_sub(1)).step_by(step) {
            img[r + c * size] = 1.0;
        }
    }
    img
}

/// 2D Gaussian deblurring on an `size x size` image: `A = T ⊗ T` with `T`
/// from [`gaussian_toeplitz`].
pub fn blur2d(size: usize, band: usize, sigma: f64) -> Result<ProblemInstance> {
    if size < 8 {
        return Err(invalid(format!("blur2d needs size >= 8, got {size}")));
    }
    if band == 0 || band > size {
        return Err(invalid(format!(
            "blur2d band must be in 1..={size}, got {band}"
        )));
    }
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(invalid(format!("blur2d sigma must be > 0, got {sigma}")));
    }
    let t = gaussian_toeplitz(size, band, sigma);
    let op = KroneckerOperator::new(t.clone(), t);
    Ok(ProblemInstance::new(
        "blur2d",
        Arc::new(op),
        test_image(size),
        Some((size, size)),
    ))
}
