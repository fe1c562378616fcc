//! Reconstruction metrics and spectral diagnostics.

use crate::error::{invalid, mismatch, Result};
use crate::krylov::{ArnoldiDecomposition, BiLanczosDecomposition, KrylovProcess};
use crate::linalg::{jacobi_svd, norm, sub, LinearOperator};
use crate::solvers::{build_qr_chain, BasisKind, SolveResult};

/// `||x_true - x|| / ||x_true||`
pub fn relative_error(x: &[f64], x_true: &[f64]) -> Result<f64> {
    if x.len() != x_true.len() {
        return Err(mismatch("relative_error on vectors of different length"));
    }
    let denom = norm(x_true);
    if denom == 0.0 {
        return Err(invalid("relative_error needs a non-zero reference"));
    }
    Ok(norm(&sub(x_true, x)) / denom)
}

/// `||b - A x|| / ||b_exact||`
pub fn relative_residual<A: LinearOperator + ?Sized>(
    op: &A,
    x: &[f64],
    b: &[f64],
    b_exact: &[f64],
) -> Result<f64> {
    if x.len() != op.ncols() || b.len() != op.nrows() || b_exact.len() != op.nrows() {
        return Err(mismatch(
            "relative_residual dimensions disagree with operator",
        ));
    }
    let denom = norm(b_exact);
    if denom == 0.0 {
        return Err(invalid("relative_residual needs non-zero exact data"));
    }
    Ok(norm(&sub(b, &op.apply(x))) / denom)
}

/// Minimum of an error history.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Semiconvergence {
    /// 1-based iteration of the smallest error.
    pub argmin: usize,
    pub min_error: f64,
    pub final_error: f64,
}

pub fn semiconvergence_curve(result: &SolveResult) -> Result<Semiconvergence> {
    let history = result
        .error_history
        .as_deref()
        .ok_or_else(|| invalid("solve result has no error history"))?;
    semiconvergence_of(history)
}

pub fn semiconvergence_of(history: &[f64]) -> Result<Semiconvergence> {
    let (idx, &min_error) = history
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .ok_or_else(|| invalid("empty error history"))?;
    Ok(Semiconvergence {
        argmin: idx + 1,
        min_error,
        final_error: *history.last().expect("non-empty"),
    })
}

/// Singular values of the projected matrix a solver works with.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumReport {
    pub method: String,
    pub basis: BasisKind,
    pub shift: usize,
    /// Columns of the analysed matrix; smaller than requested after a breakdown.
    pub m: usize,
    pub singular_values: Vec<f64>,
    /// Set when the basis broke down before the requested size.
    pub truncated: bool,
}

impl SpectrumReport {
    pub fn smallest(&self) -> f64 {
        self.singular_values.last().copied().unwrap_or(0.0)
    }

    /// First 1-based index with `σ_i / σ_1 < ratio`, if any.
    pub fn decay_index(&self, ratio: f64) -> Option<usize> {
        let first = *self.singular_values.first()?;
        self.singular_values
            .iter()
            .position(|&s| s < ratio * first)
            .map(|i| i + 1)
    }
}

pub fn method_label(basis: BasisKind, shift: usize) -> String {
    match (basis, shift) {
        (BasisKind::Arnoldi, 0) => "gmres".into(),
        (BasisKind::BiLanczos, 0) => "qmr".into(),
        (BasisKind::Arnoldi, _) => "rrgmres".into(),
        (BasisKind::BiLanczos, _) => "rrqmr".into(),
    }
}

/// Runs `ℓ + m` basis steps from `b` and returns the singular values of
/// `H_m` / `T_m` (`ℓ = 0`) or of the leading `m x m` block of `R(ℓ+1)`.
pub fn projected_spectrum<A: LinearOperator + ?Sized>(
    basis: BasisKind,
    op: &A,
    b: &[f64],
    m: usize,
    ell: usize,
) -> Result<SpectrumReport> {
    if m == 0 {
        return Err(invalid("projected_spectrum needs m >= 1"));
    }
    if !op.is_square() || b.len() != op.ncols() {
        return Err(mismatch(
            "projected_spectrum needs a square operator matching b",
        ));
    }
    match basis {
        BasisKind::Arnoldi => {
            let mut p = ArnoldiDecomposition::start(b)?;
            spectrum_of(&mut p, basis, op, m, ell)
        }
        BasisKind::BiLanczos => {
            let mut p = BiLanczosDecomposition::start(b)?;
            spectrum_of(&mut p, basis, op, m, ell)
        }
    }
}

fn spectrum_of<P: KrylovProcess, A: LinearOperator + ?Sized>(
    process: &mut P,
    basis: BasisKind,
    op: &A,
    m: usize,
    ell: usize,
) -> Result<SpectrumReport> {
    while process.steps() < ell + m && process.extend(op) {}
    let achieved = process.steps().saturating_sub(ell).min(m);
    if achieved == 0 {
        return Err(invalid(format!(
            "basis broke down after {} steps, fewer than the shift {ell} + 1",
            process.steps()
        )));
    }
    let p = process.projected();
    let matrix = if ell == 0 {
        p.submatrix(0, achieved + 1, 0, achieved)
    } else {
        build_qr_chain(&p, ell, achieved)?.top_triangle()
    };
    Ok(SpectrumReport {
        method: method_label(basis, ell),
        basis,
        shift: ell,
        m: achieved,
        singular_values: jacobi_svd(&matrix)?.singular_values,
        truncated: achieved < m,
    })
}
