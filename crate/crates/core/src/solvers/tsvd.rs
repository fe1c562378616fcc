use super::{discrepancy_stop, SolveResult, StopReason, StoppingRule};
use crate::error::{invalid, mismatch, Result};
use crate::linalg::{axpy, dot, norm, sub, LinearOperator, SvdResult};

/// Truncated SVD solution `x_m = Σ_{i<=m} (u_i^T b / σ_i) v_i`.
pub fn tsvd(svd: &SvdResult, b: &[f64], m: usize) -> Result<Vec<f64>> {
    if b.len() != svd.u.rows() {
        return Err(mismatch(format!(
            "right-hand side has length {}, U has {} rows",
            b.len(),
            svd.u.rows()
        )));
    }
    let positive = svd.positive_count();
    if m == 0 || m > positive {
        return Err(invalid(format!(
            "truncation {m} outside 1..={positive} (positive singular values)"
        )));
    }
    let mut x = vec![0.0; svd.v.rows()];
    for i in 0..m {
        let coef = dot(&svd.u.column(i), b) / svd.singular_values[i];
        axpy(coef, &svd.v.column(i), &mut x);
    }
    Ok(x)
}

/// Sweeps the truncation index `m = 1, 2, ...` and stops by the discrepancy
/// principle, reporting the sweep like an iterative solve.
pub fn tsvd_solve<A: LinearOperator + ?Sized>(
    op: &A,
    svd: &SvdResult,
    b: &[f64],
    rule: &StoppingRule,
    x_true: Option<&[f64]>,
) -> Result<SolveResult> {
    rule.validate()?;
    if (op.nrows(), op.ncols()) != (svd.u.rows(), svd.v.rows()) {
        return Err(mismatch("SVD does not match the operator"));
    }
    if b.len() != op.nrows() {
        return Err(mismatch(
            "right-hand side length differs from operator rows",
        ));
    }
    let true_norm = x_true.map(norm);
    let limit = rule.max_iter.min(svd.positive_count());
    if limit == 0 {
        return Err(invalid("operator has no positive singular values"));
    }

    let mut x = vec![0.0; op.ncols()];
    let mut residuals = Vec::new();
    let mut errors = x_true.map(|_| Vec::new());
    let mut stop_reason = StopReason::MaxIterations;
    for i in 0..limit {
        let coef = dot(&svd.u.column(i), b) / svd.singular_values[i];
        axpy(coef, &svd.v.column(i), &mut x);
        let residual = norm(&sub(b, &op.apply(&x)));
        residuals.push(residual);
        if let (Some(errs), Some(t), Some(tn)) = (errors.as_mut(), x_true, true_norm) {
            errs.push(norm(&sub(t, &x)) / tn);
        }
        if discrepancy_stop(residual, rule) {
            stop_reason = StopReason::Discrepancy;
            break;
        }
    }
    Ok(SolveResult {
        solution: x,
        iterations: residuals.len(),
        projected_residual_history: residuals.clone(),
        residual_history: residuals,
        error_history: errors,
        stop_reason,
        iterates: None,
    })
}
