use super::{build_qr_chain, discrepancy_stop, SolveResult, StopReason, StoppingRule};
use crate::error::{invalid, mismatch, Result};
use crate::krylov::{ArnoldiDecomposition, BiLanczosDecomposition, Breakdown, KrylovProcess};
use crate::linalg::{combine, dot, norm, sub, LinearOperator};

/// Which Krylov basis a solver projects onto.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BasisKind {
    /// Orthonormal Arnoldi basis: GMRES.
    Arnoldi,
    /// Two-sided Lanczos basis with quasi-minimization: QMR.
    BiLanczos,
}

/// Minimal-residual Krylov solver over `K_m(A, A^ℓ b)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KrylovSolver {
    pub basis: BasisKind,
    pub shift: usize,
    pub keep_iterates: bool,
}

impl KrylovSolver {
    pub fn new(basis: BasisKind, shift: usize) -> Self {
        Self {
            basis,
            shift,
            keep_iterates: false,
        }
    }

    pub fn keep_iterates(mut self, keep: bool) -> Self {
        self.keep_iterates = keep;
        self
    }

    pub fn solve<A: LinearOperator + ?Sized>(
        &self,
        op: &A,
        b: &[f64],
        rule: &StoppingRule,
        x_true: Option<&[f64]>,
    ) -> Result<SolveResult> {
        validate(op, b, rule, x_true)?;
        match self.basis {
            BasisKind::Arnoldi => {
                let process = ArnoldiDecomposition::start(b)?;
                self.run(process, op, b, rule, x_true)
            }
            BasisKind::BiLanczos => {
                let process = BiLanczosDecomposition::start(b)?;
                self.run(process, op, b, rule, x_true)
            }
        }
    }

    fn run<P: KrylovProcess, A: LinearOperator + ?Sized>(
        &self,
        mut process: P,
        op: &A,
        b: &[f64],
        rule: &StoppingRule,
        x_true: Option<&[f64]>,
    ) -> Result<SolveResult> {
        let ell = self.shift;
        let beta = process.beta();
        let true_norm = x_true.map(norm);

        let mut trace = Trace::new(op.ncols(), x_true.is_some(), self.keep_iterates);
        let mut stop_reason = StopReason::MaxIterations;

        for m in 1..=rule.max_iter {
            while process.steps() < ell + m && process.extend(op) {}

            let breakdown = process.breakdown();
            // After a serious breakdown the last column of the projected
            // matrix is not a valid part of the decomposition.
            let valid_steps = match breakdown {
                Some(Breakdown::Serious) => process.steps() - 1,
                _ => process.steps(),
            };
            let candidate = if valid_steps >= ell + m {
                step_iterate(&process, ell, m, beta)
            } else if trace.is_empty() && breakdown == Some(Breakdown::Invariant) {
                degenerate_iterate(&process, ell, beta)
            } else {
                None
            };
            let Some((x, projected_residual)) = candidate else {
                stop_reason = StopReason::Breakdown;
                break;
            };

            let residual = norm(&sub(b, &op.apply(&x)));
            let error = match (x_true, true_norm) {
                (Some(t), Some(tn)) => Some(norm(&sub(t, &x)) / tn),
                _ => None,
            };
            trace.push(x, residual, projected_residual, error);

            if discrepancy_stop(residual, rule) {
                stop_reason = StopReason::Discrepancy;
                break;
            }
            if breakdown.is_some() && valid_steps < ell + m + 1 {
                stop_reason = StopReason::Breakdown;
                break;
            }
        }

        Ok(trace.finish(stop_reason))
    }
}

/// Regular iterate `x_m = V_{ℓ+m} Qℓ[.., ..m] y_m`. `None` if the reduced
/// triangular system is numerically singular.
fn step_iterate<P: KrylovProcess>(
    process: &P,
    ell: usize,
    m: usize,
    beta: f64,
) -> Option<(Vec<f64>, f64)> {
    let p = process.projected();
    let chain = build_qr_chain(&p, ell, m).ok()?;
    let (y, projected_residual) = chain.solve(beta).ok()?;
    let coeffs = chain.basis_coefficients(&y);
    Some((combine(process.basis(), &coeffs), projected_residual))
}

/// Best multiple of `A^ℓ b` when the basis became invariant before `ℓ + 1`
/// steps. Works in the coordinates of the square projected matrix `P_k`,
/// where `A^ℓ b = V_k P_k^ℓ (β e_1)`.
fn degenerate_iterate<P: KrylovProcess>(
    process: &P,
    ell: usize,
    beta: f64,
) -> Option<(Vec<f64>, f64)> {
    let k = process.steps();
    if k == 0 {
        return None;
    }
    let p = process.projected().submatrix(0, k, 0, k);
    let mut z = vec![0.0; k];
    z[0] = beta;
    for _ in 0..ell {
        z = p.matvec(&z).ok()?;
    }
    let pz = p.matvec(&z).ok()?;
    let pz_sq = dot(&pz, &pz);
    if pz_sq == 0.0 {
        return None;
    }
    let t = beta * pz[0] / pz_sq;
    let mut r: Vec<f64> = pz.iter().map(|v| -t * v).collect();
    r[0] += beta;
    let coeffs: Vec<f64> = z.iter().map(|v| t * v).collect();
    Some((combine(process.basis(), &coeffs), norm(&r)))
}

struct Trace {
    solution: Vec<f64>,
    residuals: Vec<f64>,
    projected: Vec<f64>,
    errors: Option<Vec<f64>>,
    iterates: Option<Vec<Vec<f64>>>,
}

impl Trace {
    fn new(n: usize, track_errors: bool, keep_iterates: bool) -> Self {
        Self {
            solution: vec![0.0; n],
            residuals: Vec::new(),
            projected: Vec::new(),
            errors: track_errors.then(Vec::new),
            iterates: keep_iterates.then(Vec::new),
        }
    }

    fn is_empty(&self) -> bool {
        self.residuals.is_empty()
    }

    fn push(&mut self, x: Vec<f64>, residual: f64, projected: f64, error: Option<f64>) {
        self.residuals.push(residual);
        self.projected.push(projected);
        if let (Some(errors), Some(e)) = (self.errors.as_mut(), error) {
            errors.push(e);
        }
        if let Some(iterates) = self.iterates.as_mut() {
            iterates.push(x.clone());
        }
        self.solution = x;
    }

    fn finish(self, stop_reason: StopReason) -> SolveResult {
        SolveResult {
            iterations: self.residuals.len(),
            solution: self.solution,
            residual_history: self.residuals,
            projected_residual_history: self.projected,
            error_history: self.errors,
            stop_reason,
            iterates: self.iterates,
        }
    }
}

fn validate<A: LinearOperator + ?Sized>(
    op: &A,
    b: &[f64],
    rule: &StoppingRule,
    x_true: Option<&[f64]>,
) -> Result<()> {
    rule.validate()?;
    if !op.is_square() {
        return Err(mismatch(format!(
            "solver needs a square operator, got {}x{}",
            op.nrows(),
            op.ncols()
        )));
    }
    if b.len() != op.nrows() {
        return Err(mismatch(format!(
            "right-hand side has length {}, operator has {} rows",
            b.len(),
            op.nrows()
        )));
    }
    if let Some(t) = x_true {
        if t.len() != op.ncols() {
            return Err(mismatch("reference solution has the wrong length"));
        }
        if norm(t) == 0.0 {
            return Err(invalid("reference solution must be non-zero"));
        }
    }
    if !(norm(b) > 0.0) {
        return Err(invalid("right-hand side must be non-zero"));
    }
    Ok(())
}

pub fn gmres<A: LinearOperator + ?Sized>(
    op: &A,
    b: &[f64],
    rule: &StoppingRule,
    x_true: Option<&[f64]>,
) -> Result<SolveResult> {
    KrylovSolver::new(BasisKind::Arnoldi, 0).solve(op, b, rule, x_true)
}

pub fn qmr<A: LinearOperator + ?Sized>(
    op: &A,
    b: &[f64],
    rule: &StoppingRule,
    x_true: Option<&[f64]>,
) -> Result<SolveResult> {
    KrylovSolver::new(BasisKind::BiLanczos, 0).solve(op, b, rule, x_true)
}

/// Range-restricted GMRES with iterates in `K_m(A, A^ℓ b)`.
pub fn rr_gmres<A: LinearOperator + ?Sized>(
    op: &A,
    b: &[f64],
    ell: usize,
    rule: &StoppingRule,
    x_true: Option<&[f64]>,
) -> Result<SolveResult> {
    KrylovSolver::new(BasisKind::Arnoldi, ell).solve(op, b, rule, x_true)
}

/// Range-restricted QMR: the same QR chain applied to the tridiagonal `T`.
pub fn rr_qmr<A: LinearOperator + ?Sized>(
    op: &A,
    b: &[f64],
    ell: usize,
    rule: &StoppingRule,
    x_true: Option<&[f64]>,
) -> Result<SolveResult> {
    KrylovSolver::new(BasisKind::BiLanczos, ell).solve(op, b, rule, x_true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::linalg::DenseMatrix;

    #[test]
    fn identity_converges_in_one_step() {
        let b = [1.0, -2.0, 3.0];
        let rule = StoppingRule::iterations_only(5);
        for res in [
            gmres(&DenseMatrix::identity(3), &b, &rule, None).unwrap(),
            qmr(&DenseMatrix::identity(3), &b, &rule, None).unwrap(),
        ] {
            assert_eq!(res.iterations, 1);
            assert!(res.residual_history[0] <= 1e-14);
            assert_eq!(res.stop_reason, StopReason::Discrepancy);
            for (x, y) in res.solution.iter().zip(&b) {
                assert!((x - y).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn shifted_identity_is_graceful() {
        let b = [1.0, 2.0, 2.0];
        let rule = StoppingRule::iterations_only(4);
        for res in [
            rr_qmr(&DenseMatrix::identity(3), &b, 1, &rule, None).unwrap(),
            rr_gmres(&DenseMatrix::identity(3), &b, 2, &rule, None).unwrap(),
        ] {
            assert_eq!(res.iterations, 1);
            assert!(res.residual_history[0] <= 1e-14);
            for (x, y) in res.solution.iter().zip(&b) {
                assert!((x - y).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn zero_rhs_rejected() {
        let rule = StoppingRule::iterations_only(2);
        let err = gmres(&DenseMatrix::identity(2), &[0.0, 0.0], &rule, None).unwrap_err();
        assert!(matches!(err, Error::InvalidArgument(_)));
        assert!(qmr(&DenseMatrix::identity(2), &[1.0], &rule, None).is_err());
    }

    #[test]
    fn zero_shift_reproduces_plain_solvers() {
        let a = DenseMatrix::from_fn(6, 6, |i, j| {
            1.0 / (1.0 + i as f64 + j as f64) + (i == j) as u8 as f64
        });
        let b = [1.0, 0.0, 2.0, -1.0, 0.5, 0.0];
        let rule = StoppingRule::iterations_only(4);
        assert_eq!(
            gmres(&a, &b, &rule, None).unwrap(),
            rr_gmres(&a, &b, 0, &rule, None).unwrap()
        );
        assert_eq!(
            qmr(&a, &b, &rule, None).unwrap(),
            rr_qmr(&a, &b, 0, &rule, None).unwrap()
        );
    }

    #[test]
    fn restricted_breakdown_keeps_iterate_in_shifted_space() {
        // b has two eigencomponents, so the basis is invariant after two steps.
        let a = DenseMatrix::diagonal(&[1.0, 2.0, 3.0, 4.0]);
        let b = [1.0, 1.0, 0.0, 0.0];
        let ab = a.matvec(&b).unwrap();
        let rule = StoppingRule::iterations_only(5);
        for res in [
            rr_gmres(&a, &b, 1, &rule, None).unwrap(),
            rr_qmr(&a, &b, 1, &rule, None).unwrap(),
        ] {
            assert_eq!(res.stop_reason, StopReason::Breakdown);
            assert_eq!(res.iterations, 1);
            // x = t A b with t minimizing ||b - t A^2 b||
            let t = res.solution[0] / ab[0];
            for (x, y) in res.solution.iter().zip(&ab) {
                assert!((x - t * y).abs() < 1e-14);
            }
        }
        let full = gmres(&a, &b, &rule, None).unwrap();
        assert_eq!(full.stop_reason, StopReason::Breakdown);
        assert!(full.residual_history.last().unwrap() < &1e-14);
    }
}
