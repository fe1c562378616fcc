//! Regularizing solvers and the discrepancy-principle stopping rule.
//!
//! All Krylov solvers start from `x_0 = 0` and run through one code path,
//! [`KrylovSolver`], parametrized by the basis construction (Arnoldi for
//! GMRES, two-sided Lanczos for QMR) and the shift `ℓ`. With `ℓ = 0` the
//! range-restricted solvers reproduce the plain ones.

mod chain;
mod iterative;
mod tsvd;

pub use chain::{build_qr_chain, QrChain};
pub use iterative::{gmres, qmr, rr_gmres, rr_qmr, BasisKind, KrylovSolver};
pub use tsvd::{tsvd, tsvd_solve};

use crate::error::{invalid, Result};

/// Discrepancy principle: stop once `||b - A x_m|| <= eta * epsilon`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StoppingRule {
    /// Bound on the noise norm `||e||`.
    pub epsilon: f64,
    /// Safety factor, strictly greater than one.
    pub eta: f64,
    pub max_iter: usize,
}

impl StoppingRule {
    pub fn new(epsilon: f64, eta: f64, max_iter: usize) -> Result<Self> {
        let rule = Self {
            epsilon,
            eta,
            max_iter,
        };
        rule.validate()?;
        Ok(rule)
    }

    /// Never satisfied before `max_iter` unless the residual is exactly zero.
    pub fn iterations_only(max_iter: usize) -> Self {
        Self {
            epsilon: 0.0,
            eta: 1.01,
            max_iter,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon >= 0.0) || !self.epsilon.is_finite() {
            return Err(invalid(format!(
                "epsilon must be >= 0, got {}",
                self.epsilon
            )));
        }
        if !(self.eta > 1.0) || !self.eta.is_finite() {
            return Err(invalid(format!("eta must be > 1, got {}", self.eta)));
        }
        if self.max_iter == 0 {
            return Err(invalid("max_iter must be at least 1"));
        }
        Ok(())
    }

    pub fn threshold(&self) -> f64 {
        self.eta * self.epsilon
    }
}

pub fn discrepancy_stop(residual_norm: f64, rule: &StoppingRule) -> bool {
    residual_norm <= rule.threshold()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StopReason {
    Discrepancy,
    MaxIterations,
    Breakdown,
}

impl StopReason {
    pub fn as_str(self) -> &'static str {
        match self {
            StopReason::Discrepancy => "discrepancy",
            StopReason::MaxIterations => "max_iterations",
            StopReason::Breakdown => "breakdown",
        }
    }
}

impl std::fmt::Display for StopReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub solution: Vec<f64>,
    pub iterations: usize,
    /// Explicit `||b - A x_m||` for m = 1..=iterations.
    pub residual_history: Vec<f64>,
    /// Residual of the small projected least-squares problem per iteration.
    pub projected_residual_history: Vec<f64>,
    /// `||x_true - x_m|| / ||x_true||` when a reference solution was given.
    pub error_history: Option<Vec<f64>>,
    pub stop_reason: StopReason,
    /// Every iterate `x_1 .. x_m`, when requested.
    pub iterates: Option<Vec<Vec<f64>>>,
}

impl SolveResult {
    pub fn final_residual(&self) -> Option<f64> {
        self.residual_history.last().copied()
    }

    pub fn final_error(&self) -> Option<f64> {
        self.error_history.as_ref().and_then(|h| h.last().copied())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn discrepancy_boundaries() {
        let rule = StoppingRule::new(2.0, 1.01, 10).unwrap();
        let t = rule.eta * rule.epsilon;
        assert!(discrepancy_stop(0.9 * t, &rule));
        assert!(discrepancy_stop(t, &rule));
        assert!(!discrepancy_stop(1.1 * t, &rule));
    }

    #[test]
    fn rule_validation() {
        assert!(StoppingRule::new(1.0, 1.0, 5).is_err());
        assert!(StoppingRule::new(-1.0, 1.1, 5).is_err());
        assert!(StoppingRule::new(1.0, 1.1, 0).is_err());
        assert!(StoppingRule::new(f64::NAN, 1.1, 5).is_err());
        assert!(StoppingRule::new(0.0, 1.01, 1).is_ok());
    }
}
