//! Krylov subspace solvers for linear discrete ill-posed problems.
//!
//! The crate provides GMRES and QMR together with their range-restricted
//! variants, which search for iterates in `K_m(A, A^ℓ b)` instead of
//! `K_m(A, b)`. Iterations are stopped by the discrepancy principle. Around
//! the solvers sit the pieces needed to run regularization experiments:
//!
//! * [`linalg`]: dense kernels (Householder QR, one-sided Jacobi SVD) and the
//!   [`LinearOperator`](linalg::LinearOperator) abstraction.
//! * [`krylov`]: Arnoldi and two-sided Lanczos decompositions.
//! * [`solvers`]: the iterative solvers, truncated SVD and the stopping rule.
//! * [`problems`]: Phillips, Shaw and 2D Gaussian blur test problems plus
//!   seeded noise injection.
//! * [`analysis`]: error metrics and projected-spectrum diagnostics.

pub mod analysis;
pub mod error;
pub mod krylov;
pub mod linalg;
pub mod problems;
pub mod solvers;

pub use error::{Error, Result};
