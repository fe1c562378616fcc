//! Krylov basis construction.
//!
//! [`ArnoldiDecomposition`] builds an orthonormal basis with an upper
//! Hessenberg projection, [`BiLanczosDecomposition`] builds a pair of
//! bi-orthogonal bases with a tridiagonal projection. Both grow one step at
//! a time so solvers can extend them as iterations proceed, and both
//! implement [`KrylovProcess`] so the solvers can be written once.

mod arnoldi;
mod bilanczos;

pub use arnoldi::{arnoldi, ArnoldiDecomposition};
pub use bilanczos::{bilanczos, BiLanczosDecomposition};

use crate::linalg::{combine, norm, DenseMatrix, LinearOperator};

/// Why a basis stopped growing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Breakdown {
    /// The new direction vanished: the basis spans an invariant subspace.
    Invariant,
    /// Two-sided Lanczos only: `(v̂, ŵ) ≈ 0` with non-negligible vectors.
    Serious,
}

/// Common view of an incrementally built Krylov decomposition
/// `A V_m = V_{m+1} P_m`.
pub trait KrylovProcess {
    /// Completed steps `m`.
    fn steps(&self) -> usize;

    /// Basis vectors `v_1 .. v_{m+1}` (only `m` of them after a breakdown).
    fn basis(&self) -> &[Vec<f64>];

    /// The `(m+1) x m` projected matrix. After a breakdown the last row is zero.
    fn projected(&self) -> DenseMatrix;

    fn breakdown(&self) -> Option<Breakdown>;

    /// Norm of the starting vector.
    fn beta(&self) -> f64;

    /// Performs one more step. Returns `false` if the process has broken
    /// down (now or earlier) and no new basis vector was produced.
    fn extend<A: LinearOperator + ?Sized>(&mut self, op: &A) -> bool;

    /// `||A V_m - V_{m+1} P_m||_F`.
    fn relation_residual<A: LinearOperator + ?Sized>(&self, op: &A) -> f64 {
        let m = self.steps();
        let p = self.projected();
        let basis = self.basis();
        let mut sum = 0.0;
        for j in 0..m {
            let coeffs: Vec<f64> = (0..basis.len().min(m + 1)).map(|i| p[(i, j)]).collect();
            let mut r = op.apply(&basis[j]);
            let vp = combine(basis, &coeffs);
            for (ri, vi) in r.iter_mut().zip(&vp) {
                *ri -= vi;
            }
            sum += norm(&r).powi(2);
        }
        sum.sqrt()
    }
}

/// `max_ij |(X^T Y - I)_ij|` over the first `k` columns of each set.
pub fn biorthogonality_error(x: &[Vec<f64>], y: &[Vec<f64>], k: usize) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..k {
        for j in 0..k {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((crate::linalg::dot(&x[i], &y[j]) - target).abs());
        }
    }
    worst
}
