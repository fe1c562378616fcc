use crate::error::{mismatch, Result};
use crate::linalg::{householder_qr, norm, solve_upper_triangular, DenseMatrix};

/// Successive QR factorizations driving range restriction.
///
/// For a projected matrix `P` of size `(ℓ+m+1) x (ℓ+m)` (Hessenberg for
/// GMRES, tridiagonal for QMR) the chain is
///
/// ```text
/// P[..m+1, ..m]                  = Q1 R1
/// P[..j+m+1, ..j+m] Qj[.., ..m]  = Q(j+1) R(j+1),   j = 1..=ℓ
/// ```
///
/// The iterate is `x = V_{ℓ+m} Qℓ[.., ..m] y` where `y` solves the leading
/// `m x m` triangle of `R(ℓ+1)` against `β Q(ℓ+1)^T e_1`. The restricted basis
/// `W` itself is never formed.
#[derive(Debug, Clone, PartialEq)]
pub struct QrChain {
    ell: usize,
    m: usize,
    q_factors: Vec<DenseMatrix>,
    r_factors: Vec<DenseMatrix>,
}

pub fn build_qr_chain(p: &DenseMatrix, ell: usize, m: usize) -> Result<QrChain> {
    if m == 0 {
        return Err(mismatch("qr chain needs m >= 1"));
    }
    if p.rows() < ell + m + 1 || p.cols() < ell + m {
        return Err(mismatch(format!(
            "qr chain with ell={ell}, m={m} needs a {}x{} projected matrix, got {}x{}",
            ell + m + 1,
            ell + m,
            p.rows(),
            p.cols()
        )));
    }
    let mut q_factors = Vec::with_capacity(ell + 1);
    let mut r_factors = Vec::with_capacity(ell + 1);
    let (q, r) = householder_qr(&p.submatrix(0, m + 1, 0, m))?;
    q_factors.push(q);
    r_factors.push(r);
    for j in 1..=ell {
        let q_prev = &q_factors[j - 1];
        let lead = q_prev.submatrix(0, j + m, 0, m);
        let shifted = p.submatrix(0, j + m + 1, 0, j + m).matmul(&lead)?;
        let (q, r) = householder_qr(&shifted)?;
        q_factors.push(q);
        r_factors.push(r);
    }
    Ok(QrChain {
        ell,
        m,
        q_factors,
        r_factors,
    })
}

impl QrChain {
    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// `Q(1) .. Q(ℓ+1)`.
    pub fn q_factors(&self) -> &[DenseMatrix] {
        &self.q_factors
    }

    /// `R(1) .. R(ℓ+1)`.
    pub fn r_factors(&self) -> &[DenseMatrix] {
        &self.r_factors
    }

    /// Leading `m x m` triangle of the last factor `R(ℓ+1)`.
    pub fn top_triangle(&self) -> DenseMatrix {
        self.r_factors[self.ell].submatrix(0, self.m, 0, self.m)
    }

    /// Solves the reduced problem `min ||R(ℓ+1) y - β Q(ℓ+1)^T e_1||`.
    ///
    /// Returns `y` and the norm of the discarded tail of the rotated
    /// right-hand side, which is the projected residual.
    pub fn solve(&self, beta: f64) -> Result<(Vec<f64>, f64)> {
        let q = &self.q_factors[self.ell];
        // (Q^T e_1)_k = Q[0, k]
        let rhs: Vec<f64> = q.row(0).iter().map(|x| beta * x).collect();
        let y = solve_upper_triangular(&self.top_triangle(), &rhs[..self.m])?;
        Ok((y, norm(&rhs[self.m..])))
    }

    /// Coefficients of the iterate in the Krylov basis `V_{ℓ+m}`:
    /// `Qℓ[.., ..m] y`, or `y` itself when `ℓ = 0`.
    pub fn basis_coefficients(&self, y: &[f64]) -> Vec<f64> {
        if self.ell == 0 {
            return y.to_vec();
        }
        let q = &self.q_factors[self.ell - 1];
        (0..self.ell + self.m)
            .map(|i| (0..self.m).map(|k| q[(i, k)] * y[k]).sum())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hessenberg(rows: usize, cols: usize) -> DenseMatrix {
        DenseMatrix::from_fn(rows, cols, |i, j| {
            if i > j + 1 {
                0.0
            } else {
                1.0 / (1.0 + i as f64 + j as f64) + if i == j + 1 { 0.5 } else { 0.0 }
            }
        })
    }

    #[test]
    fn base_case_is_single_qr() {
        let h = hessenberg(5, 4);
        let chain = build_qr_chain(&h, 0, 4).unwrap();
        assert_eq!(chain.q_factors().len(), 1);
        let qr = chain.q_factors()[0].matmul(&chain.r_factors()[0]).unwrap();
        assert!(qr.max_abs_diff(&h) <= 1e-12);
    }

    #[test]
    fn chain_relation_holds() {
        let (ell, m) = (3, 4);
        let p = hessenberg(ell + m + 1, ell + m);
        let chain = build_qr_chain(&p, ell, m).unwrap();
        for j in 1..=ell {
            let lhs = p
                .submatrix(0, j + m + 1, 0, j + m)
                .matmul(&chain.q_factors()[j - 1].submatrix(0, j + m, 0, m))
                .unwrap();
            let rhs = chain.q_factors()[j].matmul(&chain.r_factors()[j]).unwrap();
            assert!(lhs.max_abs_diff(&rhs) <= 1e-12 * lhs.frobenius_norm());
            let q = &chain.q_factors()[j];
            let qtq = q.transpose().matmul(q).unwrap();
            assert!(qtq.max_abs_diff(&DenseMatrix::identity(q.rows())) <= 1e-12);
        }
    }

    #[test]
    fn undersized_matrix_rejected() {
        assert!(build_qr_chain(&hessenberg(4, 3), 1, 3).is_err());
        assert!(build_qr_chain(&hessenberg(4, 3), 0, 0).is_err());
    }

    #[test]
    fn solve_matches_dense_least_squares() {
        let p = hessenberg(6, 5);
        let chain = build_qr_chain(&p, 0, 5).unwrap();
        let (y, res) = chain.solve(2.0).unwrap();
        let py = p.matvec(&y).unwrap();
        let mut r = py.clone();
        r[0] -= 2.0;
        // Normal equations P^T (P y - β e1) = 0 at the minimizer.
        let grad = p.matvec_transpose(&r).unwrap();
        assert!(norm(&grad) <= 1e-12);
        assert!((norm(&r) - res).abs() <= 1e-12);
    }
}
