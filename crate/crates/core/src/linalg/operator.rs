use super::{dot, jacobi_svd, DenseMatrix, SvdResult};
use crate::error::{mismatch, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorKind {
    Dense,
    KroneckerBlur,
}

/// A real linear map that can be applied forwards and transposed.
///
/// Implementations panic when handed a vector of the wrong length; solvers
/// validate dimensions once on entry.
pub trait LinearOperator: Send + Sync {
    fn nrows(&self) -> usize;
    fn ncols(&self) -> usize;
    fn apply(&self, x: &[f64]) -> Vec<f64>;
    fn apply_transpose(&self, y: &[f64]) -> Vec<f64>;
    fn kind(&self) -> OperatorKind;

    fn is_square(&self) -> bool {
        self.nrows() == self.ncols()
    }

    /// Materializes the operator column by column.
    fn to_dense(&self) -> DenseMatrix {
        let mut columns = Vec::with_capacity(self.ncols());
        let mut e = vec![0.0; self.ncols()];
        for j in 0..self.ncols() {
            e[j] = 1.0;
            columns.push(self.apply(&e));
            e[j] = 0.0;
        }
        DenseMatrix::from_columns(&columns).expect("apply returns nrows entries")
    }

    /// Full SVD of the operator. Structured operators may override this.
    fn svd(&self) -> Result<SvdResult> {
        jacobi_svd(&self.to_dense())
    }
}

impl LinearOperator for DenseMatrix {
    fn nrows(&self) -> usize {
        self.rows()
    }

    fn ncols(&self) -> usize {
        self.cols()
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.matvec(x).expect("operator input length")
    }

    fn apply_transpose(&self, y: &[f64]) -> Vec<f64> {
        self.matvec_transpose(y).expect("operator input length")
    }

    fn kind(&self) -> OperatorKind {
        OperatorKind::Dense
    }

    fn to_dense(&self) -> DenseMatrix {
        self.clone()
    }
}

/// `A = C ⊗ R` acting on column-major images.
///
/// A vector `x` of length `R.rows() * C.rows()` is read as the image `X`
/// with `X[i, j] = x[i + j * R.cols()]`; then `A x = vec(R X C^T)`.
#[derive(Debug, Clone, PartialEq)]
pub struct KroneckerOperator {
    row_factor: DenseMatrix,
    col_factor: DenseMatrix,
}

impl KroneckerOperator {
    pub fn new(row_factor: DenseMatrix, col_factor: DenseMatrix) -> Self {
        Self {
            row_factor,
            col_factor,
        }
    }

    pub fn row_factor(&self) -> &DenseMatrix {
        &self.row_factor
    }

    pub fn col_factor(&self) -> &DenseMatrix {
        &self.col_factor
    }

    // Y = left * X * right^T with X of shape (left.cols, right.cols).
    fn sandwich(left: &DenseMatrix, right: &DenseMatrix, x: &[f64]) -> Vec<f64> {
        let (h_in, w_in) = (left.cols(), right.cols());
        let (h_out, w_out) = (left.rows(), right.rows());
        assert_eq!(x.len(), h_in * w_in, "operator input length");
        // Z = X * right^T, stored column-major (h_in x w_out).
        let mut z = vec![0.0; h_in * w_out];
        for k in 0..w_out {
            let rrow = right.row(k);
            let zcol = &mut z[k * h_in..(k + 1) * h_in];
            for (j, &c) in rrow.iter().enumerate() {
                if c != 0.0 {
                    super::axpy(c, &x[j * h_in..(j + 1) * h_in], zcol);
                }
            }
        }
        let mut y = vec![0.0; h_out * w_out];
        for k in 0..w_out {
            let zcol = &z[k * h_in..(k + 1) * h_in];
            for l in 0..h_out {
                y[l + k * h_out] = dot(left.row(l), zcol);
            }
        }
        y
    }

    /// SVD assembled from the SVDs of the two factors.
    pub fn kronecker_svd(&self) -> Result<SvdResult> {
        let r = jacobi_svd(&self.row_factor)?;
        let c = jacobi_svd(&self.col_factor)?;
        let (kr, kc) = (r.singular_values.len(), c.singular_values.len());
        if kr != self.row_factor.rows().min(self.row_factor.cols())
            || kc != self.col_factor.rows().min(self.col_factor.cols())
        {
            return Err(mismatch("factor SVD has unexpected rank"));
        }
        let mut pairs: Vec<(f64, usize, usize)> = (0..kc)
            .flat_map(|b| (0..kr).map(move |a| (a, b)))
            .map(|(a, b)| (r.singular_values[a] * c.singular_values[b], a, b))
            .collect();
        pairs.sort_by(|x, y| y.0.total_cmp(&x.0).then((x.2, x.1).cmp(&(y.2, y.1))));

        let kron_col = |left: &DenseMatrix, a: usize, right: &DenseMatrix, b: usize| {
            let (hl, hr) = (left.rows(), right.rows());
            let mut out = vec![0.0; hl * hr];
            for j in 0..hr {
                for i in 0..hl {
                    out[i + j * hl] = left[(i, a)] * right[(j, b)];
                }
            }
            out
        };
        let u_cols: Vec<Vec<f64>> = pairs
            .iter()
            .map(|&(_, a, b)| kron_col(&r.u, a, &c.u, b))
            .collect();
        let v_cols: Vec<Vec<f64>> = pairs
            .iter()
            .map(|&(_, a, b)| kron_col(&r.v, a, &c.v, b))
            .collect();
        Ok(SvdResult {
            u: DenseMatrix::from_columns(&u_cols)?,
            singular_values: pairs.iter().map(|p| p.0).collect(),
            v: DenseMatrix::from_columns(&v_cols)?,
        })
    }
}

impl LinearOperator for KroneckerOperator {
    fn nrows(&self) -> usize {
        self.row_factor.rows() * self.col_factor.rows()
    }

    fn ncols(&self) -> usize {
        self.row_factor.cols() * self.col_factor.cols()
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        Self::sandwich(&self.row_factor, &self.col_factor, x)
    }

    fn apply_transpose(&self, y: &[f64]) -> Vec<f64> {
        Self::sandwich(
            &self.row_factor.transpose(),
            &self.col_factor.transpose(),
            y,
        )
    }

    fn kind(&self) -> OperatorKind {
        OperatorKind::KroneckerBlur
    }

    fn svd(&self) -> Result<SvdResult> {
        self.kronecker_svd()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> DenseMatrix {
        DenseMatrix::from_fn(rows, cols, |_, _| rng.random_range(-1.0..1.0))
    }

    fn random_vec(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
        (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
    }

    /// Explicit Kronecker product, entry ((k*hr + l), (j*wr + i)) = C[k,j] R[l,i].
    fn explicit_kron(r: &DenseMatrix, c: &DenseMatrix) -> DenseMatrix {
        DenseMatrix::from_fn(r.rows() * c.rows(), r.cols() * c.cols(), |row, col| {
            let (l, k) = (row % r.rows(), row / r.rows());
            let (i, j) = (col % r.cols(), col / r.cols());
            c[(k, j)] * r[(l, i)]
        })
    }

    #[test]
    fn dense_transpose_matches_explicit_transpose() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = random_matrix(5, 3, &mut rng);
        let y = random_vec(5, &mut rng);
        let expected = a.transpose().matvec(&y).unwrap();
        let got = a.apply_transpose(&y);
        for (g, e) in got.iter().zip(&expected) {
            assert!((g - e).abs() <= 1e-14 * e.abs().max(1.0));
        }
    }

    #[test]
    fn kronecker_matches_explicit_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let r = random_matrix(3, 4, &mut rng);
        let c = random_matrix(2, 5, &mut rng);
        let op = KroneckerOperator::new(r.clone(), c.clone());
        let dense = explicit_kron(&r, &c);
        assert!(op.to_dense().max_abs_diff(&dense) <= 1e-14);
        let y = random_vec(6, &mut rng);
        let t = op.apply_transpose(&y);
        let expected = dense.matvec_transpose(&y).unwrap();
        for (a, b) in t.iter().zip(&expected) {
            assert!((a - b).abs() <= 1e-13);
        }
    }

    #[test]
    fn adjoint_consistency() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let r = random_matrix(4, 4, &mut rng);
            let c = random_matrix(3, 3, &mut rng);
            let ops: Vec<Box<dyn LinearOperator>> = vec![
                Box::new(random_matrix(6, 4, &mut rng)),
                Box::new(KroneckerOperator::new(r, c)),
            ];
            for op in &ops {
                let u = random_vec(op.nrows(), &mut rng);
                let v = random_vec(op.ncols(), &mut rng);
                let lhs = dot(&u, &op.apply(&v));
                let rhs = dot(&v, &op.apply_transpose(&u));
                let scale = super::super::norm(&u)
                    * super::super::norm(&v)
                    * op.to_dense().frobenius_norm();
                assert!((lhs - rhs).abs() <= 1e-10 * scale);
            }
        }
    }

    #[test]
    fn kronecker_svd_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let op =
            KroneckerOperator::new(random_matrix(4, 4, &mut rng), random_matrix(3, 3, &mut rng));
        let svd = op.svd().unwrap();
        assert!(svd.singular_values.windows(2).all(|w| w[0] >= w[1]));
        let dense = op.to_dense();
        let err = svd.reconstruct().sub(&dense).unwrap().frobenius_norm();
        assert!(err <= 1e-10 * dense.frobenius_norm());
        let direct = jacobi_svd(&dense).unwrap();
        for (a, b) in svd.singular_values.iter().zip(&direct.singular_values) {
            assert!((a - b).abs() <= 1e-10 * direct.singular_values[0]);
        }
    }
}
