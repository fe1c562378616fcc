use super::{norm, DenseMatrix};
use crate::error::{invalid, mismatch, Error, Result};

/// Pivots at or below this multiple of `max |R|` count as zero.
const PIVOT_TOLERANCE: f64 = 1e-14;

/// Full Householder QR of a tall matrix.
///
/// Returns a square orthogonal `Q` (`rows x rows`) and an upper trapezoidal
/// `R` (`rows x cols`) with `M = Q R`. The diagonal of `R` is made
/// non-negative by flipping the sign of matching rows of `R` and columns of
/// `Q`, so the factorization is unique for full-rank input.
pub fn householder_qr(m: &DenseMatrix) -> Result<(DenseMatrix, DenseMatrix)> {
    let (rows, cols) = (m.rows(), m.cols());
    if rows < cols {
        return Err(mismatch(format!(
            "householder_qr needs rows >= cols, got {rows}x{cols}"
        )));
    }
    if !m.is_finite() {
        return Err(invalid("householder_qr input has non-finite entries"));
    }

    let mut r = m.clone();
    // Householder vectors, v_k lives in rows k.. of column k.
    let mut reflectors: Vec<Option<Vec<f64>>> = Vec::with_capacity(cols);

    for k in 0..cols.min(rows.saturating_sub(1)) {
        let x: Vec<f64> = (k..rows).map(|i| r[(i, k)]).collect();
        let x_norm = norm(&x);
        if x_norm == 0.0 {
            reflectors.push(None);
            continue;
        }
        let alpha = if x[0] >= 0.0 { -x_norm } else { x_norm };
        let mut v = x;
        v[0] -= alpha;
        let v_norm_sq: f64 = v.iter().map(|a| a * a).sum();
        if v_norm_sq == 0.0 {
            reflectors.push(None);
            continue;
        }
        for j in k..cols {
            let s: f64 = (k..rows).map(|i| v[i - k] * r[(i, j)]).sum();
            let f = 2.0 * s / v_norm_sq;
            for i in k..rows {
                r[(i, j)] -= f * v[i - k];
            }
        }
        for i in (k + 1)..rows {
            r[(i, k)] = 0.0;
        }
        reflectors.push(Some(v));
    }

    // Q = H_0 H_1 ... H_{p-1}, accumulated right to left onto the identity.
    let mut q = DenseMatrix::identity(rows);
    for (k, v) in reflectors.iter().enumerate().rev() {
        let Some(v) = v else { continue };
        let v_norm_sq: f64 = v.iter().map(|a| a * a).sum();
        for j in 0..rows {
            let s: f64 = (k..rows).map(|i| v[i - k] * q[(i, j)]).sum();
            if s == 0.0 {
                continue;
            }
            let f = 2.0 * s / v_norm_sq;
            for i in k..rows {
                q[(i, j)] -= f * v[i - k];
            }
        }
    }

    for k in 0..cols {
        if r[(k, k)] < 0.0 {
            for j in k..cols {
                r[(k, j)] = -r[(k, j)];
            }
            for i in 0..rows {
                q[(i, k)] = -q[(i, k)];
            }
        }
    }

    Ok((q, r))
}

/// Back substitution for `R y = c` with `R` square upper triangular.
pub fn solve_upper_triangular(r: &DenseMatrix, c: &[f64]) -> Result<Vec<f64>> {
    let n = r.rows();
    if r.cols() != n {
        return Err(mismatch(format!(
            "triangular solve needs a square matrix, got {}x{}",
            n,
            r.cols()
        )));
    }
    if c.len() != n {
        return Err(mismatch(format!(
            "triangular solve with {n}x{n} matrix and rhs of length {}",
            c.len()
        )));
    }
    let threshold = PIVOT_TOLERANCE * r.max_abs();
    let mut y = vec![0.0; n];
    for i in (0..n).rev() {
        let pivot = r[(i, i)];
        if pivot.abs() <= threshold || pivot == 0.0 {
            return Err(Error::Singular {
                index: i,
                value: pivot,
            });
        }
        let tail: f64 = ((i + 1)..n).map(|j| r[(i, j)] * y[j]).sum();
        y[i] = (c[i] - tail) / pivot;
    }
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rows: usize, cols: usize, seed: u64) -> DenseMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        DenseMatrix::from_fn(rows, cols, |_, _| rng.random_range(-1.0..1.0))
    }

    fn check_qr(m: &DenseMatrix, tol: f64) {
        let (q, r) = householder_qr(m).unwrap();
        let scale = m.frobenius_norm().max(1.0);
        assert!(q.matmul(&r).unwrap().max_abs_diff(m) <= tol * scale);
        let qtq = q.transpose().matmul(&q).unwrap();
        assert!(qtq.max_abs_diff(&DenseMatrix::identity(m.rows())) <= tol);
        for i in 0..r.rows() {
            for j in 0..r.cols().min(i) {
                assert_eq!(r[(i, j)], 0.0);
            }
        }
        for k in 0..r.cols() {
            assert!(r[(k, k)] >= 0.0);
        }
    }

    #[test]
    fn identity_factors_trivially() {
        let (q, r) = householder_qr(&DenseMatrix::identity(3)).unwrap();
        assert!(q.max_abs_diff(&DenseMatrix::identity(3)) < 1e-15);
        assert!(r.max_abs_diff(&DenseMatrix::identity(3)) < 1e-15);
    }

    #[test]
    fn pythagorean_column() {
        let m = DenseMatrix::from_rows(&[vec![3.0], vec![4.0]]).unwrap();
        let (q, r) = householder_qr(&m).unwrap();
        assert!((r[(0, 0)] - 5.0).abs() < 1e-15);
        assert_eq!(r[(1, 0)], 0.0);
        assert!((q[(0, 0)] - 0.6).abs() < 1e-15);
        assert!((q[(1, 0)] - 0.8).abs() < 1e-15);
    }

    #[test]
    fn seeded_six_by_four_reconstructs() {
        let m = random_matrix(6, 4, 7);
        let (q, r) = householder_qr(&m).unwrap();
        let qr = q.matmul(&r).unwrap();
        for i in 0..6 {
            for j in 0..4 {
                assert!((qr[(i, j)] - m[(i, j)]).abs() <= 1e-12);
            }
        }
        check_qr(&m, 1e-12);
    }

    #[test]
    fn rank_deficient_and_zero_columns() {
        let mut m = random_matrix(5, 3, 3);
        for i in 0..5 {
            m[(i, 1)] = 0.0;
        }
        check_qr(&m, 1e-12);
        check_qr(&DenseMatrix::zeros(4, 2), 1e-12);
    }

    #[test]
    fn wide_matrix_rejected() {
        assert!(matches!(
            householder_qr(&DenseMatrix::zeros(2, 3)),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn back_substitution() {
        let r = DenseMatrix::from_rows(&[vec![2.0, 1.0], vec![0.0, 4.0]]).unwrap();
        assert_eq!(
            solve_upper_triangular(&r, &[4.0, 8.0]).unwrap(),
            vec![1.0, 2.0]
        );
        let c = [0.3, -1.2, 5.0];
        assert_eq!(
            solve_upper_triangular(&DenseMatrix::identity(3), &c).unwrap(),
            c.to_vec()
        );
    }

    #[test]
    fn zero_pivot_is_singular() {
        let r = DenseMatrix::from_rows(&[vec![2.0, 1.0], vec![0.0, 0.0]]).unwrap();
        assert!(matches!(
            solve_upper_triangular(&r, &[1.0, 1.0]),
            Err(Error::Singular { index: 1, .. })
        ));
        let tiny = DenseMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1e-15]]).unwrap();
        assert!(solve_upper_triangular(&tiny, &[1.0, 1.0]).is_err());
    }

    #[test]
    fn qr_property_over_seeded_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for seed in 0..100 {
            let cols = rng.random_range(1..=30);
            let rows = rng.random_range(cols..=50);
            check_qr(&random_matrix(rows, cols, seed), 1e-12);
        }
    }
}
