use super::{dot, norm, DenseMatrix};
use crate::error::{invalid, Error, Result};

const MAX_SWEEPS: usize = 50;

/// Thin singular value decomposition `M = U diag(s) V^T`.
///
/// `U` is `rows x k`, `V` is `cols x k` with `k = min(rows, cols)`, and the
/// singular values are sorted non-increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct SvdResult {
    pub u: DenseMatrix,
    pub singular_values: Vec<f64>,
    pub v: DenseMatrix,
}

impl SvdResult {
    /// Number of singular values strictly greater than zero.
    pub fn positive_count(&self) -> usize {
        self.singular_values
            .iter()
            .take_while(|&&s| s > 0.0)
            .count()
    }

    pub fn reconstruct(&self) -> DenseMatrix {
        let k = self.singular_values.len();
        let us = DenseMatrix::from_fn(self.u.rows(), k, |i, j| {
            self.u[(i, j)] * self.singular_values[j]
        });
        us.matmul(&self.v.transpose())
            .expect("factor shapes agree by construction")
    }
}

/// One-sided (Hestenes) Jacobi SVD.
///
/// Column pairs are rotated until every pair is orthogonal to working
/// precision relative to the product of their norms, which keeps tiny
/// singular values accurate to high relative precision.
pub fn jacobi_svd(m: &DenseMatrix) -> Result<SvdResult> {
    if m.rows() == 0 || m.cols() == 0 {
        return Err(invalid("jacobi_svd needs a non-empty matrix"));
    }
    if !m.is_finite() {
        return Err(invalid("jacobi_svd input has non-finite entries"));
    }
    if m.rows() < m.cols() {
        let t = jacobi_svd(&m.transpose())?;
        return Ok(SvdResult {
            u: t.v,
            singular_values: t.singular_values,
            v: t.u,
        });
    }

    let (rows, cols) = (m.rows(), m.cols());
    let mut a: Vec<Vec<f64>> = (0..cols).map(|j| m.column(j)).collect();
    let mut v: Vec<Vec<f64>> = (0..cols)
        .map(|j| {
            let mut e = vec![0.0; cols];
            e[j] = 1.0;
            e
        })
        .collect();

    let tol = f64::EPSILON * (rows as f64).sqrt();
    let mut converged = false;
    let mut worst = 0.0;
    for _ in 0..MAX_SWEEPS {
        worst = 0.0_f64;
        let mut rotated = false;
        for p in 0..cols {
            for q in (p + 1)..cols {
                let alpha = dot(&a[p], &a[p]);
                let beta = dot(&a[q], &a[q]);
                let gamma = dot(&a[p], &a[q]);
                if gamma == 0.0 || alpha == 0.0 || beta == 0.0 {
                    continue;
                }
                let off = gamma.abs() / (alpha.sqrt() * beta.sqrt());
                worst = worst.max(off);
                if off <= tol {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(&mut a, p, q, c, s);
                rotate(&mut v, p, q, c, s);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence {
            sweeps: MAX_SWEEPS,
            off_diagonal: worst,
        });
    }

    let mut order: Vec<(f64, usize)> = a.iter().map(|c| norm(c)).zip(0..cols).collect();
    order.sort_by(|x, y| y.0.total_cmp(&x.0).then(x.1.cmp(&y.1)));

    let mut u_cols: Vec<Vec<f64>> = Vec::with_capacity(cols);
    let mut missing = Vec::new();
    for (slot, &(sigma, j)) in order.iter().enumerate() {
        if sigma > f64::MIN_POSITIVE {
            u_cols.push(a[j].iter().map(|x| x / sigma).collect());
        } else {
            u_cols.push(vec![0.0; rows]);
            missing.push(slot);
        }
    }
    complete_orthonormal(&mut u_cols, &missing);

    let singular_values: Vec<f64> = order
        .iter()
        .map(|&(s, _)| if s > f64::MIN_POSITIVE { s } else { 0.0 })
        .collect();
    let v_sorted: Vec<Vec<f64>> = order.iter().map(|&(_, j)| v[j].clone()).collect();

    Ok(SvdResult {
        u: DenseMatrix::from_columns(&u_cols)?,
        singular_values,
        v: DenseMatrix::from_columns(&v_sorted)?,
    })
}

fn rotate(cols: &mut [Vec<f64>], p: usize, q: usize, c: f64, s: f64) {
    let (head, tail) = cols.split_at_mut(q);
    let (cp, cq) = (&mut head[p], &mut tail[0]);
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let (xp, xq) = (*x, *y);
        *x = c * xp - s * xq;
        *y = s * xp + c * xq;
    }
}

/// Fills the listed (zero) columns with unit vectors orthogonal to all others.
fn complete_orthonormal(cols: &mut [Vec<f64>], missing: &[usize]) {
    if missing.is_empty() {
        return;
    }
    let n = cols[0].len();
    let mut candidate = 0;
    for &slot in missing {
        while candidate < n {
            let mut e = vec![0.0; n];
            e[candidate] = 1.0;
            candidate += 1;
            for _ in 0..2 {
                for (k, c) in cols.iter().enumerate() {
                    if k != slot {
                        let h = dot(c, &e);
                        super::axpy(-h, c, &mut e);
                    }
                }
            }
            let len = norm(&e);
            if len > 1e-8 {
                cols[slot] = e.into_iter().map(|x| x / len).collect();
                break;
            }
        }
    }
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

    fn check_invariants(m: &DenseMatrix, svd: &SvdResult) {
        let k = m.rows().min(m.cols());
        assert!(svd.singular_values.windows(2).all(|w| w[0] >= w[1]));
        assert!(svd.singular_values.iter().all(|&s| s >= 0.0));
        let utu = svd.u.transpose().matmul(&svd.u).unwrap();
        let vtv = svd.v.transpose().matmul(&svd.v).unwrap();
        assert!(utu.max_abs_diff(&DenseMatrix::identity(k)) <= 1e-10);
        assert!(vtv.max_abs_diff(&DenseMatrix::identity(k)) <= 1e-10);
        let resid = svd.reconstruct().sub(m).unwrap().frobenius_norm();
        assert!(resid <= 1e-10 * m.frobenius_norm().max(f64::MIN_POSITIVE));
    }

    /// Eigenvalues of a symmetric matrix by cyclic two-sided Jacobi rotations.
    /// Independent of the one-sided column algorithm under test.
    fn symmetric_eigenvalues(s: &DenseMatrix) -> Vec<f64> {
        let n = s.rows();
        let mut a = s.clone();
        for _ in 0..100 {
            let off: f64 = (0..n)
                .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
                .map(|(i, j)| a[(i, j)] * a[(i, j)])
                .sum();
            if off < 1e-30 {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    if a[(p, q)].abs() < 1e-300 {
                        continue;
                    }
                    let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * a[(p, q)]);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let sn = t * c;
                    for k in 0..n {
                        let (akp, akq) = (a[(k, p)], a[(k, q)]);
                        a[(k, p)] = c * akp - sn * akq;
                        a[(k, q)] = sn * akp + c * akq;
                    }
                    for k in 0..n {
                        let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                        a[(p, k)] = c * apk - sn * aqk;
                        a[(q, k)] = sn * apk + c * aqk;
                    }
                }
            }
        }
        let mut eig: Vec<f64> = (0..n).map(|i| a[(i, i)]).collect();
        eig.sort_by(|x, y| y.total_cmp(x));
        eig
    }

    #[test]
    fn diagonal_matrix() {
        let m = DenseMatrix::diagonal(&[1.0, 3.0, 2.0]);
        let svd = jacobi_svd(&m).unwrap();
        assert_eq!(svd.singular_values, vec![3.0, 2.0, 1.0]);
        check_invariants(&m, &svd);
    }

    #[test]
    fn rank_one_outer_product() {
        let u = [1.0, -2.0, 0.5, 3.0];
        let v = [2.0, 1.0, -1.0];
        let m = DenseMatrix::from_fn(4, 3, |i, j| u[i] * v[j]);
        let svd = jacobi_svd(&m).unwrap();
        let expected = norm(&u) * norm(&v);
        assert!((svd.singular_values[0] - expected).abs() <= 1e-12 * expected);
        assert!(svd.singular_values[1..]
            .iter()
            .all(|&s| s <= 1e-12 * expected));
        check_invariants(&m, &svd);
    }

    #[test]
    fn zero_matrix_has_orthonormal_factors() {
        let m = DenseMatrix::zeros(3, 2);
        let svd = jacobi_svd(&m).unwrap();
        assert_eq!(svd.singular_values, vec![0.0, 0.0]);
        let utu = svd.u.transpose().matmul(&svd.u).unwrap();
        assert!(utu.max_abs_diff(&DenseMatrix::identity(2)) <= 1e-12);
    }

    #[test]
    fn squared_singular_values_match_gram_eigenvalues() {
        let m = random_matrix(6, 4, 11);
        let svd = jacobi_svd(&m).unwrap();
        let eig = symmetric_eigenvalues(&m.transpose().matmul(&m).unwrap());
        for (s, l) in svd.singular_values.iter().zip(&eig) {
            assert!((s * s - l).abs() <= 1e-8 * l.abs());
        }
        check_invariants(&m, &svd);
    }

    #[test]
    fn transpose_swaps_factors() {
        let m = random_matrix(7, 4, 5);
        let a = jacobi_svd(&m).unwrap();
        let b = jacobi_svd(&m.transpose()).unwrap();
        for (x, y) in a.singular_values.iter().zip(&b.singular_values) {
            assert!((x - y).abs() <= 1e-10);
        }
        assert_eq!(b.u.rows(), 4);
        assert_eq!(b.v.rows(), 7);
        check_invariants(&m.transpose(), &b);
    }

    #[test]
    fn wide_and_tall_random() {
        for (seed, (r, c)) in [(1, (10, 3)), (2, (3, 10)), (3, (12, 12)), (4, (1, 5))].into_iter() {
            let m = random_matrix(r, c, seed);
            check_invariants(&m, &jacobi_svd(&m).unwrap());
        }
    }

    #[test]
    fn rejects_non_finite() {
        let mut m = DenseMatrix::identity(2);
        m[(0, 1)] = f64::NAN;
        assert!(jacobi_svd(&m).is_err());
    }
}
