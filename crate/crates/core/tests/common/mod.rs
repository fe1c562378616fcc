#![allow(dead_code)]

use krr_core::linalg::{dot, norm, DenseMatrix, LinearOperator};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn random_matrix(rows: usize, cols: usize, seed: u64) -> DenseMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    DenseMatrix::from_fn(rows, cols, |_, _| rng.random_range(-1.0..1.0))
}

pub fn random_vector(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

/// Random matrix plus `shift * I`: well conditioned for a shift of a few units.
pub fn shifted_random(n: usize, shift: f64, seed: u64) -> DenseMatrix {
    let r = random_matrix(n, n, seed);
    DenseMatrix::from_fn(n, n, |i, j| r[(i, j)] + if i == j { shift } else { 0.0 })
}

/// Orthonormal basis of the given vectors by twice-applied classical
/// Gram-Schmidt, dropping numerically dependent directions.
pub fn orthonormalize(vectors: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for v in vectors {
        let scale = norm(v);
        let mut w = v.clone();
        for _ in 0..2 {
            for q in &basis {
                let c = dot(q, &w);
                w.iter_mut().zip(q).for_each(|(wi, qi)| *wi -= c * qi);
            }
        }
        let nw = norm(&w);
        if nw > 1e-10 * scale {
            basis.push(w.iter().map(|x| x / nw).collect());
        }
    }
    basis
}

/// `||x - P x|| / ||x||` for the orthogonal projector onto `span(basis)`.
pub fn projection_residual(x: &[f64], basis: &[Vec<f64>]) -> f64 {
    let q = orthonormalize(basis);
    let mut r = x.to_vec();
    for _ in 0..2 {
        for qi in &q {
            let c = dot(qi, &r);
            r.iter_mut().zip(qi).for_each(|(ri, v)| *ri -= c * v);
        }
    }
    norm(&r) / norm(x)
}

/// `[v, A v, ..., A^(k-1) v]`
pub fn krylov_vectors<A: LinearOperator + ?Sized>(op: &A, v: &[f64], k: usize) -> Vec<Vec<f64>> {
    let mut out = vec![v.to_vec()];
    while out.len() < k {
        let next = op.apply(out.last().unwrap());
        out.push(next);
    }
    out
}

/// Gaussian elimination with partial pivoting.
pub fn dense_solve(a: &DenseMatrix, b: &[f64]) -> Vec<f64> {
    let n = a.rows();
    let mut m: Vec<Vec<f64>> = (0..n).map(|i| a.row(i).to_vec()).collect();
    let mut rhs = b.to_vec();
    for k in 0..n {
        let p = (k..n)
            .max_by(|&i, &j| m[i][k].abs().total_cmp(&m[j][k].abs()))
            .unwrap();
        m.swap(k, p);
        rhs.swap(k, p);
        for i in k + 1..n {
            let f = m[i][k] / m[k][k];
            for j in k..n {
                m[i][j] -= f * m[k][j];
            }
            rhs[i] -= f * rhs[k];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|j| m[i][j] * x[j]).sum();
        x[i] = (rhs[i] - s) / m[i][i];
    }
    x
}

pub fn relative_diff(a: &[f64], b: &[f64]) -> f64 {
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    norm(&d) / norm(b).max(f64::MIN_POSITIVE)
}

/// `max |GᵀG - I|` for the columns of `cols`.
pub fn gram_error(cols: &[Vec<f64>]) -> f64 {
    let mut worst = 0.0f64;
    for (i, a) in cols.iter().enumerate() {
        for (j, b) in cols.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((dot(a, b) - target).abs());
        }
    }
    worst
}

/// Columns `0..k` of `V Q[.., ..k]` where `Q` has as many rows as `V` has vectors used.
pub fn rotate_basis(v: &[Vec<f64>], q: &DenseMatrix, k: usize) -> Vec<Vec<f64>> {
    (0..k)
        .map(|c| {
            let mut out = vec![0.0; v[0].len()];
            for r in 0..q.rows() {
                out.iter_mut()
                    .zip(&v[r])
                    .for_each(|(o, x)| *o += q[(r, c)] * x);
            }
            out
        })
        .collect()
}
