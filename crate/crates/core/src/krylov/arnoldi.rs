use super::{Breakdown, KrylovProcess};
use crate::error::{invalid, mismatch, Result};
use crate::linalg::{axpy, dot, norm, DenseMatrix, LinearOperator};

const BREAKDOWN_TOLERANCE: f64 = 1e-12;

/// Arnoldi decomposition `A V_m = V_{m+1} H_m` with orthonormal `V`.
///
/// Orthogonalization is modified Gram-Schmidt followed by one full
/// reorthogonalization pass.
#[derive(Debug, Clone, PartialEq)]
pub struct ArnoldiDecomposition {
    basis: Vec<Vec<f64>>,
    // Column j of H, holding h_{1,j} .. h_{j+1,j}.
    h_columns: Vec<Vec<f64>>,
    beta: f64,
    breakdown: Option<Breakdown>,
    // Running estimate of ||A||_2 from max_j ||A v_j||.
    norm_estimate: f64,
}

impl ArnoldiDecomposition {
    /// Starts a zero-step decomposition with `v_1 = r0 / ||r0||`.
    pub fn start(r0: &[f64]) -> Result<Self> {
        let beta = norm(r0);
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(invalid("arnoldi needs a non-zero, finite starting vector"));
        }
        Ok(Self {
            basis: vec![r0.iter().map(|x| x / beta).collect()],
            h_columns: Vec::new(),
            beta,
            breakdown: None,
            norm_estimate: 0.0,
        })
    }

    /// Square `m x m` leading block of `H`.
    pub fn square_hessenberg(&self) -> DenseMatrix {
        let m = self.steps();
        self.projected().submatrix(0, m, 0, m)
    }

    /// Decomposition restricted to its first `k` steps.
    pub fn truncated(&self, k: usize) -> Self {
        let k = k.min(self.steps());
        let breakdown = if k == self.steps() {
            self.breakdown
        } else {
            None
        };
        let n_basis = if k == self.steps() {
            self.basis.len()
        } else {
            k + 1
        };
        Self {
            basis: self.basis[..n_basis].to_vec(),
            h_columns: self.h_columns[..k].to_vec(),
            beta: self.beta,
            breakdown,
            norm_estimate: self.norm_estimate,
        }
    }
}

impl KrylovProcess for ArnoldiDecomposition {
    fn steps(&self) -> usize {
        self.h_columns.len()
    }

    fn basis(&self) -> &[Vec<f64>] {
        &self.basis
    }

    fn projected(&self) -> DenseMatrix {
        let m = self.steps();
        let mut h = DenseMatrix::zeros(m + 1, m);
        for (j, col) in self.h_columns.iter().enumerate() {
            for (i, &v) in col.iter().enumerate() {
                h[(i, j)] = v;
            }
        }
        h
    }

    fn breakdown(&self) -> Option<Breakdown> {
        self.breakdown
    }

    fn beta(&self) -> f64 {
        self.beta
    }

    fn extend<A: LinearOperator + ?Sized>(&mut self, op: &A) -> bool {
        if self.breakdown.is_some() {
            return false;
        }
        let j = self.steps();
        let mut w = op.apply(&self.basis[j]);
        self.norm_estimate = self.norm_estimate.max(norm(&w));

        let mut h = vec![0.0; j + 2];
        for _pass in 0..2 {
            for (i, v) in self.basis.iter().enumerate() {
                let c = dot(&w, v);
                axpy(-c, v, &mut w);
                h[i] += c;
            }
        }
        let h_next = norm(&w);
        // ||v_j|| = 1, so the tolerance is relative to ||A||.
        if h_next <= BREAKDOWN_TOLERANCE * self.norm_estimate || h_next == 0.0 {
            h[j + 1] = 0.0;
            self.h_columns.push(h);
            self.breakdown = Some(Breakdown::Invariant);
            return false;
        }
        h[j + 1] = h_next;
        self.h_columns.push(h);
        w.iter_mut().for_each(|x| *x /= h_next);
        self.basis.push(w);
        true
    }
}

/// Runs up to `m` Arnoldi steps on `A` from `r0`.
///
/// Stops early on breakdown, in which case the returned decomposition has
/// fewer steps and [`KrylovProcess::breakdown`] is set.
pub fn arnoldi<A: LinearOperator + ?Sized>(
    op: &A,
    r0: &[f64],
    m: usize,
) -> Result<ArnoldiDecomposition> {
    if !op.is_square() {
        return Err(mismatch("arnoldi needs a square operator"));
    }
    if r0.len() != op.ncols() {
        return Err(mismatch(format!(
            "starting vector has length {}, operator is {}x{}",
            r0.len(),
            op.nrows(),
            op.ncols()
        )));
    }
    if m == 0 {
        return Err(invalid("arnoldi needs at least one step"));
    }
    let mut dec = ArnoldiDecomposition::start(r0)?;
    for _ in 0..m {
        if !dec.extend(op) {
            break;
        }
    }
    Ok(dec)
}
