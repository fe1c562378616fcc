use super::{Breakdown, KrylovProcess};
use crate::error::{invalid, mismatch, Result};
use crate::linalg::{axpy, dot, norm, DenseMatrix, LinearOperator};

const BREAKDOWN_TOLERANCE: f64 = 1e-12;

/// Two-sided Lanczos decomposition `A V_m = V_{m+1} T_m` with
/// `W_m^T V_m = I` in exact arithmetic.
///
/// No reorthogonalization is performed: the three-term recurrences are run
/// as is, so bi-orthogonality degrades once Ritz values converge.
#[derive(Debug, Clone, PartialEq)]
pub struct BiLanczosDecomposition {
    v: Vec<Vec<f64>>,
    w: Vec<Vec<f64>>,
    // alphas[j] = α_{j+1}; betas[j] = β_{j+2}; deltas[j] = δ_{j+2}
    alphas: Vec<f64>,
    betas: Vec<f64>,
    deltas: Vec<f64>,
    beta0: f64,
    breakdown: Option<Breakdown>,
}

impl BiLanczosDecomposition {
    /// Starts with `v_1 = b / ||b||` and `w_1 = v_1`, so `(v_1, w_1) = 1`.
    pub fn start(b: &[f64]) -> Result<Self> {
        let beta0 = norm(b);
        if !(beta0 > 0.0) || !beta0.is_finite() {
            return Err(invalid(
                "bilanczos needs a non-zero, finite starting vector",
            ));
        }
        let v1: Vec<f64> = b.iter().map(|x| x / beta0).collect();
        // v1 has unit norm, so v1 / (v1, v1) is v1 itself.
        let w1 = v1.clone();
        Ok(Self {
            v: vec![v1],
            w: vec![w1],
            alphas: Vec::new(),
            betas: Vec::new(),
            deltas: Vec::new(),
            beta0,
            breakdown: None,
        })
    }

    pub fn left_basis(&self) -> &[Vec<f64>] {
        &self.w
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    /// Superdiagonal entries `β_2 .. β_{m+1}`.
    pub fn betas(&self) -> &[f64] {
        &self.betas
    }

    /// Subdiagonal entries `δ_2 .. δ_{m+1}`.
    pub fn deltas(&self) -> &[f64] {
        &self.deltas
    }

    /// Square `m x m` tridiagonal block.
    pub fn square_tridiagonal(&self) -> DenseMatrix {
        let m = self.steps();
        self.projected().submatrix(0, m, 0, m)
    }
}

impl KrylovProcess for BiLanczosDecomposition {
    fn steps(&self) -> usize {
        self.alphas.len()
    }

    fn basis(&self) -> &[Vec<f64>] {
        &self.v
    }

    fn projected(&self) -> DenseMatrix {
        let m = self.steps();
        let mut t = DenseMatrix::zeros(m + 1, m);
        for j in 0..m {
            t[(j, j)] = self.alphas[j];
            t[(j + 1, j)] = self.deltas[j];
            if j + 1 < m {
                t[(j, j + 1)] = self.betas[j];
            }
        }
        t
    }

    fn breakdown(&self) -> Option<Breakdown> {
        self.breakdown
    }

    fn beta(&self) -> f64 {
        self.beta0
    }

    fn extend<A: LinearOperator + ?Sized>(&mut self, op: &A) -> bool {
        if self.breakdown.is_some() {
            return false;
        }
        let j = self.steps();
        let (vj, wj) = (&self.v[j], &self.w[j]);

        let av = op.apply(vj);
        let av_norm = norm(&av);
        let alpha = dot(&av, wj);
        let mut v_hat = av;
        axpy(-alpha, vj, &mut v_hat);
        let mut w_hat = op.apply_transpose(wj);
        axpy(-alpha, wj, &mut w_hat);
        if j > 0 {
            axpy(-self.betas[j - 1], &self.v[j - 1], &mut v_hat);
            axpy(-self.deltas[j - 1], &self.w[j - 1], &mut w_hat);
        }

        self.alphas.push(alpha);
        let ip = dot(&v_hat, &w_hat);
        let (nv, nw) = (norm(&v_hat), norm(&w_hat));
        if nv <= BREAKDOWN_TOLERANCE * av_norm || nv == 0.0 {
            self.deltas.push(0.0);
            self.betas.push(0.0);
            self.breakdown = Some(Breakdown::Invariant);
            return false;
        }
        if ip.abs() <= BREAKDOWN_TOLERANCE * nv * nw {
            self.deltas.push(0.0);
            self.betas.push(0.0);
            self.breakdown = Some(Breakdown::Serious);
            return false;
        }

        let delta = ip.abs().sqrt();
        // Equal to ip / delta; written this way so that beta == delta
        // exactly whenever the inner product is positive.
        let beta = delta.copysign(ip);
        v_hat.iter_mut().for_each(|x| *x /= delta);
        w_hat.iter_mut().for_each(|x| *x /= beta);
        self.deltas.push(delta);
        self.betas.push(beta);
        self.v.push(v_hat);
        self.w.push(w_hat);
        true
    }
}

/// Runs up to `m` two-sided Lanczos steps on `A` from `b`.
pub fn bilanczos<A: LinearOperator + ?Sized>(
    op: &A,
    b: &[f64],
    m: usize,
) -> Result<BiLanczosDecomposition> {
    if !op.is_square() {
        return Err(mismatch("bilanczos needs a square operator"));
    }
    if b.len() != op.ncols() {
        return Err(mismatch(format!(
            "starting vector has length {}, operator is {}x{}",
            b.len(),
            op.nrows(),
            op.ncols()
        )));
    }
    if m == 0 {
        return Err(invalid("bilanczos needs at least one step"));
    }
    let mut dec = BiLanczosDecomposition::start(b)?;
    for _ in 0..m {
        if !dec.extend(op) {
            break;
        }
    }
    Ok(dec)
}
