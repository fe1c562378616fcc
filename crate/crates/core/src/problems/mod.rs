//! Test problems and noise injection.
//!
//! Every generator returns a [`ProblemInstance`] whose exact data is defined
//! as `b_exact = A x_true`, so the discrete system is consistent and all
//! reconstruction error comes from noise and regularization.

mod blur;
mod integral;
mod noise;

pub use blur::{blur2d, gaussian_toeplitz, test_image, DEFAULT_BAND, DEFAULT_SIGMA};
pub use integral::{phillips, shaw};
pub use noise::{add_noise, NoisyData};

use std::fmt;
use std::sync::Arc;

use crate::linalg::LinearOperator;

#[derive(Clone)]
pub struct ProblemInstance {
    pub operator: Arc<dyn LinearOperator>,
    pub x_true: Vec<f64>,
    pub b_exact: Vec<f64>,
    pub name: String,
    /// `(height, width)` for image problems; vectors are column-major.
    pub image_dims: Option<(usize, usize)>,
}

impl ProblemInstance {
    pub fn new(
        name: impl Into<String>,
        operator: Arc<dyn LinearOperator>,
        x_true: Vec<f64>,
        image_dims: Option<(usize, usize)>,
    ) -> Self {
        let b_exact = operator.apply(&x_true);
        Self {
            operator,
            x_true,
            b_exact,
            name: name.into(),
            image_dims,
        }
    }

    pub fn size(&self) -> usize {
        self.x_true.len()
    }
}

impl fmt::Debug for ProblemInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemInstance")
            .field("name", &self.name)
            .field("n_rows", &self.operator.nrows())
            .field("n_cols", &self.operator.ncols())
            .field("kind", &self.operator.kind())
            .field("image_dims", &self.image_dims)
            .finish()
    }
}
