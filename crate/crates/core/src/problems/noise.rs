use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::ProblemInstance;
use crate::error::{invalid, Result};
use crate::linalg::{norm, scale};

/// Noisy observation `b = b_exact + e`.
#[derive(Debug, Clone, PartialEq)]
pub struct NoisyData {
    pub b: Vec<f64>,
    pub e: Vec<f64>,
    /// `v = 100 ||e|| / ||b_exact||`.
    pub noise_level_percent: f64,
    pub seed: u64,
}

impl NoisyData {
    pub fn noise_norm(&self) -> f64 {
        norm(&self.e)
    }
}

/// Adds Gaussian white noise scaled to `||e|| = (v / 100) ||b_exact||`.
///
/// Samples come from ChaCha8 seeded with `seed`, so the result is a pure
/// function of `(problem, level_percent, seed)`.
pub fn add_noise(p: &ProblemInstance, level_percent: f64, seed: u64) -> Result<NoisyData> {
    if !(level_percent >= 0.0) || !level_percent.is_finite() {
        return Err(invalid(format!(
            "noise level must be a finite percentage >= 0, got {level_percent}"
        )));
    }
    let n = p.b_exact.len();
    let mut e = vec![0.0; n];
    if level_percent > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        e.iter_mut()
            .for_each(|x| *x = StandardNormal.sample(&mut rng));
        let target = level_percent / 100.0 * norm(&p.b_exact);
        let current = norm(&e);
        scale(target / current, &mut e);
    }
    let b = p.b_exact.iter().zip(&e).map(|(x, y)| x + y).collect();
    Ok(NoisyData {
        b,
        e,
        noise_level_percent: level_percent,
        seed,
    })
}
