use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::logreg::sigmoid;
use super::SparseDataset;
use crate::error::{Error, Result};

/// Gaussian features at randomly sampled coordinates, labels drawn from a
/// planted logistic model `P(η = +1 | ξ) = σ(⟨w, ξ⟩)` with `w ~ N(0, I)`.
///
/// The generator is a seeded ChaCha stream, so a given `(seed, n, d, density)`
/// always yields the same dataset bit for bit.
pub fn generate_synthetic(seed: u64, n: usize, d: usize, density: f64) -> Result<SparseDataset> {
    if n == 0 || d == 0 {
        return Err(Error::Input(format!(
            "synthetic data needs N > 0 and d > 0 (got N={n}, d={d})"
        )));
    }
    if !(density > 0.0 && density <= 1.0) {
        return Err(Error::Input(format!("density must lie in (0, 1], got {density}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
    let mut rows = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let mut row = Vec::new();
        let mut margin = 0.0;
        for (j, wj) in w.iter().enumerate() {
            if density >= 1.0 || rng.random::<f64>() < density {
                let v: f64 = rng.sample(StandardNormal);
                if v != 0.0 {
                    margin += wj * v;
                    row.push((j, v));
                }
            }
        }
        let y = if rng.random::<f64>() < sigmoid(margin) { 1.0 } else { -1.0 };
        rows.push(row);
        labels.push(y);
    }
    SparseDataset::from_rows(rows, labels, d)
}
