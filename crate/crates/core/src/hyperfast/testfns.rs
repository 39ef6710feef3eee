//! Closed-form test objectives with known minimizers.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::SmoothOracle;
use crate::linalg::{dot, norm_sq, sub};

/// `f(x) = ¼‖x − a‖⁴`: uniformly convex of degree 4 with `σ₄ = 1/4`, `L₃ = 6`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuarticNorm {
    pub center: Vec<f64>,
}

impl QuarticNorm {
    pub fn new(center: Vec<f64>) -> Self {
        Self { center }
    }

    pub const SIGMA_4: f64 = 0.25;
}

impl SmoothOracle for QuarticNorm {
    fn dim(&self) -> usize {
        self.center.len()
    }
    fn value(&self, x: &[f64]) -> f64 {
        let r2 = norm_sq(&sub(x, &self.center));
        0.25 * r2 * r2
    }
    fn grad(&self, x: &[f64]) -> Vec<f64> {
        let r = sub(x, &self.center);
        let r2 = norm_sq(&r);
        r.iter().map(|ri| r2 * ri).collect()
    }
    fn hvp(&self, x: &[f64], v: &[f64]) -> Vec<f64> {
        let r = sub(x, &self.center);
        let (r2, rv) = (norm_sq(&r), dot(&r, v));
        r.iter().zip(v).map(|(ri, vi)| r2 * vi + 2.0 * rv * ri).collect()
    }
    fn d3_bilinear(&self, x: &[f64], h: &[f64]) -> Vec<f64> {
        let r = sub(x, &self.center);
        let (h2, rh) = (norm_sq(h), dot(&r, h));
        r.iter().zip(h).map(|(ri, hi)| 4.0 * rh * hi + 2.0 * h2 * ri).collect()
    }
    fn l3(&self) -> f64 {
        6.0
    }
}

/// `f(x) = Σ ¼(x_i − a_i)⁴ + (μ/2)‖x − a‖²`: `μ`-strongly convex, `L₃ = 6`, `f* = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct StronglyConvexQuartic {
    pub center: Vec<f64>,
    pub mu: f64,
}

impl StronglyConvexQuartic {
    pub fn new(center: Vec<f64>, mu: f64) -> Self {
        Self { center, mu }
    }
}

impl SmoothOracle for StronglyConvexQuartic {
    fn dim(&self) -> usize {
        self.center.len()
    }
    fn value(&self, x: &[f64]) -> f64 {
        x.iter()
            .zip(&self.center)
            .map(|(xi, ai)| {
                let r = xi - ai;
                0.25 * r.powi(4) + 0.5 * self.mu * r * r
            })
            .sum()
    }
    fn grad(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(&self.center)
            .map(|(xi, ai)| {
                let r = xi - ai;
                r * r * r + self.mu * r
            })
            .collect()
    }
    fn hvp(&self, x: &[f64], v: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(&self.center)
            .zip(v)
            .map(|((xi, ai), vi)| (3.0 * (xi - ai).powi(2) + self.mu) * vi)
            .collect()
    }
    fn d3_bilinear(&self, x: &[f64], h: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(&self.center)
            .zip(h)
            .map(|((xi, ai), hi)| 6.0 * (xi - ai) * hi * hi)
            .collect()
    }
    fn l3(&self) -> f64 {
        6.0
    }
}

/// `f(x) = ½⟨Qx, x⟩ − ⟨b, x⟩` with symmetric positive definite `Q`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticFn {
    pub q: DMatrix<f64>,
    pub b: DVector<f64>,
}

impl QuadraticFn {
    pub fn new(rows: Vec<Vec<f64>>, b: Vec<f64>) -> Self {
        let d = b.len();
        let q = DMatrix::from_fn(d, d, |i, j| rows[i][j]);
        Self {
            q,
            b: DVector::from_vec(b),
        }
    }

    pub fn from_matrix(q: DMatrix<f64>, b: DVector<f64>) -> Self {
        Self { q, b }
    }

    /// Random rotation of `diag(μ, …, L)` (log-spaced spectrum) with a
    /// standard normal `b`, from a seeded ChaCha stream.
    pub fn random(seed: u64, d: usize, mu: f64, l: f64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = DMatrix::from_fn(d, d, |_, _| rng.sample::<f64, _>(StandardNormal));
        let qr = g.qr().q();
        let ratio = if d > 1 { (l / mu).ln() / (d - 1) as f64 } else { 0.0 };
        let spectrum = DVector::from_fn(d, |i, _| mu * (ratio * i as f64).exp());
        let q = &qr * DMatrix::from_diagonal(&spectrum) * qr.transpose();
        let q = 0.5 * (&q + q.transpose());
        let b = DVector::from_fn(d, |_, _| rng.sample::<f64, _>(StandardNormal));
        Self { q, b }
    }

    pub fn minimizer(&self) -> Vec<f64> {
        self.q
            .clone()
            .cholesky()
            .expect("quadratic must be positive definite")
            .solve(&self.b)
            .iter()
            .copied()
            .collect()
    }

    pub fn min_value(&self) -> f64 {
        self.value(&self.minimizer())
    }

    fn apply(&self, v: &[f64]) -> Vec<f64> {
        (&self.q * DVector::from_column_slice(v)).iter().copied().collect()
    }
}

impl SmoothOracle for QuadraticFn {
    fn dim(&self) -> usize {
        self.b.len()
    }
    fn value(&self, x: &[f64]) -> f64 {
        0.5 * dot(&self.apply(x), x) - dot(self.b.as_slice(), x)
    }
    fn grad(&self, x: &[f64]) -> Vec<f64> {
        sub(&self.apply(x), self.b.as_slice())
    }
    fn hvp(&self, _x: &[f64], v: &[f64]) -> Vec<f64> {
        self.apply(v)
    }
    fn d3_bilinear(&self, x: &[f64], _h: &[f64]) -> Vec<f64> {
        vec![0.0; x.len()]
    }
    fn l3(&self) -> f64 {
        0.0
    }
    fn l3_hint(&self) -> f64 {
        1e-12
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_quadratic_spectrum() {
        let f = QuadraticFn::random(4, 6, 0.5, 40.0);
        let mut ev: Vec<f64> = f.q.clone().symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        assert!((ev[0] - 0.5).abs() < 1e-10 && (ev[5] - 40.0).abs() < 1e-9);
        assert_eq!(f, QuadraticFn::random(4, 6, 0.5, 40.0));
    }

    fn fd_check<O: SmoothOracle>(f: &O, x: &[f64], h: &[f64]) {
        let eps = 1e-5;
        let xp: Vec<f64> = x.iter().zip(h).map(|(a, b)| a + eps * b).collect();
        let xm: Vec<f64> = x.iter().zip(h).map(|(a, b)| a - eps * b).collect();
        let dv = (f.value(&xp) - f.value(&xm)) / (2.0 * eps);
        assert!((dv - dot(&f.grad(x), h)).abs() < 1e-6);
        let hv = f.hvp(x, h);
        let fd: Vec<f64> = f.grad(&xp).iter().zip(f.grad(&xm)).map(|(a, b)| (a - b) / (2.0 * eps)).collect();
        assert!(crate::linalg::max_abs_diff(&hv, &fd) < 1e-6);
        let d3 = f.d3_bilinear(x, h);
        let fd3: Vec<f64> = f.hvp(&xp, h).iter().zip(f.hvp(&xm, h)).map(|(a, b)| (a - b) / (2.0 * eps)).collect();
        assert!(crate::linalg::max_abs_diff(&d3, &fd3) < 1e-6);
    }

    #[test]
    fn derivatives_match_differences() {
        let x = [0.4, -1.1, 0.7];
        let h = [0.3, 0.5, -0.9];
        fd_check(&QuarticNorm::new(vec![0.1, 0.2, -0.3]), &x, &h);
        fd_check(&StronglyConvexQuartic::new(vec![1.0, 0.0, -2.0], 0.5), &x, &h);
        let q = QuadraticFn::new(
            vec![vec![2.0, 0.1, 0.0], vec![0.1, 1.0, 0.2], vec![0.0, 0.2, 3.0]],
            vec![1.0, 2.0, 3.0],
        );
        fd_check(&q, &x, &h);
        assert!(norm_sq(&q.grad(&q.minimizer())) < 1e-24);
    }
}
