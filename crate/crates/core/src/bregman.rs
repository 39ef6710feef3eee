//! The statistical preconditioner `φ(x) = (1/n) Σ ℓ(x; ζ_i) + (σ/2)‖x‖²`,
//! Bregman divergences and relative-condition constants.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{check_dim, Error, Result};
use crate::linalg::{axpy, dot, norm_sq, sub};
use crate::problem::LogRegProblem;

/// Smoothness data of `φ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiConstants {
    pub l_phi: f64,
    pub mu_phi: f64,
    pub l3: f64,
    pub l3_sample: f64,
}

impl PhiConstants {
    pub fn kappa(&self) -> f64 {
        self.l_phi / self.mu_phi
    }
}

#[derive(Debug, Clone)]
pub struct Preconditioner {
    local: LogRegProblem,
    sigma: f64,
    constants: PhiConstants,
}

impl Preconditioner {
    pub fn new(local: LogRegProblem, sigma: f64) -> Result<Self> {
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return Err(Error::Input(format!("sigma must be finite and >= 0, got {sigma}")));
        }
        let (l1, l2) = local.lambdas();
        let constants = if local.data().is_empty() {
            PhiConstants {
                l_phi: l1.max(l2) + sigma,
                mu_phi: l1.min(l2) + sigma,
                l3: 0.0,
                l3_sample: 0.0,
            }
        } else {
            let c = local.smoothness_constants()?;
            PhiConstants {
                l_phi: c.l_smooth + sigma,
                mu_phi: c.mu_strong + sigma,
                l3: c.l3,
                l3_sample: c.l3_sample,
            }
        };
        Ok(Self {
            local,
            sigma,
            constants,
        })
    }

    /// Builds `φ` from the first `n` rows of the dataset after a seeded shuffle.
    pub fn from_problem(problem: &LogRegProblem, n: usize, sigma: f64, seed: u64) -> Result<Self> {
        let total = problem.data().len();
        if n == 0 || n > total {
            return Err(Error::Input(format!(
                "preconditioning sample count must lie in [1, {total}], got {n}"
            )));
        }
        let rows = shuffled_indices(total, seed);
        Self::new(problem.restrict(&rows[..n]), sigma)
    }

    pub fn local_problem(&self) -> &LogRegProblem {
        &self.local
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn n(&self) -> usize {
        self.local.data().len()
    }

    pub fn dim(&self) -> usize {
        self.local.dim()
    }

    pub fn constants(&self) -> PhiConstants {
        self.constants
    }

    pub(crate) fn value_of(&self, x: &[f64]) -> f64 {
        self.local.value_of(x) + 0.5 * self.sigma * norm_sq(x)
    }

    pub(crate) fn grad_of(&self, x: &[f64]) -> Vec<f64> {
        let mut g = self.local.value_and_grad_of(x).1;
        axpy(self.sigma, x, &mut g);
        g
    }

    pub(crate) fn hvp_of(&self, x: &[f64], v: &[f64]) -> Vec<f64> {
        let mut out = self.local.hvp_of(x, v);
        axpy(self.sigma, v, &mut out);
        out
    }

    pub(crate) fn d3_of(&self, x: &[f64], h: &[f64]) -> Vec<f64> {
        self.local.d3_of(x, h)
    }

    pub(crate) fn div_of(&self, u: &[f64], x: &[f64]) -> f64 {
        let g = self.grad_of(u);
        let d = self.value_of(x) - self.value_of(u) - dot(&g, &sub(x, u));
        d.max(0.0)
    }

    pub fn phi_value(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dim(), x.len())?;
        Ok(self.value_of(x))
    }

    pub fn phi_gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim(), x.len())?;
        Ok(self.grad_of(x))
    }

    pub fn phi_hessian_vec(&self, x: &[f64], v: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim(), x.len())?;
        check_dim(self.dim(), v.len())?;
        Ok(self.hvp_of(x, v))
    }

    pub fn phi_third_bilinear(&self, x: &[f64], h: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim(), x.len())?;
        check_dim(self.dim(), h.len())?;
        Ok(self.d3_of(x, h))
    }

    /// `D_φ[u](x) = φ(x) − φ(u) − ⟨∇φ(u), x − u⟩`, clamped at zero against rounding.
    pub fn bregman_div(&self, u: &[f64], x: &[f64]) -> Result<f64> {
        check_dim(self.dim(), u.len())?;
        check_dim(self.dim(), x.len())?;
        Ok(self.div_of(u, x))
    }

    /// Samples `x − y = τ(u₊ − u)` configurations and records the largest
    /// `D_φ[y](x) / (τ² D_φ[u](u₊))`.
    pub fn triangle_scaling_check(&self, g: f64, samples: usize, seed: u64) -> Result<TriangleReport> {
        if !(g >= 1.0) {
            return Err(Error::Input(format!("triangle scaling constant must be >= 1, got {g}")));
        }
        Ok(self.triangle_ratio_sweep(g, samples, seed))
    }

    /// Same as [`Preconditioner::triangle_scaling_check`] without the `G ≥ 1` guard,
    /// so negative controls can probe impossible constants.
    pub fn triangle_ratio_sweep(&self, g: f64, samples: usize, seed: u64) -> TriangleReport {
        let d = self.dim();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let gauss = |rng: &mut ChaCha8Rng| -> Vec<f64> {
            (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
        };
        let mut report = TriangleReport {
            g,
            max_ratio: 0.0,
            evaluated: 0,
            skipped: 0,
            passed: true,
        };
        for _ in 0..samples {
            let u = gauss(&mut rng);
            let u_plus = gauss(&mut rng);
            let w = gauss(&mut rng);
            let tau: f64 = rng.random();
            let y: Vec<f64> = (0..d).map(|i| tau * u[i] + (1.0 - tau) * w[i]).collect();
            let x: Vec<f64> = (0..d).map(|i| tau * u_plus[i] + (1.0 - tau) * w[i]).collect();
            let base = tau * tau * self.div_of(&u, &u_plus);
            if base <= 0.0 || !base.is_finite() {
                report.skipped += 1;
                continue;
            }
            let ratio = self.div_of(&y, &x) / base;
            report.evaluated += 1;
            report.max_ratio = report.max_ratio.max(ratio);
        }
        report.passed = report.max_ratio <= g;
        report
    }
}

/// Outcome of a triangle-scaling sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriangleReport {
    pub g: f64,
    pub max_ratio: f64,
    pub evaluated: usize,
    pub skipped: usize,
    pub passed: bool,
}

/// `L_{F/φ}`, `μ_{F/φ}` and their ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelativeConstants {
    pub l_rel: f64,
    pub mu_rel: f64,
    pub kappa_rel: f64,
}

pub fn relative_constants(mu_f: f64, sigma: f64) -> Result<RelativeConstants> {
    if !(mu_f > 0.0) {
        return Err(Error::Input(format!("mu_F must be > 0, got {mu_f}")));
    }
    if !(sigma >= 0.0) {
        return Err(Error::Input(format!("sigma must be >= 0, got {sigma}")));
    }
    Ok(RelativeConstants {
        l_rel: 1.0,
        mu_rel: mu_f / (mu_f + 2.0 * sigma),
        kappa_rel: 1.0 + 2.0 * sigma / mu_f,
    })
}

/// Seeded permutation of `0..n`. Shared by the preconditioner and the worker
/// partitioner so both see the same shuffled order.
pub fn shuffled_indices(n: usize, seed: u64) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    idx
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{generate_synthetic, SparseDataset};

    fn quadratic_phi(d: usize) -> Preconditioner {
        let p = LogRegProblem::new(SparseDataset::empty(d), 0.0, 0.0).unwrap();
        Preconditioner::new(p, 1.0).unwrap()
    }

    #[test]
    fn pure_quadratic_values() {
        let phi = quadratic_phi(2);
        assert_eq!(phi.phi_value(&[3.0, 4.0]).unwrap(), 12.5);
        assert_eq!(phi.phi_gradient(&[3.0, 4.0]).unwrap(), vec![3.0, 4.0]);
        assert_eq!(phi.bregman_div(&[0.0, 0.0], &[3.0, 4.0]).unwrap(), 12.5);
        assert_eq!(phi.bregman_div(&[3.0, 4.0], &[3.0, 4.0]).unwrap(), 0.0);
    }

    #[test]
    fn ridge_gap() {
        let data = generate_synthetic(5, 30, 2, 1.0).unwrap();
        let p = LogRegProblem::new(data, 0.0, 0.0).unwrap();
        let a = Preconditioner::new(p.clone(), 1.0).unwrap();
        let b = Preconditioner::new(p, 0.0).unwrap();
        let x = [3.0, 4.0];
        let gap = a.phi_value(&x).unwrap() - b.phi_value(&x).unwrap();
        assert!((gap - 12.5).abs() < 1e-12);
        let gg = sub(&a.phi_gradient(&x).unwrap(), &b.phi_gradient(&x).unwrap());
        assert!((gg[0] - 3.0).abs() < 1e-12 && (gg[1] - 4.0).abs() < 1e-12);
    }

    #[test]
    fn zero_point_ln2() {
        let data = generate_synthetic(9, 20, 3, 1.0).unwrap();
        let phi = Preconditioner::new(LogRegProblem::new(data, 0.0, 0.0).unwrap(), 0.5).unwrap();
        assert!((phi.phi_value(&[0.0; 3]).unwrap() - std::f64::consts::LN_2).abs() < 1e-15);
    }

    #[test]
    fn relative_constant_examples() {
        let r = relative_constants(1.0, 0.0).unwrap();
        assert_eq!(r.mu_rel, 1.0);
        let r = relative_constants(1e-5, 2e-5).unwrap();
        assert!((r.mu_rel - 0.2).abs() < 1e-15);
        let r = relative_constants(1.0, 1.0).unwrap();
        assert!((r.mu_rel - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(r.kappa_rel, 3.0);
        assert!(relative_constants(0.0, 1.0).is_err());
    }

    #[test]
    fn triangle_check_quadratic() {
        let phi = quadratic_phi(4);
        let rep = phi.triangle_scaling_check(1.0 + 1e-12, 200, 1).unwrap();
        assert!((rep.max_ratio - 1.0).abs() < 1e-9, "{rep:?}");
        assert!(!phi.triangle_ratio_sweep(0.5, 50, 1).passed);
        assert!(phi.triangle_scaling_check(0.5, 50, 1).is_err());
    }

    #[test]
    fn from_problem_sample_count() {
        let data = generate_synthetic(2, 40, 3, 1.0).unwrap();
        let p = LogRegProblem::new(data, 0.1, 0.1).unwrap();
        let phi = Preconditioner::from_problem(&p, 10, 0.2, 7).unwrap();
        assert_eq!(phi.n(), 10);
        assert!((phi.constants().mu_phi - 0.3).abs() < 1e-15);
        assert!(Preconditioner::from_problem(&p, 41, 0.2, 7).is_err());
        assert!(Preconditioner::from_problem(&p, 0, 0.2, 7).is_err());
    }
}
