//! Third-order tensor steps implemented with second-order information, the
//! accelerated Hyperfast scheme and its restarted variants.

mod accelerated;
mod quartic;
mod restart;
mod tensor;
pub mod testfns;

pub use accelerated::{basic_hyperfast, HyperfastConfig, HyperfastOutcome};
pub use quartic::{quartic_subproblem, QuarticMethod, QuarticSolver};
pub use restart::{
    restart_strongly_convex, restart_uniformly_convex, RestartOutcome, RestartRecord,
    RestartScheduleStrong, RestartScheduleUniform,
};
pub use tensor::{tensor_model_value, tensor_step, InnerConfig, TensorOutcome};

use crate::bregman::Preconditioner;
use crate::error::{Error, Result};
use crate::problem::LogRegProblem;

/// A convex function with derivatives up to third order.
///
/// Methods take slices of length [`SmoothOracle::dim`] and do not re-validate them.
pub trait SmoothOracle {
    fn dim(&self) -> usize;
    fn value(&self, x: &[f64]) -> f64;
    fn grad(&self, x: &[f64]) -> Vec<f64>;
    fn hvp(&self, x: &[f64], v: &[f64]) -> Vec<f64>;
    /// `D³f(x)[h, h]`.
    fn d3_bilinear(&self, x: &[f64], h: &[f64]) -> Vec<f64>;
    /// Lipschitz constant of the third derivative.
    fn l3(&self) -> f64;
    /// Starting guess for the `L₃` line search. Defaults to [`SmoothOracle::l3`].
    fn l3_hint(&self) -> f64 {
        self.l3()
    }
}

impl<T: SmoothOracle + ?Sized> SmoothOracle for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn value(&self, x: &[f64]) -> f64 {
        (**self).value(x)
    }
    fn grad(&self, x: &[f64]) -> Vec<f64> {
        (**self).grad(x)
    }
    fn hvp(&self, x: &[f64], v: &[f64]) -> Vec<f64> {
        (**self).hvp(x, v)
    }
    fn d3_bilinear(&self, x: &[f64], h: &[f64]) -> Vec<f64> {
        (**self).d3_bilinear(x, h)
    }
    fn l3(&self) -> f64 {
        (**self).l3()
    }
    fn l3_hint(&self) -> f64 {
        (**self).l3_hint()
    }
}

/// The logistic objective as a smooth oracle. `l3` is `15‖AᵀA‖²`; the line
/// search starts from the tighter per-sample bound.
#[derive(Debug, Clone)]
pub struct LogisticOracle<'a> {
    problem: &'a LogRegProblem,
    l3: f64,
    l3_hint: f64,
}

impl<'a> LogisticOracle<'a> {
    pub fn new(problem: &'a LogRegProblem) -> Result<Self> {
        let c = problem.smoothness_constants()?;
        Ok(Self {
            problem,
            l3: c.l3,
            l3_hint: c.l3_sample.min(c.l3).max(f64::MIN_POSITIVE),
        })
    }
}

impl SmoothOracle for LogisticOracle<'_> {
    fn dim(&self) -> usize {
        self.problem.dim()
    }
    fn value(&self, x: &[f64]) -> f64 {
        self.problem.value_of(x)
    }
    fn grad(&self, x: &[f64]) -> Vec<f64> {
        self.problem.value_and_grad_of(x).1
    }
    fn hvp(&self, x: &[f64], v: &[f64]) -> Vec<f64> {
        self.problem.hvp_of(x, v)
    }
    fn d3_bilinear(&self, x: &[f64], h: &[f64]) -> Vec<f64> {
        self.problem.d3_of(x, h)
    }
    fn l3(&self) -> f64 {
        self.l3
    }
    fn l3_hint(&self) -> f64 {
        self.l3_hint
    }
}

impl SmoothOracle for Preconditioner {
    fn dim(&self) -> usize {
        Preconditioner::dim(self)
    }
    fn value(&self, x: &[f64]) -> f64 {
        self.value_of(x)
    }
    fn grad(&self, x: &[f64]) -> Vec<f64> {
        self.grad_of(x)
    }
    fn hvp(&self, x: &[f64], v: &[f64]) -> Vec<f64> {
        self.hvp_of(x, v)
    }
    fn d3_bilinear(&self, x: &[f64], h: &[f64]) -> Vec<f64> {
        self.d3_of(x, h)
    }
    fn l3(&self) -> f64 {
        self.constants().l3
    }
    fn l3_hint(&self) -> f64 {
        let c = self.constants();
        c.l3_sample.min(c.l3).max(f64::MIN_POSITIVE)
    }
}

/// Accuracy to which the auxiliary problem of outer step `k` must be solved:
/// `Δ_k = μ_φ (R_φ²)² / (2k² (2L_φR + 3θ)² (1 + A_{k+1} μ_{F/φ}))`.
#[allow(clippy::too_many_arguments)]
pub fn delta_tolerance(
    k: usize,
    mu_phi: f64,
    r_phi_sq: f64,
    l_phi: f64,
    r: f64,
    theta: f64,
    a_next: f64,
    mu_rel: f64,
) -> Result<f64> {
    if k == 0 {
        return Err(Error::Input("delta_tolerance is defined for k >= 1".into()));
    }
    let k = k as f64;
    let spread = 2.0 * l_phi * r + 3.0 * theta;
    Ok(mu_phi * r_phi_sq * r_phi_sq / (2.0 * k * k * spread * spread * (1.0 + a_next * mu_rel)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delta_tolerance_examples() {
        let d1 = delta_tolerance(1, 1.0, 1.0, 1.0, 1.0, 1.0, 0.0, 0.5).unwrap();
        assert!((d1 - 0.02).abs() < 1e-15);
        let d2 = delta_tolerance(2, 1.0, 1.0, 1.0, 1.0, 1.0, 0.0, 0.5).unwrap();
        assert!((d2 - d1 / 4.0).abs() < 1e-15);
        let mut last = d1;
        for a in [1.0, 10.0, 1e3, 1e9] {
            let d = delta_tolerance(1, 1.0, 1.0, 1.0, 1.0, 1.0, a, 0.5).unwrap();
            assert!(d < last);
            last = d;
        }
        assert!(delta_tolerance(0, 1.0, 1.0, 1.0, 1.0, 1.0, 0.0, 0.5).is_err());
    }
}
