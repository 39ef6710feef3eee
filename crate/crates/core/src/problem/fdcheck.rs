use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use super::LogRegProblem;
use crate::error::{Error, Result};
use crate::linalg::{axpy, dist, norm, scale};

/// Settings for [`check_oracles`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdCheckConfig {
    pub points: usize,
    pub seed: u64,
    pub step: f64,
    /// Added to every analytic gradient coordinate; a negative control.
    pub gradient_perturbation: f64,
}

impl Default for FdCheckConfig {
    fn default() -> Self {
        Self {
            points: 10,
            seed: 0,
            step: 1e-5,
            gradient_perturbation: 0.0,
        }
    }
}

/// Worst relative errors of the analytic oracles against central differences.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FdReport {
    pub gradient: f64,
    pub hessian_vec: f64,
    pub third_order: f64,
    pub points: usize,
}

impl FdReport {
    pub const GRADIENT_TOL: f64 = 1e-6;
    pub const HESSIAN_VEC_TOL: f64 = 1e-5;
    pub const THIRD_ORDER_TOL: f64 = 1e-4;

    /// Names of the oracles whose error exceeds its tolerance.
    pub fn failures(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if !(self.gradient <= Self::GRADIENT_TOL) {
            out.push("gradient");
        }
        if !(self.hessian_vec <= Self::HESSIAN_VEC_TOL) {
            out.push("hessian_vec");
        }
        if !(self.third_order <= Self::THIRD_ORDER_TOL) {
            out.push("third_order");
        }
        out
    }
}

/// `‖a − b‖ / max(‖a‖, ‖b‖)`, zero when both vanish.
pub fn relative_error(a: &[f64], b: &[f64]) -> f64 {
    let den = norm(a).max(norm(b));
    if den == 0.0 {
        0.0
    } else {
        dist(a, b) / den
    }
}

/// Compares gradient, Hessian-vector product and third-order bilinear form
/// with central differences at standard normal points along unit directions.
pub fn check_oracles(problem: &LogRegProblem, cfg: &FdCheckConfig) -> Result<FdReport> {
    let d = problem.dim();
    if d == 0 {
        return Err(Error::Input("oracle check needs d > 0".into()));
    }
    if cfg.points == 0 || !(cfg.step > 0.0) {
        return Err(Error::Input("oracle check needs points > 0 and step > 0".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut normal = |n: usize| -> Vec<f64> { (0..n).map(|_| rng.sample(StandardNormal)).collect() };
    let h = cfg.step;
    let mut rep = FdReport {
        gradient: 0.0,
        hessian_vec: 0.0,
        third_order: 0.0,
        points: cfg.points,
    };
    for _ in 0..cfg.points {
        let x = normal(d);
        let v = normal(d);
        let v = scale(1.0 / norm(&v).max(f64::MIN_POSITIVE), &v);
        let shifted = |t: f64, dir: &[f64]| {
            let mut y = x.clone();
            axpy(t, dir, &mut y);
            y
        };

        let mut g = problem.gradient(&x)?;
        g.iter_mut().for_each(|gi| *gi += cfg.gradient_perturbation);
        let mut g_fd = vec![0.0; d];
        for (i, gi) in g_fd.iter_mut().enumerate() {
            let mut e = vec![0.0; d];
            e[i] = 1.0;
            let fp = problem.loss_value(&shifted(h, &e))?;
            let fm = problem.loss_value(&shifted(-h, &e))?;
            *gi = (fp - fm) / (2.0 * h);
        }
        rep.gradient = rep.gradient.max(relative_error(&g, &g_fd));

        let hv = problem.hessian_vec(&x, &v)?;
        let gp = problem.gradient(&shifted(h, &v))?;
        let gm = problem.gradient(&shifted(-h, &v))?;
        let hv_fd: Vec<f64> = gp.iter().zip(&gm).map(|(a, b)| (a - b) / (2.0 * h)).collect();
        rep.hessian_vec = rep.hessian_vec.max(relative_error(&hv, &hv_fd));

        let t3 = problem.third_deriv_bilinear(&x, &v)?;
        let hp = problem.hessian_vec(&shifted(h, &v), &v)?;
        let hm = problem.hessian_vec(&shifted(-h, &v), &v)?;
        let t3_fd: Vec<f64> = hp.iter().zip(&hm).map(|(a, b)| (a - b) / (2.0 * h)).collect();
        rep.third_order = rep.third_order.max(relative_error(&t3, &t3_fd));
    }
    Ok(rep)
}
