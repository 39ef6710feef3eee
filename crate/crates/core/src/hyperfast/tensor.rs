use super::quartic::QuarticSolver;
use super::SmoothOracle;
use crate::error::{Error, Result};
use crate::linalg::{add, axpy, dot, norm, norm_sq};

/// Relative smoothness / strong convexity of the tensor model with respect to
/// `a(s) = ½⟨Hs,s⟩ + (L/8)‖s‖⁴`.
const REL_SMOOTH: f64 = 1.0 + std::f64::consts::FRAC_1_SQRT_2;

/// Stopping rule for the Bregman gradient loop inside a tensor step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InnerConfig {
    /// Stop once `‖∇Ω(s)‖ ≤ tol_abs + tol_rel·‖∇f(x)‖`.
    pub tol_abs: f64,
    pub tol_rel: f64,
    pub max_iters: usize,
    /// Residual tolerance handed to the quartic solver.
    pub quartic_tol: f64,
}

impl Default for InnerConfig {
    fn default() -> Self {
        Self {
            tol_abs: 0.0,
            tol_rel: 1e-9,
            max_iters: 500,
            quartic_tol: 1e-11,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TensorOutcome {
    pub point: Vec<f64>,
    pub step: Vec<f64>,
    pub iters: usize,
    pub model_grad_norm: f64,
    pub model_value: f64,
    pub converged: bool,
}

/// `Ω(s) = ⟨g,s⟩ + ½⟨Hs,s⟩ + ⅙D³f(x)[s]³ + (L/8)‖s‖⁴`.
pub fn tensor_model_value<O: SmoothOracle + ?Sized>(oracle: &O, x: &[f64], s: &[f64], l3: f64) -> f64 {
    let g = oracle.grad(x);
    let hs = oracle.hvp(x, s);
    let d3 = oracle.d3_bilinear(x, s);
    let r2 = norm_sq(s);
    dot(&g, s) + 0.5 * dot(&hs, s) + dot(&d3, s) / 6.0 + 0.125 * l3 * r2 * r2
}

/// Approximately minimizes the regularized third-order Taylor model at `x`
/// with Bregman gradient steps relative to `a`, each of which is a quartic
/// subproblem with the Hessian at `x`.
pub fn tensor_step<O: SmoothOracle + ?Sized>(
    oracle: &O,
    x: &[f64],
    l3: f64,
    cfg: &InnerConfig,
) -> Result<TensorOutcome> {
    if !(l3 > 0.0) {
        return Err(Error::Input(format!("tensor step needs L > 0, got {l3}")));
    }
    let d = oracle.dim();
    let g = oracle.grad(x);
    let tol = cfg.tol_abs + cfg.tol_rel * norm(&g);
    let mut s = vec![0.0; d];
    let g_norm = norm(&g);
    if g_norm <= tol {
        return Ok(TensorOutcome {
            point: x.to_vec(),
            step: s,
            iters: 0,
            model_grad_norm: g_norm,
            model_value: 0.0,
            converged: true,
        });
    }
    let solver = QuarticSolver::new(d, |v| oracle.hvp(x, v));
    let half_l = 0.5 * l3;
    let mut iters = 0;
    loop {
        let hs = solver.apply(&s);
        let d3 = oracle.d3_bilinear(x, &s);
        let r2 = norm_sq(&s);
        let mut grad_a = hs.clone();
        axpy(half_l * r2, &s, &mut grad_a);
        let mut grad_model = add(&g, &grad_a);
        axpy(0.5, &d3, &mut grad_model);
        let gm = norm(&grad_model);
        let converged = gm <= tol;
        if converged || iters >= cfg.max_iters {
            let value = dot(&g, &s) + 0.5 * dot(&hs, &s) + dot(&d3, &s) / 6.0 + 0.125 * l3 * r2 * r2;
            return Ok(TensorOutcome {
                point: add(x, &s),
                step: s,
                iters,
                model_grad_norm: gm,
                model_value: value,
                converged,
            });
        }
        let c: Vec<f64> = grad_model
            .iter()
            .zip(&grad_a)
            .map(|(gm, ga)| gm / REL_SMOOTH - ga)
            .collect();
        s = solver.solve(&c, half_l, cfg.quartic_tol)?;
        iters += 1;
    }
}
