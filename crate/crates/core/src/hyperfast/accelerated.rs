use super::tensor::{tensor_step, InnerConfig, TensorOutcome};
use super::SmoothOracle;
use crate::error::{Error, Result};
use crate::linalg::{axpy, combine, norm, sub};

/// Knobs of the accelerated tensor scheme.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HyperfastConfig {
    pub inner: InnerConfig,
    /// Initial `L₃` guess for the line search; `None` uses the oracle's hint.
    pub l3_start: Option<f64>,
    /// Maximum `L₃` adjustments per outer step.
    pub max_l3_trials: usize,
    /// Maximum tensor steps spent searching for the step size `λ`.
    pub max_lambda_evals: usize,
    /// Large-step acceptance: `‖λ∇f(y) + y − x̃‖ ≤ ms_sigma·‖y − x̃‖`.
    pub ms_sigma: f64,
    /// Stop early once `‖∇f(y)‖` drops to this level (0 disables).
    pub stop_grad: f64,
}

impl Default for HyperfastConfig {
    fn default() -> Self {
        Self {
            inner: InnerConfig::default(),
            l3_start: None,
            max_l3_trials: 20,
            max_lambda_evals: 50,
            ms_sigma: 0.9,
            stop_grad: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HyperfastOutcome {
    pub point: Vec<f64>,
    /// Outer steps actually taken (fewer than requested only on early stop).
    pub steps: usize,
    pub tensor_steps: usize,
    pub inner_iters: usize,
    pub l3_trials: usize,
    /// Accumulated `A_N`; `f(y_N) − f* ≤ ‖z₀ − x*‖² / (2A_N)`.
    pub a_total: f64,
    pub l3_last: f64,
    pub stopped_early: bool,
    /// Set when progress stopped at the resolution of the iterate or of the tensor-step solver.
    pub stalled: bool,
}

struct Probe {
    lambda: f64,
    a: f64,
    anchor: Vec<f64>,
    step: TensorOutcome,
    rho: f64,
}

/// Accelerated hybrid proximal extragradient scheme whose inner proximal
/// step is the third-order tensor step.
///
/// Each outer step picks `λ` so that `ρ = λ·L·‖y − x̃‖²/2 ∈ [½, 1]`, then
/// accepts the tensor step if the large-step condition holds; `L` is halved
/// after an accepted step and doubled after a rejected one.
pub fn basic_hyperfast<O: SmoothOracle + ?Sized>(
    oracle: &O,
    z0: &[f64],
    n_steps: usize,
    cfg: &HyperfastConfig,
) -> Result<HyperfastOutcome> {
    if n_steps == 0 {
        return Err(Error::Input("basic_hyperfast needs at least one step".into()));
    }
    let mut l3 = cfg.l3_start.unwrap_or_else(|| oracle.l3_hint());
    if !(l3 > 0.0 && l3.is_finite()) {
        return Err(Error::Input(format!("initial L3 estimate must be positive, got {l3}")));
    }
    let mut out = HyperfastOutcome {
        point: z0.to_vec(),
        steps: 0,
        tensor_steps: 0,
        inner_iters: 0,
        l3_trials: 0,
        a_total: 0.0,
        l3_last: l3,
        stopped_early: false,
        stalled: false,
    };
    let mut v = z0.to_vec();
    let mut lambda_guess: Option<f64> = None;

    for _ in 0..n_steps {
        if cfg.stop_grad > 0.0 && norm(&oracle.grad(&out.point)) <= cfg.stop_grad {
            out.stopped_early = true;
            break;
        }
        let mut accepted = None;
        for _ in 0..cfg.max_l3_trials.max(1) {
            out.l3_trials += 1;
            let mut work = (0, 0);
            let probe = search_lambda(oracle, &out.point, out.a_total, &v, l3, lambda_guess, cfg, &mut work)?;
            out.tensor_steps += work.0;
            out.inner_iters += work.1;
            if probe.step.step.iter().all(|&s| s == 0.0) {
                // x̃ is already stationary for the model.
                accepted = Some(probe);
                break;
            }
            let gy = oracle.grad(&probe.step.point);
            let mut resid = sub(&probe.step.point, &probe.anchor);
            let r = norm(&resid);
            if r <= STALL_RTOL * norm(&probe.anchor) {
                out.stalled = true;
                break;
            }
            let resolution = cfg.inner.tol_abs + cfg.inner.tol_rel * norm(&oracle.grad(&probe.anchor));
            if norm(&gy) <= 2.0 * resolution {
                if oracle.value(&probe.step.point) <= oracle.value(&out.point) {
                    out.point = probe.step.point.clone();
                }
                out.stalled = true;
                break;
            }
            axpy(probe.lambda, &gy, &mut resid);
            if norm(&resid) <= cfg.ms_sigma * r {
                accepted = Some(probe);
                l3 *= 0.5;
                break;
            }
            l3 *= 2.0;
        }
        if out.stalled {
            out.stopped_early = true;
            break;
        }
        let probe = accepted.ok_or(Error::NonConvergence {
            iterations: cfg.max_l3_trials,
            last_gap: f64::NAN,
        })?;
        if probe.step.step.iter().all(|&s| s == 0.0) {
            out.point = probe.step.point;
            out.stopped_early = true;
            out.steps += 1;
            break;
        }
        let gy = oracle.grad(&probe.step.point);
        axpy(-probe.a, &gy, &mut v);
        out.a_total += probe.a;
        out.point = probe.step.point;
        out.steps += 1;
        out.l3_last = l3;
        lambda_guess = Some(probe.lambda);
    }
    Ok(out)
}

fn probe_at<O: SmoothOracle + ?Sized>(
    oracle: &O,
    point: &[f64],
    big_a: f64,
    v: &[f64],
    l3: f64,
    lambda: f64,
    inner: &InnerConfig,
    work: &mut (usize, usize),
) -> Result<Probe> {
    let a = 0.5 * (lambda + (lambda * lambda + 4.0 * lambda * big_a).sqrt());
    let anchor = combine(big_a / (big_a + a), point, a / (big_a + a), v);
    let step = tensor_step(oracle, &anchor, l3, inner)?;
    work.0 += 1;
    work.1 += step.iters;
    let r = norm(&step.step);
    Ok(Probe {
        lambda,
        a,
        anchor,
        rho: 0.5 * lambda * l3 * r * r,
        step,
    })
}

const RHO_TARGET: f64 = 0.75;
const STALL_RTOL: f64 = 256.0 * f64::EPSILON;

#[allow(clippy::too_many_arguments)]
fn search_lambda<O: SmoothOracle + ?Sized>(
    oracle: &O,
    point: &[f64],
    big_a: f64,
    v: &[f64],
    l3: f64,
    guess: Option<f64>,
    cfg: &HyperfastConfig,
    work: &mut (usize, usize),
) -> Result<Probe> {
    let mut lambda = guess.unwrap_or(1.0 / l3);
    let mut lo: Option<(f64, f64)> = None;
    let mut hi: Option<(f64, f64)> = None;
    let mut best: Option<Probe> = None;
    for _ in 0..cfg.max_lambda_evals.max(1) {
        let mut probe = probe_at(oracle, point, big_a, v, l3, lambda, &cfg.inner, work)?;
        let r2 = crate::linalg::norm_sq(&probe.step.step);
        if r2 == 0.0 {
            return Ok(probe);
        }
        if big_a == 0.0 {
            // With nothing accumulated the anchor does not depend on λ.
            probe.lambda = 2.0 * RHO_TARGET / (l3 * r2);
            probe.a = probe.lambda;
            probe.rho = RHO_TARGET;
            return Ok(probe);
        }
        let rho = probe.rho;
        if (0.5..=1.0).contains(&rho) {
            return Ok(probe);
        }
        if rho < 0.5 {
            lo = Some((lambda, rho));
        } else {
            hi = Some((lambda, rho));
        }
        let score = |p: &Probe| (p.rho / RHO_TARGET).ln().abs();
        if best.as_ref().map_or(true, |b| score(&probe) < score(b)) {
            best = Some(probe);
        }
        lambda = match (lo, hi) {
            (Some((l1, r1)), Some((l2, r2))) => {
                let (x1, x2) = (l1.ln(), l2.ln());
                let (y1, y2) = (r1.ln(), r2.ln());
                let t = ((RHO_TARGET.ln() - y1) / (y2 - y1)).clamp(0.1, 0.9);
                (x1 + t * (x2 - x1)).exp()
            }
            _ => lambda * (RHO_TARGET / rho).clamp(1e-2, 1e2),
        };
    }
    best.ok_or_else(|| Error::Internal("lambda search produced no probe".into()))
}
