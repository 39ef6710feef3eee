use super::accelerated::{basic_hyperfast, HyperfastConfig};
use super::SmoothOracle;
use crate::error::{Error, Result};
use crate::linalg::{norm, norm_sq};

/// Restart schedule for a `μ`-strongly convex objective.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RestartScheduleStrong {
    /// Initial distance bound `R₀ = 2R`.
    pub r0: f64,
    pub mu: f64,
    /// Rate constant of the basic method (48 or 35).
    pub c: f64,
    pub t_max: usize,
    /// Optional ball `‖z‖ ≤ radius` every restart point must stay inside.
    pub ball: Option<f64>,
}

impl RestartScheduleStrong {
    pub fn new(r0: f64, mu: f64) -> Self {
        Self {
            r0,
            mu,
            c: 48.0,
            t_max: 60,
            ball: None,
        }
    }

    pub fn radius(&self, t: usize) -> f64 {
        self.r0 * 0.5f64.powi(t as i32)
    }

    /// `N_t = max{⌈(8cL₃R_t²/μ)^{1/5}⌉, 1}`.
    pub fn steps(&self, l3: f64, t: usize) -> usize {
        let r = self.radius(t);
        steps_from(8.0 * self.c * l3 * r * r / self.mu)
    }

    /// Guaranteed gap after `t` restarts, `2μR²·2^{−2t} = μR_t²/2`.
    pub fn certified_gap(&self, t: usize) -> f64 {
        0.5 * self.mu * self.radius(t).powi(2)
    }
}

/// Restart schedule for a uniformly convex objective of degree `q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RestartScheduleUniform {
    pub q: f64,
    pub sigma_q: f64,
    /// Upper bound on `f(z₀) − f*`.
    pub delta0: f64,
    pub c_hat: f64,
    pub k_max: usize,
}

impl RestartScheduleUniform {
    pub fn new(q: f64, sigma_q: f64, delta0: f64) -> Self {
        Self {
            q,
            sigma_q,
            delta0,
            c_hat: 48.0,
            k_max: 200,
        }
    }

    pub fn delta(&self, k: usize) -> f64 {
        self.delta0 * 0.5f64.powi(k as i32)
    }

    /// `N_k = max{⌈(2ĉL₃q^{4/q}σ_q^{−4/q}Δ_k^{(4−q)/q})^{1/5}⌉, 1}`.
    pub fn steps(&self, l3: f64, k: usize) -> usize {
        let q = self.q;
        let base = 2.0 * self.c_hat * l3 * q.powf(4.0 / q) * self.sigma_q.powf(-4.0 / q)
            * self.delta(k).powf((4.0 - q) / q);
        steps_from(base)
    }

    fn validate(&self) -> Result<()> {
        if !(2.0..=4.0).contains(&self.q) {
            return Err(Error::Input(format!("degree q must lie in [2, 4], got {}", self.q)));
        }
        if !(self.sigma_q > 0.0 && self.delta0 > 0.0) {
            return Err(Error::Input("sigma_q and Delta0 must be positive".into()));
        }
        Ok(())
    }
}

fn steps_from(base: f64) -> usize {
    // Guard the ceiling against a fifth root landing a hair above an integer.
    let root = base.max(0.0).powf(0.2);
    let rounded = root.round();
    let n = if (root - rounded).abs() <= 1e-12 * rounded.max(1.0) {
        rounded
    } else {
        root.ceil()
    };
    (n as usize).max(1)
}

/// One completed restart.
#[derive(Debug, Clone, PartialEq)]
pub struct RestartRecord {
    /// Index of the point produced by this restart (1-based).
    pub index: usize,
    /// `R_t` (strong) or `Δ_k` (uniform) attached to the produced point.
    pub scale: f64,
    pub steps: usize,
    pub certified_gap: f64,
    pub point: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RestartOutcome {
    pub point: Vec<f64>,
    pub total_steps: usize,
    pub tensor_steps: usize,
    pub inner_iters: usize,
    pub restarts: Vec<RestartRecord>,
    /// Whether the loop ended on the gradient certificate rather than the schedule.
    pub gradient_certified: bool,
    /// Whether the loop ended because the iterate could no longer move in floating point.
    pub stalled: bool,
}

/// Restarted scheme for strongly convex objectives. Terminates once the
/// schedule certifies a gap of at most `target`, or earlier when
/// `‖∇f(z)‖²/(2μ) ≤ target`.
pub fn restart_strongly_convex<O: SmoothOracle + ?Sized>(
    oracle: &O,
    z0: &[f64],
    sched: &RestartScheduleStrong,
    target: f64,
    cfg: &HyperfastConfig,
) -> Result<RestartOutcome> {
    if !(sched.r0 > 0.0 && sched.mu > 0.0 && sched.c > 0.0) {
        return Err(Error::Input("restart schedule needs R0, mu, c > 0".into()));
    }
    let mut out = RestartOutcome {
        point: z0.to_vec(),
        total_steps: 0,
        tensor_steps: 0,
        inner_iters: 0,
        restarts: Vec::new(),
        gradient_certified: false,
        stalled: false,
    };
    let mut inner = *cfg;
    if target > 0.0 {
        inner.stop_grad = inner.stop_grad.max((2.0 * sched.mu * target).sqrt());
    }
    let l3 = oracle.l3();
    let mut t = 0;
    loop {
        if sched.certified_gap(t) <= target {
            return Ok(out);
        }
        if norm_sq(&oracle.grad(&out.point)) <= 2.0 * sched.mu * target {
            out.gradient_certified = true;
            return Ok(out);
        }
        if t >= sched.t_max {
            return Err(Error::NonConvergence {
                iterations: t,
                last_gap: sched.certified_gap(t),
            });
        }
        let n_t = sched.steps(l3, t);
        let run = basic_hyperfast(oracle, &out.point, n_t, &inner)?;
        out.total_steps += run.steps;
        out.tensor_steps += run.tensor_steps;
        out.inner_iters += run.inner_iters;
        out.point = run.point;
        t += 1;
        if let Some(radius) = sched.ball {
            let nz = norm(&out.point);
            if nz > radius {
                return Err(Error::OutsideBall { norm: nz, radius });
            }
        }
        out.restarts.push(RestartRecord {
            index: t,
            scale: sched.radius(t),
            steps: n_t,
            certified_gap: sched.certified_gap(t),
            point: out.point.clone(),
        });
        if run.stalled {
            out.stalled = true;
            return Ok(out);
        }
    }
}

/// Restarted scheme for objectives uniformly convex of degree `q ∈ [2, 4]`.
/// Runs until the guaranteed gap `Δ₀·2^{−k}` is at most `eps`.
pub fn restart_uniformly_convex<O: SmoothOracle + ?Sized>(
    oracle: &O,
    sched: &RestartScheduleUniform,
    z0: &[f64],
    eps: f64,
    cfg: &HyperfastConfig,
) -> Result<RestartOutcome> {
    sched.validate()?;
    let mut out = RestartOutcome {
        point: z0.to_vec(),
        total_steps: 0,
        tensor_steps: 0,
        inner_iters: 0,
        restarts: Vec::new(),
        gradient_certified: false,
        stalled: false,
    };
    let l3 = oracle.l3();
    let mut k = 0;
    while sched.delta(k) > eps {
        if k >= sched.k_max {
            return Err(Error::NonConvergence {
                iterations: k,
                last_gap: sched.delta(k),
            });
        }
        let n_k = sched.steps(l3, k);
        let run = basic_hyperfast(oracle, &out.point, n_k, cfg)?;
        out.total_steps += run.steps;
        out.tensor_steps += run.tensor_steps;
        out.inner_iters += run.inner_iters;
        out.point = run.point;
        k += 1;
        out.restarts.push(RestartRecord {
            index: k,
            scale: sched.delta(k),
            steps: n_k,
            certified_gap: sched.delta(k),
            point: out.point.clone(),
        });
        if run.stalled {
            out.stalled = true;
            break;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperfast::testfns::{QuarticNorm, StronglyConvexQuartic};

    #[test]
    fn step_counts() {
        let s = RestartScheduleStrong::new(1.0, 2.0);
        // L₃ = μ, R_t = 1
        assert_eq!(s.steps(2.0, 0), 4);
        let u = RestartScheduleUniform::new(4.0, 0.5, 1.0);
        for k in 0..6 {
            assert_eq!(u.steps(0.5, k), 4);
        }
    }

    #[test]
    fn target_already_met() {
        let f = StronglyConvexQuartic::new(vec![0.0; 2], 1.0);
        let s = RestartScheduleStrong::new(2.0, 1.0);
        // 2μR² with R = 1
        let out = restart_strongly_convex(&f, &[0.5, 0.5], &s, 2.0, &HyperfastConfig::default()).unwrap();
        assert!(out.restarts.is_empty());
        assert_eq!(out.point, vec![0.5, 0.5]);
        let u = RestartScheduleUniform::new(4.0, 0.25, 1.0);
        let out = restart_uniformly_convex(&QuarticNorm::new(vec![0.0]), &u, &[1.0], 1.0, &HyperfastConfig::default())
            .unwrap();
        assert!(out.restarts.is_empty());
    }

    #[test]
    fn strong_restarts_halve_radius() {
        let f = StronglyConvexQuartic::new(vec![0.2, -0.4, 0.1], 0.5);
        let z0 = [1.0, 0.5, -0.5];
        let r = crate::linalg::dist(&z0, &f.center);
        let s = RestartScheduleStrong::new(2.0 * r, 0.5);
        let out = restart_strongly_convex(&f, &z0, &s, 1e-12, &HyperfastConfig::default()).unwrap();
        for rec in &out.restarts {
            assert!(f.value(&rec.point) <= rec.certified_gap);
        }
        assert!(f.value(&out.point) <= 1e-12);
    }

    #[test]
    fn ball_violation_is_reported() {
        let f = StronglyConvexQuartic::new(vec![5.0], 1.0);
        let mut s = RestartScheduleStrong::new(20.0, 1.0);
        s.ball = Some(1.0);
        let err = restart_strongly_convex(&f, &[0.0], &s, 1e-10, &HyperfastConfig::default()).unwrap_err();
        assert!(matches!(err, Error::OutsideBall { .. }));
    }

    #[test]
    fn uniform_rejects_bad_degree() {
        let u = RestartScheduleUniform::new(5.0, 1.0, 1.0);
        assert!(restart_uniformly_convex(&QuarticNorm::new(vec![0.0]), &u, &[1.0], 0.1, &HyperfastConfig::default())
            .is_err());
    }
}
