//! Inexact statistically preconditioned accelerated gradient method.
//!
//! The outer loop is the adaptive accelerated method of [`crate::agm`]; the
//! model oracle aggregates full gradients across simulated workers and solves
//! each Bregman subproblem on the central node with restarted Hyperfast steps.

use std::time::Instant;

use serde::Serialize;

use crate::agm::{
    agm_step, ball_linear_min, AgmConfig, AgmState, InexactnessSchedule, ModelOracle,
    ProjectionProblem, StepRecord,
};
use crate::bregman::{relative_constants, Preconditioner};
use crate::distsim::{broadcast_gather, CommLedger, WorkerPool};
use crate::error::{check_dim, Error, Result};
use crate::hyperfast::{
    delta_tolerance, restart_strongly_convex, HyperfastConfig, RestartScheduleStrong, SmoothOracle,
};
use crate::linalg::{axpy, dot, norm, sub, ExactSum};
use crate::problem::LogRegProblem;

/// How the gradient bound `θ` entering the subproblem tolerance is obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThetaMode {
    User(f64),
    /// Twice the running maximum of `‖∇F‖/μ_{F/φ}` and `‖∇φ‖` over visited points.
    Online,
}

/// Running state behind [`ThetaMode::Online`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaEstimator {
    mode: ThetaMode,
    running: f64,
    observed: usize,
}

impl ThetaEstimator {
    pub const SAFETY: f64 = 2.0;

    pub fn new(mode: ThetaMode) -> Self {
        Self {
            mode,
            running: 0.0,
            observed: 0,
        }
    }

    pub fn observe(&mut self, grad_f_norm: f64, grad_phi_norm: f64, mu_rel: f64) {
        self.running = self.running.max(grad_f_norm / mu_rel).max(grad_phi_norm);
        self.observed += 1;
    }

    pub fn estimate(&self) -> Result<f64> {
        match self.mode {
            ThetaMode::User(theta) => Ok(theta),
            ThetaMode::Online if self.observed == 0 => {
                Err(Error::Input("online theta estimate needs at least one observation".into()))
            }
            ThetaMode::Online => Ok(Self::SAFETY * self.running),
        }
    }
}

/// `θ` from a list of `(‖∇F(x)‖, ‖∇φ(x)‖)` observations.
pub fn theta_estimate(mode: ThetaMode, observations: &[(f64, f64)], mu_rel: f64) -> Result<f64> {
    let mut est = ThetaEstimator::new(mode);
    for &(gf, gp) in observations {
        est.observe(gf, gp, mu_rel);
    }
    est.estimate()
}

/// Which third-derivative constant of `φ` drives the restart schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum L3Choice {
    /// `15‖AᵀA‖²`.
    Spectral,
    /// `(1/8)·(1/n)Σ‖ζ_i‖⁴`.
    PerSample,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InspagConfig {
    /// Radius with `x* ∈ B(0, R)`; `None` derives it from a gradient warm start.
    pub radius: Option<f64>,
    /// `R_φ²`; `None` uses `2L_φR²`.
    pub r_phi_sq: Option<f64>,
    pub m0: f64,
    pub n_precond: usize,
    pub sigma: f64,
    /// Maximum number of outer iterations.
    pub k_max: usize,
    /// Stop once `2L_φR²(1 + ln K)/A_K` falls to this level (0 disables).
    pub target: f64,
    pub theta: ThetaMode,
    pub c_rate: f64,
    pub seed: u64,
    pub workers: usize,
    pub parallel: bool,
    pub l3: L3Choice,
    pub hyperfast: HyperfastConfig,
    pub restart_t_max: usize,
    pub m_cap_factor: f64,
}

impl Default for InspagConfig {
    fn default() -> Self {
        Self {
            radius: None,
            r_phi_sq: None,
            m0: 1.0,
            n_precond: 500,
            sigma: 1e-3,
            k_max: 100,
            target: 1e-6,
            theta: ThetaMode::Online,
            c_rate: 48.0,
            seed: 0,
            workers: 4,
            parallel: true,
            l3: L3Choice::PerSample,
            hyperfast: HyperfastConfig::default(),
            restart_t_max: 200,
            m_cap_factor: 2f64.powi(60),
        }
    }
}

impl InspagConfig {
    /// Collects every violated precondition into one error.
    pub fn validate(&self, problem: &LogRegProblem) -> Result<()> {
        let mut issues = Vec::new();
        let n = problem.data().len();
        if let Some(r) = self.radius {
            if !(r > 0.0 && r.is_finite()) {
                issues.push(format!("radius must be positive (got {r})"));
            }
        }
        if let Some(r) = self.r_phi_sq {
            if !(r > 0.0 && r.is_finite()) {
                issues.push(format!("R_phi^2 must be positive (got {r})"));
            }
        }
        if !(self.m0 > 0.0) {
            issues.push(format!("M0 must be positive (got {})", self.m0));
        }
        if self.n_precond == 0 || self.n_precond > n {
            issues.push(format!("n_precond must lie in [1, {n}] (got {})", self.n_precond));
        }
        if !(self.sigma >= 0.0) {
            issues.push(format!("sigma must be >= 0 (got {})", self.sigma));
        }
        if self.workers == 0 || self.workers > n {
            issues.push(format!("workers must lie in [1, {n}] (got {})", self.workers));
        }
        if !(self.c_rate > 0.0) {
            issues.push(format!("c_rate must be positive (got {})", self.c_rate));
        }
        if !(self.target >= 0.0) {
            issues.push(format!("target must be >= 0 (got {})", self.target));
        }
        if let ThetaMode::User(t) = self.theta {
            if !(t > 0.0) {
                issues.push(format!("theta must be positive (got {t})"));
            }
        }
        let (l1, l2) = problem.lambdas();
        if !(l1.min(l2) > 0.0) {
            issues.push("both regularization weights must be positive".into());
        }
        if issues.is_empty() {
            Ok(())
        } else {
            Err(Error::Input(issues.join("; ")))
        }
    }
}

/// `Ψ(x) = ⟨linear_term, x⟩ + phi_scale·φ(x)`, the Bregman subproblem up to a constant.
#[derive(Debug, Clone)]
pub struct PsiProblem<'a> {
    pub linear_term: Vec<f64>,
    pub phi_scale: f64,
    pub precond: &'a Preconditioner,
    /// Third-derivative constant of `φ` used for `L_{Ψ,3} = phi_scale·l3_phi`.
    pub l3_phi: f64,
}

impl PsiProblem<'_> {
    pub fn mu(&self) -> f64 {
        self.phi_scale * self.precond.constants().mu_phi
    }

    pub fn smoothness(&self) -> f64 {
        self.phi_scale * self.precond.constants().l_phi
    }
}

impl SmoothOracle for PsiProblem<'_> {
    fn dim(&self) -> usize {
        self.linear_term.len()
    }
    fn value(&self, x: &[f64]) -> f64 {
        dot(&self.linear_term, x) + self.phi_scale * self.precond.value_of(x)
    }
    fn grad(&self, x: &[f64]) -> Vec<f64> {
        let mut g = self.linear_term.clone();
        axpy(self.phi_scale, &self.precond.grad_of(x), &mut g);
        g
    }
    fn hvp(&self, x: &[f64], v: &[f64]) -> Vec<f64> {
        self.precond.hvp_of(x, v).into_iter().map(|t| self.phi_scale * t).collect()
    }
    fn d3_bilinear(&self, x: &[f64], h: &[f64]) -> Vec<f64> {
        self.precond.d3_of(x, h).into_iter().map(|t| self.phi_scale * t).collect()
    }
    fn l3(&self) -> f64 {
        self.phi_scale * self.l3_phi
    }
    fn l3_hint(&self) -> f64 {
        self.phi_scale * SmoothOracle::l3_hint(self.precond).min(self.l3_phi.max(f64::MIN_POSITIVE))
    }
}

/// Assembles `Ψ_{k+1}` whose gradient equals that of
/// `α⟨∇F(y), x − y⟩ + (1 + A_kμ) D_φ[u_k](x) + αμ D_φ[y](x)`.
pub fn build_psi<'a>(
    alpha: f64,
    grad_f_y: &[f64],
    a_k: f64,
    mu_rel: f64,
    precond: &'a Preconditioner,
    u_k: &[f64],
    y_next: &[f64],
) -> Result<PsiProblem<'a>> {
    let d = precond.dim();
    check_dim(d, grad_f_y.len())?;
    check_dim(d, u_k.len())?;
    check_dim(d, y_next.len())?;
    let mut linear_term: Vec<f64> = grad_f_y.iter().map(|g| alpha * g).collect();
    axpy(-(1.0 + a_k * mu_rel), &precond.grad_of(u_k), &mut linear_term);
    if alpha * mu_rel != 0.0 {
        axpy(-alpha * mu_rel, &precond.grad_of(y_next), &mut linear_term);
    }
    Ok(PsiProblem {
        linear_term,
        phi_scale: 1.0 + (a_k + alpha) * mu_rel,
        precond,
        l3_phi: precond.constants().l3,
    })
}

/// Workers holding disjoint shards of the data, plus the communication ledger.
#[derive(Debug, Clone)]
pub struct Cluster {
    pool: WorkerPool,
    shards: Vec<LogRegProblem>,
    pub ledger: CommLedger,
    failing: Option<usize>,
}

impl Cluster {
    pub fn new(problem: &LogRegProblem, m: usize, seed: u64, parallel: bool) -> Result<Self> {
        let mut pool = WorkerPool::new(problem.data().len(), m, seed)?;
        if !parallel {
            pool = pool.sequential();
        }
        let shards = (0..m).map(|j| problem.restrict(pool.shard(j))).collect();
        Ok(Self {
            pool,
            shards,
            ledger: CommLedger::new(),
            failing: None,
        })
    }

    pub fn pool(&self) -> &WorkerPool {
        &self.pool
    }

    /// Makes `worker` fail on every subsequent round.
    pub fn inject_failure(&mut self, worker: usize) {
        self.failing = Some(worker);
    }

    pub fn dim(&self) -> usize {
        self.shards[0].dim()
    }
}

/// One broadcast/reduce round returning `(F(y), ∇F(y))`. Partial sums are
/// exact, so the result does not depend on the number of workers.
pub fn aggregate_value_gradient(cluster: &mut Cluster, y: &[f64]) -> Result<(f64, Vec<f64>)> {
    check_dim(cluster.dim(), y.len())?;
    let shards = &cluster.shards;
    let failing = cluster.failing;
    let parts = broadcast_gather(&cluster.pool, &mut cluster.ledger, y, |j, point| {
        if failing == Some(j) {
            return Err(Error::WorkerFailed {
                worker: j,
                msg: "injected failure".into(),
            });
        }
        Ok(shards[j].data_sums(point))
    })?;
    let mut total = ExactSum::zeros(y.len() + 1);
    for p in &parts {
        total.merge(p);
    }
    Ok(shards[0].finish_sums(&total, cluster.pool.total(), y))
}

/// `∇F(y)` via one aggregation round.
pub fn aggregate_gradient(cluster: &mut Cluster, y: &[f64]) -> Result<Vec<f64>> {
    aggregate_value_gradient(cluster, y).map(|(_, g)| g)
}

/// Constants fixed before the first round.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InspagSetup {
    pub radius: f64,
    pub r_phi_sq: f64,
    pub l_phi: f64,
    pub mu_phi: f64,
    pub kappa_phi: f64,
    pub mu_rel: f64,
    pub l3_phi: f64,
    pub n_precond: usize,
    pub workers: usize,
}

/// Everything observed during one `M` trial of one outer iteration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialLog {
    /// Outer iteration index `k` (the trial produces candidate `k + 1`).
    pub k: usize,
    pub trial: usize,
    pub a_next: f64,
    pub m_next: f64,
    pub alpha: f64,
    pub f_y: f64,
    pub grad_norm_y: f64,
    pub f_x: f64,
    pub inner_iters: usize,
    pub tensor_steps: usize,
    pub hyperfast_steps: usize,
    pub restarts: usize,
    /// The subsolver stopped at the floating-point floor before its certificate.
    pub stalled: bool,
    pub delta_k_tol: f64,
    pub delta_tilde: f64,
    pub theta: f64,
    /// `min_{‖x‖≤R} ⟨∇Φ(û), x − û⟩`.
    pub certificate: f64,
    pub certificate_ok: bool,
    pub accepted: bool,
    pub rounds: usize,
    pub bytes: u64,
    pub wall_ms: f64,
}

#[derive(Debug, Clone, PartialEq)]
struct Eval {
    point: Vec<f64>,
    value: f64,
    grad: Vec<f64>,
}

/// The InSPAG model oracle: `f_δ = F`, `ψ(x, y) = ⟨∇F(y), x − y⟩`, and
/// projections solved by restarted Hyperfast steps on the central node.
pub struct InspagOracle {
    pub cluster: Cluster,
    pub precond: Preconditioner,
    pub setup: InspagSetup,
    hyperfast: HyperfastConfig,
    c_rate: f64,
    restart_t_max: usize,
    theta: ThetaEstimator,
    cache: Vec<Eval>,
    pending: Option<TrialLog>,
    trials: Vec<TrialLog>,
    trial_in_step: usize,
    started: Instant,
    record_wall_clock: bool,
}

impl InspagOracle {
    fn lookup(&self, p: &[f64]) -> Option<&Eval> {
        self.cache.iter().rev().find(|e| e.point == p)
    }

    fn evaluate(&mut self, p: &[f64]) -> Result<(f64, Vec<f64>)> {
        if let Some(e) = self.lookup(p) {
            return Ok((e.value, e.grad.clone()));
        }
        let (value, grad) = aggregate_value_gradient(&mut self.cluster, p)?;
        let gphi = norm(&self.precond.grad_of(p));
        self.theta.observe(norm(&grad), gphi, self.setup.mu_rel);
        if self.cache.len() >= 4 {
            self.cache.remove(0);
        }
        self.cache.push(Eval {
            point: p.to_vec(),
            value,
            grad: grad.clone(),
        });
        Ok((value, grad))
    }

    fn wall_ms(&self) -> f64 {
        if self.record_wall_clock {
            self.started.elapsed().as_secs_f64() * 1e3
        } else {
            0.0
        }
    }

    /// Drains logs of finished trials, marking the last one accepted.
    fn take_trials(&mut self) -> Vec<TrialLog> {
        self.trial_in_step = 0;
        let mut out = std::mem::take(&mut self.trials);
        if let Some(last) = out.last_mut() {
            last.accepted = true;
        }
        out
    }
}

impl ModelOracle for InspagOracle {
    fn dim(&self) -> usize {
        self.precond.dim()
    }

    fn mu(&self) -> f64 {
        self.setup.mu_rel
    }

    fn f_delta(&mut self, y: &[f64], _delta: f64) -> Result<f64> {
        let (value, _) = self.evaluate(y)?;
        if let Some(mut log) = self.pending.take() {
            log.f_x = value;
            log.rounds = self.cluster.ledger.rounds;
            log.bytes = self.cluster.ledger.total_bytes();
            log.wall_ms = self.wall_ms();
            self.trials.push(log);
        }
        Ok(value)
    }

    fn psi_delta(&mut self, x: &[f64], y: &[f64], _delta: f64) -> Result<f64> {
        let (_, g) = self.evaluate(y)?;
        Ok(dot(&g, &sub(x, y)))
    }

    fn bregman(&mut self, u: &[f64], x: &[f64]) -> Result<f64> {
        self.precond.bregman_div(u, x)
    }

    fn project(&mut self, pr: &ProjectionProblem<'_>) -> Result<Vec<f64>> {
        let (f_y, grad) = self.evaluate(pr.y_next)?;
        let setup = self.setup;
        let mut psi = build_psi(
            pr.alpha,
            &grad,
            pr.a_prev,
            setup.mu_rel,
            &self.precond,
            pr.u_prev,
            pr.y_next,
        )?;
        psi.l3_phi = setup.l3_phi;
        let theta = self.theta.estimate()?;
        let tol = delta_tolerance(
            pr.k.max(1),
            setup.mu_phi,
            setup.r_phi_sq,
            setup.l_phi,
            setup.radius,
            theta,
            pr.a_next,
            setup.mu_rel,
        )?;
        let sched = RestartScheduleStrong {
            r0: 2.0 * setup.radius,
            mu: psi.mu(),
            c: self.c_rate,
            t_max: self.restart_t_max,
            ball: Some(setup.radius),
        };
        let out = restart_strongly_convex(&psi, pr.u_prev, &sched, tol, &self.hyperfast)?;
        let h = psi.grad(&out.point);
        let certificate = ball_linear_min(&h, &out.point, setup.radius);
        self.trial_in_step += 1;
        self.pending = Some(TrialLog {
            k: pr.k,
            trial: self.trial_in_step,
            a_next: pr.a_next,
            m_next: pr.m_next,
            alpha: pr.alpha,
            f_y,
            grad_norm_y: norm(&grad),
            f_x: f64::NAN,
            inner_iters: out.inner_iters,
            tensor_steps: out.tensor_steps,
            hyperfast_steps: out.total_steps,
            restarts: out.restarts.len(),
            stalled: out.stalled,
            delta_k_tol: tol,
            delta_tilde: pr.delta_tilde,
            theta,
            certificate,
            certificate_ok: certificate >= -pr.delta_tilde,
            accepted: false,
            rounds: 0,
            bytes: 0,
            wall_ms: 0.0,
        });
        Ok(out.point)
    }
}

/// Result of [`run_inspag`].
#[derive(Debug, Clone)]
pub struct InspagRun {
    pub setup: InspagSetup,
    pub state: AgmState,
    pub steps: Vec<StepRecord>,
    pub trials: Vec<TrialLog>,
    pub ledger: CommLedger,
    /// `2L_φR²(1 + ln K)/A_K` after each accepted iteration.
    pub certificates: Vec<f64>,
    pub certificate_met: bool,
}

impl InspagRun {
    pub fn rounds(&self) -> usize {
        self.ledger.rounds
    }

    pub fn total_inner_iters(&self) -> usize {
        self.trials.iter().map(|t| t.inner_iters).sum()
    }
}

/// `10‖x₁₀₀‖` where `x₁₀₀` comes from 100 gradient steps of size `1/L_F` from 0.
pub fn default_radius(problem: &LogRegProblem) -> Result<f64> {
    let l = problem.smoothness_constants()?.l_smooth;
    let mut x = vec![0.0; problem.dim()];
    for _ in 0..100 {
        let g = problem.gradient(&x)?;
        axpy(-1.0 / l, &g, &mut x);
    }
    let r = 10.0 * norm(&x);
    Ok(if r > 0.0 { r } else { 1.0 })
}

/// `2L_φR²(1 + ln K)/A_K`.
pub fn inspag_certificate(l_phi: f64, radius: f64, k: usize, a_k: f64) -> f64 {
    2.0 * l_phi * radius * radius * (1.0 + (k.max(1) as f64).ln()) / a_k
}

/// Assembles preconditioner, workers and constants without running anything.
pub fn prepare(problem: &LogRegProblem, cfg: &InspagConfig) -> Result<InspagOracle> {
    cfg.validate(problem)?;
    let constants = problem.smoothness_constants()?;
    let rel = relative_constants(constants.mu_strong, cfg.sigma)?;
    let precond = Preconditioner::from_problem(problem, cfg.n_precond, cfg.sigma, cfg.seed)?;
    let pc = precond.constants();
    let radius = match cfg.radius {
        Some(r) => r,
        None => default_radius(problem)?,
    };
    let r_phi_sq = cfg.r_phi_sq.unwrap_or(2.0 * pc.l_phi * radius * radius);
    let l3_phi = match cfg.l3 {
        L3Choice::Spectral => pc.l3,
        L3Choice::PerSample => pc.l3_sample.min(pc.l3),
    };
    let setup = InspagSetup {
        radius,
        r_phi_sq,
        l_phi: pc.l_phi,
        mu_phi: pc.mu_phi,
        kappa_phi: pc.kappa(),
        mu_rel: rel.mu_rel,
        l3_phi,
        n_precond: cfg.n_precond,
        workers: cfg.workers,
    };
    let cluster = Cluster::new(problem, cfg.workers, cfg.seed, cfg.parallel)?;
    Ok(InspagOracle {
        cluster,
        precond,
        setup,
        hyperfast: cfg.hyperfast,
        c_rate: cfg.c_rate,
        restart_t_max: cfg.restart_t_max,
        theta: ThetaEstimator::new(cfg.theta),
        cache: Vec::new(),
        pending: None,
        trials: Vec::new(),
        trial_in_step: 0,
        started: Instant::now(),
        record_wall_clock: true,
    })
}

/// Runs one accepted outer iteration.
pub fn inspag_round(
    state: &AgmState,
    oracle: &mut InspagOracle,
    cfg: &InspagConfig,
) -> Result<(AgmState, StepRecord, Vec<TrialLog>)> {
    let schedule = InexactnessSchedule::harmonic(oracle.setup.r_phi_sq);
    let agm_cfg = AgmConfig {
        m0: cfg.m0,
        m_cap_factor: cfg.m_cap_factor,
        ..AgmConfig::default()
    };
    let (next, rec) = agm_step(state, oracle, &schedule, &agm_cfg).map_err(|e| Error::Round {
        round: state.k,
        source: Box::new(e),
    })?;
    Ok((next, rec, oracle.take_trials()))
}

/// Full run from `x₀ = 0` until `k_max` iterations or the certificate reaches `target`.
pub fn run_inspag(problem: &LogRegProblem, cfg: &InspagConfig) -> Result<InspagRun> {
    run_inspag_with(problem, cfg, true)
}

/// [`run_inspag`] with control over wall-clock recording (off gives
/// reproducible `wall_ms = 0`).
pub fn run_inspag_with(
    problem: &LogRegProblem,
    cfg: &InspagConfig,
    wall_clock: bool,
) -> Result<InspagRun> {
    let mut oracle = prepare(problem, cfg)?;
    oracle.record_wall_clock = wall_clock;
    let setup = oracle.setup;
    let mut state = AgmState::new(&vec![0.0; problem.dim()], cfg.m0);
    let mut steps = Vec::new();
    let mut trials = Vec::new();
    let mut certificates = Vec::new();
    let mut met = false;
    for _ in 0..cfg.k_max {
        let (next, rec, logs) = inspag_round(&state, &mut oracle, cfg)?;
        let cert = inspag_certificate(setup.l_phi, setup.radius, rec.k, rec.a);
        log::debug!(
            "iteration {}: A = {:.3e}, M = {:.3e}, F(x) = {:.12e}, certificate = {:.3e}, rounds = {}",
            rec.k,
            rec.a,
            rec.m,
            rec.f_x,
            cert,
            oracle.cluster.ledger.rounds
        );
        state = next;
        steps.push(rec);
        trials.extend(logs);
        certificates.push(cert);
        if cfg.target > 0.0 && cert <= cfg.target {
            met = true;
            break;
        }
    }
    Ok(InspagRun {
        setup,
        state,
        steps,
        trials,
        ledger: oracle.cluster.ledger.clone(),
        certificates,
        certificate_met: met,
    })
}
