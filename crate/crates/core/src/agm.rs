//! Adaptive accelerated Bregman proximal gradient method with an inexact
//! model of the objective and inexact generalized projections.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::hyperfast::testfns::QuadraticFn;
use crate::hyperfast::SmoothOracle;
use crate::linalg::{combine, dot, norm, sub};

/// Data describing `Φ_{k+1}(x) = α ψ_δ(x, y_{k+1}) + β D_φ[u_k](x) + γ D_φ[y_{k+1}](x)`
/// with `β = 1 + A_k(μ + m)` and `γ = α μ`.
#[derive(Debug, Clone, Copy)]
pub struct ProjectionProblem<'a> {
    pub k: usize,
    pub alpha: f64,
    pub a_prev: f64,
    pub a_next: f64,
    /// `M_{k+1}` being tried.
    pub m_next: f64,
    pub mu: f64,
    pub m: f64,
    pub u_prev: &'a [f64],
    pub y_next: &'a [f64],
    pub delta_tilde: f64,
}

impl ProjectionProblem<'_> {
    pub fn beta(&self) -> f64 {
        1.0 + self.a_prev * (self.mu + self.m)
    }

    pub fn gamma(&self) -> f64 {
        self.alpha * self.mu
    }
}

/// A `(δ, L, μ, m, φ)`-model of `f` together with its projection routine.
///
/// Methods take `&mut self` so implementations may cache, count calls or
/// communicate.
pub trait ModelOracle {
    fn dim(&self) -> usize;
    fn mu(&self) -> f64;
    fn m(&self) -> f64 {
        0.0
    }
    /// `f_δ(y)` at inexactness level `delta`.
    fn f_delta(&mut self, y: &[f64], delta: f64) -> Result<f64>;
    /// `ψ_δ(x, y)`.
    fn psi_delta(&mut self, x: &[f64], y: &[f64], delta: f64) -> Result<f64>;
    /// `D_φ[u](x)`.
    fn bregman(&mut self, u: &[f64], x: &[f64]) -> Result<f64>;
    /// A point of `argmin^{δ̃} Φ_{k+1}`.
    fn project(&mut self, problem: &ProjectionProblem<'_>) -> Result<Vec<f64>>;
}

/// Per-iteration inexactness levels `δ_k` and `δ̃_k`.
pub struct InexactnessSchedule {
    delta: Box<dyn Fn(usize) -> f64 + Send + Sync>,
    delta_tilde: Box<dyn Fn(usize) -> f64 + Send + Sync>,
}

impl std::fmt::Debug for InexactnessSchedule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("InexactnessSchedule")
            .field("delta_0", &self.delta(0))
            .field("delta_tilde_0", &self.delta_tilde(0))
            .finish()
    }
}

impl InexactnessSchedule {
    pub fn new(
        delta: impl Fn(usize) -> f64 + Send + Sync + 'static,
        delta_tilde: impl Fn(usize) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            delta: Box::new(delta),
            delta_tilde: Box::new(delta_tilde),
        }
    }

    pub fn exact() -> Self {
        Self::constant(0.0, 0.0)
    }

    pub fn constant(delta: f64, delta_tilde: f64) -> Self {
        Self::new(move |_| delta, move |_| delta_tilde)
    }

    /// `δ_k = 0`, `δ̃_k = R_φ² / max(k, 1)`.
    pub fn harmonic(r_phi_sq: f64) -> Self {
        Self::new(|_| 0.0, move |k| r_phi_sq / k.max(1) as f64)
    }

    pub fn delta(&self, k: usize) -> f64 {
        (self.delta)(k).max(0.0)
    }

    pub fn delta_tilde(&self, k: usize) -> f64 {
        (self.delta_tilde)(k).max(0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AgmConfig {
    /// Initial `M₀`.
    pub m0: f64,
    /// The search fails once `M` exceeds `m_cap_factor · M₀`.
    pub m_cap_factor: f64,
    /// Relative slack added to the acceptance test against rounding.
    pub rel_slack: f64,
}

impl Default for AgmConfig {
    fn default() -> Self {
        Self {
            m0: 1.0,
            m_cap_factor: 2f64.powi(60),
            rel_slack: 1e-12,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistoryEntry {
    pub a: f64,
    pub m: f64,
    pub alpha: f64,
    pub f_x: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AgmState {
    pub k: usize,
    pub a: f64,
    pub m: f64,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub u: Vec<f64>,
    pub history: Vec<HistoryEntry>,
}

impl AgmState {
    pub fn new(x0: &[f64], m0: f64) -> Self {
        Self {
            k: 0,
            a: 0.0,
            m: m0,
            x: x0.to_vec(),
            y: x0.to_vec(),
            u: x0.to_vec(),
            history: Vec::new(),
        }
    }
}

/// Everything about one accepted iteration `k → k+1`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    /// Index of the new iterate, `k + 1`.
    pub k: usize,
    pub a_prev: f64,
    pub a: f64,
    pub m: f64,
    pub alpha: f64,
    /// Number of `M` values tried (`i_k + 1`).
    pub trials: usize,
    pub x_prev: Vec<f64>,
    pub u_prev: Vec<f64>,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub u: Vec<f64>,
    /// `f_δ(x_{k+1})`.
    pub f_x: f64,
    pub delta: f64,
    pub delta_tilde: f64,
}

/// Largest root of `M α² − (1 + A_k μ + A_k m) α − A_k (1 + A_k μ + A_k m) = 0`.
pub fn solve_alpha(a_k: f64, mu: f64, m: f64, m_next: f64) -> Result<f64> {
    if !(m_next > 0.0) || !(a_k >= 0.0) || !(mu >= 0.0) || !(m >= 0.0) {
        return Err(Error::Input(format!(
            "solve_alpha needs M > 0 and A_k, mu, m >= 0 (got M={m_next}, A_k={a_k}, mu={mu}, m={m})"
        )));
    }
    let b = 1.0 + a_k * (mu + m);
    let c = a_k * b;
    let disc = b * b + 4.0 * m_next * c;
    if !(disc > 0.0) || !disc.is_finite() {
        return Err(Error::Internal(format!("non-positive discriminant {disc}")));
    }
    // b > 0, so the `+` root has no cancellation.
    let alpha = (b + disc.sqrt()) / (2.0 * m_next);
    if alpha > 0.0 && alpha.is_finite() {
        Ok(alpha)
    } else {
        Err(Error::Internal(format!("step-size root {alpha} is not positive")))
    }
}

/// One iteration of the adaptive method: halves `M`, then doubles it until
/// the acceptance inequality holds.
pub fn agm_step<O: ModelOracle + ?Sized>(
    state: &AgmState,
    oracle: &mut O,
    schedule: &InexactnessSchedule,
    cfg: &AgmConfig,
) -> Result<(AgmState, StepRecord)> {
    let (mu, m) = (oracle.mu(), oracle.m());
    let k = state.k;
    let delta = schedule.delta(k);
    let delta_tilde = schedule.delta_tilde(k);
    let cap = cfg.m_cap_factor * cfg.m0;
    let mut m_next = 0.5 * state.m;
    let mut trials = 0;
    loop {
        trials += 1;
        if m_next > cap {
            return Err(Error::Divergence { m: m_next, cap });
        }
        let alpha = solve_alpha(state.a, mu, m, m_next)?;
        let a_next = state.a + alpha;
        let (wu, wx) = (alpha / a_next, state.a / a_next);
        let y = combine(wu, &state.u, wx, &state.x);
        let f_y = oracle.f_delta(&y, delta)?;
        let problem = ProjectionProblem {
            k,
            alpha,
            a_prev: state.a,
            a_next,
            m_next,
            mu,
            m,
            u_prev: &state.u,
            y_next: &y,
            delta_tilde,
        };
        let u = oracle.project(&problem)?;
        let x = combine(wu, &u, wx, &state.x);
        let f_x = oracle.f_delta(&x, delta)?;
        let psi = oracle.psi_delta(&x, &y, delta)?;
        let div = oracle.bregman(&state.u, &u)?;
        let rhs = f_y + psi + m_next * alpha * alpha / (a_next * a_next) * div + delta;
        if f_x <= rhs + cfg.rel_slack * f_y.abs() {
            let mut history = state.history.clone();
            history.push(HistoryEntry {
                a: a_next,
                m: m_next,
                alpha,
                f_x,
            });
            let record = StepRecord {
                k: k + 1,
                a_prev: state.a,
                a: a_next,
                m: m_next,
                alpha,
                trials,
                x_prev: state.x.clone(),
                u_prev: state.u.clone(),
                x: x.clone(),
                y: y.clone(),
                u: u.clone(),
                f_x,
                delta,
                delta_tilde,
            };
            let next = AgmState {
                k: k + 1,
                a: a_next,
                m: m_next,
                x,
                y,
                u,
                history,
            };
            return Ok((next, record));
        }
        m_next *= 2.0;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AgmRun {
    pub state: AgmState,
    pub records: Vec<StepRecord>,
}

/// Runs `steps` iterations from `x0`.
pub fn run_agm<O: ModelOracle + ?Sized>(
    x0: &[f64],
    oracle: &mut O,
    schedule: &InexactnessSchedule,
    steps: usize,
    cfg: &AgmConfig,
) -> Result<AgmRun> {
    if steps == 0 {
        return Err(Error::Input("run_agm needs K >= 1".into()));
    }
    if x0.len() != oracle.dim() {
        return Err(Error::Dimension {
            expected: oracle.dim(),
            got: x0.len(),
        });
    }
    if !(cfg.m0 > 0.0) {
        return Err(Error::Input(format!("M0 must be positive, got {}", cfg.m0)));
    }
    let mut state = AgmState::new(x0, cfg.m0);
    let mut records = Vec::with_capacity(steps);
    for _ in 0..steps {
        let (next, rec) = agm_step(&state, oracle, schedule, cfg)?;
        state = next;
        records.push(rec);
    }
    Ok(AgmRun { state, records })
}

/// Right-hand side of the accuracy guarantee after each recorded step:
/// `[D_φ[u₀](x*) + 2 Σ A_{k+1} δ_k + Σ δ̃_k] / A_N`.
pub fn certified_gap_bounds(d0: f64, records: &[StepRecord]) -> Vec<f64> {
    let mut acc = d0;
    records
        .iter()
        .map(|r| {
            acc += 2.0 * r.a * r.delta + r.delta_tilde;
            acc / r.a
        })
        .collect()
}

/// Lower bound on `A_N` from the realized `M` sequence:
/// `max{N²/(4M̃_N), (1/M₁)·exp(N·√((μ+m)/(4M̃_N)))}` with `M̃_N^{−1/2}` the mean of `M_k^{−1/2}`.
pub fn a_lower_bound(m_seq: &[f64], mu: f64, m: f64, n: usize) -> Result<f64> {
    if m_seq.is_empty() || n == 0 || n > m_seq.len() {
        return Err(Error::Input("a_lower_bound needs 1 <= N <= len(M sequence)".into()));
    }
    if m_seq.iter().any(|&v| !(v > 0.0)) {
        return Err(Error::Input("M values must be positive".into()));
    }
    let nf = n as f64;
    let mean_inv_sqrt = m_seq[..n].iter().map(|v| v.powf(-0.5)).sum::<f64>() / nf;
    let m_tilde = mean_inv_sqrt.powi(-2);
    let poly = nf * nf / (4.0 * m_tilde);
    let expo = (nf * ((mu + m) / (4.0 * m_tilde)).sqrt()).exp() / m_seq[0];
    Ok(poly.max(expo))
}

/// `min_{‖x‖ ≤ R} ⟨h, x − x̃⟩ = −R‖h‖ − ⟨h, x̃⟩`.
pub fn ball_linear_min(h: &[f64], x_tilde: &[f64], radius: f64) -> f64 {
    -radius * norm(h) - dot(h, x_tilde)
}

/// Exact model of a quadratic `f` relative to a quadratic reference
/// `φ(x) = ½⟨Px, x⟩`, with closed-form projections.
///
/// A nonzero `noise` turns it into an inexact model: `f_δ(y) = f(y) − δ·s(y)`
/// with `s(y) ∈ [0, 1)` a deterministic hash of `y`.
#[derive(Debug, Clone)]
pub struct QuadraticModel {
    pub f: QuadraticFn,
    pub p: DMatrix<f64>,
    p_chol: nalgebra::Cholesky<f64, nalgebra::Dyn>,
    pub mu: f64,
    pub noise: bool,
}

impl QuadraticModel {
    pub fn new(f: QuadraticFn, p: DMatrix<f64>, mu: f64) -> Result<Self> {
        let p_chol = p
            .clone()
            .cholesky()
            .ok_or_else(|| Error::Input("reference matrix must be positive definite".into()))?;
        Ok(Self {
            f,
            p,
            p_chol,
            mu,
            noise: false,
        })
    }

    /// Euclidean reference `φ = ½‖x‖²`, with `μ = λ_min(Q)`.
    pub fn euclidean(f: QuadraticFn) -> Result<Self> {
        let d = f.dim();
        let mu = f.q.clone().symmetric_eigenvalues().min();
        Self::new(f, DMatrix::identity(d, d), mu)
    }

    pub fn with_noise(mut self) -> Self {
        self.noise = true;
        self
    }

    pub fn phi_div(&self, u: &[f64], x: &[f64]) -> f64 {
        let r = DVector::from_vec(sub(x, u));
        0.5 * r.dot(&(&self.p * &r))
    }

    fn hash_unit(y: &[f64]) -> f64 {
        let mut h: u64 = 0x9e37_79b9_7f4a_7c15;
        for v in y {
            h ^= v.to_bits();
            h = h.wrapping_add(0x9e37_79b9_7f4a_7c15);
            h = (h ^ (h >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
            h = (h ^ (h >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
            h ^= h >> 31;
        }
        (h >> 11) as f64 / (1u64 << 53) as f64
    }
}

impl ModelOracle for QuadraticModel {
    fn dim(&self) -> usize {
        self.f.dim()
    }
    fn mu(&self) -> f64 {
        self.mu
    }
    fn f_delta(&mut self, y: &[f64], delta: f64) -> Result<f64> {
        let shift = if self.noise { delta * Self::hash_unit(y) } else { 0.0 };
        Ok(self.f.value(y) - shift)
    }
    fn psi_delta(&mut self, x: &[f64], y: &[f64], _delta: f64) -> Result<f64> {
        Ok(dot(&self.f.grad(y), &sub(x, y)))
    }
    fn bregman(&mut self, u: &[f64], x: &[f64]) -> Result<f64> {
        Ok(self.phi_div(u, x))
    }
    fn project(&mut self, pr: &ProjectionProblem<'_>) -> Result<Vec<f64>> {
        // α g + β P(x − u) + γ P(x − y) = 0
        let (beta, gamma) = (pr.beta(), pr.gamma());
        let g = DVector::from_vec(self.f.grad(pr.y_next));
        let pinv_g = self.p_chol.solve(&g);
        let x = (0..self.dim())
            .map(|i| (beta * pr.u_prev[i] + gamma * pr.y_next[i] - pr.alpha * pinv_g[i]) / (beta + gamma))
            .collect();
        Ok(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_examples() {
        assert_eq!(solve_alpha(0.0, 0.0, 0.0, 2.0).unwrap(), 0.5);
        assert_eq!(solve_alpha(0.0, 5.0, 0.0, 4.0).unwrap(), 0.25);
        let a = solve_alpha(1.0, 1.0, 0.0, 1.0).unwrap();
        assert!((a - (1.0 + 3f64.sqrt())).abs() < 1e-14);
        assert!(solve_alpha(1.0, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn alpha_is_root_for_extreme_inputs() {
        for &(a, mu, m) in &[(1e-12, 0.0, 0.0), (1e12, 1e-3, 0.0), (5.0, 0.0, 2.0), (1e8, 1.0, 1.0)] {
            for &mm in &[1e-6, 1.0, 1e6] {
                let al = solve_alpha(a, mu, m, mm).unwrap();
                let b = 1.0 + a * (mu + m);
                let res = mm * al * al - b * al - a * b;
                let scale = mm * al * al + b * al + a * b;
                assert!(res.abs() <= 1e-12 * scale, "{a} {mu} {m} {mm}: {res}");
            }
        }
    }

    #[test]
    fn lower_bound_examples() {
        assert_eq!(a_lower_bound(&[1.0; 4], 0.0, 0.0, 4).unwrap(), 4.0);
        let v = a_lower_bound(&[1.0], 4.0, 0.0, 1).unwrap();
        assert!((v - std::f64::consts::E).abs() < 1e-14);
        assert!(a_lower_bound(&[], 0.0, 0.0, 1).is_err());
    }

    #[test]
    fn one_dimensional_closed_form_step() {
        // f = φ = x²/2, μ = 1, M₀ = 1: first trial M = 1/2 gives α = 2,
        // which fails; M = 1 gives α = 1.
        let f = QuadraticFn::new(vec![vec![1.0]], vec![0.0]);
        let mut model = QuadraticModel::new(f, DMatrix::identity(1, 1), 1.0).unwrap();
        let state = AgmState::new(&[1.0], 1.0);
        let (next, rec) = agm_step(&state, &mut model, &InexactnessSchedule::exact(), &AgmConfig::default()).unwrap();
        assert_eq!(rec.alpha, if rec.trials == 1 { 2.0 } else { 1.0 });
        assert_eq!(next.y, vec![1.0]);
        // u₁ minimizes α x·(x−1)... closed form: (β u₀ + γ y − α y)/(β + γ)
        let (alpha, beta, gamma) = (rec.alpha, 1.0, rec.alpha);
        let expect = (beta * 1.0 + gamma * 1.0 - alpha * 1.0) / (beta + gamma);
        assert!((next.u[0] - expect).abs() < 1e-15);
    }

    #[test]
    fn minimizer_is_stationary() {
        let f = QuadraticFn::new(vec![vec![2.0, 0.3], vec![0.3, 1.0]], vec![1.0, 1.0]);
        let xs = f.minimizer();
        let mut model = QuadraticModel::euclidean(f).unwrap();
        let run = run_agm(&xs, &mut model, &InexactnessSchedule::exact(), 5, &AgmConfig::default()).unwrap();
        assert!(crate::linalg::dist(&run.state.x, &xs) < 1e-14);
    }

    #[test]
    fn ball_min_matches_brute_force() {
        let h = [3.0, -4.0];
        let xt = [0.5, 0.25];
        let v = ball_linear_min(&h, &xt, 2.0);
        // minimizer is −R h/‖h‖
        let xm = [-2.0 * 0.6, 2.0 * 0.8];
        let direct = dot(&h, &sub(&xm, &xt));
        assert!((v - direct).abs() < 1e-14);
    }
}
