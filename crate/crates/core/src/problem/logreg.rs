use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::SparseDataset;
use crate::error::{check_dim, Error, Result};
use crate::linalg::{norm, ExactSum};

/// Logistic sigmoid, evaluated without overflow for either sign.
#[inline]
pub fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

/// `log(1 + exp(-t))`.
#[inline]
pub fn softplus_neg(t: f64) -> f64 {
    if t >= 0.0 {
        (-t).exp().ln_1p()
    } else {
        -t + t.exp().ln_1p()
    }
}

/// σ'(t) = σ(t)σ(-t).
#[inline]
pub fn sigmoid_d1(t: f64) -> f64 {
    sigmoid(t) * sigmoid(-t)
}

/// Third derivative of `t -> log(1 + exp(-t))`, i.e. σ'(t)(1 - 2σ(t)).
#[inline]
fn softplus_neg_d3(t: f64) -> f64 {
    let (p, q) = (sigmoid(t), sigmoid(-t));
    p * q * (q - p)
}

/// Which regularization weight each feature gets.
#[derive(Debug, Clone, PartialEq)]
pub enum FeatureSplit {
    /// Features present in fewer than this fraction of rows are "sparse".
    ByDensity(f64),
    /// Explicit sparse index set; everything else is dense.
    Sparse(Vec<usize>),
}

impl Default for FeatureSplit {
    fn default() -> Self {
        FeatureSplit::ByDensity(0.1)
    }
}

/// `L_F`, `μ_F` and third-derivative Lipschitz bounds of the logistic objective.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothnessConstants {
    pub l_smooth: f64,
    pub mu_strong: f64,
    /// `15 ‖AᵀA‖₂²`.
    pub l3: f64,
    /// `(1/8)·(1/N) Σ ‖ξ_i‖⁴`, from |d⁴/dt⁴ log(1+e^{-t})| ≤ 1/8. Also a valid
    /// Euclidean Lipschitz constant of the third derivative, usually far smaller.
    pub l3_sample: f64,
}

impl SmoothnessConstants {
    pub fn kappa(&self) -> f64 {
        self.l_smooth / self.mu_strong
    }
}

/// `F(x) = (1/N) Σ log(1 + exp(-η_i⟨x, ξ_i⟩)) + λ₁ Σ_{I_S} x_j² + λ₂ Σ_{I_D} x_j²`.
#[derive(Debug, Clone)]
pub struct LogRegProblem {
    data: SparseDataset,
    lambda_sparse: f64,
    lambda_dense: f64,
    sparse_mask: Vec<bool>,
    reg: Vec<f64>,
}

impl LogRegProblem {
    pub fn new(data: SparseDataset, lambda_sparse: f64, lambda_dense: f64) -> Result<Self> {
        Self::with_split(data, lambda_sparse, lambda_dense, FeatureSplit::default())
    }

    pub fn with_split(
        data: SparseDataset,
        lambda_sparse: f64,
        lambda_dense: f64,
        split: FeatureSplit,
    ) -> Result<Self> {
        if !(lambda_sparse >= 0.0 && lambda_dense >= 0.0) {
            return Err(Error::Input("regularization weights must be >= 0".into()));
        }
        let d = data.dim();
        let sparse_mask = match split {
            FeatureSplit::ByDensity(frac) => {
                let n = data.len().max(1) as f64;
                data.column_counts()
                    .into_iter()
                    .map(|c| (c as f64) < frac * n)
                    .collect()
            }
            FeatureSplit::Sparse(idx) => {
                let mut mask = vec![false; d];
                for j in idx {
                    if j >= d {
                        return Err(Error::Input(format!("sparse index {j} >= dimension {d}")));
                    }
                    mask[j] = true;
                }
                mask
            }
        };
        let reg = sparse_mask
            .iter()
            .map(|&s| if s { lambda_sparse } else { lambda_dense })
            .collect();
        Ok(Self {
            data,
            lambda_sparse,
            lambda_dense,
            sparse_mask,
            reg,
        })
    }

    pub fn data(&self) -> &SparseDataset {
        &self.data
    }

    pub fn dim(&self) -> usize {
        self.data.dim()
    }

    pub fn lambdas(&self) -> (f64, f64) {
        (self.lambda_sparse, self.lambda_dense)
    }

    pub fn sparse_indices(&self) -> Vec<usize> {
        (0..self.dim()).filter(|&j| self.sparse_mask[j]).collect()
    }

    pub fn dense_indices(&self) -> Vec<usize> {
        (0..self.dim()).filter(|&j| !self.sparse_mask[j]).collect()
    }

    /// Same regularization, different rows.
    pub fn restrict(&self, rows: &[usize]) -> Self {
        Self {
            data: self.data.select(rows),
            lambda_sparse: self.lambda_sparse,
            lambda_dense: self.lambda_dense,
            sparse_mask: self.sparse_mask.clone(),
            reg: self.reg.clone(),
        }
    }

    fn inv_n(&self) -> f64 {
        if self.data.is_empty() {
            0.0
        } else {
            1.0 / self.data.len() as f64
        }
    }

    /// Unnormalized data-term sums: slots `0..d` hold Σ ∇ℓ_i, slot `d` holds Σ ℓ_i.
    /// Exact fixed-point accumulation makes these sums split-invariant.
    pub fn data_sums(&self, x: &[f64]) -> ExactSum {
        let d = self.dim();
        let mut acc = ExactSum::zeros(d + 1);
        for i in 0..self.data.len() {
            let y = self.data.label(i);
            let t = y * self.data.row_dot(i, x);
            acc.add(d, softplus_neg(t));
            let c = -y * sigmoid(-t);
            let (idx, val) = self.data.row(i);
            for (&j, &v) in idx.iter().zip(val) {
                acc.add(j, c * v);
            }
        }
        acc
    }

    /// Turns data-term sums over `count` samples into `(F(x), ∇F(x))`.
    pub fn finish_sums(&self, sums: &ExactSum, count: usize, x: &[f64]) -> (f64, Vec<f64>) {
        let d = self.dim();
        let raw = sums.to_f64();
        let inv = if count == 0 { 0.0 } else { 1.0 / count as f64 };
        let mut grad: Vec<f64> = raw[..d].iter().map(|g| g * inv).collect();
        let mut value = raw[d] * inv;
        for j in 0..d {
            value += self.reg[j] * x[j] * x[j];
            grad[j] += 2.0 * self.reg[j] * x[j];
        }
        (value, grad)
    }

    pub(crate) fn value_and_grad_of(&self, x: &[f64]) -> (f64, Vec<f64>) {
        let sums = self.data_sums(x);
        self.finish_sums(&sums, self.data.len(), x)
    }

    pub(crate) fn value_of(&self, x: &[f64]) -> f64 {
        let d = self.dim();
        let mut acc = ExactSum::zeros(1);
        for i in 0..self.data.len() {
            let t = self.data.label(i) * self.data.row_dot(i, x);
            acc.add(0, softplus_neg(t));
        }
        let mut v = acc.to_f64()[0] * self.inv_n();
        for j in 0..d {
            v += self.reg[j] * x[j] * x[j];
        }
        v
    }

    pub(crate) fn hvp_of(&self, x: &[f64], v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        let inv = self.inv_n();
        for i in 0..self.data.len() {
            let t = self.data.label(i) * self.data.row_dot(i, x);
            let c = sigmoid_d1(t) * self.data.row_dot(i, v) * inv;
            let (idx, val) = self.data.row(i);
            for (&j, &a) in idx.iter().zip(val) {
                out[j] += c * a;
            }
        }
        for j in 0..out.len() {
            out[j] += 2.0 * self.reg[j] * v[j];
        }
        out
    }

    pub(crate) fn d3_of(&self, x: &[f64], h: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        let inv = self.inv_n();
        for i in 0..self.data.len() {
            let y = self.data.label(i);
            let t = y * self.data.row_dot(i, x);
            let s = self.data.row_dot(i, h);
            let c = y * softplus_neg_d3(t) * s * s * inv;
            if c == 0.0 {
                continue;
            }
            let (idx, val) = self.data.row(i);
            for (&j, &a) in idx.iter().zip(val) {
                out[j] += c * a;
            }
        }
        out
    }

    pub fn loss_value(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dim(), x.len())?;
        Ok(self.value_of(x))
    }

    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim(), x.len())?;
        Ok(self.value_and_grad_of(x).1)
    }

    pub fn value_and_gradient(&self, x: &[f64]) -> Result<(f64, Vec<f64>)> {
        check_dim(self.dim(), x.len())?;
        Ok(self.value_and_grad_of(x))
    }

    /// Exact `∇²F(x) v`, O(nnz).
    pub fn hessian_vec(&self, x: &[f64], v: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim(), x.len())?;
        check_dim(self.dim(), v.len())?;
        Ok(self.hvp_of(x, v))
    }

    /// `D³F(x)[h, h]` as a vector.
    pub fn third_deriv_bilinear(&self, x: &[f64], h: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim(), x.len())?;
        check_dim(self.dim(), h.len())?;
        Ok(self.d3_of(x, h))
    }

    pub fn smoothness_constants(&self) -> Result<SmoothnessConstants> {
        let n = self.data.len();
        if n == 0 {
            return Err(Error::Input("smoothness constants need a nonempty dataset".into()));
        }
        let (l1, l2) = (self.lambda_sparse, self.lambda_dense);
        let mean_sq = (0..n).map(|i| self.data.row_norm_sq(i)).sum::<f64>() / n as f64;
        let mean_quad = (0..n)
            .map(|i| self.data.row_norm_sq(i).powi(2))
            .sum::<f64>()
            / n as f64;
        let gram = spectral_norm_gram(&self.data, 1e-6, 10_000);
        Ok(SmoothnessConstants {
            l_smooth: l1.max(l2) + mean_sq,
            mu_strong: l1.min(l2),
            l3: 15.0 * gram * gram,
            l3_sample: mean_quad / 8.0,
        })
    }
}

/// `‖AᵀA‖₂` by power iteration on `v ↦ Aᵀ(Av)` from a fixed-seed start.
pub fn spectral_norm_gram(data: &SparseDataset, rel_tol: f64, max_iter: usize) -> f64 {
    let d = data.dim();
    if d == 0 || data.nnz() == 0 {
        return 0.0;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut v: Vec<f64> = (0..d).map(|_| rng.random::<f64>() + 0.5).collect();
    let n0 = norm(&v);
    v.iter_mut().for_each(|x| *x /= n0);
    let mut est = 0.0;
    for _ in 0..max_iter {
        let w = data.gram_apply(&v);
        let next = norm(&w);
        if next == 0.0 {
            return 0.0;
        }
        v = w.into_iter().map(|x| x / next).collect();
        if (next - est).abs() <= rel_tol * next {
            return next;
        }
        est = next;
    }
    est
}
