use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::linalg::{axpy, dense_from_operator, dot, norm, norm_sq, sub};

/// How [`quartic_subproblem`] minimizes `⟨c,s⟩ + ½⟨Hs,s⟩ + (L/4)‖s‖⁴`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QuarticMethod {
    /// Materialize `H` from `d` products, diagonalize once, then solve the
    /// scalar secular equation in `t = ‖s‖²`.
    Eigen,
    /// Matrix-free gradient descent with backtracking.
    GradientDescent { max_iters: usize },
}

impl Default for QuarticMethod {
    fn default() -> Self {
        QuarticMethod::Eigen
    }
}

/// Returns `s` with `‖c + Hs + L‖s‖²s‖ ≤ tol·max(1, ‖c‖)`.
pub fn quartic_subproblem(
    c: &[f64],
    hvp: impl Fn(&[f64]) -> Vec<f64>,
    l_reg: f64,
    tol: f64,
    method: QuarticMethod,
) -> Result<Vec<f64>> {
    if !(l_reg >= 0.0) {
        return Err(Error::Input(format!("regularization must be >= 0, got {l_reg}")));
    }
    match method {
        QuarticMethod::Eigen => QuarticSolver::new(c.len(), &hvp).solve(c, l_reg, tol),
        QuarticMethod::GradientDescent { max_iters } => {
            gradient_descent(c, &hvp, l_reg, tol, max_iters)
        }
    }
}

fn residual(c: &[f64], hs: &[f64], s: &[f64], l_reg: f64) -> f64 {
    let mut r = c.to_vec();
    axpy(1.0, hs, &mut r);
    axpy(l_reg * norm_sq(s), s, &mut r);
    norm(&r)
}

/// Spectral factorization of a fixed PSD `H`, reusable across right-hand sides.
#[derive(Debug, Clone)]
pub struct QuarticSolver {
    h: DMatrix<f64>,
    vectors: DMatrix<f64>,
    values: Vec<f64>,
}

impl QuarticSolver {
    pub fn new(dim: usize, hvp: impl Fn(&[f64]) -> Vec<f64>) -> Self {
        let h = dense_from_operator(dim, hvp);
        let eig = SymmetricEigen::new(h.clone());
        Self {
            h,
            values: eig.eigenvalues.iter().copied().collect(),
            vectors: eig.eigenvectors,
        }
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        (&self.h * DVector::from_column_slice(v)).iter().copied().collect()
    }

    pub fn solve(&self, c: &[f64], l_reg: f64, tol: f64) -> Result<Vec<f64>> {
        let d = self.dim();
        if c.len() != d {
            return Err(Error::Dimension { expected: d, got: c.len() });
        }
        let c_norm = norm(c);
        if c_norm == 0.0 {
            return Ok(vec![0.0; d]);
        }
        let ch: Vec<f64> = (self.vectors.transpose() * DVector::from_column_slice(c))
            .iter()
            .copied()
            .collect();
        let lam: Vec<f64> = self.values.iter().map(|&v| v.max(0.0)).collect();
        let t = if l_reg > 0.0 {
            secular_root(&ch, &lam, l_reg, c_norm)
        } else {
            0.0
        };
        let coef: Vec<f64> = ch
            .iter()
            .zip(&lam)
            .map(|(&ci, &li)| {
                let den = li + l_reg * t;
                if den > 0.0 {
                    -ci / den
                } else {
                    0.0
                }
            })
            .collect();
        let s: Vec<f64> = (&self.vectors * DVector::from_vec(coef)).iter().copied().collect();
        let res = residual(c, &self.apply(&s), &s, l_reg);
        let bound = tol * c_norm.max(1.0);
        if res <= bound {
            Ok(s)
        } else {
            Err(Error::ToleranceNotMet {
                residual: res,
                tolerance: bound,
            })
        }
    }
}

/// Root of `Σ ĉ_i²/(λ_i + L t)² = t` on `(0, (‖c‖/L)^{2/3}]`.
///
/// The left side minus `t` is convex and decreasing, so Newton steps from a
/// point left of the root never overshoot; bisection covers points where the
/// function is not yet finite.
fn secular_root(ch: &[f64], lam: &[f64], l: f64, c_norm: f64) -> f64 {
    let f = |t: f64| -> (f64, f64) {
        let mut v = -t;
        let mut dv = -1.0;
        for (&ci, &li) in ch.iter().zip(lam) {
            let den = li + l * t;
            let q = ci * ci / (den * den);
            v += q;
            dv -= 2.0 * l * q / den;
        }
        (v, dv)
    };
    let mut hi = (c_norm / l).powf(2.0 / 3.0);
    let mut lo = 0.0_f64;
    let (mut flo, mut dlo) = f(lo);
    for _ in 0..400 {
        if hi - lo <= 4.0 * f64::EPSILON * hi {
            break;
        }
        let cand = if flo.is_finite() && dlo.is_finite() && dlo < 0.0 {
            lo - flo / dlo
        } else {
            f64::NAN
        };
        let next = if cand > lo && cand < hi {
            cand
        } else if lo > 0.0 {
            (lo * hi).sqrt()
        } else {
            0.5 * hi
        };
        let (fv, dv) = f(next);
        if fv > 0.0 {
            if next - lo <= 2.0 * f64::EPSILON * next {
                lo = next;
                break;
            }
            lo = next;
            flo = fv;
            dlo = dv;
        } else if fv < 0.0 {
            hi = next;
        } else {
            return next;
        }
    }
    if flo.is_finite() && flo.abs() < f(hi).0.abs() {
        lo
    } else {
        hi
    }
}

fn gradient_descent(
    c: &[f64],
    hvp: &impl Fn(&[f64]) -> Vec<f64>,
    l_reg: f64,
    tol: f64,
    max_iters: usize,
) -> Result<Vec<f64>> {
    let d = c.len();
    let bound = tol * norm(c).max(1.0);
    // Objective change between two points, written so that it carries no
    // cancellation error when the points are close.
    let change = |s: &[f64], hs: &[f64], t: &[f64], ht: &[f64]| {
        let delta = sub(t, s);
        let mid: Vec<f64> = s.iter().zip(t).map(|(a, b)| a + b).collect();
        let hmid: Vec<f64> = hs.iter().zip(ht).map(|(a, b)| a + b).collect();
        dot(c, &delta)
            + 0.5 * dot(&hmid, &delta)
            + 0.25 * l_reg * dot(&mid, &delta) * (norm_sq(s) + norm_sq(t))
    };
    let mut s = vec![0.0; d];
    let mut hs = vec![0.0; d];
    let mut step = 1.0;
    let mut res = f64::INFINITY;
    for _ in 0..max_iters {
        let mut g = c.to_vec();
        axpy(1.0, &hs, &mut g);
        axpy(l_reg * norm_sq(&s), &s, &mut g);
        res = norm(&g);
        if res <= bound {
            return Ok(s);
        }
        let gg = res * res;
        loop {
            let mut trial = s.clone();
            axpy(-step, &g, &mut trial);
            let htrial = hvp(&trial);
            if change(&s, &hs, &trial, &htrial) <= -0.5 * step * gg || step < 1e-300 {
                s = trial;
                hs = htrial;
                break;
            }
            step *= 0.5;
        }
        step *= 2.0;
    }
    Err(Error::ToleranceNotMet {
        residual: res,
        tolerance: bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn identity(v: &[f64]) -> Vec<f64> {
        v.to_vec()
    }

    #[test]
    fn zero_rhs() {
        for m in [QuarticMethod::Eigen, QuarticMethod::GradientDescent { max_iters: 100 }] {
            let s = quartic_subproblem(&[0.0, 0.0], identity, 1.0, 1e-12, m).unwrap();
            assert_eq!(s, vec![0.0, 0.0]);
        }
    }

    #[test]
    fn linear_quadratic_closed_form() {
        let s = quartic_subproblem(&[-1.0, 0.0, 0.0], identity, 0.0, 1e-12, QuarticMethod::Eigen)
            .unwrap();
        assert!((s[0] - 1.0).abs() < 1e-12 && s[1].abs() < 1e-12);
    }

    #[test]
    fn cubic_root_example() {
        // t³ + t − 1 = 0
        let root = 0.682_327_803_828_019_3;
        for m in [
            QuarticMethod::Eigen,
            QuarticMethod::GradientDescent { max_iters: 10_000 },
        ] {
            let s = quartic_subproblem(&[-1.0, 0.0], identity, 1.0, 1e-12, m).unwrap();
            assert!((s[0] - root).abs() < 1e-10, "{m:?}: {s:?}");
        }
    }

    #[test]
    fn singular_hessian() {
        let zero = |v: &[f64]| vec![0.0; v.len()];
        let s = quartic_subproblem(&[-8.0, 0.0], zero, 1.0, 1e-12, QuarticMethod::Eigen).unwrap();
        assert!((s[0] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn cap_reports_residual() {
        let err = quartic_subproblem(
            &[-1.0, 3.0],
            identity,
            1.0,
            1e-14,
            QuarticMethod::GradientDescent { max_iters: 1 },
        )
        .unwrap_err();
        assert!(matches!(err, Error::ToleranceNotMet { .. }));
    }
}
