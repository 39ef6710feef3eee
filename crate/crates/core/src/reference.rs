//! High-accuracy reference minimizers for certificates and tests.

use crate::error::{Error, Result};
use crate::hyperfast::SmoothOracle;
use crate::linalg::{axpy, dense_from_operator, dot, norm};
use nalgebra::DVector;

#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceSolution {
    pub point: Vec<f64>,
    pub value: f64,
    pub grad_norm: f64,
    pub iterations: usize,
}

/// Damped Newton with a dense Hessian and Armijo backtracking. Stops when
/// `‖∇f‖ ≤ grad_tol` or when a full step no longer changes the iterate.
pub fn newton_minimize<O: SmoothOracle + ?Sized>(
    oracle: &O,
    x0: &[f64],
    grad_tol: f64,
    max_iter: usize,
) -> Result<ReferenceSolution> {
    let d = oracle.dim();
    let mut x = x0.to_vec();
    let mut fx = oracle.value(&x);
    let mut g = oracle.grad(&x);
    for it in 0..max_iter {
        let gn = norm(&g);
        if gn <= grad_tol {
            return Ok(ReferenceSolution {
                point: x,
                value: fx,
                grad_norm: gn,
                iterations: it,
            });
        }
        let h = dense_from_operator(d, |v| oracle.hvp(&x, v));
        let rhs = DVector::from_column_slice(&g);
        let dir = match h.clone().cholesky() {
            Some(ch) => ch.solve(&rhs),
            None => h
                .lu()
                .solve(&rhs)
                .ok_or_else(|| Error::Internal("singular Hessian in reference solve".into()))?,
        };
        let step: Vec<f64> = dir.iter().map(|v| -v).collect();
        let slope = dot(&g, &step);
        let mut t = 1.0;
        let mut moved = false;
        while t > 1e-12 {
            let mut trial = x.clone();
            axpy(t, &step, &mut trial);
            let ft = oracle.value(&trial);
            if ft <= fx + 1e-4 * t * slope || (t == 1.0 && ft <= fx) {
                moved = trial != x;
                x = trial;
                fx = ft;
                break;
            }
            t *= 0.5;
        }
        g = oracle.grad(&x);
        if !moved {
            let gn = norm(&g);
            return Ok(ReferenceSolution {
                point: x,
                value: fx,
                grad_norm: gn,
                iterations: it + 1,
            });
        }
    }
    let gn = norm(&g);
    if gn <= grad_tol * 1e3 {
        Ok(ReferenceSolution {
            point: x,
            value: fx,
            grad_norm: gn,
            iterations: max_iter,
        })
    } else {
        Err(Error::NonConvergence {
            iterations: max_iter,
            last_gap: gn,
        })
    }
}

/// Minimizer of a regularized logistic problem to machine precision.
pub fn logistic_reference(problem: &crate::problem::LogRegProblem) -> Result<ReferenceSolution> {
    let oracle = crate::hyperfast::LogisticOracle::new(problem)?;
    newton_minimize(&oracle, &vec![0.0; problem.dim()], 1e-14, 200)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperfast::testfns::StronglyConvexQuartic;
    use crate::problem::{generate_synthetic, LogRegProblem};

    #[test]
    fn quartic_center() {
        let f = StronglyConvexQuartic::new(vec![1.0, -2.0], 0.1);
        let sol = newton_minimize(&f, &[0.0, 0.0], 1e-14, 200).unwrap();
        assert!(crate::linalg::dist(&sol.point, &f.center) < 1e-10);
    }

    #[test]
    fn logistic_gradient_vanishes() {
        let data = generate_synthetic(4, 200, 5, 1.0).unwrap();
        let p = LogRegProblem::new(data, 1e-3, 1e-3).unwrap();
        let sol = logistic_reference(&p).unwrap();
        assert!(norm(&p.gradient(&sol.point).unwrap()) <= 1e-12);
    }
}
