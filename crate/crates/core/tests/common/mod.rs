//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};

use inspag::problem::LogRegProblem;

pub struct Reference {
    pub x: Vec<f64>,
    pub value: f64,
    pub grad_norm: f64,
}

fn dense_hessian(p: &LogRegProblem, x: &[f64]) -> DMatrix<f64> {
    let d = p.dim();
    let mut h = DMatrix::zeros(d, d);
    for j in 0..d {
        let mut e = vec![0.0; d];
        e[j] = 1.0;
        let col = p.hessian_vec(x, &e).unwrap();
        for i in 0..d {
            h[(i, j)] = col[i];
        }
    }
    0.5 * (&h + h.transpose())
}

/// Damped Newton from the origin until `‖∇F‖ ≤ tol` (or no further decrease).
pub fn newton_reference(p: &LogRegProblem, tol: f64) -> Reference {
    let d = p.dim();
    let mut x = vec![0.0; d];
    let mut f = p.loss_value(&x).unwrap();
    for _ in 0..200 {
        let g = p.gradient(&x).unwrap();
        let gn = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        if gn <= tol {
            break;
        }
        let h = dense_hessian(p, &x);
        let step = h.cholesky().expect("Hessian must be positive definite").solve(&DVector::from_vec(g.clone()));
        let mut t = 1.0;
        let mut moved = false;
        for _ in 0..60 {
            let cand: Vec<f64> = x.iter().zip(step.iter()).map(|(a, s)| a - t * s).collect();
            let fc = p.loss_value(&cand).unwrap();
            if fc <= f {
                moved = cand != x;
                x = cand;
                f = fc;
                break;
            }
            t *= 0.5;
        }
        if !moved {
            break;
        }
    }
    let g = p.gradient(&x).unwrap();
    Reference {
        grad_norm: g.iter().map(|v| v * v).sum::<f64>().sqrt(),
        value: f,
        x,
    }
}

/// Largest eigenvalue of `AᵀA` (rows of `A` are the samples) from a dense eigendecomposition.
pub fn dense_gram_top_eigenvalue(p: &LogRegProblem) -> f64 {
    let data = p.data();
    let d = data.dim();
    let mut g = DMatrix::<f64>::zeros(d, d);
    for i in 0..data.len() {
        let (idx, val) = data.row(i);
        for (a, &ia) in idx.iter().enumerate() {
            for (b, &ib) in idx.iter().enumerate() {
                g[(ia, ib)] += val[a] * val[b];
            }
        }
    }
    g.symmetric_eigenvalues().max()
}
