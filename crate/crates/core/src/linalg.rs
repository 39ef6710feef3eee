//! Small dense-vector helpers and an order-independent accumulator.

use nalgebra::DMatrix;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn norm_sq(a: &[f64]) -> f64 {
    dot(a, a)
}

/// `y += alpha * x`
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scale(alpha: f64, a: &[f64]) -> Vec<f64> {
    a.iter().map(|x| alpha * x).collect()
}

/// `(wa * a + wb * b)`
pub fn combine(wa: f64, a: &[f64], wb: f64, b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| wa * x + wb * y).collect()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Materializes a symmetric linear operator as a dense matrix by applying it to
/// the unit vectors, then symmetrizes away round-off.
pub fn dense_from_operator(dim: usize, apply: impl Fn(&[f64]) -> Vec<f64>) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(dim, dim);
    let mut e = vec![0.0; dim];
    for j in 0..dim {
        e[j] = 1.0;
        let col = apply(&e);
        for i in 0..dim {
            m[(i, j)] = col[i];
        }
        e[j] = 0.0;
    }
    let t = m.transpose();
    (m + t) * 0.5
}

const FIXED_SCALE: f64 = 18446744073709551616.0; // 2^64

/// Fixed-point accumulator: every term is rounded to a multiple of 2^-64 and
/// summed in `i128`, so the total is independent of summation order and of
/// how the terms are split into partial sums. Magnitudes must stay below 2^63.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactSum {
    acc: Vec<i128>,
}

impl ExactSum {
    pub fn zeros(len: usize) -> Self {
        Self { acc: vec![0; len] }
    }

    #[inline]
    fn quantize(v: f64) -> i128 {
        (v * FIXED_SCALE).round() as i128
    }

    #[inline]
    pub fn add(&mut self, i: usize, v: f64) {
        self.acc[i] += Self::quantize(v);
    }

    pub fn merge(&mut self, other: &ExactSum) {
        debug_assert_eq!(self.acc.len(), other.acc.len());
        for (a, b) in self.acc.iter_mut().zip(&other.acc) {
            *a += *b;
        }
    }

    pub fn len(&self) -> usize {
        self.acc.len()
    }

    pub fn is_empty(&self) -> bool {
        self.acc.is_empty()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.acc.iter().map(|&a| a as f64 / FIXED_SCALE).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_sum_is_order_independent() {
        let terms = [0.1, 1e-3, -0.7, 3.25, 1e-12, -2.0 / 3.0];
        let mut a = ExactSum::zeros(1);
        for t in terms {
            a.add(0, t);
        }
        let mut b = ExactSum::zeros(1);
        let mut c = ExactSum::zeros(1);
        for t in terms.iter().rev().take(3) {
            b.add(0, *t);
        }
        for t in terms.iter().take(3) {
            c.add(0, *t);
        }
        c.merge(&b);
        assert_eq!(a, c);
        let want: f64 = terms.iter().sum();
        assert!((a.to_f64()[0] - want).abs() < 1e-15);
    }

    #[test]
    fn dense_operator_roundtrip() {
        let m = dense_from_operator(2, |v| vec![2.0 * v[0] + v[1], v[0] + 3.0 * v[1]]);
        assert_eq!(m[(0, 1)], 1.0);
        assert_eq!(m[(1, 1)], 3.0);
    }
}
