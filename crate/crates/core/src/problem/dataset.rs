use crate::error::{Error, Result};

/// Row-sparse feature matrix with ±1 labels, stored in CSR form.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseDataset {
    dim: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
    labels: Vec<f64>,
}

impl SparseDataset {
    /// Builds a dataset from `(index, value)` rows. Indices within a row are
    /// sorted; explicit zeros are dropped. Duplicate or out-of-range indices,
    /// non-finite values and labels outside {-1, +1} are rejected.
    pub fn from_rows(rows: Vec<Vec<(usize, f64)>>, labels: Vec<f64>, dim: usize) -> Result<Self> {
        if rows.len() != labels.len() {
            return Err(Error::Input(format!(
                "{} rows but {} labels",
                rows.len(),
                labels.len()
            )));
        }
        let mut indptr = Vec::with_capacity(rows.len() + 1);
        let mut indices = Vec::new();
        let mut values = Vec::new();
        indptr.push(0);
        for (r, mut row) in rows.into_iter().enumerate() {
            row.sort_by_key(|&(j, _)| j);
            for w in row.windows(2) {
                if w[0].0 == w[1].0 {
                    return Err(Error::Input(format!("row {r}: duplicate index {}", w[0].0)));
                }
            }
            for (j, v) in row {
                if j >= dim {
                    return Err(Error::Input(format!("row {r}: index {j} >= dimension {dim}")));
                }
                if !v.is_finite() {
                    return Err(Error::Input(format!("row {r}: non-finite value at index {j}")));
                }
                if v != 0.0 {
                    indices.push(j);
                    values.push(v);
                }
            }
            indptr.push(indices.len());
        }
        for (r, &y) in labels.iter().enumerate() {
            if y != 1.0 && y != -1.0 {
                return Err(Error::Input(format!("row {r}: label {y} is not ±1")));
            }
        }
        Ok(Self {
            dim,
            indptr,
            indices,
            values,
            labels,
        })
    }

    /// A dataset with no samples; useful for pure-ridge reference functions.
    pub fn empty(dim: usize) -> Self {
        Self {
            dim,
            indptr: vec![0],
            indices: Vec::new(),
            values: Vec::new(),
            labels: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    #[inline]
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let (a, b) = (self.indptr[i], self.indptr[i + 1]);
        (&self.indices[a..b], &self.values[a..b])
    }

    #[inline]
    pub fn label(&self, i: usize) -> f64 {
        self.labels[i]
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    #[inline]
    pub fn row_dot(&self, i: usize, x: &[f64]) -> f64 {
        let (idx, val) = self.row(i);
        idx.iter().zip(val).map(|(&j, &v)| v * x[j]).sum()
    }

    pub fn row_norm_sq(&self, i: usize) -> f64 {
        self.row(i).1.iter().map(|v| v * v).sum()
    }

    /// New dataset holding the given rows, in the given order.
    pub fn select(&self, rows: &[usize]) -> Self {
        let mut indptr = Vec::with_capacity(rows.len() + 1);
        let mut indices = Vec::new();
        let mut values = Vec::new();
        let mut labels = Vec::with_capacity(rows.len());
        indptr.push(0);
        for &r in rows {
            let (idx, val) = self.row(r);
            indices.extend_from_slice(idx);
            values.extend_from_slice(val);
            indptr.push(indices.len());
            labels.push(self.labels[r]);
        }
        Self {
            dim: self.dim,
            indptr,
            indices,
            values,
            labels,
        }
    }

    /// Number of rows in which each feature is nonzero.
    pub fn column_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.dim];
        for &j in &self.indices {
            counts[j] += 1;
        }
        counts
    }

    /// `A^T (A v)` where `A` has rows `label_i * xi_i`.
    pub fn gram_apply(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for i in 0..self.len() {
            // label² = 1
            let t = self.row_dot(i, v);
            let (idx, val) = self.row(i);
            for (&j, &a) in idx.iter().zip(val) {
                out[j] += t * a;
            }
        }
        out
    }
}
