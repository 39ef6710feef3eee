//! Datasets and the regularized logistic objective.

mod dataset;
mod fdcheck;
pub mod libsvm;
mod logreg;
mod synthetic;

pub use dataset::SparseDataset;
pub use fdcheck::{check_oracles, relative_error, FdCheckConfig, FdReport};
pub use logreg::{
    sigmoid, sigmoid_d1, softplus_neg, spectral_norm_gram, FeatureSplit, LogRegProblem,
    SmoothnessConstants,
};
pub use synthetic::generate_synthetic;
