pub mod agm;
pub mod bregman;
pub mod cli;
pub mod distsim;
pub mod error;
pub mod hyperfast;
pub mod inspag;
pub mod linalg;
pub mod metrics;
pub mod problem;
pub mod reference;

pub use error::{Error, Result};
