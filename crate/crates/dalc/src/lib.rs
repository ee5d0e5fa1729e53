//! Domain adaptation toolkit for linear and kernelized classifiers.

pub mod bounds;
pub mod data;
pub mod error;
pub mod estimators;
pub mod kernels;
pub mod losses;
pub mod model;
pub mod objective;
pub mod optimizer;
pub mod validation;

pub use error::{DalcError, Result};
