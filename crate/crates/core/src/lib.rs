//! Soft two-way clustering driven by self-information contrast.
//!
//! The core idea: fit per-cluster probability models under a soft assignment
//! vector `s`, score the assignment by how predictable each cluster is under
//! its own model, and optimize `s` directly. The cluster that ends up
//! "formulaic" (repetitive, low surprise under the right model) is reported
//! as label 1.

pub mod baselines;
pub mod corpus;
pub mod data;
pub mod discrete;
pub mod error;
pub mod eval;
pub mod gaussian;
pub mod method;
pub mod optimize;
pub mod synth;

mod linalg;
mod seed;

pub use data::{CountMatrix, FeatureMatrix, RealMatrix, SelfInfoDistribution, WeightVector};
pub use error::{Error, Result};
pub use method::Method;
pub use optimize::{harden, relax, OptimizerConfig};
