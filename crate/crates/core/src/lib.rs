//! Benchmarks for quantum machine learning models under classical
//! dimensionality reduction.
//!
//! A statevector simulator ([`sim`]) backs convolutional QNN classifiers
//! ([`qnn`]) and quantum kernels ([`kernel`]) that feed an SMO support vector
//! classifier ([`svm`]). Inputs come from the synthetic generators in
//! [`datasets`] and pass through the reducers in [`dimred`]. [`harness`] runs
//! seeded experiment suites and writes result tables.

pub mod datasets;
pub mod dimred;
pub mod embedding;
pub mod error;
pub mod harness;
pub mod kernel;
pub mod linalg;
pub mod nn;
pub mod optim;
pub mod qnn;
pub mod rng;
pub mod sim;
pub mod svm;

pub use error::{Error, Result};
