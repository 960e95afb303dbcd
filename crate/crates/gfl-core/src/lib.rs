//! Core numerics for the GFL toolkit: a hand-rolled tensor kernel, a GRU
//! binary classifier with exact backpropagation through time, a tabular GAN,
//! a schema-driven dataset pipeline, and classification metrics.
//!
//! Everything here is deterministic: every random draw flows through
//! a `ChaCha8Rng` seeded via [`seed`], so a fixed seed reproduces models,
//! partitions, and synthetic corpora bit for bit, across runs and machines.

pub mod data;
pub mod error;
pub mod gan;
pub mod metrics;
pub mod nn;
pub mod seed;
pub mod tensor;
pub mod weights;

pub use error::{CoreError, Result};
pub use nn::dense::{Activation, DenseNet, DenseSpec};
pub use nn::gru::GruClassifier;
pub use nn::loss::{bce, loss_bce, PROB_EPS};
pub use tensor::Tensor;
pub use weights::{sgd_step, ModelWeights, SgdConfig};
