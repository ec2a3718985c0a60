//! Graph neural network classifier for binary user-satisfaction labels.
//!
//! Tabular records become hub-and-spoke graphs, pass through graph
//! convolutions, an optional edge-attention layer and a global readout, and
//! end in a two-class softmax trained with cross-entropy. All numeric code is
//! generic over [`Scalar`]; `f64` is the reference precision.

pub mod checkpoint;
pub mod data;
pub mod error;
pub mod graph;
pub mod layers;
pub mod linalg;
pub mod metrics;
pub mod rng;
pub mod scalar;
pub mod training;

pub use checkpoint::Checkpoint;
pub use error::{Error, Result};
pub use graph::{AdjacencyIndex, Graph, NormScheme, Permutation};
pub use layers::{model_forward, predict, ModelConfig, ModelParams, ReadoutMode};
pub use linalg::Matrix;
pub use rng::{Rng, Stream};
pub use scalar::Scalar;
pub use training::{evaluate, grad_check, train, TrainConfig};

/// Double-precision aliases.
pub type Matrix64 = Matrix<f64>;
pub type Graph64 = Graph<f64>;
pub type Params64 = ModelParams<f64>;
pub type Dataset64 = data::LabeledDataset<f64>;

/// Single-precision aliases.
pub type Matrix32 = Matrix<f32>;
pub type Graph32 = Graph<f32>;
pub type Params32 = ModelParams<f32>;
pub type Dataset32 = data::LabeledDataset<f32>;
