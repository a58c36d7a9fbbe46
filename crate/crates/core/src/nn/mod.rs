//! A small dense network engine: forward/backward passes, SGD training with
//! optional weight masks, activation capture, evaluation and storage accounting.

mod capture;
mod data;
mod eval;
mod model;
mod train;

pub use capture::{activation_layer_name, capture_activations, spatial_average, ActivationDump, ActivationLayer};
pub use data::{concentric_rings, gaussian_blobs, BlobSpec, Dataset};
pub use eval::{apply_mask, csr_bytes, csr_footprint, evaluate, predict_proba, Evaluation, Footprint, LayerFootprint, CSR_HEADER_BYTES};
pub use model::{Activation, DenseLayer, ForwardPass, Gradients, Mlp, MlpModel, Scalar};
pub use train::{retrain_masked, train, EpochStats, TrainConfig, TrainTrace};

use thiserror::Error;

use crate::prune::LayerShape;

#[derive(Debug, Error)]
pub enum NnError {
    #[error("shape error: {0}")]
    Shape(String),
    #[error("training diverged in epoch {epoch}")]
    Diverged { epoch: usize },
    #[error("sampling error: {0}")]
    Sampling(String),
    #[error("invalid training configuration: {0}")]
    Config(String),
    #[error("invalid dataset: {0}")]
    Data(String),
}

pub type Result<T> = std::result::Result<T, NnError>;

/// Filter-level shapes of the model's weight layers, named `fc1`, `fc2`, ...
pub fn layer_shapes<T: Scalar>(model: &Mlp<T>) -> Vec<LayerShape> {
    model
        .layers
        .iter()
        .enumerate()
        .map(|(k, l)| LayerShape::dense(&activation_layer_name(k + 1), l.outputs(), l.inputs()))
        .collect()
}
