use ndarray::{s, Array2};

use super::train::argmax;
use super::{Dataset, MlpModel, NnError, Result};
use crate::prune::PruneMask;

const EVAL_CHUNK: usize = 2048;

/// Zero every masked connection. Retained weights and all biases are untouched.
pub fn apply_mask(model: &MlpModel, mask: &PruneMask) -> Result<MlpModel> {
    if mask.layers.len() != model.layers.len() {
        return Err(NnError::Shape(format!("{} masks for {} layers", mask.layers.len(), model.layers.len())));
    }
    let mut out = model.clone();
    for (k, (layer, m)) in out.layers.iter_mut().zip(&mask.layers).enumerate() {
        if (m.rows, m.cols) != layer.weights.dim() {
            return Err(NnError::Shape(format!(
                "mask {k} is {}x{}, weights are {:?}",
                m.rows,
                m.cols,
                layer.weights.dim()
            )));
        }
        for ((r, c), w) in layer.weights.indexed_iter_mut() {
            if !m.get(r, c) {
                *w = 0.0;
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub accuracy: f64,
    /// Maximum output probability per sample.
    pub confidences: Vec<f64>,
    pub predictions: Vec<usize>,
    pub correct: Vec<bool>,
}

/// Output probabilities for every row, computed in fixed-size chunks.
pub fn predict_proba(model: &MlpModel, features: &Array2<f32>) -> Result<Array2<f32>> {
    model.require_classifier()?;
    let mut out = Array2::zeros((features.nrows(), model.classes()));
    let mut start = 0;
    while start < features.nrows() {
        let end = (start + EVAL_CHUNK).min(features.nrows());
        let pass = model.forward(features.slice(s![start..end, ..]))?;
        out.slice_mut(s![start..end, ..]).assign(pass.output());
        start = end;
    }
    Ok(out)
}

pub fn evaluate(model: &MlpModel, data: &Dataset) -> Result<Evaluation> {
    let probs = predict_proba(model, &data.features)?;
    let mut confidences = Vec::with_capacity(data.len());
    let mut predictions = Vec::with_capacity(data.len());
    for row in probs.rows() {
        let p = argmax(row.iter().copied());
        predictions.push(p);
        confidences.push(row[p] as f64);
    }
    let correct: Vec<bool> = predictions.iter().zip(&data.labels).map(|(p, y)| p == y).collect();
    let accuracy = correct.iter().filter(|&&c| c).count() as f64 / data.len() as f64;
    Ok(Evaluation { accuracy, confidences, predictions, correct })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayerFootprint {
    pub dense_bytes: usize,
    /// Values, column indices, row offsets and a 16-byte header.
    pub sparse_weight_bytes: usize,
    pub bias_bytes: usize,
    pub nnz: usize,
}

impl LayerFootprint {
    pub fn sparse_bytes(&self) -> usize {
        self.sparse_weight_bytes + self.bias_bytes
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Footprint {
    pub layers: Vec<LayerFootprint>,
}

impl Footprint {
    pub fn dense_bytes(&self) -> usize {
        self.layers.iter().map(|l| l.dense_bytes).sum()
    }

    pub fn sparse_bytes(&self) -> usize {
        self.layers.iter().map(LayerFootprint::sparse_bytes).sum()
    }

    pub fn ratio(&self) -> f64 {
        self.sparse_bytes() as f64 / self.dense_bytes() as f64
    }
}

pub const CSR_HEADER_BYTES: usize = 16;

/// CSR bytes of a `rows x cols` matrix with `nnz` stored entries.
pub fn csr_bytes(rows: usize, nnz: usize) -> usize {
    4 * nnz + 4 * nnz + 4 * (rows + 1) + CSR_HEADER_BYTES
}

/// Storage cost with 4-byte values: dense weights and biases versus CSR weights
/// plus dense biases.
pub fn csr_footprint(model: &MlpModel) -> Footprint {
    let layers = model
        .layers
        .iter()
        .map(|l| {
            let nnz = l.weights.iter().filter(|&&w| w != 0.0).count();
            LayerFootprint {
                dense_bytes: 4 * (l.weights.len() + l.bias.len()),
                sparse_weight_bytes: csr_bytes(l.weights.nrows(), nnz),
                bias_bytes: 4 * l.bias.len(),
                nnz,
            }
        })
        .collect();
    Footprint { layers }
}
