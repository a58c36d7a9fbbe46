//! Model container.
//!
//! ```text
//! "MINTMDL1"
//! u32  layer count
//! per layer:
//!   u32  N_out
//!   u32  N_in
//!   u8   activation (0 relu, 1 softmax)
//!   f32  x N_out*N_in  weights, row-major
//!   f32  x N_out       biases
//! ```

use std::path::Path;

use ndarray::{Array1, Array2};

use super::{put_f32s, IoError, Reader, Result};
use crate::nn::{Activation, DenseLayer, MlpModel};

pub const MODEL_MAGIC: &[u8; 8] = b"MINTMDL1";

pub fn write_model(model: &MlpModel) -> Result<Vec<u8>> {
    model.validate().map_err(|e| IoError::Format(e.to_string()))?;
    let mut out = MODEL_MAGIC.to_vec();
    out.extend_from_slice(&(model.layers.len() as u32).to_le_bytes());
    for l in &model.layers {
        let (rows, cols) = l.weights.dim();
        let rows = u32::try_from(rows).map_err(|_| IoError::Format("layer too large".into()))?;
        let cols = u32::try_from(cols).map_err(|_| IoError::Format("layer too large".into()))?;
        out.extend_from_slice(&rows.to_le_bytes());
        out.extend_from_slice(&cols.to_le_bytes());
        out.push(l.activation.tag());
        put_f32s(&mut out, l.weights.iter().copied());
        put_f32s(&mut out, l.bias.iter().copied());
    }
    Ok(out)
}

pub fn write_model_file(model: &MlpModel, path: &Path) -> Result<()> {
    std::fs::write(path, write_model(model)?)?;
    Ok(())
}

pub fn read_model(bytes: &[u8]) -> Result<MlpModel> {
    if bytes.len() < MODEL_MAGIC.len() || &bytes[..8] != MODEL_MAGIC {
        return Err(IoError::Format("not a model file (bad magic)".into()));
    }
    let mut r = Reader::new(&bytes[8..]);
    let count = r.u32_le("layer count")? as usize;
    if count == 0 {
        return Err(IoError::Format("model has no layers".into()));
    }
    let mut layers = Vec::new();
    for k in 0..count {
        let rows = r.u32_le("output count")? as usize;
        let cols = r.u32_le("input count")? as usize;
        let tag = r.u8("activation tag")?;
        let activation =
            Activation::from_tag(tag).ok_or_else(|| IoError::Format(format!("layer {k}: unknown activation tag {tag}")))?;
        let size = rows.checked_mul(cols).ok_or_else(|| IoError::Corruption("size overflow".into()))?;
        let weights = r.f32s(size, "weights")?;
        let bias = r.f32s(rows, "biases")?;
        layers.push(DenseLayer {
            weights: Array2::from_shape_vec((rows, cols), weights).map_err(|e| IoError::Format(e.to_string()))?,
            bias: Array1::from_vec(bias),
            activation,
        });
    }
    if r.remaining() > 0 {
        return Err(IoError::Corruption(format!("{} trailing bytes after the last layer", r.remaining())));
    }
    MlpModel::from_layers(layers).map_err(|e| IoError::Format(e.to_string()))
}

pub fn read_model_file(path: &Path) -> Result<MlpModel> {
    read_model(&std::fs::read(path)?)
}
