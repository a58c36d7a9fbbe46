//! On-disk formats: activation dumps, models, MNIST IDX files and run configs.
//!
//! Binary containers are little-endian; IDX files are big-endian as their
//! external definition requires.

mod activations;
mod config;
mod idx;
mod model;

pub use activations::{
    checksum_name, read_activations, read_activations_file, split_checksum, write_activations, write_activations_file,
    ACTIVATIONS_MAGIC,
};
pub use config::{ConfigDocument, DatasetKind, RunConfig, SweepParameter, CONFIG_KEYS};
pub use idx::{read_idx_images, read_idx_labels, read_mnist, read_mnist_idx, MnistSplit};
pub use model::{read_model, read_model_file, write_model, write_model_file, MODEL_MAGIC};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("format error: {0}")]
    Format(String),
    #[error("corrupt data: {0}")]
    Corruption(String),
    #[error("config error on line {line}: {message}")]
    Config { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, IoError>;

/// Cursor over a byte buffer whose reads fail with a corruption error when the
/// buffer runs out.
pub(crate) struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    pub(crate) fn new(buf: &'a [u8]) -> Self {
        Self { buf, pos: 0 }
    }

    pub(crate) fn remaining(&self) -> usize {
        self.buf.len() - self.pos
    }

    pub(crate) fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8]> {
        if n > self.remaining() {
            return Err(IoError::Corruption(format!(
                "{what}: need {n} bytes at offset {}, {} left",
                self.pos,
                self.remaining()
            )));
        }
        let out = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    pub(crate) fn u32_le(&mut self, what: &str) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }

    pub(crate) fn u8(&mut self, what: &str) -> Result<u8> {
        Ok(self.take(1, what)?[0])
    }

    /// `count` little-endian f32 values.
    pub(crate) fn f32s(&mut self, count: usize, what: &str) -> Result<Vec<f32>> {
        let bytes = count
            .checked_mul(4)
            .ok_or_else(|| IoError::Corruption(format!("{what}: size overflow")))?;
        Ok(self
            .take(bytes, what)?
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
            .collect())
    }
}

pub(crate) fn put_f32s(out: &mut Vec<u8>, values: impl IntoIterator<Item = f32>) {
    for v in values {
        out.extend_from_slice(&v.to_le_bytes());
    }
}
