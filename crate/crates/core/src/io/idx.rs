//! MNIST IDX files: big-endian magic `0x00000803` (u8 images, count x rows x
//! cols) and `0x00000801` (u8 labels). Pixels are scaled by 1/255.

use std::path::{Path, PathBuf};

use ndarray::Array2;

use super::{IoError, Reader, Result};
use crate::nn::Dataset;

const IMAGES_MAGIC: u32 = 0x0000_0803;
const LABELS_MAGIC: u32 = 0x0000_0801;

fn u32_be(r: &mut Reader, what: &str) -> Result<u32> {
    Ok(u32::from_be_bytes(r.take(4, what)?.try_into().unwrap()))
}

fn magic(r: &mut Reader, expected: u32, kind: &str) -> Result<()> {
    let found = u32_be(r, kind).map_err(|_| IoError::Format(format!("{kind} file too short for a header")))?;
    if found != expected {
        return Err(IoError::Format(format!("{kind} magic {found:#010x}, expected {expected:#010x}")));
    }
    Ok(())
}

/// Images as a `count x (rows * cols)` matrix with values in `[0, 1]`.
pub fn read_idx_images(bytes: &[u8]) -> Result<Array2<f32>> {
    let mut r = Reader::new(bytes);
    magic(&mut r, IMAGES_MAGIC, "images")?;
    let count = u32_be(&mut r, "image count")? as usize;
    let rows = u32_be(&mut r, "image rows")? as usize;
    let cols = u32_be(&mut r, "image columns")? as usize;
    if count == 0 || rows == 0 || cols == 0 {
        return Err(IoError::Format(format!("image header declares {count} x {rows} x {cols}")));
    }
    let size = count
        .checked_mul(rows * cols)
        .ok_or_else(|| IoError::Format("image header overflows".into()))?;
    let pixels = r.take(size, "pixel data")?;
    if r.remaining() > 0 {
        return Err(IoError::Corruption(format!("{} trailing bytes after pixel data", r.remaining())));
    }
    Ok(Array2::from_shape_vec((count, rows * cols), pixels.iter().map(|&p| p as f32 / 255.0).collect()).unwrap())
}

pub fn read_idx_labels(bytes: &[u8]) -> Result<Vec<usize>> {
    let mut r = Reader::new(bytes);
    magic(&mut r, LABELS_MAGIC, "labels")?;
    let count = u32_be(&mut r, "label count")? as usize;
    if count == 0 {
        return Err(IoError::Format("label file declares no labels".into()));
    }
    let labels = r.take(count, "label data")?;
    if r.remaining() > 0 {
        return Err(IoError::Corruption(format!("{} trailing bytes after label data", r.remaining())));
    }
    Ok(labels.iter().map(|&l| l as usize).collect())
}

pub fn read_mnist_idx(images_path: &Path, labels_path: &Path) -> Result<Dataset> {
    let images = read_idx_images(&std::fs::read(images_path)?)?;
    let labels = read_idx_labels(&std::fs::read(labels_path)?)?;
    if images.nrows() != labels.len() {
        return Err(IoError::Format(format!("{} images but {} labels", images.nrows(), labels.len())));
    }
    let classes = labels.iter().max().map_or(0, |&m| m + 1).max(10);
    Dataset::new(images, labels, classes).map_err(|e| IoError::Format(e.to_string()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MnistSplit {
    Train,
    Test,
}

impl MnistSplit {
    fn prefix(self) -> &'static str {
        match self {
            MnistSplit::Train => "train",
            MnistSplit::Test => "t10k",
        }
    }
}

/// Load a split from `dir` using the standard file names
/// (`train-images-idx3-ubyte`, `t10k-labels-idx1-ubyte`, ...).
pub fn read_mnist(dir: &Path, split: MnistSplit) -> Result<Dataset> {
    let path = |kind: &str, idx: &str| -> PathBuf { dir.join(format!("{}-{kind}-{idx}-ubyte", split.prefix())) };
    read_mnist_idx(&path("images", "idx3"), &path("labels", "idx1"))
}
