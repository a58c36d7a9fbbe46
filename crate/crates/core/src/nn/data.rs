//! Labelled datasets and seeded synthetic generators.
//!
//! Both generators min-max scale every feature column to `[0, 1]` over the
//! generated sample, matching the pixel range of image inputs.
//!
//! * Gaussian blobs: class `c` of `k` is centred at
//!   `mu_c[d] = radius * cos(2 pi c / k + pi d / informative)` for the first
//!   `informative` dimensions and `0` elsewhere; every coordinate gets
//!   `N(0, noise^2)` added. With two informative dimensions the centres sit on
//!   a circle.
//! * Concentric rings: class `c` lies on radius `c + 1` at a uniform angle with
//!   `N(0, noise^2)` radial jitter; `extra_dims` pure-noise `N(0, 1)` columns follow.

use ndarray::Array2;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::{NnError, Result};
use crate::seed::{derive_seed, rng_from_seed};

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub features: Array2<f32>,
    pub labels: Vec<usize>,
    pub class_count: usize,
}

impl Dataset {
    pub fn new(features: Array2<f32>, labels: Vec<usize>, class_count: usize) -> Result<Self> {
        if features.nrows() == 0 {
            return Err(NnError::Data("dataset is empty".into()));
        }
        if labels.len() != features.nrows() {
            return Err(NnError::Data(format!("{} labels for {} rows", labels.len(), features.nrows())));
        }
        if let Some(bad) = labels.iter().find(|&&y| y >= class_count) {
            return Err(NnError::Data(format!("label {bad} not below class count {class_count}")));
        }
        Ok(Self { features, labels, class_count })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dims(&self) -> usize {
        self.features.ncols()
    }

    pub fn subset(&self, idx: &[usize]) -> Result<Self> {
        let features = self.features.select(ndarray::Axis(0), idx);
        let labels = idx.iter().map(|&i| self.labels[i]).collect();
        Self::new(features, labels, self.class_count)
    }

    /// Row indices of each class, in ascending order.
    pub fn class_indices(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.class_count];
        for (i, &y) in self.labels.iter().enumerate() {
            out[y].push(i);
        }
        out
    }

    /// Seeded class-stratified sample of `per_class` rows per class, class-major order.
    pub fn stratified_indices(&self, per_class: usize, seed: u64) -> Result<Vec<usize>> {
        let mut out = Vec::with_capacity(per_class * self.class_count);
        for (c, mut idx) in self.class_indices().into_iter().enumerate() {
            if idx.len() < per_class {
                return Err(NnError::Sampling(format!(
                    "class {c} has {} samples, {per_class} requested",
                    idx.len()
                )));
            }
            idx.shuffle(&mut rng_from_seed(derive_seed(seed, &[c as u64])));
            out.extend_from_slice(&idx[..per_class]);
        }
        Ok(out)
    }

    /// Seeded uniform subset of `n` rows (all rows if `n >= len`), in ascending row order.
    pub fn sample_indices(&self, n: usize, seed: u64) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.len()).collect();
        if n < idx.len() {
            idx.shuffle(&mut rng_from_seed(seed));
            idx.truncate(n);
            idx.sort_unstable();
        }
        idx
    }

    /// Deterministic seeded split into `(first, second)` with `first_len` rows first.
    pub fn split(&self, first_len: usize, seed: u64) -> Result<(Self, Self)> {
        let mut idx: Vec<usize> = (0..self.len()).collect();
        idx.shuffle(&mut rng_from_seed(seed));
        let first_len = first_len.min(self.len());
        Ok((self.subset(&idx[..first_len])?, self.subset(&idx[first_len..])?))
    }
}

fn minmax_scale(features: &mut Array2<f64>) {
    for mut col in features.columns_mut() {
        let lo = col.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = col.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let span = hi - lo;
        col.mapv_inplace(|v| if span > 0.0 { (v - lo) / span } else { 0.0 });
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlobSpec {
    pub classes: usize,
    pub per_class: usize,
    pub dims: usize,
    pub informative: usize,
    pub radius: f64,
    pub noise: f64,
}

impl Default for BlobSpec {
    fn default() -> Self {
        Self { classes: 2, per_class: 200, dims: 2, informative: 2, radius: 2.0, noise: 0.5 }
    }
}

pub fn gaussian_blobs(spec: &BlobSpec, seed: u64) -> Result<Dataset> {
    if spec.classes < 2 || spec.per_class == 0 || spec.dims == 0 {
        return Err(NnError::Data(format!("invalid blob parameters {spec:?}")));
    }
    if spec.informative == 0 || spec.informative > spec.dims || !(spec.noise >= 0.0) {
        return Err(NnError::Data(format!("invalid blob parameters {spec:?}")));
    }
    let mut rng = rng_from_seed(seed);
    let noise = Normal::new(0.0, spec.noise).map_err(|e| NnError::Data(e.to_string()))?;
    let n = spec.classes * spec.per_class;
    let mut features = Array2::zeros((n, spec.dims));
    let mut labels = Vec::with_capacity(n);
    for c in 0..spec.classes {
        let phase = std::f64::consts::TAU * c as f64 / spec.classes as f64;
        for _ in 0..spec.per_class {
            let r = labels.len();
            for d in 0..spec.dims {
                let centre = if d < spec.informative {
                    spec.radius * (phase + std::f64::consts::PI * d as f64 / spec.informative as f64).cos()
                } else {
                    0.0
                };
                features[[r, d]] = centre + noise.sample(&mut rng);
            }
            labels.push(c);
        }
    }
    minmax_scale(&mut features);
    Dataset::new(features.mapv(|v| v as f32), labels, spec.classes)
}

pub fn concentric_rings(classes: usize, per_class: usize, noise: f64, extra_dims: usize, seed: u64) -> Result<Dataset> {
    if classes < 2 || per_class == 0 || !(noise >= 0.0) {
        return Err(NnError::Data("invalid ring parameters".into()));
    }
    let mut rng = rng_from_seed(seed);
    let jitter = Normal::new(0.0, noise).map_err(|e| NnError::Data(e.to_string()))?;
    let unit = Normal::new(0.0, 1.0).unwrap();
    let n = classes * per_class;
    let mut features = Array2::zeros((n, 2 + extra_dims));
    let mut labels = Vec::with_capacity(n);
    for c in 0..classes {
        for _ in 0..per_class {
            let r = labels.len();
            let theta = rng.random_range(0.0..std::f64::consts::TAU);
            let rad = (c + 1) as f64 + jitter.sample(&mut rng);
            features[[r, 0]] = rad * theta.cos();
            features[[r, 1]] = rad * theta.sin();
            for d in 0..extra_dims {
                features[[r, 2 + d]] = unit.sample(&mut rng);
            }
            labels.push(c);
        }
    }
    minmax_scale(&mut features);
    Dataset::new(features.mapv(|v| v as f32), labels, classes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn blobs_are_balanced_scaled_and_seeded() {
        let spec = BlobSpec { classes: 3, per_class: 50, dims: 5, informative: 2, ..Default::default() };
        let d = gaussian_blobs(&spec, 1).unwrap();
        assert_eq!(d.len(), 150);
        assert!(d.class_indices().iter().all(|c| c.len() == 50));
        assert!(d.features.iter().all(|v| (0.0..=1.0).contains(v)));
        assert_eq!(d, gaussian_blobs(&spec, 1).unwrap());
        assert_ne!(d, gaussian_blobs(&spec, 2).unwrap());
    }

    #[test]
    fn rings_shape() {
        let d = concentric_rings(3, 40, 0.1, 2, 0).unwrap();
        assert_eq!((d.len(), d.dims(), d.class_count), (120, 4, 3));
    }

    #[test]
    fn stratified_sampling() {
        let d = gaussian_blobs(&BlobSpec { per_class: 30, ..Default::default() }, 0).unwrap();
        let idx = d.stratified_indices(10, 4).unwrap();
        assert_eq!(idx.len(), 20);
        assert!(idx[..10].iter().all(|&i| d.labels[i] == 0));
        assert!(idx[10..].iter().all(|&i| d.labels[i] == 1));
        assert_eq!(idx, d.stratified_indices(10, 4).unwrap());
        assert!(matches!(d.stratified_indices(31, 4), Err(NnError::Sampling(_))));
    }

    #[test]
    fn dataset_validation() {
        assert!(Dataset::new(Array2::zeros((2, 2)), vec![0, 2], 2).is_err());
        assert!(Dataset::new(Array2::zeros((2, 2)), vec![0], 2).is_err());
        assert!(Dataset::new(Array2::zeros((0, 2)), vec![], 2).is_err());
    }
}
