use rand::seq::SliceRandom;

use super::{
    euclidean_mst, fr_statistic, nn_bootstrap, permute_product, BlockSpec, GmiError, OriginLabels,
    Result, SampleMatrix,
};
use crate::seed::{derive_seed, rng_from_seed};

/// Estimated (conditional) geometric mutual information.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DependencyScore {
    /// `clamp(1 - R / n, 0, 1)`.
    pub value: f64,
    /// Friedman–Rafsky count `R` over the merged set of `2n` points.
    pub raw_fr_count: usize,
    /// Size `n` of each half of the split.
    pub subset_size: usize,
}

impl DependencyScore {
    pub(crate) fn from_count(raw_fr_count: usize, subset_size: usize) -> Self {
        let raw = 1.0 - raw_fr_count as f64 / subset_size as f64;
        Self { value: raw.clamp(0.0, 1.0), raw_fr_count, subset_size }
    }

    /// `1 - R / n` before clamping.
    pub fn unclamped(&self) -> f64 {
        1.0 - self.raw_fr_count as f64 / self.subset_size as f64
    }
}

/// Column-wise z-scoring with the population standard deviation.
/// Zero-variance columns become all zeros.
pub fn standardize(samples: &SampleMatrix) -> Result<SampleMatrix> {
    let (m, d) = (samples.rows(), samples.dims());
    if m < 2 {
        return Err(GmiError::InsufficientSamples { needed: 2, got: m });
    }
    let mut mean = vec![0.0; d];
    for i in 0..m {
        for (acc, v) in mean.iter_mut().zip(samples.row(i)) {
            *acc += v;
        }
    }
    mean.iter_mut().for_each(|v| *v /= m as f64);
    let mut var = vec![0.0; d];
    for i in 0..m {
        for ((acc, v), mu) in var.iter_mut().zip(samples.row(i)).zip(&mean) {
            *acc += (v - mu) * (v - mu);
        }
    }
    let scale: Vec<f64> = var
        .iter()
        .map(|v| {
            let sd = (v / m as f64).sqrt();
            if sd > 0.0 && sd.is_finite() { 1.0 / sd } else { 0.0 }
        })
        .collect();

    let mut data = Vec::with_capacity(m * d);
    for i in 0..m {
        data.extend(samples.row(i).iter().zip(&mean).zip(&scale).map(|((v, mu), s)| (v - mu) * s));
    }
    Ok(SampleMatrix::from_parts_unchecked(m, d, data))
}

/// Seeded split into two equal halves; an odd row count drops one random row.
fn split_halves(samples: &SampleMatrix, seed: u64) -> Result<(SampleMatrix, SampleMatrix)> {
    let m = samples.rows();
    let mut idx: Vec<usize> = (0..m).collect();
    idx.shuffle(&mut rng_from_seed(derive_seed(seed, &[0])));
    let n = m / 2;
    Ok((samples.select_rows(&idx[..n])?, samples.select_rows(&idx[n..2 * n])?))
}

fn score_against(s1: &SampleMatrix, surrogate: &SampleMatrix) -> Result<DependencyScore> {
    let n = s1.rows();
    let merged = standardize(&s1.vstack(surrogate)?)?;
    let tree = euclidean_mst(&merged)?;
    let labels = OriginLabels::split(n, surrogate.rows())?;
    let r = fr_statistic(&tree, &labels)?;
    Ok(DependencyScore::from_count(r, n))
}

fn check_rows(samples: &SampleMatrix) -> Result<()> {
    if samples.rows() < 4 {
        return Err(GmiError::InsufficientSamples { needed: 4, got: samples.rows() });
    }
    Ok(())
}

/// Geometric mutual information `I(X; Y)` between the X and Y blocks.
///
/// The surrogate half is a seeded permutation of the Y block, i.e. a sample
/// from the product of the empirical marginals.
pub fn gmi(samples: &SampleMatrix, spec: &BlockSpec, seed: u64) -> Result<DependencyScore> {
    spec.validate(samples.dims())?;
    if spec.has_z() {
        return Err(GmiError::Contract("gmi takes no Z block; use conditional_gmi"));
    }
    check_rows(samples)?;
    let (s1, s2) = split_halves(samples, seed)?;
    let surrogate = permute_product(&s2, spec, derive_seed(seed, &[1]))?;
    score_against(&s1, &surrogate)
}

/// Conditional geometric mutual information `I(X; Y | Z)`.
///
/// The surrogate half comes from the nearest-neighbour bootstrap on Z, and the
/// spanning tree is built over all of X, Y and Z.
pub fn conditional_gmi(samples: &SampleMatrix, spec: &BlockSpec, seed: u64) -> Result<DependencyScore> {
    spec.validate(samples.dims())?;
    if !spec.has_z() {
        return Err(GmiError::Contract("conditional_gmi needs a nonempty Z block; use gmi"));
    }
    check_rows(samples)?;
    let (s1, s2) = split_halves(samples, seed)?;
    let surrogate = nn_bootstrap(&s2, spec)?;
    score_against(&s1, &surrogate)
}
