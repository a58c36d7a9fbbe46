use rayon::prelude::*;

use super::{Grouping, PruneError, Result};
use crate::gmi::{conditional_gmi, gmi, BlockSpec, SampleMatrix};
use crate::seed::derive_seed;

/// Scores `rho[i][j]` between consumer group `i` of layer `l + 1` and producer
/// group `j` of layer `l`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DependencyTable {
    pub layer_pair: usize,
    consumer_groups: usize,
    producer_groups: usize,
    rho: Vec<f64>,
}

impl DependencyTable {
    pub fn from_values(
        layer_pair: usize,
        consumer_groups: usize,
        producer_groups: usize,
        rho: Vec<f64>,
    ) -> Result<Self> {
        if consumer_groups == 0 || producer_groups == 0 {
            return Err(PruneError::Shape("dependency table needs at least one cell".into()));
        }
        if rho.len() != consumer_groups * producer_groups {
            return Err(PruneError::Shape(format!(
                "{} scores for a {consumer_groups}x{producer_groups} table",
                rho.len()
            )));
        }
        if let Some(bad) = rho.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(PruneError::Shape(format!("score {bad} outside [0, 1]")));
        }
        Ok(Self { layer_pair, consumer_groups, producer_groups, rho })
    }

    pub fn consumer_groups(&self) -> usize {
        self.consumer_groups
    }

    pub fn producer_groups(&self) -> usize {
        self.producer_groups
    }

    pub fn rho(&self, consumer: usize, producer: usize) -> f64 {
        self.rho[consumer * self.producer_groups + producer]
    }

    pub fn values(&self) -> &[f64] {
        &self.rho
    }
}

/// Seed of cell `(i, j)` of layer pair `l`.
pub fn pair_seed(master_seed: u64, layer_pair: usize, consumer: usize, producer: usize) -> u64 {
    derive_seed(master_seed, &[layer_pair as u64, consumer as u64, producer as u64])
}

fn is_constant(samples: &SampleMatrix, col: usize) -> bool {
    let first = samples.get(0, col);
    (1..samples.rows()).all(|i| samples.get(i, col) == first)
}

/// Estimate every cell of the dependency table for layer pair `layer_pair`.
///
/// For cell `(i, j)`: X is producer group `j`, Y is consumer group `i` and Z
/// is every other producer column. Producer columns that are constant over all
/// rows carry no conditioning information and are left out of Z. When the
/// producer has a single group, Z is empty and the unconditional estimator is
/// used. Cells run in parallel; each draws randomness only from
/// [`pair_seed`], so the table equals a sequential evaluation.
pub fn compute_dependency_table(
    producer: &SampleMatrix,
    consumer: &SampleMatrix,
    producer_groups: &Grouping,
    consumer_groups: &Grouping,
    layer_pair: usize,
    master_seed: u64,
) -> Result<DependencyTable> {
    if producer.rows() != consumer.rows() {
        return Err(PruneError::Shape(format!(
            "producer has {} rows, consumer has {}",
            producer.rows(),
            consumer.rows()
        )));
    }
    if producer.dims() != producer_groups.filters() || consumer.dims() != consumer_groups.filters() {
        return Err(PruneError::Shape("grouping filter counts do not match activation columns".into()));
    }

    let informative: Vec<bool> = (0..producer.dims()).map(|c| !is_constant(producer, c)).collect();
    let cells: Vec<(usize, usize)> = (0..consumer_groups.len())
        .flat_map(|i| (0..producer_groups.len()).map(move |j| (i, j)))
        .collect();

    let rho = cells
        .par_iter()
        .map(|&(i, j)| {
            let x = producer_groups.range(j);
            let y = consumer_groups.range(i);
            let z: Vec<usize> =
                (0..producer.dims()).filter(|c| !x.contains(c) && informative[*c]).collect();
            let xs = producer.select_columns(&x.clone().collect::<Vec<_>>())?;
            let ys = consumer.select_columns(&y.clone().collect::<Vec<_>>())?;
            let mut joint = xs.hstack(&ys)?;
            let seed = pair_seed(master_seed, layer_pair, i, j);
            let score = if producer_groups.len() == 1 || z.is_empty() {
                gmi(&joint, &BlockSpec::contiguous(x.len(), y.len(), 0), seed)?
            } else {
                joint = joint.hstack(&producer.select_columns(&z)?)?;
                conditional_gmi(&joint, &BlockSpec::contiguous(x.len(), y.len(), z.len()), seed)?
            };
            Ok(score.value)
        })
        .collect::<Result<Vec<f64>>>()?;

    DependencyTable::from_values(layer_pair, consumer_groups.len(), producer_groups.len(), rho)
}
