//! Dependency-driven pruning masks.
//!
//! For each pair of consecutive layers `(l, l+1)` the filters of both layers
//! are split into consecutive groups, a conditional GMI score `rho` is
//! estimated for every (consumer group, producer group) pair, and connections
//! whose score falls below the threshold `delta` are zeroed. A per-layer cap
//! `gamma` bounds the fraction of group pairs one layer pair may lose.

mod grouping;
mod mask;
mod maskfile;
mod report;
mod solve;
mod table;
mod threshold;

pub use grouping::{group_filters, Grouping};
pub use mask::{build_masks, masks_from_retained, LayerMask, PruneMask};
pub use maskfile::{read_mask, read_mask_file, write_mask, write_mask_file};
pub use report::{sparsity_report, LayerShape, LayerSparsity, SparsityReport};
pub use solve::{solve_delta_for_sparsity, DeltaSolution, SOLVER_ITERATIONS};
pub use table::{compute_dependency_table, pair_seed, DependencyTable};
pub use threshold::{apply_threshold, gamma_cap, pruned_fraction, RetainedSets, ThresholdPolicy};

use thiserror::Error;

use crate::gmi::GmiError;

#[derive(Debug, Error)]
pub enum PruneError {
    #[error("invalid grouping: {0}")]
    InvalidGrouping(String),
    #[error("shape error: {0}")]
    Shape(String),
    #[error("invalid policy: {0}")]
    Policy(String),
    #[error("mask file line {line}: {msg}")]
    MaskFormat { line: usize, msg: String },
    #[error(transparent)]
    Estimator(#[from] GmiError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, PruneError>;
