//! Geometric mutual information estimation.
//!
//! The estimators compare a set of joint samples against a surrogate set
//! drawn from the (conditional) product distribution. Both sets are merged,
//! a Euclidean minimum spanning tree is built over the merged points and the
//! number of tree edges joining a joint point to a surrogate point (the
//! Friedman–Rafsky count `R`) is turned into a score `1 - R / n`, where `n`
//! is the size of each half.

mod estimator;
mod fr;
mod mst;
mod oracle;
mod samples;
mod surrogate;

pub use estimator::{conditional_gmi, gmi, standardize, DependencyScore};
pub use fr::{fr_statistic, Origin, OriginLabels};
pub use mst::{euclidean_mst, Edge, EdgeList};
pub use oracle::{gaussian_gmi_oracle, DEFAULT_ORACLE_GRID};
pub use samples::{BlockSpec, SampleMatrix};
pub use surrogate::{nn_bootstrap, permute_product};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GmiError {
    #[error("insufficient samples: need at least {needed}, got {got}")]
    InsufficientSamples { needed: usize, got: usize },
    #[error("non-finite sample value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },
    #[error("shape error: {0}")]
    Shape(String),
    #[error("invalid block specification: {0}")]
    InvalidBlocks(String),
    #[error("origin labels must contain both joint and surrogate points")]
    DegenerateLabels,
    #[error("contract violation: {0}")]
    Contract(&'static str),
    #[error("domain error: {0}")]
    Domain(String),
}

pub type Result<T> = std::result::Result<T, GmiError>;
