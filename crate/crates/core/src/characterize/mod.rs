//! Calibration and adversarial robustness of trained classifiers.

mod attack;
mod calibration;

pub use attack::{attack_curve, iterative_attack, AttackConfig, AttackMode, CurvePoint, DEFAULT_ATTACK_STEPS};
pub use calibration::{ece, BinStats, ReliabilityProfile, DEFAULT_BINS};

use thiserror::Error;

use crate::nn::NnError;

#[derive(Debug, Error)]
pub enum CharacterizeError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error(transparent)]
    Model(#[from] NnError),
}

pub type Result<T> = std::result::Result<T, CharacterizeError>;
