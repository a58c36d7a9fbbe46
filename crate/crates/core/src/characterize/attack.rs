use ndarray::{s, Array2};

use super::{CharacterizeError, Result};
use crate::nn::{evaluate, Dataset, MlpModel};

pub const DEFAULT_ATTACK_STEPS: usize = 10;
const ATTACK_CHUNK: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AttackMode {
    /// Ascend the loss of the true class.
    Untargeted,
    /// Descend the loss of the class the clean input finds least likely.
    LeastLikely,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttackConfig {
    /// L-infinity budget.
    pub epsilon: f64,
    pub steps: usize,
    /// `None` uses `epsilon / steps`.
    pub step_size: Option<f64>,
    pub mode: AttackMode,
}

impl AttackConfig {
    pub fn new(epsilon: f64, mode: AttackMode) -> Self {
        Self { epsilon, steps: DEFAULT_ATTACK_STEPS, step_size: None, mode }
    }

    pub fn step(&self) -> f64 {
        self.step_size.unwrap_or(self.epsilon / self.steps as f64)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon >= 0.0) || !self.epsilon.is_finite() {
            return Err(CharacterizeError::Domain(format!("epsilon {} must be non-negative", self.epsilon)));
        }
        if self.steps == 0 {
            return Err(CharacterizeError::Domain("at least one step is required".into()));
        }
        if self.step_size.is_some_and(|s| !(s > 0.0) || !s.is_finite()) {
            return Err(CharacterizeError::Domain("step size must be positive".into()));
        }
        Ok(())
    }
}

/// Round `x` to an `f32` inside `[clean - eps, clean + eps] ∩ [0, 1]`.
fn project(x: f64, clean: f32, eps: f64) -> f32 {
    let lo = (clean as f64 - eps).max(0.0);
    let hi = (clean as f64 + eps).min(1.0);
    let mut v = x.clamp(lo, hi) as f32;
    if v as f64 > hi {
        v = v.next_down();
    }
    if (v as f64) < lo {
        v = v.next_up();
    }
    v
}

/// Iterative sign-gradient attack. After every step the batch is projected onto
/// the epsilon ball around `inputs` and onto `[0, 1]`.
pub fn iterative_attack(
    model: &MlpModel,
    inputs: &Array2<f32>,
    labels: &[usize],
    config: &AttackConfig,
) -> Result<Array2<f32>> {
    config.validate()?;
    if labels.len() != inputs.nrows() {
        return Err(CharacterizeError::Domain(format!("{} labels for {} inputs", labels.len(), inputs.nrows())));
    }
    if let Some(&y) = labels.iter().find(|&&y| y >= model.classes()) {
        return Err(CharacterizeError::Domain(format!("label {y} out of range")));
    }
    if inputs.iter().any(|v| !(0.0..=1.0).contains(v)) {
        return Err(CharacterizeError::Domain("inputs must lie in [0, 1]".into()));
    }
    let mut adv = inputs.clone();
    if config.epsilon == 0.0 {
        return Ok(adv);
    }
    let step = config.step() as f32;
    let mut start = 0;
    while start < inputs.nrows() {
        let end = (start + ATTACK_CHUNK).min(inputs.nrows());
        let clean = inputs.slice(s![start..end, ..]);
        let targets: Vec<usize> = match config.mode {
            AttackMode::Untargeted => labels[start..end].to_vec(),
            AttackMode::LeastLikely => {
                let pass = model.forward(clean)?;
                pass.output()
                    .rows()
                    .into_iter()
                    .map(|r| r.iter().enumerate().fold((0, f32::INFINITY), |b, (i, &p)| if p < b.1 { (i, p) } else { b }).0)
                    .collect()
            }
        };
        let direction = match config.mode {
            AttackMode::Untargeted => 1.0f32,
            AttackMode::LeastLikely => -1.0,
        };
        let mut x = clean.to_owned();
        for _ in 0..config.steps {
            let pass = model.forward(x.view())?;
            let mut d_out = pass.output().clone();
            for (r, &t) in targets.iter().enumerate() {
                d_out[[r, t]] -= 1.0;
            }
            let (_, grad) = model.backward(x.view(), &pass, d_out);
            x.zip_mut_with(&grad, |v, &g| {
                let sign = if g > 0.0 { 1.0 } else if g < 0.0 { -1.0 } else { 0.0 };
                *v += direction * step * sign;
            });
            x.zip_mut_with(&clean, |v, &c| *v = project(*v as f64, c, config.epsilon));
        }
        adv.slice_mut(s![start..end, ..]).assign(&x);
        start = end;
    }
    Ok(adv)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint {
    pub epsilon: f64,
    pub accuracy: f64,
}

/// Accuracy under attack at each epsilon on a seeded subset of at most
/// `samples` rows. `config.epsilon` is replaced by each list entry.
pub fn attack_curve(
    model: &MlpModel,
    data: &Dataset,
    epsilons: &[f64],
    config: &AttackConfig,
    samples: usize,
    seed: u64,
) -> Result<Vec<CurvePoint>> {
    if epsilons.is_empty() {
        return Err(CharacterizeError::Domain("no epsilons given".into()));
    }
    let idx = data.sample_indices(samples, seed);
    let subset = data.subset(&idx)?;
    epsilons
        .iter()
        .map(|&epsilon| {
            let cfg = AttackConfig { epsilon, ..config.clone() };
            let adv = iterative_attack(model, &subset.features, &subset.labels, &cfg)?;
            let attacked = Dataset { features: adv, ..subset.clone() };
            Ok(CurvePoint { epsilon, accuracy: evaluate(model, &attacked)?.accuracy })
        })
        .collect()
}
