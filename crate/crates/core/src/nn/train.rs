use ndarray::{Array1, Array2, Axis};
use rand::seq::SliceRandom;

use super::{apply_mask, Dataset, MlpModel, NnError, Result};
use crate::prune::PruneMask;
use crate::seed::{derive_seed, rng_from_seed};

/// Mini-batch SGD settings. Defaults are the MLP training setup: 30 epochs,
/// batch 256, learning rate 0.1 decayed by 0.1 at epochs 10 and 20, weight
/// decay 1e-4, momentum 0.9.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    /// Epochs at which the learning rate is multiplied by `lr_multiplier`.
    pub milestones: Vec<usize>,
    pub lr_multiplier: f64,
    pub weight_decay: f64,
    pub momentum: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 30,
            batch_size: 256,
            learning_rate: 0.1,
            milestones: vec![10, 20],
            lr_multiplier: 0.1,
            weight_decay: 1e-4,
            momentum: 0.9,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.batch_size == 0 {
            return Err(NnError::Config("batch size must be at least 1".into()));
        }
        if !(self.learning_rate > 0.0) || !self.learning_rate.is_finite() {
            return Err(NnError::Config("learning rate must be positive".into()));
        }
        if self.milestones.windows(2).any(|w| w[0] >= w[1]) {
            return Err(NnError::Config("milestones must be strictly increasing".into()));
        }
        if !(0.0..1.0).contains(&self.momentum) || !(self.weight_decay >= 0.0) || !(self.lr_multiplier > 0.0) {
            return Err(NnError::Config("momentum, weight decay or multiplier out of range".into()));
        }
        Ok(())
    }

    pub fn lr_at(&self, epoch: usize) -> f64 {
        let decays = self.milestones.iter().filter(|&&m| m <= epoch).count();
        self.learning_rate * self.lr_multiplier.powi(decays as i32)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpochStats {
    pub epoch: usize,
    pub learning_rate: f64,
    pub mean_loss: f64,
    pub train_accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrainTrace {
    pub epochs: Vec<EpochStats>,
    /// Loss of every mini-batch, in order.
    pub batch_losses: Vec<f64>,
}

pub fn train(model: &MlpModel, data: &Dataset, config: &TrainConfig) -> Result<(MlpModel, TrainTrace)> {
    fit(model, data, config, None)
}

/// Train with a fixed mask: gradients of masked weights are zeroed and masked
/// weights are reset to zero after every update.
pub fn retrain_masked(
    model: &MlpModel,
    mask: &PruneMask,
    data: &Dataset,
    config: &TrainConfig,
) -> Result<(MlpModel, TrainTrace)> {
    fit(model, data, config, Some(mask))
}

fn fit(model: &MlpModel, data: &Dataset, config: &TrainConfig, mask: Option<&PruneMask>) -> Result<(MlpModel, TrainTrace)> {
    config.validate()?;
    model.validate()?;
    model.require_classifier()?;
    if data.dims() != model.inputs() {
        return Err(NnError::Shape(format!("data has {} features, model expects {}", data.dims(), model.inputs())));
    }
    if data.class_count > model.classes() {
        return Err(NnError::Shape(format!("{} classes but {} outputs", data.class_count, model.classes())));
    }

    let mut model = match mask {
        Some(m) => apply_mask(model, m)?,
        None => model.clone(),
    };
    let keep: Option<Vec<Array2<f32>>> = mask.map(|m| {
        m.layers.iter().map(|l| Array2::from_shape_fn((l.rows, l.cols), |(r, c)| if l.get(r, c) { 1.0 } else { 0.0 })).collect()
    });
    let mut velocity: Vec<(Array2<f32>, Array1<f32>)> =
        model.layers.iter().map(|l| (Array2::zeros(l.weights.raw_dim()), Array1::zeros(l.bias.len()))).collect();

    let mut trace = TrainTrace::default();
    let momentum = config.momentum as f32;
    let wd = config.weight_decay as f32;
    let mut order: Vec<usize> = (0..data.len()).collect();

    for epoch in 0..config.epochs {
        let lr = config.lr_at(epoch) as f32;
        order.sort_unstable();
        order.shuffle(&mut rng_from_seed(derive_seed(config.seed, &[epoch as u64])));

        let (mut loss_sum, mut correct) = (0.0f64, 0usize);
        for chunk in order.chunks(config.batch_size) {
            let batch = data.features.select(Axis(0), chunk);
            let labels: Vec<usize> = chunk.iter().map(|&i| data.labels[i]).collect();

            let pass = model.forward(batch.view())?;
            let probs = pass.output();
            correct += probs
                .rows()
                .into_iter()
                .zip(&labels)
                .filter(|(row, &y)| argmax(row.iter().copied()) == y)
                .count();
            let loss = super::model::cross_entropy(probs, &labels)?;
            if !loss.is_finite() {
                return Err(NnError::Diverged { epoch });
            }
            loss_sum += loss * chunk.len() as f64;
            trace.batch_losses.push(loss);

            let mut d_out = probs.clone();
            for (r, &y) in labels.iter().enumerate() {
                d_out[[r, y]] -= 1.0;
            }
            d_out.mapv_inplace(|v| v / chunk.len() as f32);
            let (grads, _) = model.backward(batch.view(), &pass, d_out);

            for (k, ((mut dw, mut db), layer)) in grads.layers.into_iter().zip(model.layers.iter_mut()).enumerate() {
                if let Some(keep) = &keep {
                    dw *= &keep[k];
                }
                dw.scaled_add(wd, &layer.weights);
                db.scaled_add(wd, &layer.bias);
                let (vw, vb) = &mut velocity[k];
                vw.zip_mut_with(&dw, |v, &g| *v = momentum * *v + g);
                vb.zip_mut_with(&db, |v, &g| *v = momentum * *v + g);
                layer.weights.scaled_add(-lr, vw);
                layer.bias.scaled_add(-lr, vb);
                if let Some(keep) = &keep {
                    layer.weights.zip_mut_with(&keep[k], |w, &m| {
                        if m == 0.0 {
                            *w = 0.0;
                        }
                    });
                }
            }
        }
        if model.layers.iter().any(|l| l.weights.iter().any(|w| !w.is_finite())) {
            return Err(NnError::Diverged { epoch });
        }
        trace.epochs.push(EpochStats {
            epoch,
            learning_rate: lr as f64,
            mean_loss: loss_sum / data.len() as f64,
            train_accuracy: correct as f64 / data.len() as f64,
        });
    }
    Ok((model, trace))
}

pub(crate) fn argmax(values: impl Iterator<Item = f32>) -> usize {
    let mut best = (0usize, f32::NEG_INFINITY);
    for (i, v) in values.enumerate() {
        if v > best.1 {
            best = (i, v);
        }
    }
    best.0
}
