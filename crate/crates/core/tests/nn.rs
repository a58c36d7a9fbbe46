mod support;

use mint::nn::{
    apply_mask, csr_footprint, evaluate, gaussian_blobs, layer_shapes, retrain_masked, train, BlobSpec, Dataset, Mlp,
    MlpModel, TrainConfig,
};
use mint::prune::{build_masks, group_filters, DependencyTable, Grouping, LayerMask, PruneMask, ThresholdPolicy};
use ndarray::Array2;
use rand::Rng;
use support::rng;

fn blobs(seed: u64, per_class: usize) -> Dataset {
    gaussian_blobs(&BlobSpec { per_class, ..Default::default() }, seed).unwrap()
}

fn quick_config(epochs: usize) -> TrainConfig {
    TrainConfig { epochs, batch_size: 32, milestones: vec![], seed: 3, ..Default::default() }
}

#[test]
fn gradient_check() {
    let model: Mlp<f64> = MlpModel::new(&[5, 6, 4, 3], 17).unwrap().cast();
    let mut g = rng(2);
    let x = Array2::from_shape_fn((7, 5), |_| g.random::<f64>());
    let labels: Vec<usize> = (0..7).map(|k| k % 3).collect();
    let (_, grads) = model.loss_and_gradients(x.view(), &labels).unwrap();

    let loss = |m: &Mlp<f64>| m.loss_and_gradients(x.view(), &labels).unwrap().0;
    let h = 1e-6;
    let mut worst = 0.0f64;
    for (k, (dw, db)) in grads.layers.iter().enumerate() {
        for ((r, c), &analytic) in dw.indexed_iter() {
            let (mut plus, mut minus) = (model.clone(), model.clone());
            plus.layers[k].weights[[r, c]] += h;
            minus.layers[k].weights[[r, c]] -= h;
            let numeric = (loss(&plus) - loss(&minus)) / (2.0 * h);
            worst = worst.max((analytic - numeric).abs() / (analytic.abs() + numeric.abs()).max(1e-7));
        }
        for (r, &analytic) in db.indexed_iter() {
            let (mut plus, mut minus) = (model.clone(), model.clone());
            plus.layers[k].bias[r] += h;
            minus.layers[k].bias[r] -= h;
            let numeric = (loss(&plus) - loss(&minus)) / (2.0 * h);
            worst = worst.max((analytic - numeric).abs() / (analytic.abs() + numeric.abs()).max(1e-7));
        }
    }
    assert!(worst <= 1e-4, "worst relative error {worst}");
}

#[test]
fn blobs_are_learned() {
    let (train_set, test) = (blobs(1, 200), blobs(2, 200));
    let model = MlpModel::new(&[2, 8, 2], 0).unwrap();
    let (trained, trace) = train(&model, &train_set, &quick_config(20)).unwrap();
    assert_eq!(trace.epochs.len(), 20);
    assert!(evaluate(&trained, &test).unwrap().accuracy >= 0.99);
}

#[test]
fn training_is_deterministic() {
    let data = blobs(1, 100);
    let model = MlpModel::new(&[2, 8, 2], 0).unwrap();
    let a = train(&model, &data, &quick_config(3)).unwrap();
    let b = train(&model, &data, &quick_config(3)).unwrap();
    assert_eq!(a, b);
}

#[test]
fn first_epoch_reduces_loss() {
    let data = blobs(4, 300);
    let model = MlpModel::new(&[2, 16, 2], 1).unwrap();
    let (_, trace) = train(&model, &data, &quick_config(1)).unwrap();
    let n = trace.batch_losses.len();
    let head: f64 = trace.batch_losses[..3].iter().sum();
    let tail: f64 = trace.batch_losses[n - 3..].iter().sum();
    assert!(tail < head, "{:?}", trace.batch_losses);
}

fn ones(model: &MlpModel) -> PruneMask {
    PruneMask {
        layers: layer_shapes(model)
            .iter()
            .map(|s| LayerMask::ones(&s.name, s.out_filters, s.in_filters, 1, 1))
            .collect(),
    }
}

#[test]
fn all_ones_retrain_equals_training() {
    let data = blobs(5, 100);
    let model = MlpModel::new(&[2, 8, 6, 2], 2).unwrap();
    let cfg = quick_config(2);
    assert_eq!(retrain_masked(&model, &ones(&model), &data, &cfg).unwrap(), train(&model, &data, &cfg).unwrap());
}

#[test]
fn masked_weights_stay_zero() {
    let data = blobs(6, 100);
    let model = MlpModel::new(&[2, 8, 6, 2], 2).unwrap();
    let mut mask = ones(&model);
    let mut g = rng(9);
    let bits: Vec<u8> = (0..48).map(|_| g.random_bool(0.5) as u8).collect();
    mask.layers[1] = LayerMask::from_bits("fc2", 6, 8, (1, 1), None, bits).unwrap();
    for epochs in 1..=3 {
        let (out, _) = retrain_masked(&model, &mask, &data, &quick_config(epochs)).unwrap();
        for ((r, c), &w) in out.layers[1].weights.indexed_iter() {
            if !mask.layers[1].get(r, c) {
                assert_eq!(w, 0.0);
            }
        }
    }
}

#[test]
fn accuracy_matches_recount() {
    let model = MlpModel::new(&[4, 6, 3], 8).unwrap();
    let mut g = rng(10);
    let x = Array2::from_shape_fn((100, 4), |_| g.random::<f32>());
    let labels: Vec<usize> = (0..100).map(|_| g.random_range(0..3)).collect();
    let data = Dataset::new(x.clone(), labels.clone(), 3).unwrap();
    let e = evaluate(&model, &data).unwrap();

    let pass = model.forward(x.view()).unwrap();
    let mut hits = 0;
    for (row, &y) in pass.output().rows().into_iter().zip(&labels) {
        let mut best = 0;
        for k in 1..row.len() {
            if row[k] > row[best] {
                best = k;
            }
        }
        hits += (best == y) as usize;
    }
    assert_eq!(e.accuracy, hits as f64 / 100.0);
}

#[test]
fn sparse_bytes_fall_with_sparsity() {
    let model = MlpModel::new(&[40, 30, 20, 5], 3).unwrap();
    let shapes = layer_shapes(&model);
    let groupings: Vec<Grouping> = [40, 30, 20, 5].iter().map(|&n| group_filters(n, 5).unwrap()).collect();
    let mut g = rng(12);
    let tables: Vec<DependencyTable> = (0..3)
        .map(|l| DependencyTable::from_values(l, 5, 5, (0..25).map(|_| g.random()).collect()).unwrap())
        .collect();
    let mut last = usize::MAX;
    for delta in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let mask = build_masks(&shapes, &groupings, &tables, &ThresholdPolicy::new(delta, 1.0).unwrap()).unwrap();
        let bytes = csr_footprint(&apply_mask(&model, &mask).unwrap()).sparse_bytes();
        assert!(bytes < last, "delta {delta}");
        last = bytes;
    }
}
