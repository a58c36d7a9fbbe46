use std::fmt::Debug;

use ndarray::{Array1, Array2, ArrayView2, Axis, ScalarOperand};
use num_traits::{Float, FromPrimitive};
use rand::Rng;

use super::{NnError, Result};
use crate::seed::rng_from_seed;

/// Element type the engine runs on. Stored models use `f32`; gradient checks use `f64`.
pub trait Scalar:
    Float + FromPrimitive + ndarray::LinalgScalar + ScalarOperand + Debug + Send + Sync + 'static
{
}

impl<T> Scalar for T where
    T: Float + FromPrimitive + ndarray::LinalgScalar + ScalarOperand + Debug + Send + Sync + 'static
{
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    Relu,
    /// Row-wise softmax; only valid on the output layer.
    Softmax,
}

impl Activation {
    pub fn tag(self) -> u8 {
        match self {
            Activation::Relu => 0,
            Activation::Softmax => 1,
        }
    }

    pub fn from_tag(tag: u8) -> Option<Self> {
        match tag {
            0 => Some(Activation::Relu),
            1 => Some(Activation::Softmax),
            _ => None,
        }
    }
}

/// `sigma(W x + b)` with `W` stored as `out x in`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseLayer<T> {
    pub weights: Array2<T>,
    pub bias: Array1<T>,
    pub activation: Activation,
}

impl<T: Scalar> DenseLayer<T> {
    pub fn inputs(&self) -> usize {
        self.weights.ncols()
    }

    pub fn outputs(&self) -> usize {
        self.weights.nrows()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mlp<T> {
    pub layers: Vec<DenseLayer<T>>,
}

pub type MlpModel = Mlp<f32>;

/// Post-activation outputs of every layer for one batch.
#[derive(Debug, Clone)]
pub struct ForwardPass<T> {
    pub activations: Vec<Array2<T>>,
}

impl<T: Scalar> ForwardPass<T> {
    pub fn output(&self) -> &Array2<T> {
        self.activations.last().expect("model has at least one layer")
    }
}

/// Parameter gradients, one `(dW, db)` per layer.
#[derive(Debug, Clone)]
pub struct Gradients<T> {
    pub layers: Vec<(Array2<T>, Array1<T>)>,
}

impl<T: Scalar> Mlp<T> {
    pub fn from_layers(layers: Vec<DenseLayer<T>>) -> Result<Self> {
        let m = Self { layers };
        m.validate()?;
        Ok(m)
    }

    /// He-uniform weights `U(-sqrt(6 / fan_in), sqrt(6 / fan_in))`, zero biases,
    /// ReLU hidden layers and a softmax output.
    pub fn new(widths: &[usize], seed: u64) -> Result<Self> {
        if widths.len() < 2 || widths.contains(&0) {
            return Err(NnError::Shape(format!("invalid layer widths {widths:?}")));
        }
        let mut rng = rng_from_seed(seed);
        let depth = widths.len() - 1;
        let layers = widths
            .windows(2)
            .enumerate()
            .map(|(k, w)| {
                let (fan_in, fan_out) = (w[0], w[1]);
                let bound = (6.0 / fan_in as f64).sqrt();
                let weights = Array2::from_shape_simple_fn((fan_out, fan_in), || {
                    T::from_f64(rng.random_range(-bound..bound)).unwrap()
                });
                DenseLayer {
                    weights,
                    bias: Array1::zeros(fan_out),
                    activation: if k + 1 == depth { Activation::Softmax } else { Activation::Relu },
                }
            })
            .collect();
        Self::from_layers(layers)
    }

    pub fn validate(&self) -> Result<()> {
        if self.layers.is_empty() {
            return Err(NnError::Shape("model has no layers".into()));
        }
        for (k, l) in self.layers.iter().enumerate() {
            if l.bias.len() != l.outputs() {
                return Err(NnError::Shape(format!("layer {k}: bias length {} != {}", l.bias.len(), l.outputs())));
            }
            if l.inputs() == 0 || l.outputs() == 0 {
                return Err(NnError::Shape(format!("layer {k} is empty")));
            }
            if k > 0 && self.layers[k - 1].outputs() != l.inputs() {
                return Err(NnError::Shape(format!(
                    "layer {k} expects {} inputs but layer {} emits {}",
                    l.inputs(),
                    k - 1,
                    self.layers[k - 1].outputs()
                )));
            }
            if l.activation == Activation::Softmax && k + 1 != self.layers.len() {
                return Err(NnError::Shape(format!("softmax on hidden layer {k}")));
            }
            if l.weights.iter().chain(l.bias.iter()).any(|v| !v.is_finite()) {
                return Err(NnError::Shape(format!("layer {k} has non-finite parameters")));
            }
        }
        Ok(())
    }

    pub(crate) fn require_classifier(&self) -> Result<()> {
        match self.layers.last() {
            Some(l) if l.activation == Activation::Softmax => Ok(()),
            _ => Err(NnError::Shape("model must end in a softmax layer".into())),
        }
    }

    pub fn inputs(&self) -> usize {
        self.layers[0].inputs()
    }

    pub fn classes(&self) -> usize {
        self.layers.last().map_or(0, |l| l.outputs())
    }

    /// Layer widths from input to output.
    pub fn widths(&self) -> Vec<usize> {
        std::iter::once(self.inputs()).chain(self.layers.iter().map(|l| l.outputs())).collect()
    }

    pub fn weight_count(&self) -> usize {
        self.layers.iter().map(|l| l.weights.len()).sum()
    }

    pub fn bias_count(&self) -> usize {
        self.layers.iter().map(|l| l.bias.len()).sum()
    }

    pub fn cast<U: Scalar>(&self) -> Mlp<U> {
        Mlp {
            layers: self
                .layers
                .iter()
                .map(|l| DenseLayer {
                    weights: l.weights.mapv(|v| U::from(v).unwrap()),
                    bias: l.bias.mapv(|v| U::from(v).unwrap()),
                    activation: l.activation,
                })
                .collect(),
        }
    }

    pub fn forward(&self, batch: ArrayView2<T>) -> Result<ForwardPass<T>> {
        if batch.ncols() != self.inputs() {
            return Err(NnError::Shape(format!(
                "batch has {} features, model expects {}",
                batch.ncols(),
                self.inputs()
            )));
        }
        let mut activations: Vec<Array2<T>> = Vec::with_capacity(self.layers.len());
        for layer in &self.layers {
            let input = activations.last().map_or(batch.view(), |a| a.view());
            let mut z = input.dot(&layer.weights.t());
            z.zip_mut_with(&layer.bias, |v, &b| *v = *v + b);
            match layer.activation {
                Activation::Relu => z.mapv_inplace(|v| if v > T::zero() { v } else { T::zero() }),
                Activation::Softmax => softmax_rows(&mut z),
            }
            activations.push(z);
        }
        Ok(ForwardPass { activations })
    }

    /// Back-propagate `d_out`, the gradient of the loss with respect to the
    /// output layer's pre-activation, through a forward pass of `batch`.
    /// Returns parameter gradients and the gradient with respect to the input.
    pub fn backward(&self, batch: ArrayView2<T>, pass: &ForwardPass<T>, d_out: Array2<T>) -> (Gradients<T>, Array2<T>) {
        let mut grads = Vec::with_capacity(self.layers.len());
        let mut dz = d_out;
        for k in (0..self.layers.len()).rev() {
            let input = if k == 0 { batch } else { pass.activations[k - 1].view() };
            let dw = dz.t().dot(&input);
            let db = dz.sum_axis(Axis(0));
            let mut da = dz.dot(&self.layers[k].weights);
            if k > 0 {
                da.zip_mut_with(&pass.activations[k - 1], |g, &a| {
                    if a <= T::zero() {
                        *g = T::zero();
                    }
                });
            }
            grads.push((dw, db));
            dz = da;
        }
        grads.reverse();
        (Gradients { layers: grads }, dz)
    }

    /// Mean cross-entropy over the batch (accumulated in `f64`) and its gradients.
    pub fn loss_and_gradients(&self, batch: ArrayView2<T>, labels: &[usize]) -> Result<(f64, Gradients<T>)> {
        self.require_classifier()?;
        if labels.len() != batch.nrows() {
            return Err(NnError::Shape(format!("{} labels for {} rows", labels.len(), batch.nrows())));
        }
        let pass = self.forward(batch)?;
        let probs = pass.output();
        let loss = cross_entropy(probs, labels)?;
        let scale = T::from_f64(1.0 / labels.len() as f64).unwrap();
        let mut d_out = probs.clone();
        for (r, &y) in labels.iter().enumerate() {
            d_out[[r, y]] = d_out[[r, y]] - T::one();
        }
        d_out.mapv_inplace(|v| v * scale);
        let (grads, _) = self.backward(batch, &pass, d_out);
        Ok((loss, grads))
    }
}

pub(crate) fn softmax_rows<T: Scalar>(z: &mut Array2<T>) {
    for mut row in z.rows_mut() {
        let max = row.iter().fold(T::neg_infinity(), |m, &v| m.max(v));
        row.mapv_inplace(|v| (v - max).exp());
        let sum = row.iter().fold(T::zero(), |s, &v| s + v);
        row.mapv_inplace(|v| v / sum);
    }
}

/// Mean of `-ln p[y]` in `f64`.
pub(crate) fn cross_entropy<T: Scalar>(probs: &Array2<T>, labels: &[usize]) -> Result<f64> {
    let mut total = 0.0f64;
    for (r, &y) in labels.iter().enumerate() {
        if y >= probs.ncols() {
            return Err(NnError::Shape(format!("label {y} out of range for {} classes", probs.ncols())));
        }
        let p = probs[[r, y]].to_f64().unwrap().max(f64::MIN_POSITIVE);
        total -= p.ln();
    }
    Ok(total / labels.len().max(1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn zero_model_gives_zero_hidden_activations() {
        let mut m = MlpModel::new(&[3, 4, 2], 1).unwrap();
        for l in &mut m.layers {
            l.weights.fill(0.0);
            l.bias.fill(0.0);
        }
        let pass = m.forward(array![[1.0f32, -2.0, 3.0]].view()).unwrap();
        assert!(pass.activations[0].iter().all(|&v| v == 0.0));
        assert_eq!(pass.output(), &array![[0.5f32, 0.5]]);
    }

    #[test]
    fn relu_identity_layer() {
        let layer = DenseLayer { weights: array![[1.0f32]], bias: array![0.0f32], activation: Activation::Relu };
        let m = MlpModel::from_layers(vec![layer]).unwrap();
        let pass = m.forward(array![[-2.0f32], [3.0]].view()).unwrap();
        assert_eq!(pass.output(), &array![[0.0f32], [3.0]]);
    }

    #[test]
    fn softmax_rows_sum_to_one() {
        let m = MlpModel::new(&[6, 5, 4], 5).unwrap();
        let mut rng = rng_from_seed(5);
        let x = Array2::from_shape_simple_fn((20, 6), || rng.random_range(-3.0f32..3.0));
        let pass = m.forward(x.view()).unwrap();
        for row in pass.output().rows() {
            assert!((row.sum() - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn shape_errors() {
        let m = MlpModel::new(&[3, 2], 0).unwrap();
        assert!(m.forward(Array2::<f32>::zeros((1, 4)).view()).is_err());
        assert!(MlpModel::new(&[3], 0).is_err());
        let bad = vec![
            DenseLayer { weights: Array2::zeros((2, 3)), bias: Array1::zeros(2), activation: Activation::Softmax },
            DenseLayer { weights: Array2::zeros((2, 2)), bias: Array1::zeros(2), activation: Activation::Softmax },
        ];
        assert!(MlpModel::from_layers(bad).is_err());
        let chain = vec![
            DenseLayer { weights: Array2::zeros((2, 3)), bias: Array1::zeros(2), activation: Activation::Relu },
            DenseLayer { weights: Array2::zeros((2, 3)), bias: Array1::zeros(2), activation: Activation::Softmax },
        ];
        assert!(MlpModel::from_layers(chain).is_err());
    }

    #[test]
    fn init_is_seeded_and_bounded() {
        let a = MlpModel::new(&[10, 7, 3], 42).unwrap();
        assert_eq!(a, MlpModel::new(&[10, 7, 3], 42).unwrap());
        assert_ne!(a, MlpModel::new(&[10, 7, 3], 43).unwrap());
        let bound = (6.0f32 / 10.0).sqrt();
        assert!(a.layers[0].weights.iter().all(|w| w.abs() <= bound));
        assert_eq!(a.widths(), vec![10, 7, 3]);
    }

    #[test]
    fn tags_round_trip() {
        for a in [Activation::Relu, Activation::Softmax] {
            assert_eq!(Activation::from_tag(a.tag()), Some(a));
        }
        assert_eq!(Activation::from_tag(9), None);
    }
}
