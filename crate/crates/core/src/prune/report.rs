use super::{PruneError, PruneMask, Result};

/// Weight-layer geometry at filter granularity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayerShape {
    pub name: String,
    pub out_filters: usize,
    pub in_filters: usize,
    /// Weights per (out, in) filter pair: 1 for dense layers, `kh * kw` for convolutions.
    pub kernel_size: usize,
    pub biases: usize,
}

impl LayerShape {
    pub fn dense(name: &str, out_filters: usize, in_filters: usize) -> Self {
        Self { name: name.to_string(), out_filters, in_filters, kernel_size: 1, biases: out_filters }
    }

    pub fn conv(name: &str, out_filters: usize, in_filters: usize, kernel_size: usize) -> Self {
        Self { name: name.to_string(), out_filters, in_filters, kernel_size, biases: out_filters }
    }

    pub fn weights(&self) -> usize {
        self.out_filters * self.in_filters * self.kernel_size
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayerSparsity {
    pub name: String,
    pub pruned_weights: usize,
    pub weights: usize,
    pub biases: usize,
    /// Zeroed weights over this layer's weights, in percent.
    pub pruned_pct: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SparsityReport {
    pub layers: Vec<LayerSparsity>,
    pub pruned_weights: usize,
    /// All weights plus all biases.
    pub parameters: usize,
    /// Zeroed weights over all parameters, in percent.
    pub total_pruned_pct: f64,
}

impl SparsityReport {
    pub fn pruned_fraction(&self) -> f64 {
        self.total_pruned_pct / 100.0
    }
}

/// Parameters removed relative to the parameter count of the unpruned network.
pub fn sparsity_report(mask: &PruneMask, shapes: &[LayerShape]) -> Result<SparsityReport> {
    if mask.layers.len() != shapes.len() {
        return Err(PruneError::Shape(format!("{} masks for {} layers", mask.layers.len(), shapes.len())));
    }
    let mut layers = Vec::with_capacity(shapes.len());
    for (m, s) in mask.layers.iter().zip(shapes) {
        if m.rows != s.out_filters || m.cols != s.in_filters {
            return Err(PruneError::Shape(format!(
                "mask {}x{} does not match layer {} ({}x{})",
                m.rows, m.cols, s.name, s.out_filters, s.in_filters
            )));
        }
        let pruned = m.zeros() * s.kernel_size;
        let weights = s.weights();
        layers.push(LayerSparsity {
            name: s.name.clone(),
            pruned_weights: pruned,
            weights,
            biases: s.biases,
            pruned_pct: if weights == 0 { 0.0 } else { 100.0 * pruned as f64 / weights as f64 },
        });
    }
    let pruned_weights: usize = layers.iter().map(|l| l.pruned_weights).sum();
    let parameters: usize = layers.iter().map(|l| l.weights + l.biases).sum();
    let total_pruned_pct = if parameters == 0 { 0.0 } else { 100.0 * pruned_weights as f64 / parameters as f64 };
    Ok(SparsityReport { layers, pruned_weights, parameters, total_pruned_pct })
}
