use ndarray::Axis;

use super::{Dataset, MlpModel, NnError, Result};
use crate::gmi::{GmiError, SampleMatrix};

/// Per-filter activations of one layer, `rows x filters`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ActivationLayer {
    pub name: String,
    pub filters: usize,
    pub values: Vec<f32>,
}

impl ActivationLayer {
    pub fn rows(&self) -> usize {
        self.values.len().checked_div(self.filters).unwrap_or(0)
    }

    pub fn to_samples(&self) -> std::result::Result<SampleMatrix, GmiError> {
        SampleMatrix::new(self.rows(), self.filters, self.values.iter().map(|&v| v as f64).collect())
    }
}

/// Activations of every captured layer for the same rows, with the class label of each row.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ActivationDump {
    pub labels: Vec<u16>,
    pub layers: Vec<ActivationLayer>,
}

impl ActivationDump {
    pub fn rows(&self) -> usize {
        self.labels.len()
    }

    pub fn layer(&self, name: &str) -> Option<&ActivationLayer> {
        self.layers.iter().find(|l| l.name == name)
    }

    /// Rows per class label.
    pub fn class_histogram(&self) -> Vec<usize> {
        let classes = self.labels.iter().map(|&l| l as usize + 1).max().unwrap_or(0);
        let mut h = vec![0; classes];
        for &l in &self.labels {
            h[l as usize] += 1;
        }
        h
    }

    pub fn validate(&self) -> Result<()> {
        for l in &self.layers {
            if l.filters == 0 || l.values.len() != l.filters * self.rows() {
                return Err(NnError::Shape(format!(
                    "layer {} holds {} values, expected {} rows x {} filters",
                    l.name,
                    l.values.len(),
                    self.rows(),
                    l.filters
                )));
            }
        }
        Ok(())
    }
}

/// Name of activation layer `k` of an MLP: `input` for the features, then `fc1`, `fc2`, ...
pub fn activation_layer_name(k: usize) -> String {
    if k == 0 { "input".to_string() } else { format!("fc{k}") }
}

/// Mean of each filter's spatial map. `maps` is `filters x spatial`, row-major.
pub fn spatial_average(maps: &[f32], filters: usize) -> Result<Vec<f32>> {
    if filters == 0 || maps.is_empty() || maps.len() % filters != 0 {
        return Err(NnError::Shape(format!("{} values do not split into {filters} maps", maps.len())));
    }
    let spatial = maps.len() / filters;
    Ok(maps
        .chunks_exact(spatial)
        .map(|m| (m.iter().map(|&v| v as f64).sum::<f64>() / spatial as f64) as f32)
        .collect())
}

/// Class-stratified seeded subsample of `m_per_class` rows per class, pushed
/// through the model once. The dump holds the input features followed by every
/// layer's post-activation output. Dense layers have one value per filter, so
/// no spatial averaging applies.
pub fn capture_activations(model: &MlpModel, data: &Dataset, m_per_class: usize, seed: u64) -> Result<ActivationDump> {
    if m_per_class == 0 {
        return Err(NnError::Sampling("at least one sample per class is required".into()));
    }
    if data.class_count > u16::MAX as usize {
        return Err(NnError::Sampling("too many classes for 16-bit labels".into()));
    }
    let idx = data.stratified_indices(m_per_class, seed)?;
    let x = data.features.select(Axis(0), &idx);
    let pass = model.forward(x.view())?;

    let mut layers = vec![ActivationLayer {
        name: activation_layer_name(0),
        filters: x.ncols(),
        values: x.iter().copied().collect(),
    }];
    for (k, a) in pass.activations.iter().enumerate() {
        layers.push(ActivationLayer {
            name: activation_layer_name(k + 1),
            filters: a.ncols(),
            values: a.iter().copied().collect(),
        });
    }
    let labels = idx.iter().map(|&i| data.labels[i] as u16).collect();
    Ok(ActivationDump { labels, layers })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::{gaussian_blobs, BlobSpec};

    #[test]
    fn row_counts_and_codomain() {
        let data = gaussian_blobs(&BlobSpec { per_class: 300, ..Default::default() }, 1).unwrap();
        let model = MlpModel::new(&[2, 6, 5, 2], 1).unwrap();
        let dump = capture_activations(&model, &data, 250, 3).unwrap();
        assert_eq!(dump.rows(), 500);
        assert_eq!(dump.class_histogram(), vec![250, 250]);
        assert_eq!(dump.layers.iter().map(|l| l.name.as_str()).collect::<Vec<_>>(), ["input", "fc1", "fc2", "fc3"]);
        for l in &dump.layers[1..3] {
            assert_eq!(l.rows(), 500);
            assert!(l.values.iter().all(|&v| v >= 0.0));
        }
        dump.validate().unwrap();
        assert_eq!(dump, capture_activations(&model, &data, 250, 3).unwrap());
    }

    #[test]
    fn insufficient_population() {
        let data = gaussian_blobs(&BlobSpec { per_class: 10, ..Default::default() }, 1).unwrap();
        let model = MlpModel::new(&[2, 3, 2], 1).unwrap();
        assert!(matches!(capture_activations(&model, &data, 11, 0), Err(NnError::Sampling(_))));
    }

    #[test]
    fn constant_map_averages_to_its_value() {
        assert_eq!(spatial_average(&[1.0; 9], 1).unwrap(), vec![1.0]);
        assert_eq!(spatial_average(&[2.0, 2.0, 4.0, 4.0], 2).unwrap(), vec![2.0, 4.0]);
        assert!(spatial_average(&[1.0; 5], 2).is_err());
    }
}
