use super::{
    apply_threshold, gamma_cap, DependencyTable, Grouping, LayerShape, PruneError, Result, RetainedSets,
    ThresholdPolicy,
};

/// Retain (1) / zero (0) decision per (consumer filter, producer filter)
/// connection of one layer. For convolutional shapes an entry covers the whole
/// kernel between the two filters. Biases are never masked.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerMask {
    pub name: String,
    pub rows: usize,
    pub cols: usize,
    pub consumer_groups: usize,
    pub producer_groups: usize,
    /// Threshold used for this layer after the gamma cap; `None` if the layer was skipped.
    pub delta: Option<f64>,
    bits: Vec<u8>,
}

impl LayerMask {
    pub fn ones(name: &str, rows: usize, cols: usize, consumer_groups: usize, producer_groups: usize) -> Self {
        Self {
            name: name.to_string(),
            rows,
            cols,
            consumer_groups,
            producer_groups,
            delta: None,
            bits: vec![1; rows * cols],
        }
    }

    pub fn from_bits(
        name: &str,
        rows: usize,
        cols: usize,
        groups: (usize, usize),
        delta: Option<f64>,
        bits: Vec<u8>,
    ) -> Result<Self> {
        if bits.len() != rows * cols {
            return Err(PruneError::Shape(format!("{} mask bits for a {rows}x{cols} layer", bits.len())));
        }
        if bits.iter().any(|&b| b > 1) {
            return Err(PruneError::Shape("mask entries must be 0 or 1".into()));
        }
        Ok(Self {
            name: name.to_string(),
            rows,
            cols,
            consumer_groups: groups.0,
            producer_groups: groups.1,
            delta,
            bits,
        })
    }

    #[inline]
    pub fn get(&self, out_filter: usize, in_filter: usize) -> bool {
        self.bits[out_filter * self.cols + in_filter] == 1
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn zeros(&self) -> usize {
        self.bits.iter().filter(|&&b| b == 0).count()
    }

    /// Recover the group decisions this mask was expanded from, if it is block-constant.
    pub fn retained_sets(&self, producer: &Grouping, consumer: &Grouping) -> Option<RetainedSets> {
        if producer.filters() != self.cols || consumer.filters() != self.rows {
            return None;
        }
        let mut sets = Vec::with_capacity(consumer.len());
        for ci in consumer.ranges() {
            let set = (0..producer.len()).filter(|&j| self.get(ci.start, producer.range(j).start)).collect();
            sets.push(set);
        }
        let rebuilt = masks_from_retained(
            &self.name,
            &RetainedSets { producer_groups: producer.len(), sets: sets.clone() },
            producer,
            consumer,
            self.delta,
        )
        .ok()?;
        (rebuilt.bits == self.bits).then_some(RetainedSets { producer_groups: producer.len(), sets })
    }
}

/// Per-layer masks for a whole network, ordered from input to output.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PruneMask {
    pub layers: Vec<LayerMask>,
}

impl PruneMask {
    pub fn zeros(&self) -> usize {
        self.layers.iter().map(LayerMask::zeros).sum()
    }
}

/// Expand group decisions to a per-filter mask: entry `(f_out, f_in)` is 1 iff
/// the group of `f_in` is retained by the group of `f_out`.
pub fn masks_from_retained(
    name: &str,
    retained: &RetainedSets,
    producer: &Grouping,
    consumer: &Grouping,
    delta: Option<f64>,
) -> Result<LayerMask> {
    if retained.sets.len() != consumer.len() || retained.producer_groups != producer.len() {
        return Err(PruneError::Shape(format!(
            "retained sets cover {}x{} groups, grouping is {}x{}",
            retained.sets.len(),
            retained.producer_groups,
            consumer.len(),
            producer.len()
        )));
    }
    if let Some(bad) = retained.sets.iter().flatten().find(|&&j| j >= producer.len()) {
        return Err(PruneError::Shape(format!("retained producer group {bad} does not exist")));
    }
    let (rows, cols) = (consumer.filters(), producer.filters());
    let mut bits = vec![0u8; rows * cols];
    for (i, set) in retained.sets.iter().enumerate() {
        for f_out in consumer.range(i) {
            let row = &mut bits[f_out * cols..(f_out + 1) * cols];
            for &j in set {
                row[producer.range(j)].fill(1);
            }
        }
    }
    Ok(LayerMask {
        name: name.to_string(),
        rows,
        cols,
        consumer_groups: consumer.len(),
        producer_groups: producer.len(),
        delta,
        bits,
    })
}

/// Masks for every layer pair under `policy`.
///
/// `groupings[l]` groups the filters of activation layer `l`, so weight layer
/// `l` maps grouping `l` (producer) to grouping `l + 1` (consumer). Layer
/// pairs that are skip-listed or have no table get all-ones masks.
pub fn build_masks(
    shapes: &[LayerShape],
    groupings: &[Grouping],
    tables: &[DependencyTable],
    policy: &ThresholdPolicy,
) -> Result<PruneMask> {
    policy.validate()?;
    if groupings.len() != shapes.len() + 1 {
        return Err(PruneError::Shape(format!(
            "{} weight layers need {} groupings, got {}",
            shapes.len(),
            shapes.len() + 1,
            groupings.len()
        )));
    }
    let mut layers = Vec::with_capacity(shapes.len());
    for (l, shape) in shapes.iter().enumerate() {
        let (producer, consumer) = (&groupings[l], &groupings[l + 1]);
        if producer.filters() != shape.in_filters || consumer.filters() != shape.out_filters {
            return Err(PruneError::Shape(format!("grouping does not match layer {}", shape.name)));
        }
        let table = tables.iter().find(|t| t.layer_pair == l);
        let mask = match table {
            Some(t) if !policy.skip_layers.contains(&l) => {
                if t.consumer_groups() != consumer.len() || t.producer_groups() != producer.len() {
                    return Err(PruneError::Shape(format!("table shape does not match layer {}", shape.name)));
                }
                let delta = gamma_cap(t, policy.delta, policy.gamma);
                masks_from_retained(&shape.name, &apply_threshold(t, delta), producer, consumer, Some(delta))?
            }
            _ => LayerMask::ones(&shape.name, shape.out_filters, shape.in_filters, consumer.len(), producer.len()),
        };
        layers.push(mask);
    }
    Ok(PruneMask { layers })
}
