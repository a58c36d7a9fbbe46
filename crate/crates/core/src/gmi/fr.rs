use super::{EdgeList, GmiError, Result};

/// Which half of the merged set a point came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Origin {
    /// Joint samples (`S1`).
    Joint,
    /// Product or conditionally independent surrogates (`S̄2`).
    Surrogate,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OriginLabels(Vec<Origin>);

impl OriginLabels {
    pub fn new(labels: Vec<Origin>) -> Result<Self> {
        if labels.len() >= 2 {
            let first = labels[0];
            if labels.iter().all(|&l| l == first) {
                return Err(GmiError::DegenerateLabels);
            }
        }
        Ok(Self(labels))
    }

    /// `joint` copies of [`Origin::Joint`] followed by `surrogate` copies of [`Origin::Surrogate`].
    pub fn split(joint: usize, surrogate: usize) -> Result<Self> {
        let mut v = vec![Origin::Joint; joint];
        v.resize(joint + surrogate, Origin::Surrogate);
        Self::new(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Origin] {
        &self.0
    }
}

/// Friedman–Rafsky count: number of tree edges joining points of different origin.
pub fn fr_statistic(tree: &EdgeList, origins: &OriginLabels) -> Result<usize> {
    if origins.len() != tree.node_count {
        return Err(GmiError::Shape(format!(
            "{} origin labels for a tree over {} nodes",
            origins.len(),
            tree.node_count
        )));
    }
    let labels = origins.as_slice();
    if !(labels.contains(&Origin::Joint) && labels.contains(&Origin::Surrogate)) {
        return Err(GmiError::DegenerateLabels);
    }
    Ok(tree.edges.iter().filter(|e| labels[e.a] != labels[e.b]).count())
}
