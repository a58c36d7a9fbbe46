use std::collections::BTreeSet;

use super::{DependencyTable, PruneError, Result};

/// Global threshold `delta`, per-layer-pair cap `gamma` and layer pairs left untouched.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdPolicy {
    pub delta: f64,
    pub gamma: f64,
    pub skip_layers: BTreeSet<usize>,
}

impl ThresholdPolicy {
    pub fn new(delta: f64, gamma: f64) -> Result<Self> {
        let p = Self { delta, gamma, skip_layers: BTreeSet::new() };
        p.validate()?;
        Ok(p)
    }

    pub fn with_skip(mut self, skip: impl IntoIterator<Item = usize>) -> Self {
        self.skip_layers.extend(skip);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.delta) {
            return Err(PruneError::Policy(format!("delta must lie in [0, 1], got {}", self.delta)));
        }
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return Err(PruneError::Policy(format!("gamma must lie in (0, 1], got {}", self.gamma)));
        }
        Ok(())
    }
}

/// For each consumer group, the producer groups whose connections are kept.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RetainedSets {
    pub producer_groups: usize,
    pub sets: Vec<BTreeSet<usize>>,
}

impl RetainedSets {
    pub fn all(consumer_groups: usize, producer_groups: usize) -> Self {
        Self { producer_groups, sets: vec![(0..producer_groups).collect(); consumer_groups] }
    }

    pub fn pruned_pairs(&self) -> usize {
        self.sets.iter().map(|s| self.producer_groups - s.len()).sum()
    }
}

/// `S_i = { j : rho[i][j] >= delta }`.
pub fn apply_threshold(table: &DependencyTable, delta: f64) -> RetainedSets {
    let sets = (0..table.consumer_groups())
        .map(|i| (0..table.producer_groups()).filter(|&j| table.rho(i, j) >= delta).collect())
        .collect();
    RetainedSets { producer_groups: table.producer_groups(), sets }
}

/// Fraction of group pairs pruned at threshold `delta`.
pub fn pruned_fraction(table: &DependencyTable, delta: f64) -> f64 {
    let pruned = table.values().iter().filter(|&&v| v < delta).count();
    pruned as f64 / table.values().len() as f64
}

fn max_pruned_pairs(total: usize, gamma: f64) -> usize {
    ((gamma * total as f64) + 1e-9).floor() as usize
}

/// Threshold actually used for one layer pair.
///
/// When `delta` would prune more than a `gamma` fraction of the pair's group
/// entries, the threshold is lowered to the largest score value that prunes at
/// most that fraction. Entries tied at the new threshold are all kept.
pub fn gamma_cap(table: &DependencyTable, delta: f64, gamma: f64) -> f64 {
    let total = table.values().len();
    let limit = max_pruned_pairs(total, gamma);
    let pruned = table.values().iter().filter(|&&v| v < delta).count();
    if pruned <= limit || limit >= total {
        return delta;
    }
    let mut sorted = table.values().to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted[limit]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(rows: usize, cols: usize, v: &[f64]) -> DependencyTable {
        DependencyTable::from_values(0, rows, cols, v.to_vec()).unwrap()
    }

    #[test]
    fn direct_rule() {
        let t = table(2, 2, &[0.7, 0.2, 0.4, 0.9]);
        let r = apply_threshold(&t, 0.5);
        assert_eq!(r.sets, vec![BTreeSet::from([0]), BTreeSet::from([1])]);
        assert_eq!(r.pruned_pairs(), 2);
    }

    #[test]
    fn extreme_thresholds() {
        let t = table(2, 3, &[0.1, 0.5, 0.0, 0.3, 0.2, 0.8]);
        assert_eq!(apply_threshold(&t, 0.0), RetainedSets::all(2, 3));
        assert!(apply_threshold(&t, 0.81).sets.iter().all(BTreeSet::is_empty));
    }

    #[test]
    fn cap_prunes_exactly_half_of_ten() {
        let v: Vec<f64> = (1..=10).map(|k| k as f64 / 10.0).collect();
        let t = table(2, 5, &v);
        let d = gamma_cap(&t, 0.95, 0.5);
        assert_eq!(d, 0.6);
        assert_eq!(apply_threshold(&t, d).pruned_pairs(), 5);
    }

    #[test]
    fn cap_is_noop_when_within_budget() {
        let t = table(1, 4, &[0.1, 0.6, 0.7, 0.8]);
        assert_eq!(gamma_cap(&t, 0.5, 0.5), 0.5);
        assert_eq!(gamma_cap(&t, 0.99, 1.0), 0.99);
    }

    #[test]
    fn cap_keeps_ties_together() {
        let t = table(1, 5, &[0.2, 0.2, 0.2, 0.2, 0.9]);
        let d = gamma_cap(&t, 1.0, 0.5);
        assert_eq!(d, 0.2);
        assert_eq!(apply_threshold(&t, d).pruned_pairs(), 0);
    }

    #[test]
    fn policy_validation() {
        assert!(ThresholdPolicy::new(0.5, 0.5).is_ok());
        assert!(ThresholdPolicy::new(1.5, 0.5).is_err());
        assert!(ThresholdPolicy::new(0.5, 0.0).is_err());
        assert!(ThresholdPolicy::new(-0.1, 1.0).is_err());
    }
}
