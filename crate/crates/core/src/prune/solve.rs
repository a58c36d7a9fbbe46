use std::collections::BTreeSet;

use super::{build_masks, sparsity_report, DependencyTable, Grouping, LayerShape, PruneError, PruneMask, Result, ThresholdPolicy};

pub const SOLVER_ITERATIONS: usize = 48;

#[derive(Debug, Clone, PartialEq)]
pub struct DeltaSolution {
    pub delta: f64,
    /// Pruned-parameter fraction of `mask`.
    pub pruned_fraction: f64,
    pub mask: PruneMask,
    /// Set when the gamma caps make `target` unreachable; `mask` is then the
    /// most aggressive mask the caps allow.
    pub unreachable: bool,
}

/// Search for the global `delta` whose masks (gamma caps applied) prune the
/// largest parameter fraction not exceeding `target`.
///
/// The pruned fraction is a non-decreasing step function of `delta` with steps
/// at score values. After bisection the result is snapped up to the score value
/// that ends the feasible step, so the returned `delta` is the exact crossing.
pub fn solve_delta_for_sparsity(
    shapes: &[LayerShape],
    groupings: &[Grouping],
    tables: &[DependencyTable],
    gamma: f64,
    skip_layers: &BTreeSet<usize>,
    target: f64,
) -> Result<DeltaSolution> {
    if !(0.0..1.0).contains(&target) {
        return Err(PruneError::Policy(format!("target sparsity must lie in [0, 1), got {target}")));
    }
    let evaluate = |delta: f64| -> Result<(PruneMask, f64)> {
        let policy = ThresholdPolicy { delta, gamma, skip_layers: skip_layers.clone() };
        let mask = build_masks(shapes, groupings, tables, &policy)?;
        let fraction = sparsity_report(&mask, shapes)?.pruned_fraction();
        Ok((mask, fraction))
    };

    let (top_mask, top_fraction) = evaluate(1.0)?;
    if top_fraction <= target {
        return Ok(DeltaSolution {
            delta: 1.0,
            pruned_fraction: top_fraction,
            mask: top_mask,
            unreachable: top_fraction < target,
        });
    }

    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..SOLVER_ITERATIONS {
        let mid = 0.5 * (lo + hi);
        if evaluate(mid)?.1 <= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    let (mut mask, fraction) = evaluate(lo)?;
    let mut delta = lo;
    let snap = tables
        .iter()
        .filter(|t| !skip_layers.contains(&t.layer_pair))
        .flat_map(|t| t.values().iter().copied())
        .filter(|&v| v >= lo)
        .min_by(f64::total_cmp);
    if let Some(v) = snap {
        let (m, f) = evaluate(v)?;
        if f == fraction {
            delta = v;
            mask = m;
        }
    }
    Ok(DeltaSolution { delta, pruned_fraction: fraction, mask, unreachable: false })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prune::group_filters;

    fn single_pair(values: Vec<f64>, rows: usize, cols: usize) -> (Vec<LayerShape>, Vec<Grouping>, Vec<DependencyTable>) {
        let mut shape = LayerShape::dense("fc", rows, cols);
        shape.biases = 0;
        let groupings = vec![group_filters(cols, cols).unwrap(), group_filters(rows, rows).unwrap()];
        let table = DependencyTable::from_values(0, rows, cols, values).unwrap();
        (vec![shape], groupings, vec![table])
    }

    #[test]
    fn zero_target_prunes_nothing() {
        let (s, g, t) = single_pair(vec![0.3, 0.5, 0.2, 0.9], 2, 2);
        let sol = solve_delta_for_sparsity(&s, &g, &t, 1.0, &BTreeSet::new(), 0.0).unwrap();
        assert!(sol.delta <= 0.2);
        assert_eq!(sol.mask.zeros(), 0);
        assert!(!sol.unreachable);
    }

    #[test]
    fn cap_dominates_unreachable_target() {
        let (s, g, t) = single_pair(vec![0.1, 0.2, 0.3, 0.4], 2, 2);
        let sol = solve_delta_for_sparsity(&s, &g, &t, 0.5, &BTreeSet::new(), 0.9).unwrap();
        assert!(sol.unreachable);
        assert_eq!(sol.mask.zeros(), 2);
        assert_eq!(sol.pruned_fraction, 0.5);
    }

    #[test]
    fn median_crossing() {
        let (s, g, t) = single_pair(vec![0.8, 0.1, 0.6, 0.3, 0.7, 0.2], 2, 3);
        let sol = solve_delta_for_sparsity(&s, &g, &t, 1.0, &BTreeSet::new(), 0.5).unwrap();
        assert_eq!(sol.delta, 0.6);
        assert_eq!(sol.pruned_fraction, 0.5);
    }

    #[test]
    fn rejects_bad_target() {
        let (s, g, t) = single_pair(vec![0.5; 4], 2, 2);
        assert!(solve_delta_for_sparsity(&s, &g, &t, 1.0, &BTreeSet::new(), 1.0).is_err());
        assert!(solve_delta_for_sparsity(&s, &g, &t, 1.0, &BTreeSet::new(), -0.1).is_err());
    }
}
