//! Surrogate sample generation for the second split.

use rand::seq::SliceRandom;

use super::mst::squared_distance;
use super::{BlockSpec, GmiError, Result, SampleMatrix};
use crate::seed::rng_from_seed;

/// Nearest-neighbour bootstrap.
///
/// Each row's Y block is replaced by the Y block of the row whose Z block is
/// closest in Euclidean distance (self excluded, ties to the lowest index).
/// X and Z blocks are copied unchanged. The result approximates samples from
/// `f(x|z) f(y|z) f(z)`.
pub fn nn_bootstrap(s2: &SampleMatrix, spec: &BlockSpec) -> Result<SampleMatrix> {
    spec.validate(s2.dims())?;
    if !spec.has_z() {
        return Err(GmiError::Contract("nn_bootstrap needs a nonempty Z block"));
    }
    let n = s2.rows();
    if n < 2 {
        return Err(GmiError::InsufficientSamples { needed: 2, got: n });
    }

    let zs: Vec<&[f64]> = (0..n).map(|i| &s2.row(i)[spec.z.clone()]).collect();
    let mut out = s2.clone();
    for i in 0..n {
        let mut best = usize::MAX;
        let mut best_d = f64::INFINITY;
        for (k, zk) in zs.iter().enumerate() {
            if k == i {
                continue;
            }
            let d = squared_distance(zs[i], zk);
            if d < best_d || best == usize::MAX {
                best_d = d;
                best = k;
            }
        }
        let y = spec.y.clone();
        out.row_mut(i)[y.clone()].copy_from_slice(&s2.row(best)[y]);
    }
    Ok(out)
}

/// Product surrogate: the Y block is shuffled across rows with a seeded uniform
/// permutation, breaking any X–Y coupling while preserving both marginals.
pub fn permute_product(s2: &SampleMatrix, spec: &BlockSpec, seed: u64) -> Result<SampleMatrix> {
    spec.validate(s2.dims())?;
    let n = s2.rows();
    if n < 2 {
        return Err(GmiError::InsufficientSamples { needed: 2, got: n });
    }
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut rng_from_seed(seed));

    let mut out = s2.clone();
    let y = spec.y.clone();
    for (i, &src) in perm.iter().enumerate() {
        out.row_mut(i)[y.clone()].copy_from_slice(&s2.row(src)[y.clone()]);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    // columns: x, y, z
    fn xyz(rows: &[[f64; 3]]) -> SampleMatrix {
        SampleMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn bootstrap_takes_nearest_z_neighbour() {
        let s = xyz(&[[1.0, 10.0, 0.0], [2.0, 20.0, 0.1], [3.0, 30.0, 10.0]]);
        let out = nn_bootstrap(&s, &BlockSpec::contiguous(1, 1, 1)).unwrap();
        assert_eq!(out.column(1), vec![20.0, 10.0, 20.0]);
        assert_eq!(out.column(0), s.column(0));
        assert_eq!(out.column(2), s.column(2));
    }

    #[test]
    fn bootstrap_ties_go_to_lowest_index() {
        let s = xyz(&[[0.0, 1.0, 5.0], [0.0, 2.0, 5.0], [0.0, 3.0, 5.0], [0.0, 4.0, 5.0]]);
        let out = nn_bootstrap(&s, &BlockSpec::contiguous(1, 1, 1)).unwrap();
        assert_eq!(out.column(1), vec![2.0, 1.0, 1.0, 1.0]);
    }

    #[test]
    fn bootstrap_preconditions() {
        let one = xyz(&[[0.0, 1.0, 2.0]]);
        assert!(matches!(
            nn_bootstrap(&one, &BlockSpec::contiguous(1, 1, 1)),
            Err(GmiError::InsufficientSamples { .. })
        ));
        let no_z = SampleMatrix::from_rows(&[[0.0, 1.0], [1.0, 2.0]]).unwrap();
        assert!(matches!(
            nn_bootstrap(&no_z, &BlockSpec::contiguous(1, 1, 0)),
            Err(GmiError::Contract(_))
        ));
    }

    #[test]
    fn permutation_swaps_two_rows_for_some_seed() {
        let s = SampleMatrix::from_rows(&[[1.0, 10.0], [2.0, 20.0]]).unwrap();
        let spec = BlockSpec::contiguous(1, 1, 0);
        let seed = (0..64)
            .find(|&seed| permute_product(&s, &spec, seed).unwrap().get(0, 1) == 20.0)
            .expect("some seed swaps two rows");
        let out = permute_product(&s, &spec, seed).unwrap();
        assert_eq!(out.column(1), vec![20.0, 10.0]);
        assert_eq!(out.column(0), vec![1.0, 2.0]);
        assert_eq!(out, permute_product(&s, &spec, seed).unwrap());
    }

    #[test]
    fn permutation_needs_two_rows() {
        let s = SampleMatrix::from_rows(&[[1.0, 10.0]]).unwrap();
        assert!(permute_product(&s, &BlockSpec::contiguous(1, 1, 0), 0).is_err());
    }
}
