mod support;

use std::collections::BTreeMap;

use mint::gmi::{
    conditional_gmi, euclidean_mst, fr_statistic, gaussian_gmi_oracle, gmi, nn_bootstrap, permute_product,
    standardize, BlockSpec, Edge, EdgeList, GmiError, Origin, OriginLabels, SampleMatrix,
};
use proptest::prelude::*;
use rand::Rng;
use support::*;

fn points_strategy() -> impl Strategy<Value = Vec<Vec<f64>>> {
    (2usize..=10, 1usize..=4).prop_flat_map(|(m, d)| prop::collection::vec(prop::collection::vec(-5.0f64..5.0, d), m))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn mst_matches_kruskal(points in points_strategy()) {
        let tree = euclidean_mst(&SampleMatrix::from_rows(&points).unwrap()).unwrap();
        let pairs: Vec<_> = tree.edges.iter().map(|e| (e.a, e.b)).collect();
        prop_assert!(is_spanning_tree(points.len(), &pairs));
        prop_assert_eq!(tree.total_weight(), ascending_sum(&kruskal_weights(&points)));
    }

    #[test]
    fn fr_matches_edge_scan(m in 2usize..40, seed in any::<u64>()) {
        let mut g = rng(seed);
        let edges = random_tree(&mut g, m);
        let mut tags: Vec<bool> = (0..m).map(|_| g.random()).collect();
        tags[0] = true;
        tags[m - 1] = false;
        let tree = EdgeList { node_count: m, edges: edges.iter().map(|&(a, b)| Edge::new(a, b, 1.0)).collect() };
        let labels = OriginLabels::new(tags.iter().map(|&t| if t { Origin::Joint } else { Origin::Surrogate }).collect()).unwrap();
        let r = fr_statistic(&tree, &labels).unwrap();
        prop_assert_eq!(r, dichotomous_edges(&edges, &tags));
        prop_assert!(r >= 1 && r <= m - 1);
    }

    #[test]
    fn permutation_keeps_y_multiset(rows in prop::collection::vec((-9i32..9, -9i32..9), 2..30), seed in any::<u64>()) {
        let s = SampleMatrix::from_rows(&rows.iter().map(|&(x, y)| [x as f64, y as f64]).collect::<Vec<_>>()).unwrap();
        let out = permute_product(&s, &BlockSpec::contiguous(1, 1, 0), seed).unwrap();
        prop_assert_eq!(out.column(0), s.column(0));
        let count = |v: Vec<f64>| v.into_iter().fold(BTreeMap::new(), |mut h, y| { *h.entry(y as i64).or_insert(0) += 1; h });
        prop_assert_eq!(count(out.column(1)), count(s.column(1)));
    }

    #[test]
    fn bootstrap_keeps_x_and_z(rows in prop::collection::vec(prop::array::uniform4(-3.0f64..3.0), 2..30)) {
        let s = SampleMatrix::from_rows(&rows).unwrap();
        let spec = BlockSpec::contiguous(1, 1, 2);
        let out = nn_bootstrap(&s, &spec).unwrap();
        for c in [0, 2, 3] {
            prop_assert_eq!(out.column(c), s.column(c));
        }
        let ys = s.column(1);
        prop_assert!(out.column(1).iter().all(|y| ys.contains(y)));
    }
}

#[test]
fn seeded_kruskal_instance() {
    let mut g = rng(7);
    let points = uniform_points(&mut g, 8, 3);
    let tree = euclidean_mst(&SampleMatrix::from_rows(&points).unwrap()).unwrap();
    assert_eq!(tree.edges.len(), 7);
    assert_eq!(tree.total_weight(), ascending_sum(&kruskal_weights(&points)));
}

#[test]
fn fr_fixtures() {
    let path = EdgeList { node_count: 4, edges: vec![Edge::new(0, 1, 1.0), Edge::new(1, 2, 1.0), Edge::new(2, 3, 1.0)] };
    use Origin::*;
    let alt = OriginLabels::new(vec![Joint, Surrogate, Joint, Surrogate]).unwrap();
    assert_eq!(fr_statistic(&path, &alt).unwrap(), 3);

    let pts: Vec<[f64; 1]> = vec![[0.0], [0.5], [1.0], [100.0], [100.5], [101.0]];
    let tree = euclidean_mst(&SampleMatrix::from_rows(&pts).unwrap()).unwrap();
    assert_eq!(fr_statistic(&tree, &OriginLabels::split(3, 3).unwrap()).unwrap(), 1);
    assert_eq!(OriginLabels::new(vec![Joint; 3]), Err(GmiError::DegenerateLabels));
}

#[test]
fn standardized_columns() {
    let mut g = rng(3);
    let cols: Vec<Vec<f64>> = (0..4).map(|k| (0..100).map(|_| g.random::<f64>() * (k + 1) as f64 + k as f64).collect()).collect();
    let z = standardize(&matrix(&cols)).unwrap();
    for c in 0..4 {
        let v = z.column(c);
        let mean = v.iter().sum::<f64>() / 100.0;
        let sd = (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 100.0).sqrt();
        assert!(mean.abs() < 1e-9 && (sd - 1.0).abs() < 1e-9);
    }
    assert_eq!(standardize(&matrix(&[vec![5.0; 3]])).unwrap().column(0), vec![0.0; 3]);
}

#[test]
fn identical_blocks_score_high() {
    let mut g = rng(1);
    let x: Vec<f64> = (0..1000).map(|_| g.random()).collect();
    let s = matrix(&[x.clone(), x]);
    let score = gmi(&s, &BlockSpec::contiguous(1, 1, 0), 4).unwrap();
    assert!(score.value >= 0.8, "{score:?}");
    assert_eq!(score.subset_size, 500);
}

#[test]
fn odd_rows_drop_one() {
    let s = independent_uniform(2, 101);
    assert_eq!(gmi(&s, &BlockSpec::contiguous(1, 1, 0), 0).unwrap().subset_size, 50);
}

#[test]
fn scores_are_deterministic_and_bounded() {
    let s = markov_chain(5, 300, 0.3);
    let spec = BlockSpec::contiguous(1, 1, 1);
    let a = conditional_gmi(&s, &spec, 9).unwrap();
    assert_eq!(a, conditional_gmi(&s, &spec, 9).unwrap());
    assert!((0.0..=1.0).contains(&a.value));
    assert!(a.raw_fr_count >= 1 && a.raw_fr_count < 2 * a.subset_size);
}

#[test]
fn irrelevant_conditioning_keeps_dependence() {
    let mut g = rng(8);
    let x: Vec<f64> = (0..2000).map(|_| normal(&mut g)).collect();
    let z: Vec<f64> = (0..2000).map(|_| normal(&mut g)).collect();
    let s = matrix(&[x.clone(), x, z]);
    assert!(conditional_gmi(&s, &BlockSpec::contiguous(1, 1, 1), 0).unwrap().value >= 0.6);
}

#[test]
fn too_few_rows() {
    let s = matrix(&[vec![1.0, 2.0, 3.0], vec![1.0, 2.0, 3.0], vec![0.0, 1.0, 0.0]]);
    assert!(matches!(
        conditional_gmi(&s, &BlockSpec::contiguous(1, 1, 1), 0),
        Err(GmiError::InsufficientSamples { .. })
    ));
}

#[test]
fn swapping_blocks_is_symmetric_on_average() {
    let (mut xy, mut yx) = (0.0, 0.0);
    for seed in 0..20 {
        let s = gaussian_pair(100 + seed, 400, 0.7);
        let swapped = matrix(&[s.column(1), s.column(0)]);
        xy += gmi(&s, &BlockSpec::contiguous(1, 1, 0), seed).unwrap().value;
        yx += gmi(&swapped, &BlockSpec::contiguous(1, 1, 0), seed).unwrap().value;
    }
    assert!((xy - yx).abs() / 20.0 <= 0.1);
}

#[test]
fn oracle_symmetry_and_zero() {
    assert!(gaussian_gmi_oracle(0.0, 256).unwrap().abs() < 1e-12);
    assert_eq!(gaussian_gmi_oracle(0.3, 128).unwrap(), gaussian_gmi_oracle(-0.3, 128).unwrap());
    assert!(gaussian_gmi_oracle(1.0, 256).is_err());
}
