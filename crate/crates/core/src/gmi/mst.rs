use super::{GmiError, Result, SampleMatrix};

/// An undirected tree edge with `a < b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub weight: f64,
}

impl Edge {
    pub fn new(u: usize, v: usize, weight: f64) -> Self {
        Self { a: u.min(v), b: u.max(v), weight }
    }
}

/// Edges of a spanning tree over `node_count` points.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeList {
    pub node_count: usize,
    pub edges: Vec<Edge>,
}

impl EdgeList {
    /// Sum of edge weights, accumulated in ascending weight order so that two
    /// trees with the same weight multiset report bit-identical totals.
    pub fn total_weight(&self) -> f64 {
        let mut w: Vec<f64> = self.edges.iter().map(|e| e.weight).collect();
        w.sort_by(f64::total_cmp);
        w.iter().sum()
    }
}

#[inline]
pub(crate) fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    if a.len() < 8 {
        return a.iter().zip(b).fold(0.0, |s, (x, y)| s + (x - y) * (x - y));
    }
    let mut acc = [0.0f64; 4];
    let ca = a.chunks_exact(4);
    let cb = b.chunks_exact(4);
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        for k in 0..4 {
            let d = x[k] - y[k];
            acc[k] += d * d;
        }
    }
    let mut tail = 0.0;
    for (x, y) in ra.iter().zip(rb) {
        let d = x - y;
        tail += d * d;
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// Strict total order on candidate edges: distance, then (min index, max index).
#[inline]
fn precedes(d1: f64, u1: usize, v1: usize, d2: f64, u2: usize, v2: usize) -> bool {
    match d1.total_cmp(&d2) {
        std::cmp::Ordering::Less => true,
        std::cmp::Ordering::Greater => false,
        std::cmp::Ordering::Equal => (u1.min(v1), u1.max(v1)) < (u2.min(v2), u2.max(v2)),
    }
}

/// Exact Euclidean minimum spanning tree by dense Prim, `O(m^2 d)`.
///
/// Ties are resolved by the smallest `(min index, max index)` pair, which makes
/// the edge order strict and the tree unique.
pub fn euclidean_mst(points: &SampleMatrix) -> Result<EdgeList> {
    let n = points.rows();
    if n < 2 {
        return Err(GmiError::InsufficientSamples { needed: 2, got: n });
    }

    let mut best_d = vec![f64::INFINITY; n];
    let mut best_p = vec![usize::MAX; n];
    let mut remaining: Vec<usize> = (1..n).collect();
    let mut edges = Vec::with_capacity(n - 1);

    let mut last = 0usize;
    while !remaining.is_empty() {
        let src = points.row(last);
        for &w in &remaining {
            let d = squared_distance(src, points.row(w));
            if best_p[w] == usize::MAX || precedes(d, last, w, best_d[w], best_p[w], w) {
                best_d[w] = d;
                best_p[w] = last;
            }
        }

        let mut pick = 0usize;
        for k in 1..remaining.len() {
            let (w, c) = (remaining[k], remaining[pick]);
            if precedes(best_d[w], best_p[w], w, best_d[c], best_p[c], c) {
                pick = k;
            }
        }
        let v = remaining.swap_remove(pick);
        edges.push(Edge::new(best_p[v], v, best_d[v].sqrt()));
        last = v;
    }

    Ok(EdgeList { node_count: n, edges })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(xs: &[f64]) -> SampleMatrix {
        SampleMatrix::from_columns(&[xs.to_vec()]).unwrap()
    }

    #[test]
    fn collinear_chain() {
        let t = euclidean_mst(&line(&[0.0, 1.0, 3.0])).unwrap();
        let mut pairs: Vec<_> = t.edges.iter().map(|e| (e.a, e.b)).collect();
        pairs.sort();
        assert_eq!(pairs, vec![(0, 1), (1, 2)]);
        assert_eq!(t.total_weight(), 3.0);
    }

    #[test]
    fn two_points() {
        let p = SampleMatrix::from_rows(&[[0.0, 0.0], [3.0, 4.0]]).unwrap();
        let t = euclidean_mst(&p).unwrap();
        assert_eq!(t.edges, vec![Edge::new(0, 1, 5.0)]);
    }

    #[test]
    fn single_point_is_an_error() {
        assert!(matches!(
            euclidean_mst(&line(&[1.0])),
            Err(GmiError::InsufficientSamples { needed: 2, got: 1 })
        ));
    }

    #[test]
    fn identical_points_follow_index_ties() {
        let t = euclidean_mst(&line(&[2.0; 4])).unwrap();
        let mut pairs: Vec<_> = t.edges.iter().map(|e| (e.a, e.b)).collect();
        pairs.sort();
        // Every candidate edge has weight zero, so the smallest index pairs win.
        assert_eq!(pairs, vec![(0, 1), (0, 2), (0, 3)]);
        assert_eq!(t.total_weight(), 0.0);
    }

    #[test]
    fn squared_distance_matches_naive() {
        let a: Vec<f64> = (0..11).map(|i| i as f64 * 0.3).collect();
        let b: Vec<f64> = (0..11).map(|i| (i as f64).sin()).collect();
        let naive: f64 = a.iter().zip(&b).map(|(x, y)| (x - y) * (x - y)).sum();
        assert!((squared_distance(&a, &b) - naive).abs() < 1e-12);
    }
}
