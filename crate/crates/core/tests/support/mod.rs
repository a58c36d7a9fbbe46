//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use mint::gmi::SampleMatrix;
use mint::seed::rng_from_seed;

pub mod formats;

pub fn rng(seed: u64) -> ChaCha8Rng {
    rng_from_seed(seed)
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        Self((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        self.0[x] = r;
        r
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.0[ra] = rb;
        true
    }
}

pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for (x, y) in a.iter().zip(b) {
        s += (x - y) * (x - y);
    }
    s.sqrt()
}

/// Kruskal over every candidate edge. Returns the tree weights in ascending order.
pub fn kruskal_weights(points: &[Vec<f64>]) -> Vec<f64> {
    let m = points.len();
    let mut cand = Vec::new();
    for a in 0..m {
        for b in a + 1..m {
            cand.push((distance(&points[a], &points[b]), a, b));
        }
    }
    cand.sort_by(|x, y| x.0.total_cmp(&y.0).then((x.1, x.2).cmp(&(y.1, y.2))));
    let mut uf = UnionFind::new(m);
    let mut out = Vec::new();
    for (w, a, b) in cand {
        if uf.union(a, b) {
            out.push(w);
        }
    }
    out
}

pub fn ascending_sum(w: &[f64]) -> f64 {
    let mut v = w.to_vec();
    v.sort_by(f64::total_cmp);
    v.iter().sum()
}

/// True when `edges` over `m` nodes form a spanning tree.
pub fn is_spanning_tree(m: usize, edges: &[(usize, usize)]) -> bool {
    if edges.len() + 1 != m {
        return false;
    }
    let mut uf = UnionFind::new(m);
    edges.iter().all(|&(a, b)| a < m && b < m && uf.union(a, b))
}

pub fn uniform_points(rng: &mut ChaCha8Rng, m: usize, d: usize) -> Vec<Vec<f64>> {
    (0..m).map(|_| (0..d).map(|_| rng.random::<f64>()).collect()).collect()
}

/// Random labelled tree: node `k` attaches to a uniformly chosen earlier node.
pub fn random_tree(rng: &mut ChaCha8Rng, m: usize) -> Vec<(usize, usize)> {
    (1..m).map(|k| (rng.random_range(0..k), k)).collect()
}

pub fn dichotomous_edges(edges: &[(usize, usize)], tags: &[bool]) -> usize {
    let mut r = 0;
    for &(a, b) in edges {
        if tags[a] != tags[b] {
            r += 1;
        }
    }
    r
}

pub fn normal(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

pub fn matrix(cols: &[Vec<f64>]) -> SampleMatrix {
    SampleMatrix::from_columns(cols).unwrap()
}

/// Standard bivariate Gaussian with correlation `r`.
pub fn gaussian_pair(seed: u64, m: usize, r: f64) -> SampleMatrix {
    let mut g = rng(seed);
    let (mut x, mut y) = (Vec::with_capacity(m), Vec::with_capacity(m));
    for _ in 0..m {
        let a = normal(&mut g);
        let b = normal(&mut g);
        x.push(a);
        y.push(r * a + (1.0 - r * r).sqrt() * b);
    }
    matrix(&[x, y])
}

pub fn independent_uniform(seed: u64, m: usize) -> SampleMatrix {
    let mut g = rng(seed);
    let x = (0..m).map(|_| g.random::<f64>()).collect();
    let y = (0..m).map(|_| g.random::<f64>()).collect();
    matrix(&[x, y])
}

/// Columns `[x, y, z]` of the chain `x -> z -> y` with small additive noise.
pub fn markov_chain(seed: u64, m: usize, sigma: f64) -> SampleMatrix {
    let mut g = rng(seed);
    let (mut x, mut y, mut z) = (Vec::new(), Vec::new(), Vec::new());
    for _ in 0..m {
        let a = normal(&mut g);
        let c = a + sigma * normal(&mut g);
        let b = c + sigma * normal(&mut g);
        x.push(a);
        y.push(b);
        z.push(c);
    }
    matrix(&[x, y, z])
}

pub fn mean_std(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// `{ j : rho[i][j] >= delta }` for each row of a row-major table.
pub fn threshold_oracle(rho: &[f64], cols: usize, delta: f64) -> Vec<BTreeSet<usize>> {
    rho.chunks(cols)
        .map(|row| {
            let mut s = BTreeSet::new();
            for (j, &v) in row.iter().enumerate() {
                if v >= delta {
                    s.insert(j);
                }
            }
            s
        })
        .collect()
}

/// Scan every candidate threshold: keep `delta` if it already prunes at most a
/// `gamma` fraction of entries, otherwise the largest score value that does.
pub fn gamma_oracle(rho: &[f64], delta: f64, gamma: f64) -> f64 {
    let k = rho.len() as f64;
    let pruned_at = |t: f64| rho.iter().filter(|&&v| v < t).count() as f64;
    if pruned_at(delta) <= gamma * k + 1e-9 {
        return delta;
    }
    let mut best = f64::NEG_INFINITY;
    for &t in rho {
        if t <= delta && pruned_at(t) <= gamma * k + 1e-9 && t > best {
            best = t;
        }
    }
    best
}

/// Filter-level expansion by direct double loop over contiguous groups.
pub fn expand_oracle(
    sets: &[BTreeSet<usize>],
    consumer_bounds: &[usize],
    producer_bounds: &[usize],
) -> Vec<u8> {
    let group = |bounds: &[usize], f: usize| bounds.windows(2).position(|w| f >= w[0] && f < w[1]).unwrap();
    let rows = *consumer_bounds.last().unwrap();
    let cols = *producer_bounds.last().unwrap();
    let mut bits = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        for c in 0..cols {
            bits.push(sets[group(consumer_bounds, r)].contains(&group(producer_bounds, c)) as u8);
        }
    }
    bits
}

/// Group boundaries `[0, s, 2s, ..., n]` with the remainder in the last group.
pub fn bounds(n: usize, g: usize) -> Vec<usize> {
    let s = n / g;
    let mut b: Vec<usize> = (0..g).map(|k| k * s).collect();
    b.push(n);
    b
}
