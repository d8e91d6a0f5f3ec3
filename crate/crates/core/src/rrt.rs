//! Uniform random recursive trees, Bernoulli bond percolation on them, and
//! the divide-and-color representation of the walk.
//!
//! Vertices are labelled `1..=n`. Vertex `i >= 2` is attached to a uniformly
//! chosen earlier vertex, so every parent label is smaller than its child's;
//! clusters are therefore discovered in increasing order of their minimal
//! vertex and cluster 1 is always the root's.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::{check_probability_closed, check_probability_open};
use crate::rng::{substream, StreamKey};

pub const ENUMERATION_CAP: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RecursiveTree {
    /// `parent[i]` for vertex `i`; entries 0 and 1 are unused and hold 0.
    parent: Vec<usize>,
}

impl RecursiveTree {
    /// Builds a tree from parents of vertices `2..=n` in order.
    pub fn from_parents(parents: &[usize]) -> Result<Self> {
        let mut parent = vec![0, 0];
        for (offset, &p) in parents.iter().enumerate() {
            let child = offset + 2;
            if p == 0 || p >= child {
                return Err(Error::precondition(format!(
                    "vertex {child} has parent {p}; parents must lie in 1..{child}"
                )));
            }
            parent.push(p);
        }
        Ok(Self { parent })
    }

    pub fn vertex_count(&self) -> usize {
        self.parent.len() - 1
    }

    /// Parent of vertex `v`, `None` for the root.
    pub fn parent(&self, v: usize) -> Option<usize> {
        (v >= 2).then(|| self.parent[v])
    }

    /// Edges `(i, parent(i))` for `i = 2..=n`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (2..self.parent.len()).map(move |i| (i, self.parent[i]))
    }
}

pub fn grow_tree<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<RecursiveTree> {
    if n == 0 {
        return Err(Error::precondition("a tree needs at least one vertex"));
    }
    let mut parent = Vec::with_capacity(n + 1);
    parent.extend([0, 0]);
    for i in 2..=n {
        parent.push(rng.gen_range(1..i));
    }
    Ok(RecursiveTree { parent })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PercolationOutcome {
    pub tree: RecursiveTree,
    /// `open[i]` for the edge between `i` and its parent; entries 0, 1 unused.
    pub open: Vec<bool>,
    /// Cluster id (1-based) of each vertex; entry 0 unused.
    pub cluster_of: Vec<usize>,
    /// `sizes[j - 1]` is the size of cluster `j`.
    pub sizes: Vec<usize>,
}

impl PercolationOutcome {
    /// Labels clusters of the open subgraph.
    pub fn from_open_edges(tree: RecursiveTree, open: Vec<bool>) -> Self {
        let n = tree.vertex_count();
        debug_assert_eq!(open.len(), n + 1);
        let mut cluster_of = vec![0; n + 1];
        let mut sizes = Vec::new();
        cluster_of[1] = 1;
        sizes.push(1);
        for i in 2..=n {
            if open[i] {
                let c = cluster_of[tree.parent[i]];
                cluster_of[i] = c;
                sizes[c - 1] += 1;
            } else {
                sizes.push(1);
                cluster_of[i] = sizes.len();
            }
        }
        Self {
            tree,
            open,
            cluster_of,
            sizes,
        }
    }

    pub fn root_cluster_size(&self) -> usize {
        self.sizes[0]
    }

    pub fn cluster_count(&self) -> usize {
        self.sizes.len()
    }
}

/// Keeps each edge independently with probability `alpha`.
pub fn percolate<R: Rng + ?Sized>(
    tree: RecursiveTree,
    alpha: f64,
    rng: &mut R,
) -> Result<PercolationOutcome> {
    check_probability_closed("alpha", alpha)?;
    let n = tree.vertex_count();
    let mut open = vec![false; n + 1];
    for slot in open.iter_mut().skip(2) {
        *slot = rng.gen::<f64>() < alpha;
    }
    Ok(PercolationOutcome::from_open_edges(tree, open))
}

/// `sum_j xi_j #C_j` with `xi_1 ~ Bernoulli(s)` for the root cluster and
/// `xi_j ~ Bernoulli(rho)` for the others.
pub fn divide_and_color_sum<R: Rng + ?Sized>(
    outcome: &PercolationOutcome,
    rho: f64,
    s: f64,
    rng: &mut R,
) -> Result<u64> {
    check_probability_closed("rho", rho)?;
    check_probability_closed("s", s)?;
    let mut total = 0;
    for (j, &size) in outcome.sizes.iter().enumerate() {
        let prob = if j == 0 { s } else { rho };
        if rng.gen::<f64>() < prob {
            total += size as u64;
        }
    }
    Ok(total)
}

fn sample_outcome(n: usize, alpha: f64, key: StreamKey) -> Result<PercolationOutcome> {
    let tree = grow_tree(n, &mut key.substream(substream::TREE))?;
    percolate(tree, alpha, &mut key.substream(substream::PERCOLATION))
}

/// Root-cluster sizes of `samples` independent (tree, percolation) draws,
/// returned as a histogram over `0..=n`.
pub fn root_cluster_histogram(n: usize, alpha: f64, seed: u64, samples: u64) -> Result<Vec<u64>> {
    check_probability_closed("alpha", alpha)?;
    if n == 0 {
        return Err(Error::precondition("a tree needs at least one vertex"));
    }
    let sizes: Vec<usize> = (0..samples)
        .into_par_iter()
        .map(|i| sample_outcome(n, alpha, StreamKey::new(seed, i)).map(|o| o.root_cluster_size()))
        .collect::<Result<_>>()?;
    Ok(histogram(n, sizes))
}

/// Divide-and-color samples for the walk with `alpha = p - q`, `rho`, `s`.
pub fn divide_and_color_histogram(
    n: usize,
    params: &crate::WalkParams,
    seed: u64,
    samples: u64,
) -> Result<Vec<u64>> {
    params.require_percolation_regime()?;
    if n == 0 {
        return Err(Error::precondition("a tree needs at least one vertex"));
    }
    let (alpha, rho, s) = (params.alpha(), params.rho(), params.s());
    let sums: Vec<usize> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let key = StreamKey::new(seed, i);
            let outcome = sample_outcome(n, alpha, key)?;
            divide_and_color_sum(&outcome, rho, s, &mut key.substream(substream::SPINS))
                .map(|v| v as usize)
        })
        .collect::<Result<_>>()?;
    Ok(histogram(n, sums))
}

fn histogram(n: usize, values: Vec<usize>) -> Vec<u64> {
    let mut counts = vec![0u64; n + 1];
    for v in values {
        counts[v] += 1;
    }
    counts
}

/// Exact cluster moments by brute force over all attachment sequences and
/// edge states of an `n`-vertex tree.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnumeratedMoments {
    pub mean_root: f64,
    pub second_root: f64,
    pub sum_second: f64,
}

/// Every attachment sequence has probability `1/(n-1)!`, so integer totals
/// are accumulated per number of open edges and weighted by
/// `alpha^m (1 - alpha)^(n-1-m)` only at the end.
pub fn enumerate_exact(n: usize, alpha: f64) -> Result<EnumeratedMoments> {
    check_probability_open("alpha", alpha)?;
    if n == 0 {
        return Err(Error::precondition("a tree needs at least one vertex"));
    }
    if n > ENUMERATION_CAP {
        return Err(Error::LimitExceeded {
            name: "n",
            value: n as u64,
            limit: ENUMERATION_CAP as u64,
        });
    }
    let edges = n - 1;
    // per open-edge count m: (sum root size, sum root size^2, sum of sum_j size_j^2)
    let mut totals = vec![[0u64; 3]; edges + 1];
    let mut sequences = 0u64;

    // mixed-radix counter over parents of vertices 2..=n
    let mut parents = vec![1usize; edges];
    loop {
        sequences += 1;
        let tree = RecursiveTree::from_parents(&parents).expect("counter stays in range");
        for mask in 0u32..(1 << edges) {
            let mut open = vec![false; n + 1];
            for (bit, slot) in open.iter_mut().skip(2).enumerate() {
                *slot = mask & (1 << bit) != 0;
            }
            let outcome = PercolationOutcome::from_open_edges(tree.clone(), open);
            let root = outcome.root_cluster_size() as u64;
            let squares: u64 = outcome.sizes.iter().map(|&c| (c * c) as u64).sum();
            let m = mask.count_ones() as usize;
            totals[m][0] += root;
            totals[m][1] += root * root;
            totals[m][2] += squares;
        }
        // advance: vertex i = offset + 2 takes parents 1..=i-1
        let mut offset = 0;
        loop {
            if offset == edges {
                return Ok(weigh(&totals, sequences, alpha));
            }
            if parents[offset] < offset + 1 {
                parents[offset] += 1;
                break;
            }
            parents[offset] = 1;
            offset += 1;
        }
    }
}

fn weigh(totals: &[[u64; 3]], sequences: u64, alpha: f64) -> EnumeratedMoments {
    let edges = totals.len() - 1;
    let mut acc = [0.0f64; 3];
    for (m, row) in totals.iter().enumerate() {
        let weight = alpha.powi(m as i32) * (1.0 - alpha).powi((edges - m) as i32);
        for (a, &t) in acc.iter_mut().zip(row) {
            *a += weight * t as f64;
        }
    }
    let scale = sequences as f64;
    EnumeratedMoments {
        mean_root: acc[0] / scale,
        second_root: acc[1] / scale,
        sum_second: acc[2] / scale,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn small_trees() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let t1 = grow_tree(1, &mut rng).unwrap();
        assert_eq!(t1.vertex_count(), 1);
        assert_eq!(t1.edges().count(), 0);
        let t2 = grow_tree(2, &mut rng).unwrap();
        assert_eq!(t2.parent(2), Some(1));
        assert_eq!(t2.parent(1), None);
        assert!(grow_tree(0, &mut rng).is_err());
    }

    #[test]
    fn recursive_property() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let tree = grow_tree(500, &mut rng).unwrap();
        assert_eq!(tree.edges().count(), 499);
        assert!(tree
            .edges()
            .all(|(child, parent)| parent >= 1 && parent < child));
        assert!(RecursiveTree::from_parents(&[1, 3]).is_err());
    }

    #[test]
    fn percolation_extremes() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let tree = grow_tree(40, &mut rng).unwrap();
        let all = percolate(tree.clone(), 1.0, &mut rng).unwrap();
        assert_eq!(all.sizes, vec![40]);
        let none = percolate(tree, 0.0, &mut rng).unwrap();
        assert_eq!(none.sizes, vec![1; 40]);
        assert_eq!(none.cluster_of[17], 17);
    }

    #[test]
    fn clusters_partition_and_root_first() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..50 {
            let tree = grow_tree(60, &mut rng).unwrap();
            let out = percolate(tree, 0.6, &mut rng).unwrap();
            assert_eq!(out.sizes.iter().sum::<usize>(), 60);
            assert_eq!(out.cluster_of[1], 1);
            for c in 1..=out.cluster_count() {
                let count = out.cluster_of[1..].iter().filter(|&&x| x == c).count();
                assert_eq!(count, out.sizes[c - 1]);
            }
            // minimal vertex of cluster j precedes that of cluster j + 1
            let firsts: Vec<usize> = (1..=out.cluster_count())
                .map(|c| out.cluster_of.iter().skip(1).position(|&x| x == c).unwrap())
                .collect();
            assert!(firsts.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn divide_and_color_extremes() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let tree = grow_tree(30, &mut rng).unwrap();
        let out = percolate(tree, 0.5, &mut rng).unwrap();
        assert_eq!(divide_and_color_sum(&out, 1.0, 1.0, &mut rng).unwrap(), 30);
        assert_eq!(divide_and_color_sum(&out, 0.0, 0.0, &mut rng).unwrap(), 0);
        assert_eq!(
            divide_and_color_sum(&out, 0.0, 1.0, &mut rng).unwrap(),
            out.root_cluster_size() as u64
        );
    }

    #[test]
    fn enumeration_examples() {
        let e = enumerate_exact(1, 0.4).unwrap();
        assert_eq!((e.mean_root, e.second_root, e.sum_second), (1.0, 1.0, 1.0));
        let e = enumerate_exact(2, 0.5).unwrap();
        assert_eq!((e.mean_root, e.second_root, e.sum_second), (1.5, 2.5, 3.0));
        assert!(enumerate_exact(9, 0.5).is_err());
        assert!(enumerate_exact(3, 1.0).is_err());
    }

    #[test]
    fn enumeration_three_vertices_by_hand() {
        // trees: path 1-2-3 (3 -> 2) or star (3 -> 1), each 1/2
        // root size: both edges open -> 3; only edge(2) open -> 2; only edge(3) open
        // -> 2 on the star, 1 on the path; none -> 1
        let a: f64 = 0.3;
        let b = 1.0 - a;
        let mean = a * a * 3.0 + a * b * 2.0 + 0.5 * b * a * (2.0 + 1.0) + b * b;
        let e = enumerate_exact(3, a).unwrap();
        assert!((e.mean_root - mean).abs() < 1e-15);
    }
}
