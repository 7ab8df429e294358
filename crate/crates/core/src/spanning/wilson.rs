//! Wilson's algorithm: loop-erased random walks absorbed by the growing tree.

use rand::Rng;

use super::{reroot_parents, RootedTree, NO_PARENT};
use crate::error::{Error, Result};
use crate::graph::Graph;

/// Reusable buffers for repeated sampling on graphs of one size.
#[derive(Debug, Default)]
pub struct WilsonSampler {
    in_tree: Vec<bool>,
    next: Vec<usize>,
}

impl WilsonSampler {
    pub fn new(n: usize) -> Self {
        WilsonSampler {
            in_tree: vec![false; n],
            next: vec![NO_PARENT; n],
        }
    }

    fn reset(&mut self, n: usize) {
        self.in_tree.clear();
        self.in_tree.resize(n, false);
        self.next.clear();
        self.next.resize(n, NO_PARENT);
    }

    /// Grows the tree from the nodes already marked `in_tree`, starting walks
    /// from the remaining nodes in ascending id order. Loops are erased by
    /// overwriting `next`, so memory stays O(n). Returns the number of walk
    /// steps taken.
    fn grow<R: Rng + ?Sized>(&mut self, graph: &Graph, rng: &mut R) -> u64 {
        let mut steps = 0u64;
        for start in 0..graph.node_count() {
            let mut u = start;
            while !self.in_tree[u] {
                let nbrs = graph.neighbors(u);
                let next = nbrs[rng.random_range(0..nbrs.len())];
                self.next[u] = next;
                u = next;
                steps += 1;
            }
            let mut u = start;
            while !self.in_tree[u] {
                self.in_tree[u] = true;
                u = self.next[u];
            }
        }
        steps
    }

    /// Uniform spanning tree with edges oriented toward `root`, plus the
    /// number of random-walk steps spent.
    pub fn sample<R: Rng + ?Sized>(&mut self, graph: &Graph, root: usize, rng: &mut R) -> (RootedTree, u64) {
        self.reset(graph.node_count());
        self.in_tree[root] = true;
        let steps = self.grow(graph, rng);
        let mut parent = self.next.clone();
        parent[root] = NO_PARENT;
        (RootedTree::from_parents_trusted(graph, root, parent), steps)
    }

    /// Uniform spanning tree among those containing edge `(a, b)`.
    ///
    /// Walks are absorbed by the pair `{a, b}` (the contracted edge), the
    /// edge is then added and all pointers are redirected toward `root`.
    pub fn sample_with_edge<R: Rng + ?Sized>(
        &mut self,
        graph: &Graph,
        a: usize,
        b: usize,
        root: usize,
        rng: &mut R,
    ) -> Result<(RootedTree, u64)> {
        if a == b || !graph.has_edge(a, b) {
            return Err(Error::InvalidEdge(a, b));
        }
        self.reset(graph.node_count());
        self.in_tree[a] = true;
        self.in_tree[b] = true;
        let steps = self.grow(graph, rng);
        let mut parent = self.next.clone();
        parent[a] = NO_PARENT;
        parent[b] = a;
        reroot_parents(&mut parent, root);
        Ok((RootedTree::from_parents_trusted(graph, root, parent), steps))
    }
}

pub fn wilson_ust<R: Rng + ?Sized>(graph: &Graph, root: usize, rng: &mut R) -> (RootedTree, u64) {
    WilsonSampler::new(graph.node_count()).sample(graph, root, rng)
}

pub fn wilson_ust_with_edge<R: Rng + ?Sized>(
    graph: &Graph,
    a: usize,
    b: usize,
    root: usize,
    rng: &mut R,
) -> Result<(RootedTree, u64)> {
    WilsonSampler::new(graph.node_count()).sample_with_edge(graph, a, b, root, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate;
    use crate::rng::{stream, Domain};
    use std::collections::HashMap;

    #[test]
    fn tree_graph_has_one_outcome() {
        let p3 = generate::path(3);
        for i in 0..50 {
            let mut rng = stream(1, Domain::Sample, i);
            let (t, _) = wilson_ust(&p3, 0, &mut rng);
            assert_eq!(t.parents(), &[NO_PARENT, 0, 1]);
            let (t, _) = wilson_ust_with_edge(&p3, 0, 1, 0, &mut rng).unwrap();
            assert_eq!(t.parents(), &[NO_PARENT, 0, 1]);
        }
    }

    #[test]
    fn triangle_frequencies() {
        let k3 = generate::complete(3);
        let mut counts: HashMap<_, usize> = HashMap::new();
        let mut sampler = WilsonSampler::new(3);
        let draws = 30_000;
        for i in 0..draws {
            let mut rng = stream(2, Domain::Sample, i);
            let (t, _) = sampler.sample(&k3, 0, &mut rng);
            *counts.entry(t.edge_key()).or_default() += 1;
        }
        assert_eq!(counts.len(), 3);
        for &c in counts.values() {
            assert!((c as f64 / draws as f64 - 1.0 / 3.0).abs() <= 0.01);
        }
    }

    #[test]
    fn edge_constrained_frequencies() {
        let k3 = generate::complete(3);
        let mut counts: HashMap<_, usize> = HashMap::new();
        let draws = 20_000;
        for i in 0..draws {
            let mut rng = stream(3, Domain::Sample, i);
            let (t, _) = wilson_ust_with_edge(&k3, 0, 1, 2, &mut rng).unwrap();
            assert!(t.contains_edge(0, 1));
            assert_eq!(t.root(), 2);
            *counts.entry(t.edge_key()).or_default() += 1;
        }
        assert_eq!(counts.len(), 2);
        for &c in counts.values() {
            assert!((c as f64 / draws as f64 - 0.5).abs() <= 0.01);
        }
    }

    #[test]
    fn rejects_non_edges() {
        let p3 = generate::path(3);
        let mut rng = stream(0, Domain::Sample, 0);
        assert!(matches!(
            wilson_ust_with_edge(&p3, 0, 2, 0, &mut rng),
            Err(Error::InvalidEdge(0, 2))
        ));
    }

    #[test]
    fn same_stream_same_tree() {
        use rand::SeedableRng;
        let mut g_rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
        let g = generate::random_connected(200, 0.02, &mut g_rng);
        let (a, sa) = wilson_ust(&g, 0, &mut stream(5, Domain::Sample, 9));
        let (b, sb) = wilson_ust(&g, 0, &mut stream(5, Domain::Sample, 9));
        assert_eq!(a, b);
        assert_eq!(sa, sb);
        assert!(sa >= 199);
    }
}
