use std::collections::HashSet;

use super::trees::enumerate_spanning_trees;
use crate::error::{Error, Result};
use crate::graph::{EdgeRef, Graph};
use crate::spanning::RootedTree;

/// Spanning forest with exactly two trees. `t1` holds the designated root.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TwoForest {
    /// Sorted node ids of the tree containing the root.
    pub t1: Vec<usize>,
    /// Sorted node ids of the other tree.
    pub t2: Vec<usize>,
    /// Sorted edges, `n - 2` of them.
    pub edges: Vec<EdgeRef>,
}

impl TwoForest {
    /// The forest left after deleting the edge above `child` from `tree`.
    pub fn from_cut(tree: &RootedTree, child: usize) -> Self {
        let mut t2 = tree.subtree(child).to_vec();
        t2.sort_unstable();
        let t1: Vec<usize> = (0..tree.node_count())
            .filter(|&v| !tree.in_subtree(child, v))
            .collect();
        let mut edges: Vec<EdgeRef> = (0..tree.node_count())
            .filter(|&v| v != child && v != tree.root())
            .map(|v| EdgeRef::new(v, tree.parent(v)).expect("tree edges are not loops"))
            .collect();
        edges.sort_unstable();
        TwoForest { t1, t2, edges }
    }

    pub fn vol_t1(&self, graph: &Graph) -> u64 {
        self.t1.iter().map(|&v| graph.degree(v) as u64).sum()
    }

    pub fn vol_t2(&self, graph: &Graph) -> u64 {
        self.t2.iter().map(|&v| graph.degree(v) as u64).sum()
    }

    pub fn separates(&self, u: usize) -> bool {
        self.t2.binary_search(&u).is_ok()
    }
}

/// All 2-forests of `graph`, with `t1` the side containing `r`.
///
/// Each 2-forest is a spanning tree minus one edge; duplicates are removed
/// by edge set.
pub fn enumerate_all_two_forests(graph: &Graph, r: usize) -> Result<Vec<TwoForest>> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for tree in enumerate_spanning_trees(graph, r)? {
        for v in 0..graph.node_count() {
            if v == r {
                continue;
            }
            let f = TwoForest::from_cut(&tree, v);
            if seen.insert(f.edges.clone()) {
                out.push(f);
            }
        }
    }
    out.sort_unstable();
    Ok(out)
}

/// 2-forests in which `r` and `u` lie in different trees.
pub fn enumerate_two_forests(graph: &Graph, r: usize, u: usize) -> Result<Vec<TwoForest>> {
    if r == u || u >= graph.node_count() {
        return Err(Error::invalid(format!("need distinct nodes, got r = {r}, u = {u}")));
    }
    Ok(enumerate_all_two_forests(graph, r)?
        .into_iter()
        .filter(|f| f.separates(u))
        .collect())
}

/// `(1 / 2m|Γ|) Σ_{u≠r} d(u) Σ_{F ∈ 𝔽_{r|u}} vol(T1)` by enumeration.
pub fn kemeny_forest_formula(graph: &Graph, r: usize) -> Result<f64> {
    if graph.node_count() < 2 {
        return Err(Error::invalid("graph needs at least two nodes"));
    }
    let trees = enumerate_spanning_trees(graph, r)?.len() as u128;
    let mut total: u128 = 0;
    for f in enumerate_all_two_forests(graph, r)? {
        let vol_t1 = f.vol_t1(graph) as u128;
        for &u in &f.t2 {
            total += graph.degree(u) as u128 * vol_t1;
        }
    }
    Ok(total as f64 / (graph.volume() as u128 * trees) as f64)
}

/// Forward and reverse path mappings of `tree` along the node sequence
/// `path`, which must run from some `u` to the tree's root.
///
/// An edge of `path` traversed as `i -> j` contributes `tree \ (i, j)` to
/// the forward set when the tree's `u -> root` path also goes `i -> j`, and
/// to the reverse set when it goes `j -> i`.
pub fn path_mapping_sets(
    graph: &Graph,
    tree: &RootedTree,
    path: &[usize],
) -> Result<(Vec<TwoForest>, Vec<TwoForest>)> {
    validate_path(graph, tree.root(), path)?;
    let u = path[0];
    let mut forward = Vec::new();
    let mut reverse = Vec::new();
    for w in path.windows(2) {
        let (i, j) = (w[0], w[1]);
        if tree.parent(i) == j && tree.in_subtree(i, u) {
            forward.push(TwoForest::from_cut(tree, i));
        } else if tree.parent(j) == i && tree.in_subtree(j, u) {
            reverse.push(TwoForest::from_cut(tree, j));
        }
    }
    Ok((forward, reverse))
}

fn validate_path(graph: &Graph, root: usize, path: &[usize]) -> Result<()> {
    let n = graph.node_count();
    if path.len() < 2 {
        return Err(Error::InvalidPath("a path needs at least two nodes".into()));
    }
    if *path.last().unwrap() != root {
        return Err(Error::InvalidPath(format!("path must end at the root {root}")));
    }
    let mut seen = vec![false; n];
    for &x in path {
        if x >= n {
            return Err(Error::InvalidPath(format!("node {x} out of range")));
        }
        if std::mem::replace(&mut seen[x], true) {
            return Err(Error::InvalidPath(format!("node {x} repeats")));
        }
    }
    if let Some(w) = path.windows(2).find(|w| !graph.has_edge(w[0], w[1])) {
        return Err(Error::InvalidPath(format!("({}, {}) is not an edge", w[0], w[1])));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate;
    use crate::spanning::NO_PARENT;

    // K3 with v1 = 0, v2 = 1, v3 = 2
    fn part(f: &TwoForest) -> (Vec<usize>, Vec<usize>) {
        (f.t1.clone(), f.t2.clone())
    }

    #[test]
    fn triangle_forests_separating_root() {
        let k3 = generate::complete(3);
        let fs = enumerate_two_forests(&k3, 0, 1).unwrap();
        let parts: Vec<_> = fs.iter().map(part).collect();
        assert_eq!(parts.len(), 2);
        assert!(parts.contains(&(vec![0], vec![1, 2])));
        assert!(parts.contains(&(vec![0, 2], vec![1])));
        let f1 = fs.iter().find(|f| f.t1 == vec![0]).unwrap();
        assert_eq!(f1.vol_t1(&k3), 2);
        assert_eq!(f1.edges, vec![EdgeRef::new(1, 2).unwrap()]);
    }

    #[test]
    fn path_forests() {
        let p3 = generate::path(3);
        let parts: Vec<_> = enumerate_two_forests(&p3, 0, 2).unwrap().iter().map(part).collect();
        assert_eq!(parts.len(), 2);
        assert!(parts.contains(&(vec![0], vec![1, 2])));
        assert!(parts.contains(&(vec![0, 1], vec![2])));
    }

    #[test]
    fn forest_formula_small_cases() {
        let k3 = generate::complete(3);
        for r in 0..3 {
            assert!((kemeny_forest_formula(&k3, r).unwrap() - 4.0 / 3.0).abs() < 1e-12);
        }
        let p3 = generate::path(3);
        assert!((kemeny_forest_formula(&p3, 0).unwrap() - 1.5).abs() < 1e-12);
        assert!((kemeny_forest_formula(&generate::complete(2), 0).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn two_forest_shape() {
        let g = generate::complete(5);
        let fs = enumerate_all_two_forests(&g, 2).unwrap();
        for f in &fs {
            assert_eq!(f.edges.len(), 3);
            assert_eq!(f.t1.len() + f.t2.len(), 5);
            assert!(f.t1.contains(&2));
        }
        // in K5 a forest lies in |T1| * |T2| trees, and each tree yields n - 1 forests
        let total: usize = fs.iter().map(|f| f.t1.len() * f.t2.len()).sum();
        assert_eq!(total, 4 * 125);
    }

    #[test]
    fn path_mapping_worked_example() {
        let k3 = generate::complete(3);
        let path = [1, 2, 0];
        // τ1: the path v2 - v3 - v1 rooted at v1
        let tau1 = RootedTree::from_parents(&k3, 0, vec![NO_PARENT, 2, 0]).unwrap();
        let (fwd, rev) = path_mapping_sets(&k3, &tau1, &path).unwrap();
        assert!(rev.is_empty());
        let parts: Vec<_> = fwd.iter().map(part).collect();
        assert_eq!(parts, vec![(vec![0, 2], vec![1]), (vec![0], vec![1, 2])]);
        // τ3: edges (v1, v2), (v1, v3)
        let tau3 = RootedTree::from_parents(&k3, 0, vec![NO_PARENT, 0, 0]).unwrap();
        let (fwd, rev) = path_mapping_sets(&k3, &tau3, &path).unwrap();
        assert!(fwd.is_empty() && rev.is_empty());
    }

    #[test]
    fn full_overlap_gives_whole_path() {
        let g = generate::cycle(6);
        let t = crate::spanning::bfs_tree(&g, 0);
        for u in 1..6 {
            let p = t.path_to_root(u);
            let (fwd, rev) = path_mapping_sets(&g, &t, &p).unwrap();
            assert_eq!(fwd.len(), p.len() - 1);
            assert!(rev.is_empty());
        }
    }

    #[test]
    fn rejects_bad_paths() {
        let p4 = generate::path(4);
        let t = crate::spanning::bfs_tree(&p4, 0);
        for bad in [&[3, 1, 0][..], &[3, 2, 1][..], &[1, 0, 1, 0][..], &[0][..], &[9, 0][..]] {
            assert!(matches!(path_mapping_sets(&p4, &t, bad), Err(Error::InvalidPath(_))));
        }
    }
}
