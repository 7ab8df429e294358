//! Rooted spanning trees and the operations that produce or rewrite them.

mod transform;
mod wilson;

pub use transform::{cut_link, link_cut};
pub use wilson::{wilson_ust, wilson_ust_with_edge, WilsonSampler};

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::graph::{EdgeRef, Graph};

/// Parent of the root.
pub const NO_PARENT: usize = usize::MAX;

/// Spanning tree with all edges oriented toward `root`.
///
/// Besides the parent array the tree carries its child lists (ascending
/// ids), depth-first entry/exit stamps (1-based, children visited in
/// ascending order) and subtree volumes measured with degrees of the graph
/// the tree was built against. All derived arrays are refreshed together by
/// [`RootedTree::refresh`].
#[derive(Debug, Clone)]
pub struct RootedTree {
    root: usize,
    parent: Vec<usize>,
    child_offsets: Vec<usize>,
    children: Vec<usize>,
    /// `order[k]` is the node with entry stamp `k + 1`.
    order: Vec<usize>,
    dfs_in: Vec<usize>,
    dfs_out: Vec<usize>,
    depth: Vec<usize>,
    vol: Vec<u64>,
}

impl PartialEq for RootedTree {
    fn eq(&self, other: &Self) -> bool {
        self.root == other.root && self.parent == other.parent
    }
}

impl Eq for RootedTree {}

impl RootedTree {
    /// Validates `parent` as a spanning tree of `graph` rooted at `root`
    /// and computes the derived arrays.
    pub fn from_parents(graph: &Graph, root: usize, parent: Vec<usize>) -> Result<Self> {
        let n = graph.node_count();
        if parent.len() != n || root >= n {
            return Err(Error::invalid("parent array does not match the graph"));
        }
        if parent[root] != NO_PARENT {
            return Err(Error::invalid("root must not have a parent"));
        }
        for (v, &p) in parent.iter().enumerate() {
            if v != root && (p >= n || !graph.has_edge(v, p)) {
                return Err(Error::invalid(format!("tree edge ({v}, {p}) is not in the graph")));
            }
        }
        let tree = Self::assemble(graph, root, parent);
        if tree.order.len() != n {
            return Err(Error::invalid("parent pointers contain a cycle"));
        }
        Ok(tree)
    }

    /// Builds the tree without checking edges against the graph. The caller
    /// guarantees `parent` describes a spanning tree of `graph`.
    pub(crate) fn from_parents_trusted(graph: &Graph, root: usize, parent: Vec<usize>) -> Self {
        let tree = Self::assemble(graph, root, parent);
        debug_assert_eq!(tree.order.len(), graph.node_count());
        debug_assert!(tree.edges().all(|e| graph.has_edge(e.u, e.v)));
        tree
    }

    fn assemble(graph: &Graph, root: usize, parent: Vec<usize>) -> Self {
        let n = parent.len();
        let mut tree = RootedTree {
            root,
            parent,
            child_offsets: Vec::new(),
            children: Vec::new(),
            order: Vec::with_capacity(n),
            dfs_in: vec![0; n],
            dfs_out: vec![0; n],
            depth: vec![0; n],
            vol: vec![0; n],
        };
        tree.refresh(graph);
        tree
    }

    /// Recomputes child lists, DFN, depths and volumes from the parent array.
    pub fn refresh(&mut self, graph: &Graph) {
        self.rebuild_children();
        self.compute_dfn();
        self.compute_subtree_volumes(graph);
    }

    fn rebuild_children(&mut self) {
        let n = self.parent.len();
        let mut counts = vec![0usize; n + 1];
        for &p in &self.parent {
            if p != NO_PARENT && p < n {
                counts[p + 1] += 1;
            }
        }
        for i in 0..n {
            counts[i + 1] += counts[i];
        }
        let mut fill = counts.clone();
        let mut children = vec![0usize; counts[n]];
        for (v, &p) in self.parent.iter().enumerate() {
            if p != NO_PARENT && p < n {
                children[fill[p]] = v;
                fill[p] += 1;
            }
        }
        self.child_offsets = counts;
        self.children = children;
    }

    /// Depth-first numbering from the root, children in ascending id order.
    /// Nodes unreachable from the root (a corrupt parent array) get no stamp.
    pub fn compute_dfn(&mut self) {
        self.order.clear();
        self.dfs_in.fill(0);
        let mut stack = vec![self.root];
        self.depth[self.root] = 0;
        while let Some(v) = stack.pop() {
            self.order.push(v);
            self.dfs_in[v] = self.order.len();
            let kids = &self.children[self.child_offsets[v]..self.child_offsets[v + 1]];
            for &c in kids.iter().rev() {
                self.depth[c] = self.depth[v] + 1;
                stack.push(c);
            }
        }
        for &v in self.order.iter().rev() {
            let last_child = self.children[self.child_offsets[v]..self.child_offsets[v + 1]].last();
            self.dfs_out[v] = match last_child {
                Some(&c) => self.dfs_out[c],
                None => self.dfs_in[v],
            };
        }
    }

    /// `vol(v)` = sum of graph degrees over the subtree of `v`, one
    /// post-order pass.
    pub fn compute_subtree_volumes(&mut self, graph: &Graph) {
        for &v in self.order.iter().rev() {
            let own = graph.degree(v) as u64;
            let below: u64 = self.children(v).iter().map(|&c| self.vol[c]).sum();
            self.vol[v] = own + below;
        }
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn node_count(&self) -> usize {
        self.parent.len()
    }

    #[inline]
    pub fn parent(&self, v: usize) -> usize {
        self.parent[v]
    }

    pub fn parents(&self) -> &[usize] {
        &self.parent
    }

    #[inline]
    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[self.child_offsets[v]..self.child_offsets[v + 1]]
    }

    #[inline]
    pub fn dfs_in(&self, v: usize) -> usize {
        self.dfs_in[v]
    }

    #[inline]
    pub fn dfs_out(&self, v: usize) -> usize {
        self.dfs_out[v]
    }

    /// Nodes in depth-first (entry stamp) order.
    pub fn preorder(&self) -> &[usize] {
        &self.order
    }

    #[inline]
    pub fn depth(&self, v: usize) -> usize {
        self.depth[v]
    }

    pub fn max_depth(&self) -> usize {
        self.depth.iter().copied().max().unwrap_or(0)
    }

    #[inline]
    pub fn vol(&self, v: usize) -> u64 {
        self.vol[v]
    }

    /// True if `w` lies in the subtree of `v`.
    #[inline]
    pub fn in_subtree(&self, v: usize, w: usize) -> bool {
        self.dfs_in[v] <= self.dfs_in[w] && self.dfs_in[w] <= self.dfs_out[v]
    }

    /// Nodes of the subtree rooted at `v`.
    pub fn subtree(&self, v: usize) -> &[usize] {
        &self.order[self.dfs_in[v] - 1..self.dfs_out[v]]
    }

    pub fn contains_edge(&self, a: usize, b: usize) -> bool {
        a != b && (self.parent[a] == b || self.parent[b] == a)
    }

    /// Tree edges as `(child, parent)` pairs in `EdgeRef` form.
    pub fn edges(&self) -> impl Iterator<Item = EdgeRef> + '_ {
        self.parent
            .iter()
            .enumerate()
            .filter(|&(_, &p)| p != NO_PARENT)
            .map(|(v, &p)| EdgeRef::new(v, p).expect("tree edges are not loops"))
    }

    /// Sorted edge list; equal for two trees iff they have the same edge set.
    pub fn edge_key(&self) -> Vec<EdgeRef> {
        let mut key: Vec<_> = self.edges().collect();
        key.sort_unstable();
        key
    }

    /// Directed path from `u` up to the root, as the sequence of nodes.
    pub fn path_to_root(&self, u: usize) -> Vec<usize> {
        let mut path = vec![u];
        let mut x = u;
        while x != self.root {
            x = self.parent[x];
            path.push(x);
        }
        path
    }

    /// Child endpoints of the tree edges on the `a`–`b` path.
    pub fn path_edges(&self, a: usize, b: usize) -> Vec<usize> {
        let (mut x, mut y) = (a, b);
        let mut from_a = Vec::new();
        let mut from_b = Vec::new();
        while self.depth[x] > self.depth[y] {
            from_a.push(x);
            x = self.parent[x];
        }
        while self.depth[y] > self.depth[x] {
            from_b.push(y);
            y = self.parent[y];
        }
        while x != y {
            from_a.push(x);
            from_b.push(y);
            x = self.parent[x];
            y = self.parent[y];
        }
        from_a.extend(from_b.into_iter().rev());
        from_a
    }

    /// Number of tree edges on the `a`–`b` path.
    pub fn path_length(&self, a: usize, b: usize) -> usize {
        self.path_edges(a, b).len()
    }

    /// For a tree edge `(a, b)`: the number of graph edges other than
    /// `(a, b)` crossing the cut obtained by deleting it.
    pub fn crossing_count(&self, graph: &Graph, a: usize, b: usize) -> Result<usize> {
        Ok(self.crossing_edges(graph, a, b)?.len())
    }

    pub(crate) fn crossing_edges(&self, graph: &Graph, a: usize, b: usize) -> Result<Vec<(usize, usize)>> {
        let child = self.child_endpoint(a, b)?;
        let mut out = Vec::new();
        for &x in self.subtree(child) {
            for &y in graph.neighbors(x) {
                if !self.in_subtree(child, y) && !((x == a && y == b) || (x == b && y == a)) {
                    out.push((x, y));
                }
            }
        }
        Ok(out)
    }

    /// The endpoint of tree edge `(a, b)` farther from the root.
    pub fn child_endpoint(&self, a: usize, b: usize) -> Result<usize> {
        if self.parent[a] == b {
            Ok(a)
        } else if self.parent[b] == a {
            Ok(b)
        } else {
            Err(Error::invalid(format!("edge ({a}, {b}) is not in the tree")))
        }
    }

    /// Re-roots the tree at `new_root` by reversing the parent pointers on
    /// the path between the old and new roots.
    pub fn reroot(&mut self, graph: &Graph, new_root: usize) {
        reroot_parents(&mut self.parent, new_root);
        self.root = new_root;
        self.refresh(graph);
    }

    pub(crate) fn parents_mut(&mut self) -> &mut [usize] {
        &mut self.parent
    }
}

/// Reverses parent pointers along the path from `new_root` to the current
/// root so that `new_root` becomes the root.
pub(crate) fn reroot_parents(parent: &mut [usize], new_root: usize) {
    let mut prev = NO_PARENT;
    let mut x = new_root;
    while x != NO_PARENT {
        let next = parent[x];
        parent[x] = prev;
        prev = x;
        x = next;
    }
}

/// BFS tree from `r`; neighbors explored in ascending id order, so every
/// node's parent is its smallest-id predecessor in the previous layer.
pub fn bfs_tree(graph: &Graph, r: usize) -> RootedTree {
    let mut parent = vec![NO_PARENT; graph.node_count()];
    let mut seen = vec![false; graph.node_count()];
    let mut queue = VecDeque::from([r]);
    seen[r] = true;
    while let Some(x) = queue.pop_front() {
        for &y in graph.neighbors(x) {
            if !seen[y] {
                seen[y] = true;
                parent[y] = x;
                queue.push_back(y);
            }
        }
    }
    RootedTree::from_parents_trusted(graph, r, parent)
}

/// Depth-first search tree from `r` (ascending neighbor order).
pub fn dfs_tree(graph: &Graph, r: usize) -> RootedTree {
    let n = graph.node_count();
    let mut parent = vec![NO_PARENT; n];
    let mut seen = vec![false; n];
    let mut stack = vec![(r, 0usize)];
    seen[r] = true;
    while let Some(&mut (x, ref mut slot)) = stack.last_mut() {
        let nbrs = graph.neighbors(x);
        if *slot == nbrs.len() {
            stack.pop();
            continue;
        }
        let y = nbrs[*slot];
        *slot += 1;
        if !seen[y] {
            seen[y] = true;
            parent[y] = x;
            stack.push((y, 0));
        }
    }
    RootedTree::from_parents_trusted(graph, r, parent)
}

/// Builds a rooted tree from an undirected edge list (`n - 1` edges).
pub fn tree_from_edges(graph: &Graph, root: usize, edges: &[EdgeRef]) -> Result<RootedTree> {
    let n = graph.node_count();
    if edges.len() + 1 != n {
        return Err(Error::invalid("a spanning tree needs n - 1 edges"));
    }
    let mut adj = vec![Vec::new(); n];
    for e in edges {
        adj[e.u].push(e.v);
        adj[e.v].push(e.u);
    }
    let mut parent = vec![NO_PARENT; n];
    let mut seen = vec![false; n];
    let mut stack = vec![root];
    seen[root] = true;
    while let Some(x) = stack.pop() {
        for &y in &adj[x] {
            if !seen[y] {
                seen[y] = true;
                parent[y] = x;
                stack.push(y);
            }
        }
    }
    RootedTree::from_parents(graph, root, parent)
}
