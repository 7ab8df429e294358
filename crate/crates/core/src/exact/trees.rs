use nalgebra::DMatrix;
use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};

use super::{ENUMERATION_LIMIT, EXACT_TREE_COUNT_NODE_LIMIT, TREE_COUNT_NODE_LIMIT};
use crate::error::{Error, Result};
use crate::graph::{EdgeRef, Graph};
use crate::spanning::{tree_from_edges, RootedTree};

/// Number of spanning trees, exact for small graphs.
#[derive(Debug, Clone, PartialEq)]
pub enum TreeCount {
    Exact(BigUint),
    /// Floating-point determinant rounded to the nearest integer.
    Approximate(f64),
}

impl TreeCount {
    pub fn as_f64(&self) -> f64 {
        match self {
            TreeCount::Exact(c) => c.to_f64().unwrap_or(f64::INFINITY),
            TreeCount::Approximate(c) => *c,
        }
    }

    pub fn as_u128(&self) -> Option<u128> {
        match self {
            TreeCount::Exact(c) => c.to_u128(),
            TreeCount::Approximate(_) => None,
        }
    }
}

/// Kirchhoff's theorem: `|Γ| = det` of the Laplacian with row and column 0
/// removed. Bareiss elimination over big integers up to 64 nodes, an LU
/// determinant in `f64` up to 500.
pub fn count_spanning_trees(graph: &Graph) -> Result<TreeCount> {
    let n = graph.node_count();
    if n > TREE_COUNT_NODE_LIMIT {
        return Err(Error::Capacity {
            what: "node count for tree counting",
            limit: TREE_COUNT_NODE_LIMIT as u128,
            actual: n as u128,
        });
    }
    if n <= 1 {
        return Ok(TreeCount::Exact(BigUint::from(1u8)));
    }
    if n <= EXACT_TREE_COUNT_NODE_LIMIT {
        let det = bareiss_determinant(reduced_laplacian(graph, BigInt::from));
        return Ok(TreeCount::Exact(det.to_biguint().unwrap_or_default()));
    }
    let k = n - 1;
    let rows = reduced_laplacian(graph, |x| x as f64);
    let m = DMatrix::from_fn(k, k, |i, j| rows[i][j]);
    let det = m.lu().determinant();
    if !det.is_finite() {
        return Err(Error::Capacity {
            what: "spanning-tree count for f64",
            limit: f64::MAX as u128,
            actual: u128::MAX,
        });
    }
    Ok(TreeCount::Approximate(det.round().max(0.0)))
}

fn reduced_laplacian<T: Clone>(graph: &Graph, conv: impl Fn(i64) -> T) -> Vec<Vec<T>> {
    let k = graph.node_count() - 1;
    let mut rows = vec![vec![conv(0); k]; k];
    for u in 1..graph.node_count() {
        rows[u - 1][u - 1] = conv(graph.degree(u) as i64);
        for &v in graph.neighbors(u) {
            if v != 0 {
                rows[u - 1][v - 1] = conv(-1);
            }
        }
    }
    rows
}

fn bareiss_determinant(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let k = a.len();
    let mut sign = 1;
    let mut prev = BigInt::from(1);
    for p in 0..k {
        if a[p][p].is_zero() {
            match (p + 1..k).find(|&r| !a[r][p].is_zero()) {
                Some(r) => {
                    a.swap(p, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in p + 1..k {
            for j in p + 1..k {
                let v = (&a[i][j] * &a[p][p] - &a[i][p] * &a[p][j]) / &prev;
                a[i][j] = v;
            }
        }
        prev = a[p][p].clone();
    }
    let det = a[k - 1][k - 1].clone();
    if sign < 0 {
        -det
    } else {
        det
    }
}

/// Every spanning tree as a sorted edge list.
///
/// Include/exclude backtracking over the edge list with a rollback
/// union-find; an exclusion is explored only if the remaining edges can
/// still connect the graph.
pub fn enumerate_spanning_edge_sets(graph: &Graph) -> Result<Vec<Vec<EdgeRef>>> {
    let count = count_spanning_trees(graph)?.as_f64();
    if count > ENUMERATION_LIMIT as f64 {
        return Err(Error::Capacity {
            what: "spanning-tree enumeration",
            limit: ENUMERATION_LIMIT,
            actual: count.min(u128::MAX as f64) as u128,
        });
    }
    let n = graph.node_count();
    if n <= 1 {
        return Ok(vec![Vec::new()]);
    }
    if !graph.is_connected() {
        return Ok(Vec::new());
    }
    let edges: Vec<EdgeRef> = graph.edges().collect();
    let mut search = Search {
        n,
        edges: &edges,
        dsu: RollbackDsu::new(n),
        chosen: Vec::with_capacity(n - 1),
        out: Vec::with_capacity(count as usize),
    };
    search.run(0);
    Ok(search.out)
}

/// Every spanning tree, rooted at `root`.
pub fn enumerate_spanning_trees(graph: &Graph, root: usize) -> Result<Vec<RootedTree>> {
    if root >= graph.node_count() {
        return Err(Error::invalid(format!("root {root} out of range")));
    }
    enumerate_spanning_edge_sets(graph)?
        .into_iter()
        .map(|edges| tree_from_edges(graph, root, &edges))
        .collect()
}

struct Search<'a> {
    n: usize,
    edges: &'a [EdgeRef],
    dsu: RollbackDsu,
    chosen: Vec<EdgeRef>,
    out: Vec<Vec<EdgeRef>>,
}

impl Search<'_> {
    fn run(&mut self, i: usize) {
        if self.chosen.len() == self.n - 1 {
            self.out.push(self.chosen.clone());
            return;
        }
        if self.edges.len() - i < self.n - 1 - self.chosen.len() {
            return;
        }
        let e = self.edges[i];
        if self.dsu.union(e.u, e.v) {
            self.chosen.push(e);
            self.run(i + 1);
            self.chosen.pop();
            self.dsu.rollback();
        }
        if self.connectable(i + 1) {
            self.run(i + 1);
        }
    }

    /// Whether the current components plus `edges[from..]` span the graph.
    fn connectable(&mut self, from: usize) -> bool {
        let mark = self.dsu.history.len();
        let mut joins = 0;
        for e in &self.edges[from..] {
            if self.dsu.union(e.u, e.v) {
                joins += 1;
            }
        }
        let ok = self.chosen.len() + joins == self.n - 1;
        while self.dsu.history.len() > mark {
            self.dsu.rollback();
        }
        ok
    }
}

struct RollbackDsu {
    parent: Vec<usize>,
    size: Vec<usize>,
    history: Vec<usize>,
}

impl RollbackDsu {
    fn new(n: usize) -> Self {
        RollbackDsu {
            parent: (0..n).collect(),
            size: vec![1; n],
            history: Vec::new(),
        }
    }

    fn find(&self, mut x: usize) -> usize {
        while self.parent[x] != x {
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
        self.history.push(b);
        true
    }

    fn rollback(&mut self) {
        let b = self.history.pop().expect("rollback without union");
        let a = self.parent[b];
        self.size[a] -= self.size[b];
        self.parent[b] = b;
    }
}
