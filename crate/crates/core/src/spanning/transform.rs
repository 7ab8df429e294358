//! Single-edge exchanges between spanning trees with and without a given edge.
//!
//! Both operations return the transformed tree (still rooted at the original
//! root, derived arrays refreshed against `graph`) together with the degree
//! of the *input* tree in the exchange bipartite graph.

use rand::Rng;

use super::RootedTree;
use crate::error::{Error, Result};
use crate::graph::Graph;

/// Adds edge `(a, b)` to `tree` and removes a uniformly chosen edge of the
/// cycle it closes.
///
/// Returns the new tree and `d(tree)`, the number of tree edges on the
/// `a`–`b` path. `graph` is the graph the result belongs to and must contain
/// `(a, b)`.
pub fn link_cut<R: Rng + ?Sized>(
    tree: &RootedTree,
    graph: &Graph,
    a: usize,
    b: usize,
    rng: &mut R,
) -> Result<(RootedTree, usize)> {
    if a == b || !graph.has_edge(a, b) {
        return Err(Error::InvalidEdge(a, b));
    }
    if tree.contains_edge(a, b) {
        return Err(Error::invalid(format!("link-cut needs a tree without ({a}, {b})")));
    }
    let cycle = tree.path_edges(a, b);
    let degree = cycle.len();
    let cut = cycle[rng.random_range(0..degree)];
    // `cut` detaches its subtree, which holds exactly one of the endpoints.
    let (inside, outside) = if tree.in_subtree(cut, a) { (a, b) } else { (b, a) };
    let mut out = tree.clone();
    hang_subtree(out.parents_mut(), cut, inside, outside);
    out.refresh(graph);
    Ok((out, degree))
}

/// Removes tree edge `(a, b)` and reconnects the two components with a
/// uniformly chosen crossing edge of `graph` other than `(a, b)`.
///
/// Returns the new tree and `d(tree)`, the number of such crossing edges.
/// Fails with [`Error::Bridge`] when no other crossing edge exists.
pub fn cut_link<R: Rng + ?Sized>(
    tree: &RootedTree,
    graph: &Graph,
    a: usize,
    b: usize,
    rng: &mut R,
) -> Result<(RootedTree, usize)> {
    let child = tree.child_endpoint(a, b)?;
    let crossing = tree.crossing_edges(graph, a, b)?;
    if crossing.is_empty() {
        return Err(Error::Bridge(a.min(b), a.max(b)));
    }
    let degree = crossing.len();
    let (inside, outside) = crossing[rng.random_range(0..degree)];
    let mut out = tree.clone();
    hang_subtree(out.parents_mut(), child, inside, outside);
    out.refresh(graph);
    Ok((out, degree))
}

/// Detaches the subtree rooted at `top` from its parent, re-roots it at
/// `inside` (a node of that subtree) and hangs it below `outside`.
fn hang_subtree(parent: &mut [usize], top: usize, inside: usize, outside: usize) {
    let mut prev = outside;
    let mut x = inside;
    loop {
        let up = parent[x];
        parent[x] = prev;
        if x == top {
            break;
        }
        prev = x;
        x = up;
    }
}
