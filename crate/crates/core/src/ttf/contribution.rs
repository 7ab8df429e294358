//! Per-tree contribution `f(τ)` relative to a reference tree `τ0`.
//!
//! For each `u ≠ r` the reference path is `u -> r` in `τ0`. A reference edge
//! `x -> p0(x)` on that path adds `d(u) (2m - vol_τ(x))` when `τ` holds it
//! with the same orientation and `u` lies below it in `τ`, and subtracts
//! `d(u) (2m - vol_τ(p0(x)))` when `τ` holds it reversed with `u` below.

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::spanning::{RootedTree, NO_PARENT};
use crate::VolumeFenwick;

fn check_pair(graph: &Graph, tau: &RootedTree, tau0: &RootedTree) -> Result<()> {
    let n = graph.node_count();
    if tau.node_count() != n || tau0.node_count() != n {
        return Err(Error::invalid("trees and graph differ in node count"));
    }
    if tau.root() != tau0.root() {
        return Err(Error::invalid(format!(
            "sample tree rooted at {} but reference tree rooted at {}",
            tau.root(),
            tau0.root()
        )));
    }
    if tau.vol(tau.root()) != graph.volume() || tau0.vol(tau0.root()) != graph.volume() {
        return Err(Error::invalid("tree volumes were computed against another graph"));
    }
    Ok(())
}

/// Walks each reference path and matches its edges against `τ`.
///
/// Costs `O(Σ_u depth_τ0(u))`, i.e. `O(n ecc(r))` for a BFS reference tree.
pub fn f_naive(graph: &Graph, tau: &RootedTree, tau0: &RootedTree) -> Result<i128> {
    check_pair(graph, tau, tau0)?;
    let two_m = graph.volume() as i128;
    let r = tau.root();
    let mut f: i128 = 0;
    for u in 0..graph.node_count() {
        if u == r {
            continue;
        }
        let mut along: i128 = 0;
        let mut x = u;
        while x != r {
            let p = tau0.parent(x);
            if tau.parent(x) == p && tau.in_subtree(x, u) {
                along += two_m - tau.vol(x) as i128;
            } else if tau.parent(p) == x && tau.in_subtree(p, u) {
                along -= two_m - tau.vol(p) as i128;
            }
            x = p;
        }
        f += graph.degree(u) as i128 * along;
    }
    Ok(f)
}

/// Single depth-first pass over `τ` with a Fenwick tree indexed by the
/// reference tree's entry stamps.
///
/// Entering `v` activates the shared edge `(v, p_τ(v))` on the reference
/// interval of its lower endpoint; the point query at `v` then sums exactly
/// the active edges lying on `v`'s reference path. The Fenwick tree must be
/// zeroed on entry and is zeroed again on return.
pub fn f_optimized(
    graph: &Graph,
    tau: &RootedTree,
    tau0: &RootedTree,
    fenwick: &mut VolumeFenwick,
) -> Result<i128> {
    check_pair(graph, tau, tau0)?;
    if fenwick.len() != graph.node_count() {
        return Err(Error::invalid("Fenwick tree size differs from node count"));
    }
    debug_assert!(fenwick.is_zeroed(), "Fenwick tree must start zeroed");
    let two_m = graph.volume() as i64;
    let mut f: i128 = 0;
    // nodes on the current τ path with the interval each one activated
    let mut active: Vec<(usize, Option<(usize, usize, i64)>)> = Vec::new();
    for &v in tau.preorder() {
        let w = tau.parent(v);
        if w == NO_PARENT {
            continue;
        }
        while let Some(&(top, added)) = active.last() {
            if tau.dfs_out(top) >= tau.dfs_in(v) {
                break;
            }
            if let Some((l, r, val)) = added {
                fenwick.add_in_bounds(l, r, -val);
            }
            active.pop();
        }
        let added = if tau0.parent(v) == w {
            Some((tau0.dfs_in(v), tau0.dfs_out(v), two_m - tau.vol(v) as i64))
        } else if tau0.parent(w) == v {
            Some((tau0.dfs_in(w), tau0.dfs_out(w), tau.vol(v) as i64 - two_m))
        } else {
            None
        };
        if let Some((l, r, val)) = added {
            fenwick.add_in_bounds(l, r, val);
        }
        active.push((v, added));
        let q = fenwick.query_in_bounds(tau0.dfs_in(v));
        f += graph.degree(v) as i128 * q as i128;
    }
    for (_, added) in active {
        if let Some((l, r, val)) = added {
            fenwick.add_in_bounds(l, r, -val);
        }
    }
    debug_assert!(fenwick.is_zeroed());
    Ok(f)
}
