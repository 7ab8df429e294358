//! Exhaustive identity checks on small graphs.
//!
//! Each check enumerates every spanning tree (and 2-forest where needed) of
//! a graph and compares estimator-side quantities against the spectral or
//! combinatorial oracle. Errors are reported as the largest absolute
//! deviation; set identities report `0.0` or fail outright.

use std::collections::HashMap;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{
    effective_resistance_exact, enumerate_spanning_trees, enumerate_two_forests, kemeny_eigen,
    kemeny_forest_formula, path_mapping_sets, TwoForest,
};
use crate::generate;
use crate::graph::{EdgeRef, Graph};
use crate::spanning::{bfs_tree, dfs_tree, wilson_ust, RootedTree};
use crate::ttf::{f_naive, f_optimized};
use crate::VolumeFenwick;

/// Largest node count [`run_battery`] accepts; beyond it enumeration is
/// impractical.
pub const MAX_BATTERY_NODES: usize = 8;

/// Outcome of one identity over a family of graphs.
#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub cases: usize,
    pub max_error: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub failure: Option<String>,
}

impl CheckOutcome {
    fn new(name: &'static str, tolerance: f64) -> Self {
        CheckOutcome {
            name,
            cases: 0,
            max_error: 0.0,
            tolerance,
            passed: true,
            failure: None,
        }
    }

    fn record(&mut self, result: Result<f64>, graph: &Graph) {
        self.cases += 1;
        match result {
            Ok(err) => {
                self.max_error = self.max_error.max(err);
                if (err.is_nan() || err > self.tolerance) && self.passed {
                    self.passed = false;
                    self.failure = Some(format!("error {err:e} on {:?}", edge_list(graph)));
                }
            }
            Err(e) => {
                if self.passed {
                    self.failure = Some(format!("{e} on {:?}", edge_list(graph)));
                }
                self.passed = false;
            }
        }
    }
}

fn edge_list(graph: &Graph) -> Vec<(usize, usize)> {
    graph.edges().map(|e| (e.u, e.v)).collect()
}

fn rel_or_abs(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

/// Forest formula against the eigen oracle, for every root.
pub fn check_forest_formula(graph: &Graph) -> Result<f64> {
    let eig = kemeny_eigen(graph)?;
    let mut worst: f64 = 0.0;
    for r in 0..graph.node_count() {
        worst = worst.max(rel_or_abs(kemeny_forest_formula(graph, r)?, eig));
    }
    Ok(worst)
}

/// Forward minus reverse path mappings along BFS paths reproduce
/// `𝔽_{r|u}` with every multiplicity exactly one, for all `r` and `u`.
pub fn check_path_mapping(graph: &Graph) -> Result<f64> {
    let n = graph.node_count();
    for r in 0..n {
        let trees = enumerate_spanning_trees(graph, r)?;
        let bfs = bfs_tree(graph, r);
        for u in (0..n).filter(|&u| u != r) {
            let path = bfs.path_to_root(u);
            let mut counts: HashMap<Vec<EdgeRef>, i64> = HashMap::new();
            for tau in &trees {
                let (fwd, rev) = path_mapping_sets(graph, tau, &path)?;
                for f in fwd {
                    *counts.entry(f.edges).or_default() += 1;
                }
                for f in rev {
                    *counts.entry(f.edges).or_default() -= 1;
                }
            }
            counts.retain(|_, c| *c != 0);
            let target: Vec<TwoForest> = enumerate_two_forests(graph, r, u)?;
            let exact = counts.len() == target.len()
                && target.iter().all(|f| counts.get(&f.edges) == Some(&1));
            if !exact {
                return Err(Error::invalid(format!("path mapping mismatch at r = {r}, u = {u}")));
            }
        }
    }
    Ok(0.0)
}

/// Mean of `f / 2m` over all spanning trees equals κ, for every root and
/// for BFS and DFS reference trees; the optimized contribution matches the
/// naive one on every tree.
pub fn check_unbiasedness(graph: &Graph) -> Result<f64> {
    let eig = kemeny_eigen(graph)?;
    let two_m = graph.volume() as f64;
    let mut fenwick = VolumeFenwick::new(graph.node_count());
    let mut worst: f64 = 0.0;
    for r in 0..graph.node_count() {
        let trees = enumerate_spanning_trees(graph, r)?;
        for tau0 in [bfs_tree(graph, r), dfs_tree(graph, r)] {
            let mut total: i128 = 0;
            for tau in &trees {
                let f = f_naive(graph, tau, &tau0)?;
                if f != f_optimized(graph, tau, &tau0, &mut fenwick)? {
                    return Err(Error::invalid("optimized and naive contributions differ"));
                }
                total += f;
            }
            let mean = total as f64 / (two_m * trees.len() as f64);
            worst = worst.max(rel_or_abs(mean, eig));
        }
    }
    Ok(worst)
}

fn mean_f(graph: &Graph, trees: &[&RootedTree], tau0: &RootedTree) -> Result<f64> {
    let mut total: i128 = 0;
    for t in trees {
        total += f_naive(graph, t, tau0)?;
    }
    Ok(total as f64 / trees.len() as f64)
}

fn non_edges(graph: &Graph) -> Vec<(usize, usize)> {
    let n = graph.node_count();
    (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .filter(|&(a, b)| !graph.has_edge(a, b))
        .collect()
}

/// Exact identities for inserting each absent edge `e` into `graph`:
/// the tree fraction equals `R(e)`, the mixture
/// `(1 - R) mean_Γ f + R mean_{Γ'_e} f = mean_{Γ'} f`, and the link-cut
/// reweighting `mean_{Γ'_e} f = (1-R)/R E_Γ[Σ_{N(τ)} f / d(τ_e)]`.
pub fn check_insertion_identities(graph: &Graph) -> Result<f64> {
    let r = graph.max_degree_node();
    let mut worst: f64 = 0.0;
    for (a, b) in non_edges(graph) {
        let g2 = graph.insert_edge(a, b)?;
        let res = effective_resistance_exact(&g2, a, b)?;
        let tau0 = bfs_tree(&g2, r);
        let all = enumerate_spanning_trees(&g2, r)?;
        let (with_e, without_e): (Vec<&RootedTree>, Vec<&RootedTree>) =
            all.iter().partition(|t| t.contains_edge(a, b));
        worst = worst.max((with_e.len() as f64 / all.len() as f64 - res).abs());

        let mean_all = mean_f(&g2, &all.iter().collect::<Vec<_>>(), &tau0)?;
        let mixture = (1.0 - res) * mean_f(&g2, &without_e, &tau0)? + res * mean_f(&g2, &with_e, &tau0)?;
        worst = worst.max(rel_or_abs(mixture, mean_all));

        let mut reweighted = 0.0;
        for tau in enumerate_spanning_trees(graph, r)? {
            let tau = RootedTree::from_parents(&g2, r, tau.parents().to_vec())?;
            for (tau_e, d_tau) in link_cut_neighbors(&g2, &tau, a, b) {
                let d_tau_e = tau_e.crossing_count(&g2, a, b)?;
                let f = f_naive(&g2, &tau_e, &tau0)? as f64;
                reweighted += f * (d_tau as f64 / d_tau_e as f64) / d_tau as f64;
            }
        }
        let lhs = mean_f(&g2, &with_e, &tau0)?;
        let rhs = (1.0 - res) / res * reweighted / without_e.len() as f64;
        worst = worst.max(rel_or_abs(rhs, lhs));
    }
    Ok(worst)
}

/// Exact identities for deleting each non-bridge edge `e`: trees of
/// `G \ e` are exactly the trees of `G` avoiding `e` (same `f` values),
/// and the cut-link reweighting
/// `mean_{Γ(G\e)} f = R/(1-R) E_{Γ_e}[Σ_{N(τ_e)} f d(τ_e) / (d(τ_e) d(τ))]`.
pub fn check_deletion_identities(graph: &Graph) -> Result<f64> {
    let r = graph.max_degree_node();
    let bridges = graph.bridges();
    let mut worst: f64 = 0.0;
    let trees_g = enumerate_spanning_trees(graph, r)?;
    for e in graph.edges().filter(|e| !bridges.contains(e)) {
        let (a, b) = (e.u, e.v);
        let g2 = graph.delete_edge(a, b)?;
        let res = effective_resistance_exact(graph, a, b)?;
        let tau0 = bfs_tree(&g2, r);
        let after = enumerate_spanning_trees(&g2, r)?;
        let mut kept: Vec<Vec<EdgeRef>> = trees_g
            .iter()
            .filter(|t| !t.contains_edge(a, b))
            .map(|t| t.edge_key())
            .collect();
        let mut fresh: Vec<Vec<EdgeRef>> = after.iter().map(|t| t.edge_key()).collect();
        kept.sort();
        fresh.sort();
        if kept != fresh {
            return Err(Error::invalid(format!("trees avoiding ({a}, {b}) differ from trees of G \\ e")));
        }
        let mean_after = mean_f(&g2, &after.iter().collect::<Vec<_>>(), &tau0)?;
        let kept_trees: Vec<RootedTree> = trees_g
            .iter()
            .filter(|t| !t.contains_edge(a, b))
            .map(|t| RootedTree::from_parents(&g2, r, t.parents().to_vec()))
            .collect::<Result<_>>()?;
        let mean_kept = mean_f(&g2, &kept_trees.iter().collect::<Vec<_>>(), &tau0)?;
        worst = worst.max(rel_or_abs(mean_kept, mean_after));

        let with_e: Vec<&RootedTree> = trees_g.iter().filter(|t| t.contains_edge(a, b)).collect();
        let mut reweighted = 0.0;
        for tau_e in &with_e {
            for (tau, d_tau_e) in cut_link_neighbors(&g2, tau_e, a, b)? {
                let d_tau = tau.path_length(a, b);
                let f = f_naive(&g2, &tau, &tau0)? as f64;
                reweighted += f * (d_tau_e as f64 / d_tau as f64) / d_tau_e as f64;
            }
        }
        let rhs = res / (1.0 - res) * reweighted / with_e.len() as f64;
        worst = worst.max(rel_or_abs(rhs, mean_after));
    }
    Ok(worst)
}

/// All trees reachable from `tau` (without `(a, b)`) by adding `(a, b)` and
/// removing one cycle edge, each with `d(tau)`.
pub fn link_cut_neighbors(graph: &Graph, tau: &RootedTree, a: usize, b: usize) -> Vec<(RootedTree, usize)> {
    let cycle = tau.path_edges(a, b);
    let d = cycle.len();
    cycle
        .into_iter()
        .map(|cut| {
            let mut edges: Vec<EdgeRef> = tau
                .edges()
                .filter(|e| !(e.contains(cut) && e.contains(tau.parent(cut))))
                .collect();
            edges.push(EdgeRef::new(a, b).expect("distinct endpoints"));
            let t = crate::spanning::tree_from_edges(graph, tau.root(), &edges).expect("link-cut yields a tree");
            (t, d)
        })
        .collect()
}

/// All trees of `after` reachable from `tau_e` by removing `(a, b)` and
/// adding one crossing edge, each with `d(tau_e)`.
pub fn cut_link_neighbors(after: &Graph, tau_e: &RootedTree, a: usize, b: usize) -> Result<Vec<(RootedTree, usize)>> {
    let child = tau_e.child_endpoint(a, b)?;
    let crossing: Vec<(usize, usize)> = after
        .edges()
        .filter(|e| tau_e.in_subtree(child, e.u) != tau_e.in_subtree(child, e.v))
        .map(|e| (e.u, e.v))
        .collect();
    let d = crossing.len();
    let base: Vec<EdgeRef> = tau_e
        .edges()
        .filter(|e| !(e.contains(a) && e.contains(b)))
        .collect();
    crossing
        .into_iter()
        .map(|(x, y)| {
            let mut edges = base.clone();
            edges.push(EdgeRef::new(x, y)?);
            Ok((crate::spanning::tree_from_edges(after, tau_e.root(), &edges)?, d))
        })
        .collect()
}

/// `f_optimized == f_naive` on Wilson trees of `graph` with a BFS reference.
pub fn check_optimized_matches_naive<R: Rng>(graph: &Graph, trees: usize, rng: &mut R) -> Result<f64> {
    let r = graph.max_degree_node();
    let tau0 = bfs_tree(graph, r);
    let mut fenwick = VolumeFenwick::new(graph.node_count());
    for _ in 0..trees {
        let (tau, _) = wilson_ust(graph, r, rng);
        if f_naive(graph, &tau, &tau0)? != f_optimized(graph, &tau, &tau0, &mut fenwick)? {
            return Err(Error::invalid("optimized and naive contributions differ"));
        }
    }
    Ok(0.0)
}

/// Connected graphs with `2..=max_n` nodes: every isomorphism class up to
/// five nodes, then `per_size` uniformly random connected graphs per larger
/// size.
pub fn small_graph_family<R: Rng>(max_n: usize, per_size: usize, rng: &mut R) -> Vec<Graph> {
    let mut out = Vec::new();
    for n in 2..=max_n {
        if n <= 5 {
            out.extend(generate::connected_graphs_up_to_isomorphism(n));
        } else {
            out.extend((0..per_size).map(|_| generate::uniform_connected_small(n, rng)));
        }
    }
    out
}

/// Runs every identity over [`small_graph_family`].
pub fn run_battery<R: Rng>(max_n: usize, per_size: usize, rng: &mut R) -> Vec<CheckOutcome> {
    let family = small_graph_family(max_n, per_size, rng);
    let mut checks: Vec<(CheckOutcome, fn(&Graph) -> Result<f64>)> = vec![
        (CheckOutcome::new("forest-formula-vs-eigen", 1e-8), check_forest_formula),
        (CheckOutcome::new("path-mapping-identity", 0.0), check_path_mapping),
        (CheckOutcome::new("exhaustive-unbiasedness", 1e-8), check_unbiasedness),
        (CheckOutcome::new("insertion-identities", 1e-9), check_insertion_identities),
        (CheckOutcome::new("deletion-identities", 1e-9), check_deletion_identities),
    ];
    for (outcome, check) in &mut checks {
        for g in &family {
            outcome.record(check(g), g);
        }
    }
    checks.into_iter().map(|(o, _)| o).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn identities_hold_on_small_classes() {
        for n in 2..=4 {
            for g in generate::connected_graphs_up_to_isomorphism(n) {
                assert!(check_forest_formula(&g).unwrap() < 1e-9);
                check_path_mapping(&g).unwrap();
                assert!(check_unbiasedness(&g).unwrap() < 1e-9);
                assert!(check_insertion_identities(&g).unwrap() < 1e-9);
                assert!(check_deletion_identities(&g).unwrap() < 1e-9);
            }
        }
    }

    #[test]
    fn neighbor_sets_match_transform_degrees() {
        let k4 = generate::complete(4);
        let g = k4.delete_edge(0, 1).unwrap();
        for tau in enumerate_spanning_trees(&g, 2).unwrap() {
            let tau = RootedTree::from_parents(&k4, 2, tau.parents().to_vec()).unwrap();
            let nbrs = link_cut_neighbors(&k4, &tau, 0, 1);
            assert_eq!(nbrs.len(), tau.path_length(0, 1));
            for (t, _) in &nbrs {
                assert!(t.contains_edge(0, 1));
                assert_eq!(cut_link_neighbors(&g, t, 0, 1).unwrap().len(), t.crossing_count(&g, 0, 1).unwrap());
            }
        }
    }

    #[test]
    fn battery_reports_all_checks() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let out = run_battery(4, 2, &mut rng);
        assert_eq!(out.len(), 5);
        assert!(out.iter().all(|o| o.passed && o.cases == 9), "{out:?}");
    }
}
