//! Importance weights for link-cut and cut-link transformations.

use kemeny_core::exact::{effective_resistance_exact, enumerate_spanning_trees};
use kemeny_core::generate;
use kemeny_core::spanning::bfs_tree;
use kemeny_core::ttf::f_naive;
use kemeny_core::verify::{check_deletion_identities, check_insertion_identities, cut_link_neighbors};

/// Three old trees and two new ones; old tree `i` reaches the new trees in
/// `edges[i]`.
fn abstract_bipartite() -> Vec<Vec<usize>> {
    vec![vec![0], vec![0], vec![0, 1]]
}

#[test]
fn abstract_five_tree_example() {
    let edges = abstract_bipartite();
    let old = edges.len() as f64;
    let mut in_degree = [0usize; 2];
    for targets in &edges {
        for &t in targets {
            in_degree[t] += 1;
        }
    }
    let mut plain = [0.0; 2];
    let mut weighted = [0.0; 2];
    for targets in &edges {
        let d = targets.len() as f64;
        for &t in targets {
            plain[t] += 1.0 / old / d;
            weighted[t] += 1.0 / old / d * (d / in_degree[t] as f64);
        }
    }
    assert!((plain[0] - 5.0 / 6.0).abs() < 1e-15);
    assert!((plain[1] - 1.0 / 6.0).abs() < 1e-15);
    assert!((weighted[0] - 1.0 / 3.0).abs() < 1e-15);
    assert!((weighted[1] - 1.0 / 3.0).abs() < 1e-15);
}

/// The abstract example has no realisation as a simple graph plus one new
/// edge: three spanning trees force a triangle with pendant trees, and
/// adding any edge then yields more than two new trees.
#[test]
fn abstract_example_has_no_small_graph_instance() {
    let mut found = Vec::new();
    for n in 2..=5 {
        for g in generate::connected_graphs_up_to_isomorphism(n) {
            if enumerate_spanning_trees(&g, 0).unwrap().len() != 3 {
                continue;
            }
            for a in 0..n {
                for b in a + 1..n {
                    if g.has_edge(a, b) {
                        continue;
                    }
                    let g2 = g.insert_edge(a, b).unwrap();
                    let new = enumerate_spanning_trees(&g2, 0).unwrap().len() - 3;
                    if new == 2 {
                        found.push((g.clone(), a, b));
                    }
                }
            }
        }
    }
    assert!(found.is_empty());
}

#[test]
fn insertion_and_deletion_identities_on_five_nodes() {
    for g in generate::connected_graphs_up_to_isomorphism(5) {
        assert!(check_insertion_identities(&g).unwrap() < 1e-9);
        assert!(check_deletion_identities(&g).unwrap() < 1e-9);
    }
}

/// Means of `f` over `G \ e` from cut-link draws, with the forward weight
/// `d(τ_e) / d(τ_new)` and with its reciprocal.
fn cut_link_means(g: &kemeny_core::Graph, a: usize, b: usize) -> (f64, f64, f64) {
    let g2 = g.delete_edge(a, b).unwrap();
    let r = 0;
    let tau0 = bfs_tree(&g2, r);
    let res = effective_resistance_exact(g, a, b).unwrap();
    let after = enumerate_spanning_trees(&g2, r).unwrap();
    let truth = after.iter().map(|t| f_naive(&g2, t, &tau0).unwrap() as f64).sum::<f64>() / after.len() as f64;
    let with_e: Vec<_> = enumerate_spanning_trees(g, r)
        .unwrap()
        .into_iter()
        .filter(|t| t.contains_edge(a, b))
        .collect();
    let mut correct = 0.0;
    let mut reciprocal = 0.0;
    for tau_e in &with_e {
        for (tau, d_e) in cut_link_neighbors(&g2, tau_e, a, b).unwrap() {
            let d = tau.path_length(a, b) as f64;
            let f = f_naive(&g2, &tau, &tau0).unwrap() as f64;
            correct += f * (d_e as f64 / d) / d_e as f64;
            reciprocal += f * (d / d_e as f64) / d_e as f64;
        }
    }
    let scale = res / (1.0 - res) / with_e.len() as f64;
    (truth, correct * scale, reciprocal * scale)
}

/// Weighting cut-link results by `d(τ_new) / d(τ_e)` misses the uniform
/// mean on some graphs, while `d(τ_e) / d(τ_new)` never does.
#[test]
fn reciprocal_deletion_weight_is_biased() {
    let mut biased = 0;
    for g in generate::connected_graphs_up_to_isomorphism(5) {
        let bridges = g.bridges();
        for e in g.edges().filter(|e| !bridges.contains(e)) {
            let (truth, correct, reciprocal) = cut_link_means(&g, e.u, e.v);
            assert!((correct - truth).abs() < 1e-9 * truth);
            if (reciprocal - truth).abs() > 1e-3 * truth {
                biased += 1;
            }
        }
    }
    assert!(biased > 0);
}
