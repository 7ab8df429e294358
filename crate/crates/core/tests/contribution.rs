//! `f(τ)` against an oracle assembled from explicit path-mapping sets.

use kemeny_core::exact::{enumerate_spanning_trees, kemeny_eigen, path_mapping_sets};
use kemeny_core::generate;
use kemeny_core::spanning::{bfs_tree, dfs_tree, wilson_ust, RootedTree};
use kemeny_core::ttf::{f_naive, f_optimized};
use kemeny_core::{Graph, VolumeFenwick};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Σ_u d(u) (Σ_forward vol(T1) - Σ_reverse vol(T1)) with forests listed
/// explicitly and volumes summed node by node.
fn f_by_forests(graph: &Graph, tau: &RootedTree, tau0: &RootedTree) -> i128 {
    let mut f = 0i128;
    for u in (0..graph.node_count()).filter(|&u| u != tau.root()) {
        let (fwd, rev) = path_mapping_sets(graph, tau, &tau0.path_to_root(u)).unwrap();
        let vol = |t1: &[usize]| t1.iter().map(|&x| graph.degree(x) as i128).sum::<i128>();
        let s: i128 = fwd.iter().map(|x| vol(&x.t1)).sum::<i128>() - rev.iter().map(|x| vol(&x.t1)).sum::<i128>();
        f += graph.degree(u) as i128 * s;
    }
    f
}

#[test]
fn naive_matches_forest_oracle_on_all_trees() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for n in 3..=6 {
        for _ in 0..6 {
            let g = generate::uniform_connected_small(n, &mut rng);
            for r in 0..n {
                let wilson_ref = wilson_ust(&g, r, &mut rng).0;
                for tau0 in [bfs_tree(&g, r), dfs_tree(&g, r), wilson_ref] {
                    for tau in enumerate_spanning_trees(&g, r).unwrap() {
                        assert_eq!(f_naive(&g, &tau, &tau0).unwrap(), f_by_forests(&g, &tau, &tau0));
                    }
                }
            }
        }
    }
}

#[test]
fn reference_policy_never_moves_the_mean() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let g = generate::uniform_connected_small(6, &mut rng);
        let eig = kemeny_eigen(&g).unwrap();
        let r = g.max_degree_node();
        let trees = enumerate_spanning_trees(&g, r).unwrap();
        let wilson_ref = wilson_ust(&g, r, &mut rng).0;
        for tau0 in [bfs_tree(&g, r), dfs_tree(&g, r), wilson_ref] {
            let total: i128 = trees.iter().map(|t| f_naive(&g, t, &tau0).unwrap()).sum();
            let mean = total as f64 / (g.volume() as f64 * trees.len() as f64);
            assert!((mean - eig).abs() < 1e-9 * eig);
        }
    }
}

#[test]
fn contributions_respect_the_volume_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let g = generate::erdos_renyi_lcc(400, 0.02, &mut rng);
    let r = g.max_degree_node();
    let tau0 = bfs_tree(&g, r);
    let m = g.edge_count() as i128;
    let bound = 4 * m * m * g.eccentricity_from(r) as i128;
    for _ in 0..50 {
        let (tau, _) = wilson_ust(&g, r, &mut rng);
        assert!(f_naive(&g, &tau, &tau0).unwrap().abs() <= bound);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn optimized_equals_naive(n in 2usize..1500, extra in 0.0f64..0.01, seed in any::<u64>(), deep in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = generate::random_connected(n, extra, &mut rng);
        let r = rng.random_range(0..n);
        let tau0 = if deep { dfs_tree(&g, r) } else { bfs_tree(&g, r) };
        let mut fw = VolumeFenwick::new(n);
        for _ in 0..3 {
            let (tau, _) = wilson_ust(&g, r, &mut rng);
            prop_assert_eq!(f_optimized(&g, &tau, &tau0, &mut fw).unwrap(), f_naive(&g, &tau, &tau0).unwrap());
            prop_assert!(fw.is_zeroed());
        }
    }
}

#[test]
fn optimized_equals_naive_at_ten_thousand_nodes() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let g = generate::random_connected(10_000, 0.0004, &mut rng);
    let r = g.max_degree_node();
    let mut fw = VolumeFenwick::new(10_000);
    for tau0 in [bfs_tree(&g, r), dfs_tree(&g, r)] {
        for _ in 0..3 {
            let (tau, _) = wilson_ust(&g, r, &mut rng);
            assert_eq!(f_optimized(&g, &tau, &tau0, &mut fw).unwrap(), f_naive(&g, &tau, &tau0).unwrap());
        }
    }
}

use rand::Rng;
