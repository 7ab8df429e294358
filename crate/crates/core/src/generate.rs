//! Graph families used by tests, benchmarks and the oracle battery.

use std::collections::HashSet;

use rand::Rng;

use crate::graph::Graph;

pub fn complete(n: usize) -> Graph {
    Graph::from_edges(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)))).unwrap()
}

pub fn path(n: usize) -> Graph {
    Graph::from_edges(n, (1..n).map(|v| (v - 1, v))).unwrap()
}

/// `n >= 3`.
pub fn cycle(n: usize) -> Graph {
    Graph::from_edges(n, (0..n).map(|v| (v, (v + 1) % n))).unwrap()
}

/// Star with centre 0 and `n - 1` leaves.
pub fn star(n: usize) -> Graph {
    Graph::from_edges(n, (1..n).map(|v| (0, v))).unwrap()
}

/// G(n, p) via geometric edge skipping; O(n + m) expected time.
pub fn erdos_renyi<R: Rng>(n: usize, p: f64, rng: &mut R) -> Graph {
    let mut edges = Vec::new();
    if p >= 1.0 {
        return complete(n);
    }
    if p > 0.0 && n > 1 {
        let log_q = (1.0 - p).ln();
        let (mut v, mut w) = (1usize, usize::MAX);
        loop {
            let r: f64 = rng.random();
            let skip = ((1.0 - r).ln() / log_q).floor() as usize;
            w = w.wrapping_add(1).wrapping_add(skip);
            while v < n && w >= v {
                w -= v;
                v += 1;
            }
            if v >= n {
                break;
            }
            edges.push((w, v));
        }
    }
    Graph::from_edges(n, edges).unwrap()
}

/// Largest connected component of G(n, p).
pub fn erdos_renyi_lcc<R: Rng>(n: usize, p: f64, rng: &mut R) -> Graph {
    erdos_renyi(n, p, rng).largest_connected_component().0
}

/// Preferential attachment: each new node links to `k` distinct earlier
/// nodes chosen with probability proportional to degree, starting from
/// `K_{k+1}`. Connected, with heavy-tailed degrees.
pub fn preferential_attachment<R: Rng>(n: usize, k: usize, rng: &mut R) -> Graph {
    assert!(k >= 1 && n > k, "need n > k >= 1");
    let mut edges: Vec<(usize, usize)> = (0..=k).flat_map(|u| (u + 1..=k).map(move |v| (u, v))).collect();
    // every edge endpoint once, so a uniform pick is degree-weighted
    let mut ends: Vec<usize> = edges.iter().flat_map(|&(u, v)| [u, v]).collect();
    for v in k + 1..n {
        let mut targets = Vec::with_capacity(k);
        while targets.len() < k {
            let t = ends[rng.random_range(0..ends.len())];
            if !targets.contains(&t) {
                targets.push(t);
            }
        }
        for t in targets {
            edges.push((t, v));
            ends.extend([t, v]);
        }
    }
    Graph::from_edges(n, edges).unwrap()
}

/// Random spanning tree by uniform attachment plus every other pair with
/// probability `p`. Always connected.
pub fn random_connected<R: Rng>(n: usize, p: f64, rng: &mut R) -> Graph {
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        perm.swap(i, rng.random_range(0..=i));
    }
    let mut edges = HashSet::new();
    for i in 1..n {
        let j = rng.random_range(0..i);
        let (a, b) = (perm[i], perm[j]);
        edges.insert((a.min(b), a.max(b)));
    }
    for u in 0..n {
        for v in u + 1..n {
            if rng.random_bool(p) {
                edges.insert((u, v));
            }
        }
    }
    let mut edges: Vec<_> = edges.into_iter().collect();
    edges.sort_unstable();
    Graph::from_edges(n, edges).unwrap()
}

/// Uniformly random labelled connected graph on `n` nodes, by rejection.
/// Intended for `n <= 8`.
pub fn uniform_connected_small<R: Rng>(n: usize, rng: &mut R) -> Graph {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    loop {
        let edges: Vec<_> = pairs.iter().copied().filter(|_| rng.random_bool(0.5)).collect();
        if edges.is_empty() && n > 1 {
            continue;
        }
        let g = Graph::from_edges(n, edges).unwrap();
        if g.is_connected() {
            return g;
        }
    }
}

/// Every connected graph on `n` nodes, one representative per isomorphism
/// class (canonical form = lexicographically smallest adjacency bitmask
/// over all relabellings). Feasible for `n <= 6`.
pub fn connected_graphs_up_to_isomorphism(n: usize) -> Vec<Graph> {
    assert!(n <= 7, "exhaustive enumeration only supported for small n");
    if n == 1 {
        return vec![Graph::from_edges(1, []).unwrap()];
    }
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    let mut pair_index = vec![vec![0usize; n]; n];
    for (i, &(u, v)) in pairs.iter().enumerate() {
        pair_index[u][v] = i;
        pair_index[v][u] = i;
    }
    let perms = permutations(n);
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for mask in 0u32..(1u32 << pairs.len()) {
        if (mask.count_ones() as usize) < n - 1 {
            continue;
        }
        let canon = perms
            .iter()
            .map(|p| {
                pairs.iter().enumerate().fold(0u32, |acc, (i, &(u, v))| {
                    if mask >> i & 1 == 1 {
                        acc | 1 << pair_index[p[u]][p[v]]
                    } else {
                        acc
                    }
                })
            })
            .min()
            .unwrap();
        if !seen.insert(canon) {
            continue;
        }
        let edges = pairs.iter().enumerate().filter(|(i, _)| canon >> i & 1 == 1).map(|(_, &e)| e);
        let g = Graph::from_edges(n, edges).unwrap();
        if g.is_connected() {
            out.push(g);
        }
    }
    out
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..n).collect();
    heap_permute(n, &mut current, &mut out);
    out
}

fn heap_permute(k: usize, a: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if k <= 1 {
        out.push(a.clone());
        return;
    }
    for i in 0..k {
        heap_permute(k - 1, a, out);
        if k % 2 == 0 {
            a.swap(i, k - 1);
        } else {
            a.swap(0, k - 1);
        }
    }
}
