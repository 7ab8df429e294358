//! Static estimator: sample uniform spanning trees, average `f(τ) / 2m`.

mod contribution;

pub use contribution::{f_naive, f_optimized};

use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::num::ceil_snapped;
use crate::rng::{stream, Domain};
use crate::spanning::{bfs_tree, dfs_tree, wilson_ust, RootedTree, WilsonSampler};
use crate::VolumeFenwick;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RootPolicy {
    /// Highest-degree node, ties to the smallest id.
    MaxDegree,
    Explicit(usize),
}

/// How the reference paths `u -> r` are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PathTreePolicy {
    Bfs,
    Dfs,
    Wilson,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    Naive,
    Optimized,
    /// Naive when `ecc(r) < log2 n`, optimized otherwise.
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SampleSize {
    Fixed(u64),
    /// Planned from a relative-error target and failure probability.
    Planned { eps: f64, pf: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateConfig {
    pub samples: SampleSize,
    pub root: RootPolicy,
    pub path_tree: PathTreePolicy,
    pub method: Method,
    pub seed: u64,
    /// Worker threads; `None` uses the global rayon pool.
    pub threads: Option<usize>,
}

impl Default for EstimateConfig {
    fn default() -> Self {
        EstimateConfig {
            samples: SampleSize::Fixed(1000),
            root: RootPolicy::MaxDegree,
            path_tree: PathTreePolicy::Bfs,
            method: Method::Auto,
            seed: 0,
            threads: None,
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct PhaseTimings {
    pub reference: Duration,
    pub sampling: Duration,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EstimateResult {
    pub kappa: f64,
    pub root: usize,
    pub eccentricity: usize,
    pub samples: u64,
    /// Method actually run (never `Auto`).
    pub method: Method,
    /// `f(τ_i)` per sample.
    pub f_values: Vec<i128>,
    /// Random-walk steps per sample.
    pub walk_steps: Vec<u64>,
    pub timings: PhaseTimings,
}

impl EstimateResult {
    pub fn total_walk_steps(&self) -> u64 {
        self.walk_steps.iter().sum()
    }
}

/// Fixed part of an estimate: root, reference tree, and method.
#[derive(Debug, Clone)]
pub struct Reference {
    pub root: usize,
    pub tree: RootedTree,
    pub eccentricity: usize,
    pub method: Method,
}

impl Reference {
    pub fn build(graph: &Graph, root: usize, policy: PathTreePolicy, method: Method, seed: u64) -> Result<Self> {
        if root >= graph.node_count() {
            return Err(Error::invalid(format!("root {root} out of range")));
        }
        let tree = reference_tree(graph, root, policy, seed);
        let eccentricity = graph.eccentricity_from(root);
        Ok(Reference {
            root,
            tree,
            eccentricity,
            method: resolve_method(method, graph.node_count(), eccentricity),
        })
    }

    /// Contribution of `tau`, reusing `fenwick` for the optimized method.
    pub fn contribution(&self, graph: &Graph, tau: &RootedTree, fenwick: &mut VolumeFenwick) -> Result<i128> {
        match self.method {
            Method::Naive => f_naive(graph, tau, &self.tree),
            _ => f_optimized(graph, tau, &self.tree, fenwick),
        }
    }
}

pub fn resolve_root(graph: &Graph, policy: RootPolicy) -> Result<usize> {
    match policy {
        RootPolicy::MaxDegree => Ok(graph.max_degree_node()),
        RootPolicy::Explicit(r) if r < graph.node_count() => Ok(r),
        RootPolicy::Explicit(r) => Err(Error::invalid(format!("root {r} out of range"))),
    }
}

pub fn reference_tree(graph: &Graph, root: usize, policy: PathTreePolicy, seed: u64) -> RootedTree {
    match policy {
        PathTreePolicy::Bfs => bfs_tree(graph, root),
        PathTreePolicy::Dfs => dfs_tree(graph, root),
        PathTreePolicy::Wilson => wilson_ust(graph, root, &mut stream(seed, Domain::ReferenceTree, 0)).0,
    }
}

pub fn resolve_method(method: Method, n: usize, eccentricity: usize) -> Method {
    match method {
        Method::Auto if (eccentricity as f64) < (n as f64).log2() => Method::Naive,
        Method::Auto => Method::Optimized,
        m => m,
    }
}

/// `⌈8 m² Δ̂² ln(2/p_f) / (n² ε²)⌉` with `Δ̂ = ecc(r)`.
pub fn plan_sample_size(graph: &Graph, r: usize, eps: f64, pf: f64) -> Result<u64> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::invalid(format!("eps must lie in (0, 1], got {eps}")));
    }
    if !(pf > 0.0 && pf < 1.0) {
        return Err(Error::invalid(format!("failure probability must lie in (0, 1), got {pf}")));
    }
    if r >= graph.node_count() {
        return Err(Error::invalid(format!("root {r} out of range")));
    }
    let n = graph.node_count() as f64;
    let m = graph.edge_count() as f64;
    let ecc = graph.eccentricity_from(r) as f64;
    let omega = 8.0 * m * m * ecc * ecc * (2.0 / pf).ln() / (n * n * eps * eps);
    Ok(ceil_snapped(omega, 1e-12).max(1.0) as u64)
}

/// Runs `f` inside a pool of `threads` workers, or directly when `None`.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(0) => Err(Error::invalid("thread count must be positive")),
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| Error::invalid(e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}

/// Draws sample `index` on its own stream and evaluates its contribution.
pub fn draw_sample(
    graph: &Graph,
    reference: &Reference,
    seed: u64,
    index: u64,
    sampler: &mut WilsonSampler,
    fenwick: &mut VolumeFenwick,
) -> Result<(RootedTree, i128, u64)> {
    let mut rng = stream(seed, Domain::Sample, index);
    let (tau, steps) = sampler.sample(graph, reference.root, &mut rng);
    let f = reference.contribution(graph, &tau, fenwick)?;
    Ok((tau, f, steps))
}

pub fn estimate_kemeny(graph: &Graph, config: &EstimateConfig) -> Result<EstimateResult> {
    if !graph.is_connected() {
        return Err(Error::Disconnected);
    }
    if graph.node_count() < 2 {
        return Err(Error::invalid("graph needs at least two nodes"));
    }
    let start = Instant::now();
    let root = resolve_root(graph, config.root)?;
    let reference = Reference::build(graph, root, config.path_tree, config.method, config.seed)?;
    let omega = match config.samples {
        SampleSize::Fixed(0) => return Err(Error::invalid("sample count must be at least 1")),
        SampleSize::Fixed(w) => w,
        SampleSize::Planned { eps, pf } => plan_sample_size(graph, root, eps, pf)?,
    };
    let reference_time = start.elapsed();

    let start = Instant::now();
    let n = graph.node_count();
    let draws: Vec<(i128, u64)> = with_threads(config.threads, || {
        (0..omega)
            .into_par_iter()
            .map_init(
                || (WilsonSampler::new(n), VolumeFenwick::new(n)),
                |(sampler, fenwick), i| {
                    draw_sample(graph, &reference, config.seed, i, sampler, fenwick).map(|(_, f, s)| (f, s))
                },
            )
            .collect::<Result<Vec<_>>>()
    })??;
    let sampling_time = start.elapsed();

    let total: i128 = draws.iter().map(|d| d.0).sum();
    let kappa = total as f64 / (graph.volume() as f64 * omega as f64);
    let (f_values, walk_steps) = draws.into_iter().unzip();
    log::debug!("estimate: root {root}, ecc {}, omega {omega}, kappa {kappa}", reference.eccentricity);
    Ok(EstimateResult {
        kappa,
        root,
        eccentricity: reference.eccentricity,
        samples: omega,
        method: reference.method,
        f_values,
        walk_steps,
        timings: PhaseTimings {
            reference: reference_time,
            sampling: sampling_time,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::kemeny_eigen;
    use crate::generate;

    fn fixed(samples: u64, seed: u64) -> EstimateConfig {
        EstimateConfig {
            samples: SampleSize::Fixed(samples),
            seed,
            ..EstimateConfig::default()
        }
    }

    #[test]
    fn path_is_exact_for_any_sample_count() {
        let p3 = generate::path(3);
        for w in [1, 7, 100] {
            assert_eq!(estimate_kemeny(&p3, &fixed(w, w)).unwrap().kappa, 1.5);
        }
    }

    #[test]
    fn triangle_within_three_percent() {
        let k3 = generate::complete(3);
        for seed in 0..3 {
            let est = estimate_kemeny(&k3, &fixed(10_000, seed)).unwrap();
            assert!((est.kappa - 4.0 / 3.0).abs() / (4.0 / 3.0) <= 0.03, "{}", est.kappa);
        }
    }

    #[test]
    fn methods_agree_sample_by_sample() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let g = generate::random_connected(120, 0.03, &mut rng);
        let mut a = fixed(50, 4);
        a.method = Method::Naive;
        let mut b = a.clone();
        b.method = Method::Optimized;
        assert_eq!(
            estimate_kemeny(&g, &a).unwrap().f_values,
            estimate_kemeny(&g, &b).unwrap().f_values
        );
    }

    #[test]
    fn bound_on_contributions() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        let g = generate::random_connected(80, 0.05, &mut rng);
        let est = estimate_kemeny(&g, &fixed(300, 1)).unwrap();
        let m = g.edge_count() as i128;
        let bound = 4 * m * m * est.eccentricity as i128;
        assert!(est.f_values.iter().all(|f| f.abs() <= bound));
        let eig = kemeny_eigen(&g).unwrap();
        assert!((est.kappa - eig).abs() / eig < 0.1);
    }

    #[test]
    fn thread_count_does_not_change_result() {
        let g = generate::cycle(30);
        let mut c = fixed(200, 9);
        c.threads = Some(1);
        let one = estimate_kemeny(&g, &c).unwrap();
        c.threads = Some(3);
        let three = estimate_kemeny(&g, &c).unwrap();
        assert_eq!(one.kappa.to_bits(), three.kappa.to_bits());
        assert_eq!(one.f_values, three.f_values);
    }

    #[test]
    fn planner_arithmetic() {
        let k2 = generate::complete(2);
        let pf = 2.0 * (-2.0f64).exp();
        assert_eq!(plan_sample_size(&k2, 0, 1.0, pf).unwrap(), 4);
        let g = generate::cycle(9);
        let a = plan_sample_size(&g, 0, 0.2, 0.05).unwrap();
        let b = plan_sample_size(&g, 0, 0.1, 0.05).unwrap();
        assert!(b >= 4 * a - 4 && b <= 4 * a);
        assert!(plan_sample_size(&g, 0, 0.2, 2.0).is_err());
        assert!(plan_sample_size(&g, 0, 0.0, 0.5).is_err());
    }

    #[test]
    fn auto_method_selection() {
        assert_eq!(resolve_method(Method::Auto, 1024, 3), Method::Naive);
        assert_eq!(resolve_method(Method::Auto, 1024, 10), Method::Optimized);
        assert_eq!(resolve_method(Method::Naive, 4, 100), Method::Naive);
    }

    #[test]
    fn rejects_bad_input() {
        let g = Graph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        assert!(matches!(estimate_kemeny(&g, &fixed(5, 0)), Err(Error::Disconnected)));
        let k3 = generate::complete(3);
        assert!(estimate_kemeny(&k3, &fixed(0, 0)).is_err());
        let mut c = fixed(5, 0);
        c.root = RootPolicy::Explicit(3);
        assert!(estimate_kemeny(&k3, &c).is_err());
    }
}
