//! Persistent sample index and its maintenance under edge updates.
//!
//! Two strategies keep the stored trees close to uniform on the current
//! graph:
//!
//! * **BSM** resamples the affected trees with Wilson's algorithm: on
//!   insertion `⌈R(e) ω⌉` randomly chosen samples are redrawn among trees
//!   containing `e`; on deletion every sample containing `e` is redrawn.
//! * **ISM** never runs Wilson's algorithm. It moves affected samples across
//!   the bipartite exchange graph with [`link_cut`](crate::spanning::link_cut)
//!   or [`cut_link`](crate::spanning::cut_link) and corrects the resulting
//!   bias with importance weights.
//!
//! Samples that an update does not touch keep their stored contribution.

mod index;
mod maintenance;
mod workload;

pub use index::{deserialize, serialize, INDEX_MAGIC, INDEX_VERSION};
pub use workload::{generate_updates, parse_updates, write_updates, UpdateEvent, UpdateOp};

use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::spanning::{RootedTree, WilsonSampler, NO_PARENT};
use crate::ttf::{draw_sample, resolve_root, with_threads, EstimateConfig, Method, PathTreePolicy, Reference, SampleSize};
use crate::ttf::plan_sample_size;
use crate::VolumeFenwick;

/// Relative tolerance of the resistance solve used to size updates.
pub const RESISTANCE_TOLERANCE: f64 = 1e-6;
/// ESS below this fraction of ω triggers a warning.
pub const ESS_WARNING: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MaintenanceMode {
    Bsm,
    Ism,
}

/// Parent array of a stored tree in 32-bit form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompactTree {
    parent: Box<[u32]>,
}

const COMPACT_NONE: u32 = u32::MAX;

impl CompactTree {
    pub fn from_tree(tree: &RootedTree) -> Self {
        Self::from_parents(tree.parents())
    }

    pub(crate) fn from_parents(parents: &[usize]) -> Self {
        CompactTree {
            parent: parents
                .iter()
                .map(|&p| if p == NO_PARENT { COMPACT_NONE } else { p as u32 })
                .collect(),
        }
    }

    pub fn parents(&self) -> Vec<usize> {
        self.parent
            .iter()
            .map(|&p| if p == COMPACT_NONE { NO_PARENT } else { p as usize })
            .collect()
    }

    pub(crate) fn raw(&self) -> &[u32] {
        &self.parent
    }

    pub fn contains_edge(&self, a: usize, b: usize) -> bool {
        self.parent[a] == b as u32 || self.parent[b] == a as u32
    }

    /// Rebuilds the full rooted tree with volumes taken from `graph`.
    pub fn expand(&self, graph: &Graph, root: usize) -> RootedTree {
        RootedTree::from_parents_trusted(graph, root, self.parents())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleRecord {
    pub tree: CompactTree,
    pub f: i128,
    pub weight: f64,
}

/// What one update did.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UpdateReport {
    pub event: UpdateEvent,
    pub kappa: f64,
    /// Effective resistance of the inserted edge (insertions only).
    pub resistance: Option<f64>,
    /// Samples replaced or transformed.
    pub touched: usize,
    pub wilson_walks: usize,
    pub walk_steps: u64,
    pub reference_repaired: bool,
    pub ess: f64,
    pub latency: Duration,
}

/// Sample set for one graph, kept valid across updates.
#[derive(Debug, Clone)]
pub struct SampleStore {
    pub(crate) graph: Graph,
    pub(crate) reference: Reference,
    pub(crate) samples: Vec<SampleRecord>,
    pub(crate) seed: u64,
    pub(crate) mode: MaintenanceMode,
    pub(crate) update_count: u64,
    pub(crate) path_tree: PathTreePolicy,
    pub(crate) threads: Option<usize>,
}

/// Draws the initial samples exactly as the static estimator does.
pub fn build_index(graph: Graph, config: &EstimateConfig, mode: MaintenanceMode) -> Result<SampleStore> {
    if !graph.is_connected() {
        return Err(Error::Disconnected);
    }
    let n = graph.node_count();
    if n < 2 {
        return Err(Error::invalid("graph needs at least two nodes"));
    }
    if n >= COMPACT_NONE as usize {
        return Err(Error::Capacity {
            what: "node count for the sample index",
            limit: COMPACT_NONE as u128 - 1,
            actual: n as u128,
        });
    }
    let root = resolve_root(&graph, config.root)?;
    let reference = Reference::build(&graph, root, config.path_tree, config.method, config.seed)?;
    let omega = match config.samples {
        SampleSize::Fixed(0) => return Err(Error::invalid("sample count must be at least 1")),
        SampleSize::Fixed(w) => w,
        SampleSize::Planned { eps, pf } => plan_sample_size(&graph, root, eps, pf)?,
    };
    let weight = 1.0 / omega as f64;
    let samples = with_threads(config.threads, || {
        (0..omega)
            .into_par_iter()
            .map_init(
                || (WilsonSampler::new(n), VolumeFenwick::new(n)),
                |(sampler, fenwick), i| {
                    let (tau, f, _) = draw_sample(&graph, &reference, config.seed, i, sampler, fenwick)?;
                    Ok(SampleRecord {
                        tree: CompactTree::from_tree(&tau),
                        f,
                        weight,
                    })
                },
            )
            .collect::<Result<Vec<_>>>()
    })??;
    Ok(SampleStore {
        graph,
        reference,
        samples,
        seed: config.seed,
        mode,
        update_count: 0,
        path_tree: config.path_tree,
        threads: config.threads,
    })
}

impl SampleStore {
    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn root(&self) -> usize {
        self.reference.root
    }

    pub fn reference_tree(&self) -> &RootedTree {
        &self.reference.tree
    }

    pub fn method(&self) -> Method {
        self.reference.method
    }

    pub fn samples(&self) -> &[SampleRecord] {
        &self.samples
    }

    pub fn sample_count(&self) -> usize {
        self.samples.len()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn mode(&self) -> MaintenanceMode {
        self.mode
    }

    pub fn update_count(&self) -> u64 {
        self.update_count
    }

    pub fn threads(&self) -> Option<usize> {
        self.threads
    }

    pub fn set_threads(&mut self, threads: Option<usize>) {
        self.threads = threads;
    }

    /// Switches strategy. Moving to BSM requires uniform weights.
    pub fn set_mode(&mut self, mode: MaintenanceMode) -> Result<()> {
        if mode == MaintenanceMode::Bsm && !self.uniform_weights() {
            return Err(Error::invalid("BSM needs uniform weights; rebuild the index first"));
        }
        self.mode = mode;
        Ok(())
    }

    fn uniform_weights(&self) -> bool {
        let w0 = self.samples[0].weight;
        self.samples.iter().all(|s| s.weight == w0)
    }

    /// `Σ f w / 2m`. With uniform weights this is `Σ f / (2m ω)`, evaluated
    /// exactly as the static estimator does.
    pub fn current_estimate(&self) -> f64 {
        let two_m = self.graph.volume() as f64;
        if self.uniform_weights() {
            let total: i128 = self.samples.iter().map(|s| s.f).sum();
            total as f64 / (two_m * self.samples.len() as f64)
        } else {
            self.samples.iter().map(|s| s.f as f64 * s.weight).sum::<f64>() / two_m
        }
    }

    /// Effective sample size as a fraction of ω: `1 / (ω Σ w²)`.
    pub fn ess(&self) -> f64 {
        let sq: f64 = self.samples.iter().map(|s| s.weight * s.weight).sum();
        1.0 / (self.samples.len() as f64 * sq)
    }

    pub fn weight_sum(&self) -> f64 {
        self.samples.iter().map(|s| s.weight).sum()
    }

    /// Checks every stored tree against the current graph and the weight
    /// invariants.
    pub fn validate(&self) -> Result<()> {
        self.validate_slots(0..self.samples.len())
    }

    /// Like [`validate`](Self::validate) but checks only `count` trees,
    /// spread over the store by the update counter.
    pub fn validate_sampled(&self, count: usize) -> Result<()> {
        let len = self.samples.len();
        let offset = (self.update_count as usize).wrapping_mul(7919);
        let stride = (len / count.max(1)).max(1);
        self.validate_slots((0..count.min(len)).map(|i| (offset + i * stride) % len))
    }

    fn validate_slots(&self, slots: impl Iterator<Item = usize>) -> Result<()> {
        let root = self.root();
        RootedTree::from_parents(&self.graph, root, self.reference.tree.parents().to_vec())?;
        for i in slots {
            let s = &self.samples[i];
            RootedTree::from_parents(&self.graph, root, s.tree.parents())
                .map_err(|e| Error::invalid(format!("sample {i}: {e}")))?;
        }
        if let Some((i, s)) = self
            .samples
            .iter()
            .enumerate()
            .find(|(_, s)| !(s.weight > 0.0 && s.weight.is_finite()))
        {
            return Err(Error::invalid(format!("sample {i} has weight {}", s.weight)));
        }
        let total = self.weight_sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::invalid(format!("weights sum to {total}")));
        }
        Ok(())
    }

    /// Applies one update with the store's strategy.
    pub fn apply(&mut self, event: UpdateEvent) -> Result<UpdateReport> {
        let start = Instant::now();
        let mut report = match (self.mode, event.op) {
            (MaintenanceMode::Bsm, UpdateOp::Insert) => self.bsm_insert(event.u, event.v)?,
            (MaintenanceMode::Bsm, UpdateOp::Delete) => self.bsm_delete(event.u, event.v)?,
            (MaintenanceMode::Ism, UpdateOp::Insert) => self.ism_insert(event.u, event.v)?,
            (MaintenanceMode::Ism, UpdateOp::Delete) => self.ism_delete(event.u, event.v)?,
        };
        report.latency = start.elapsed();
        // invariant check, kept out of the measured latency
        let check = if cfg!(debug_assertions) {
            self.validate()
        } else {
            self.validate_sampled(4)
        };
        if let Err(e) = check {
            panic!("sample store invariant broken after {event:?}: {e}");
        }
        Ok(report)
    }

    /// Redraws every sample on `graph` with the same root, reference
    /// policy, method, sample count, and seed. The update counter is kept.
    pub fn redraw(&self, graph: Graph) -> Result<SampleStore> {
        let config = EstimateConfig {
            samples: SampleSize::Fixed(self.samples.len() as u64),
            root: crate::ttf::RootPolicy::Explicit(self.root()),
            path_tree: self.path_tree,
            method: self.reference.method,
            seed: self.seed,
            threads: self.threads,
        };
        let mut store = build_index(graph, &config, self.mode)?;
        store.update_count = self.update_count;
        Ok(store)
    }

    /// Applies `event` to the graph and redraws every sample.
    pub fn rebuild(&mut self, event: UpdateEvent) -> Result<UpdateReport> {
        let start = Instant::now();
        let graph = event.apply(&self.graph)?;
        *self = self.redraw(graph)?;
        self.update_count += 1;
        Ok(UpdateReport {
            event,
            kappa: self.current_estimate(),
            resistance: None,
            touched: self.samples.len(),
            wilson_walks: self.samples.len(),
            walk_steps: 0,
            reference_repaired: false,
            ess: 1.0,
            latency: start.elapsed(),
        })
    }

    pub fn path_tree(&self) -> PathTreePolicy {
        self.path_tree
    }
}
