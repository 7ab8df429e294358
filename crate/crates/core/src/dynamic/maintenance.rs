use rayon::prelude::*;

use super::{CompactTree, MaintenanceMode, SampleRecord, SampleStore, UpdateEvent, UpdateReport, ESS_WARNING, RESISTANCE_TOLERANCE};
use crate::error::{Error, Result};
use crate::exact::effective_resistance_iterative;
use crate::graph::Graph;
use crate::num::ceil_snapped;
use crate::rng::{stream, Domain};
use crate::spanning::{bfs_tree, cut_link, link_cut, WilsonSampler};
use crate::ttf::{with_threads, Reference};
use crate::VolumeFenwick;

/// Result of processing one touched slot.
struct Touched {
    slot: usize,
    record: SampleRecord,
    steps: u64,
}

/// Bookkeeping for the report of one update.
struct Outcome {
    event: UpdateEvent,
    resistance: Option<f64>,
    repaired: bool,
    moved: usize,
    wilson_walks: usize,
}

impl SampleStore {
    fn require_mode(&self, mode: MaintenanceMode) -> Result<()> {
        if self.mode != mode {
            return Err(Error::invalid(format!("store is in {:?} mode", self.mode)));
        }
        Ok(())
    }

    /// `R(e)` on the updated graph, the number of samples to move, and
    /// which ones (uniform without replacement, sorted).
    fn plan_insertion(&self, graph: &Graph, u: usize, v: usize) -> Result<(f64, Vec<usize>)> {
        let resistance = effective_resistance_iterative(graph, u, v, RESISTANCE_TOLERANCE)?;
        let omega = self.samples.len();
        let k = (ceil_snapped(resistance * omega as f64, 1e-5) as usize).clamp(1, omega);
        let mut rng = stream(self.seed, Domain::Selection, self.update_count);
        let mut selected = rand::seq::index::sample(&mut rng, omega, k).into_vec();
        selected.sort_unstable();
        Ok((resistance, selected))
    }

    fn slots_containing(&self, u: usize, v: usize) -> Vec<usize> {
        (0..self.samples.len())
            .filter(|&i| self.samples[i].tree.contains_edge(u, v))
            .collect()
    }

    /// Reference tree for the updated graph; rebuilt by BFS when the
    /// deleted edge was part of it.
    fn updated_reference(&self, graph: &Graph, deleted: Option<(usize, usize)>) -> (Reference, bool) {
        let mut reference = self.reference.clone();
        let repaired = matches!(deleted, Some((u, v)) if reference.tree.contains_edge(u, v));
        if repaired {
            reference.tree = bfs_tree(graph, reference.root);
            reference.eccentricity = graph.eccentricity_from(reference.root);
        } else {
            reference.tree.refresh(graph);
        }
        (reference, repaired)
    }

    /// Runs `work` over `slots` in parallel, each with its own update stream.
    fn process<F>(&self, slots: &[usize], work: F) -> Result<Vec<Touched>>
    where
        F: Fn(usize, &mut WilsonSampler, &mut VolumeFenwick, &mut crate::rng::StreamRng) -> Result<Touched> + Sync,
    {
        let n = self.graph.node_count();
        let (seed, k) = (self.seed, self.update_count);
        with_threads(self.threads, || {
            slots
                .par_iter()
                .map_init(
                    || (WilsonSampler::new(n), VolumeFenwick::new(n)),
                    |(sampler, fenwick), &slot| {
                        let mut rng = stream(seed, Domain::Update(k), slot as u64);
                        work(slot, sampler, fenwick, &mut rng)
                    },
                )
                .collect()
        })?
    }

    /// Recomputes `f` for every sample outside `skip` against `reference`.
    fn recompute_all(&self, graph: &Graph, reference: &Reference, skip: &[usize]) -> Result<Vec<Touched>> {
        let keep: Vec<usize> = (0..self.samples.len()).filter(|i| skip.binary_search(i).is_err()).collect();
        self.process(&keep, |slot, _, fenwick, _| {
            let s = &self.samples[slot];
            let tau = s.tree.expand(graph, reference.root);
            Ok(Touched {
                slot,
                record: SampleRecord {
                    tree: s.tree.clone(),
                    f: reference.contribution(graph, &tau, fenwick)?,
                    weight: s.weight,
                },
                steps: 0,
            })
        })
    }

    fn commit(&mut self, graph: Graph, reference: Reference, touched: Vec<Touched>, outcome: Outcome) -> UpdateReport {
        let walk_steps = touched.iter().map(|t| t.steps).sum();
        for t in touched {
            self.samples[t.slot] = t.record;
        }
        self.graph = graph;
        self.reference = reference;
        self.update_count += 1;
        let ess = self.ess();
        if self.mode == MaintenanceMode::Ism && ess < ESS_WARNING {
            log::warn!("effective sample size fell to {:.3} of the sample count", ess);
        }
        UpdateReport {
            event: outcome.event,
            kappa: self.current_estimate(),
            resistance: outcome.resistance,
            touched: outcome.moved,
            wilson_walks: outcome.wilson_walks,
            walk_steps,
            reference_repaired: outcome.repaired,
            ess,
            latency: Default::default(),
        }
    }

    /// Rebuilds the reference tree by BFS on the current graph and
    /// recomputes every stored contribution against it.
    pub fn repair_tau0(&mut self) -> Result<()> {
        let root = self.reference.root;
        let mut reference = self.reference.clone();
        reference.tree = bfs_tree(&self.graph, root);
        reference.eccentricity = self.graph.eccentricity_from(root);
        let touched = self.recompute_all(&self.graph, &reference, &[])?;
        for t in touched {
            self.samples[t.slot] = t.record;
        }
        self.reference = reference;
        Ok(())
    }

    /// Inserts `(u, v)` and redraws `⌈R ω⌉` random samples among the trees
    /// that contain the new edge.
    pub fn bsm_insert(&mut self, u: usize, v: usize) -> Result<UpdateReport> {
        self.require_mode(MaintenanceMode::Bsm)?;
        let graph = self.graph.insert_edge(u, v)?;
        let (reference, _) = self.updated_reference(&graph, None);
        let (resistance, selected) = self.plan_insertion(&graph, u, v)?;
        let touched = self.process(&selected, |slot, sampler, fenwick, rng| {
            let (tau, steps) = sampler.sample_with_edge(&graph, u, v, reference.root, rng)?;
            Ok(Touched {
                slot,
                record: SampleRecord {
                    tree: CompactTree::from_tree(&tau),
                    f: reference.contribution(&graph, &tau, fenwick)?,
                    weight: self.samples[slot].weight,
                },
                steps,
            })
        })?;
        let outcome = Outcome {
            event: UpdateEvent::insert(u, v),
            resistance: Some(resistance),
            repaired: false,
            moved: touched.len(),
            wilson_walks: touched.len(),
        };
        Ok(self.commit(graph, reference, touched, outcome))
    }

    /// Deletes `(u, v)` and redraws every sample that contained it.
    pub fn bsm_delete(&mut self, u: usize, v: usize) -> Result<UpdateReport> {
        self.require_mode(MaintenanceMode::Bsm)?;
        let graph = self.graph.delete_edge(u, v)?;
        let (reference, repaired) = self.updated_reference(&graph, Some((u, v)));
        let hit = self.slots_containing(u, v);
        let mut touched = self.process(&hit, |slot, sampler, fenwick, rng| {
            let (tau, steps) = sampler.sample(&graph, reference.root, rng);
            Ok(Touched {
                slot,
                record: SampleRecord {
                    tree: CompactTree::from_tree(&tau),
                    f: reference.contribution(&graph, &tau, fenwick)?,
                    weight: self.samples[slot].weight,
                },
                steps,
            })
        })?;
        let outcome = Outcome {
            event: UpdateEvent::delete(u, v),
            resistance: None,
            repaired,
            moved: touched.len(),
            wilson_walks: touched.len(),
        };
        if repaired {
            touched.extend(self.recompute_all(&graph, &reference, &hit)?);
        }
        Ok(self.commit(graph, reference, touched, outcome))
    }

    /// Inserts `(u, v)` and moves `⌈R ω⌉` random samples onto trees that
    /// contain it by link-cut, weighting each by `d(τ) / d(τ_e)`.
    pub fn ism_insert(&mut self, u: usize, v: usize) -> Result<UpdateReport> {
        self.require_mode(MaintenanceMode::Ism)?;
        let graph = self.graph.insert_edge(u, v)?;
        let (reference, _) = self.updated_reference(&graph, None);
        let (resistance, selected) = self.plan_insertion(&graph, u, v)?;
        let mut touched = self.process(&selected, |slot, _, fenwick, rng| {
            let s = &self.samples[slot];
            let tau = s.tree.expand(&graph, reference.root);
            let (tau_e, d_tau) = link_cut(&tau, &graph, u, v, rng)?;
            let d_tau_e = tau_e.crossing_count(&graph, u, v)?;
            Ok(Touched {
                slot,
                record: SampleRecord {
                    tree: CompactTree::from_tree(&tau_e),
                    f: reference.contribution(&graph, &tau_e, fenwick)?,
                    weight: s.weight * d_tau as f64 / d_tau_e as f64,
                },
                steps: 0,
            })
        })?;
        let untouched_mass: f64 = (0..self.samples.len())
            .filter(|i| selected.binary_search(i).is_err())
            .map(|i| self.samples[i].weight)
            .sum();
        let (moved_target, rest_target) = if selected.len() == self.samples.len() {
            (1.0, 0.0)
        } else {
            (resistance, 1.0 - resistance)
        };
        let moved_mass: f64 = touched.iter().map(|t| t.record.weight).sum();
        for t in &mut touched {
            t.record.weight *= moved_target / moved_mass;
        }
        if rest_target > 0.0 {
            let scale = rest_target / untouched_mass;
            for i in 0..self.samples.len() {
                if selected.binary_search(&i).is_err() {
                    self.samples[i].weight *= scale;
                }
            }
        }
        let outcome = Outcome {
            event: UpdateEvent::insert(u, v),
            resistance: Some(resistance),
            repaired: false,
            moved: touched.len(),
            wilson_walks: 0,
        };
        Ok(self.commit(graph, reference, touched, outcome))
    }

    /// Deletes `(u, v)` and moves every sample containing it to a tree
    /// without it by cut-link, weighting each by `d(τ_e) / d(τ)`.
    pub fn ism_delete(&mut self, u: usize, v: usize) -> Result<UpdateReport> {
        self.require_mode(MaintenanceMode::Ism)?;
        let graph = self.graph.delete_edge(u, v)?;
        let (reference, repaired) = self.updated_reference(&graph, Some((u, v)));
        let hit = self.slots_containing(u, v);
        let mut touched = self.process(&hit, |slot, _, fenwick, rng| {
            let s = &self.samples[slot];
            let tau_e = s.tree.expand(&self.graph, reference.root);
            let (tau, d_tau_e) = cut_link(&tau_e, &graph, u, v, rng)?;
            let d_tau = tau.path_length(u, v);
            Ok(Touched {
                slot,
                record: SampleRecord {
                    tree: CompactTree::from_tree(&tau),
                    f: reference.contribution(&graph, &tau, fenwick)?,
                    weight: s.weight * d_tau_e as f64 / d_tau as f64,
                },
                steps: 0,
            })
        })?;
        if !touched.is_empty() {
            let original: f64 = hit.iter().map(|&i| self.samples[i].weight).sum();
            let moved: f64 = touched.iter().map(|t| t.record.weight).sum();
            for t in &mut touched {
                t.record.weight *= original / moved;
            }
        }
        let outcome = Outcome {
            event: UpdateEvent::delete(u, v),
            resistance: None,
            repaired,
            moved: touched.len(),
            wilson_walks: 0,
        };
        if repaired {
            touched.extend(self.recompute_all(&graph, &reference, &hit)?);
        }
        Ok(self.commit(graph, reference, touched, outcome))
    }
}
