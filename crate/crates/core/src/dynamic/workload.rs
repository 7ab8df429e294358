//! Update streams: the `I u v` / `D u v` text format and a degree-weighted
//! random workload generator.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng::{stream, Domain};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum UpdateOp {
    Insert,
    Delete,
}

/// One edge update on internal node ids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct UpdateEvent {
    pub op: UpdateOp,
    pub u: usize,
    pub v: usize,
}

impl UpdateEvent {
    pub fn insert(u: usize, v: usize) -> Self {
        UpdateEvent { op: UpdateOp::Insert, u, v }
    }

    pub fn delete(u: usize, v: usize) -> Self {
        UpdateEvent { op: UpdateOp::Delete, u, v }
    }

    pub fn apply(&self, graph: &Graph) -> Result<Graph> {
        match self.op {
            UpdateOp::Insert => graph.insert_edge(self.u, self.v),
            UpdateOp::Delete => graph.delete_edge(self.u, self.v),
        }
    }
}

/// Parses an update stream whose node ids are the labels of `graph`.
pub fn parse_updates<R: BufRead>(reader: R, graph: &Graph) -> Result<Vec<UpdateEvent>> {
    let index: HashMap<u64, usize> = graph.label_index();
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let line_no = i + 1;
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let err = |message: String| Error::Parse { line: line_no, message };
        let tokens: Vec<&str> = body.split_whitespace().collect();
        if tokens.len() != 3 {
            return Err(err(format!("expected `I u v` or `D u v`, got `{body}`")));
        }
        let node = |t: &str| -> Result<usize> {
            let label: u64 = t.parse().map_err(|_| err(format!("bad node id `{t}`")))?;
            index.get(&label).copied().ok_or_else(|| err(format!("unknown node {label}")))
        };
        let (u, v) = (node(tokens[1])?, node(tokens[2])?);
        let event = match tokens[0] {
            "I" | "i" => UpdateEvent::insert(u, v),
            "D" | "d" => UpdateEvent::delete(u, v),
            op => return Err(err(format!("unknown operation `{op}`"))),
        };
        out.push(event);
    }
    Ok(out)
}

/// Writes events using the labels of `graph`.
pub fn write_updates<W: Write>(events: &[UpdateEvent], graph: &Graph, mut out: W) -> Result<()> {
    for e in events {
        let op = match e.op {
            UpdateOp::Insert => 'I',
            UpdateOp::Delete => 'D',
        };
        writeln!(out, "{op} {} {}", graph.label(e.u), graph.label(e.v))?;
    }
    Ok(())
}

/// Random update sequence applied cumulatively to `graph`.
///
/// Each step is an insertion with probability `insert_frac`. Insertions pick
/// a non-edge with probability proportional to `d(u) d(v)`; deletions pick a
/// non-bridge edge with the same weighting, so the graph stays connected.
/// When the chosen kind has no candidate the other kind is used.
pub fn generate_updates(graph: &Graph, count: usize, insert_frac: f64, seed: u64) -> Result<Vec<UpdateEvent>> {
    if !(0.0..=1.0).contains(&insert_frac) {
        return Err(Error::invalid(format!("insert fraction must lie in [0, 1], got {insert_frac}")));
    }
    let mut current = graph.clone();
    let mut events = Vec::with_capacity(count);
    for step in 0..count {
        let mut rng = stream(seed, Domain::Workload, step as u64);
        let want_insert = rng.random_bool(insert_frac);
        let picked = if want_insert {
            pick_insertion(&current, &mut rng).or_else(|| pick_deletion(&current, &mut rng))
        } else {
            pick_deletion(&current, &mut rng).or_else(|| pick_insertion(&current, &mut rng))
        };
        let event = picked.ok_or_else(|| Error::invalid("graph admits no valid update"))?;
        current = event.apply(&current)?;
        events.push(event);
    }
    Ok(events)
}

fn pick_insertion<R: Rng>(graph: &Graph, rng: &mut R) -> Option<UpdateEvent> {
    let n = graph.node_count();
    if graph.edge_count() >= n * (n - 1) / 2 {
        return None;
    }
    let by_degree = WeightedIndex::new((0..n).map(|v| graph.degree(v).max(1))).ok()?;
    // rejection sampling terminates quickly unless the graph is nearly complete
    for _ in 0..64 * n * n {
        let (u, v) = (by_degree.sample(rng), by_degree.sample(rng));
        if u != v && !graph.has_edge(u, v) {
            return Some(UpdateEvent::insert(u.min(v), u.max(v)));
        }
    }
    None
}

fn pick_deletion<R: Rng>(graph: &Graph, rng: &mut R) -> Option<UpdateEvent> {
    let bridges: std::collections::HashSet<_> = graph.bridges().into_iter().collect();
    let candidates: Vec<_> = graph.edges().filter(|e| !bridges.contains(e)).collect();
    let weights = candidates.iter().map(|e| graph.degree(e.u) * graph.degree(e.v));
    let choice = WeightedIndex::new(weights).ok()?;
    let e = candidates[choice.sample(rng)];
    Some(UpdateEvent::delete(e.u, e.v))
}
