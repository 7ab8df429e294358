//! Binary index format, little-endian throughout:
//!
//! ```text
//! magic "KFI1" | version u32 | n u64 | m u64 | ω u64 | r u64 | seed u64
//! mode u8 | path policy u8 | method u8 | update count u64 | graph fingerprint u64
//! reference parents: n × u64 (u64::MAX for the root)
//! ω × { parents: n × u64 | f: i128 | w: f64 }
//! ```

use super::{CompactTree, MaintenanceMode, SampleRecord, SampleStore};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::spanning::{RootedTree, NO_PARENT};
use crate::ttf::{Method, PathTreePolicy, Reference};

pub const INDEX_MAGIC: &[u8; 4] = b"KFI1";
pub const INDEX_VERSION: u32 = 1;

/// FNV-1a over node count and labelled edge list; ties an index to the
/// exact graph it was built for.
fn fingerprint(graph: &Graph) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    let mut feed = |x: u64| {
        for b in x.to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
    };
    feed(graph.node_count() as u64);
    for e in graph.edges() {
        feed(graph.label(e.u));
        feed(graph.label(e.v));
    }
    h
}

fn put_parents(out: &mut Vec<u8>, parents: impl Iterator<Item = usize>) {
    for p in parents {
        let x = if p == NO_PARENT { u64::MAX } else { p as u64 };
        out.extend_from_slice(&x.to_le_bytes());
    }
}

pub fn serialize(store: &SampleStore) -> Vec<u8> {
    let n = store.graph.node_count();
    let mut out = Vec::with_capacity(64 + (store.samples.len() + 1) * (8 * n + 24));
    out.extend_from_slice(INDEX_MAGIC);
    out.extend_from_slice(&INDEX_VERSION.to_le_bytes());
    for x in [
        n as u64,
        store.graph.edge_count() as u64,
        store.samples.len() as u64,
        store.root() as u64,
        store.seed,
    ] {
        out.extend_from_slice(&x.to_le_bytes());
    }
    out.push(match store.mode {
        MaintenanceMode::Bsm => 0,
        MaintenanceMode::Ism => 1,
    });
    out.push(match store.path_tree {
        PathTreePolicy::Bfs => 0,
        PathTreePolicy::Dfs => 1,
        PathTreePolicy::Wilson => 2,
    });
    out.push(match store.reference.method {
        Method::Naive => 0,
        _ => 1,
    });
    out.extend_from_slice(&store.update_count.to_le_bytes());
    out.extend_from_slice(&fingerprint(&store.graph).to_le_bytes());
    put_parents(&mut out, store.reference.tree.parents().iter().copied());
    for s in &store.samples {
        put_parents(&mut out, s.tree.raw().iter().map(|&p| if p == u32::MAX { NO_PARENT } else { p as usize }));
        out.extend_from_slice(&s.f.to_le_bytes());
        out.extend_from_slice(&s.weight.to_le_bytes());
    }
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, k: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(k).filter(|&e| e <= self.bytes.len());
        let end = end.ok_or_else(|| corrupt("truncated"))?;
        let slice = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(slice)
    }

    fn array<const K: usize>(&mut self) -> Result<[u8; K]> {
        Ok(self.take(K)?.try_into().expect("length checked"))
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.array()?))
    }

    fn parents(&mut self, n: usize) -> Result<Vec<usize>> {
        (0..n)
            .map(|_| {
                let x = self.u64()?;
                if x == u64::MAX {
                    Ok(NO_PARENT)
                } else if x < n as u64 {
                    Ok(x as usize)
                } else {
                    Err(corrupt(format!("parent id {x} out of range")))
                }
            })
            .collect()
    }
}

fn corrupt(msg: impl Into<String>) -> Error {
    Error::CorruptIndex(msg.into())
}

/// Reads an index written by [`serialize`] and revalidates every tree
/// against `graph`.
pub fn deserialize(bytes: &[u8], graph: Graph) -> Result<SampleStore> {
    let mut r = Reader { bytes, pos: 0 };
    if r.take(4).ok() != Some(&INDEX_MAGIC[..]) {
        return Err(corrupt("bad magic bytes"));
    }
    let version = u32::from_le_bytes(r.array()?);
    if version != INDEX_VERSION {
        return Err(corrupt(format!("unsupported version {version}")));
    }
    let (n, m, omega, root, seed) = (r.u64()?, r.u64()?, r.u64()?, r.u64()?, r.u64()?);
    if n != graph.node_count() as u64 || m != graph.edge_count() as u64 {
        return Err(corrupt(format!(
            "index is for a graph with {n} nodes and {m} edges, got {} and {}",
            graph.node_count(),
            graph.edge_count()
        )));
    }
    let n = n as usize;
    if omega == 0 || root >= n as u64 {
        return Err(corrupt("bad sample count or root"));
    }
    let root = root as usize;
    let mode = match r.u8()? {
        0 => MaintenanceMode::Bsm,
        1 => MaintenanceMode::Ism,
        x => return Err(corrupt(format!("unknown mode {x}"))),
    };
    let path_tree = match r.u8()? {
        0 => PathTreePolicy::Bfs,
        1 => PathTreePolicy::Dfs,
        2 => PathTreePolicy::Wilson,
        x => return Err(corrupt(format!("unknown path policy {x}"))),
    };
    let method = match r.u8()? {
        0 => Method::Naive,
        1 => Method::Optimized,
        x => return Err(corrupt(format!("unknown method {x}"))),
    };
    let update_count = r.u64()?;
    if r.u64()? != fingerprint(&graph) {
        return Err(corrupt("graph does not match the one the index was built for"));
    }
    let expected = (omega as u128) * (8 * n as u128 + 24);
    if expected + 8 * n as u128 != (bytes.len() - r.pos) as u128 {
        return Err(corrupt("file length does not match the header"));
    }
    let tree = RootedTree::from_parents(&graph, root, r.parents(n)?)
        .map_err(|e| corrupt(format!("reference tree: {e}")))?;
    let mut samples = Vec::with_capacity(omega as usize);
    for i in 0..omega {
        let parents = r.parents(n)?;
        RootedTree::from_parents(&graph, root, parents.clone()).map_err(|e| corrupt(format!("sample {i}: {e}")))?;
        let f = i128::from_le_bytes(r.array()?);
        let weight = f64::from_le_bytes(r.array()?);
        if !(weight > 0.0 && weight.is_finite()) {
            return Err(corrupt(format!("sample {i} has weight {weight}")));
        }
        samples.push(SampleRecord {
            tree: CompactTree::from_parents(&parents),
            f,
            weight,
        });
    }
    let eccentricity = graph.eccentricity_from(root);
    Ok(SampleStore {
        reference: Reference {
            root,
            tree,
            eccentricity,
            method,
        },
        graph,
        samples,
        seed,
        mode,
        update_count,
        path_tree,
        threads: None,
    })
}
