//! Simple undirected graphs in compressed adjacency form.
//!
//! Node ids are contiguous in `0..n`. Each node also carries the integer
//! label it had in the source file so results can be reported in the
//! caller's id space.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::io::{BufRead, Write};

use crate::error::{Error, Result};

/// Undirected edge with `u < v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeRef {
    pub u: usize,
    pub v: usize,
}

impl EdgeRef {
    pub fn new(a: usize, b: usize) -> Result<Self> {
        if a == b {
            return Err(Error::InvalidEdge(a, b));
        }
        Ok(EdgeRef {
            u: a.min(b),
            v: a.max(b),
        })
    }

    pub fn contains(&self, x: usize) -> bool {
        self.u == x || self.v == x
    }
}

/// Immutable simple undirected graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    neighbors: Vec<usize>,
    labels: Vec<u64>,
}

/// Result of reading an edge list.
#[derive(Debug, Clone)]
pub struct ParsedGraph {
    pub graph: Graph,
    pub self_loops_dropped: usize,
    pub duplicates_dropped: usize,
}

impl Graph {
    /// Builds a graph on `n` nodes labelled `0..n` from an edge iterator.
    /// Duplicate edges (in either orientation) are rejected.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut lists = vec![Vec::new(); n];
        for (a, b) in edges {
            if a == b || a >= n || b >= n {
                return Err(Error::InvalidEdge(a, b));
            }
            lists[a].push(b);
            lists[b].push(a);
        }
        for (u, list) in lists.iter_mut().enumerate() {
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::DuplicateEdge(u.min(w[0]), u.max(w[0])));
            }
        }
        Ok(Self::from_sorted_lists(lists, (0..n as u64).collect()))
    }

    fn from_sorted_lists(lists: Vec<Vec<usize>>, labels: Vec<u64>) -> Self {
        let mut offsets = Vec::with_capacity(lists.len() + 1);
        offsets.push(0);
        let total: usize = lists.iter().map(Vec::len).sum();
        let mut neighbors = Vec::with_capacity(total);
        for list in lists {
            neighbors.extend_from_slice(&list);
            offsets.push(neighbors.len());
        }
        Graph {
            offsets,
            neighbors,
            labels,
        }
    }

    /// Replaces the node labels. `labels.len()` must equal the node count.
    pub fn with_labels(mut self, labels: Vec<u64>) -> Result<Self> {
        if labels.len() != self.node_count() {
            return Err(Error::invalid("label count differs from node count"));
        }
        self.labels = labels;
        Ok(self)
    }

    /// Reads a whitespace-separated edge list.
    ///
    /// Lines starting with `#` or `%` and blank lines are skipped. Only the
    /// first two columns are read. Ids are remapped to `0..n` in ascending
    /// label order.
    pub fn parse_edge_list<R: BufRead>(reader: R) -> Result<ParsedGraph> {
        let mut raw = Vec::new();
        let mut self_loops = 0usize;
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with('%') {
                continue;
            }
            let mut tokens = trimmed.split_whitespace();
            let next_id = |tokens: &mut std::str::SplitWhitespace| -> Result<u64> {
                let tok = tokens.next().ok_or_else(|| Error::Parse {
                    line: idx + 1,
                    message: "expected two node ids".into(),
                })?;
                tok.parse::<u64>().map_err(|_| Error::Parse {
                    line: idx + 1,
                    message: format!("malformed node id {tok:?}"),
                })
            };
            let a = next_id(&mut tokens)?;
            let b = next_id(&mut tokens)?;
            if a == b {
                self_loops += 1;
                continue;
            }
            raw.push((a.min(b), a.max(b)));
        }
        let before = raw.len();
        raw.sort_unstable();
        raw.dedup();
        let duplicates = before - raw.len();
        if raw.is_empty() {
            return Err(Error::EmptyGraph);
        }
        if self_loops > 0 {
            log::warn!("dropped {self_loops} self-loop(s) while parsing");
        }

        let labels: Vec<u64> = raw
            .iter()
            .flat_map(|&(a, b)| [a, b])
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let index: HashMap<u64, usize> = labels.iter().enumerate().map(|(i, &l)| (l, i)).collect();
        let graph = Graph::from_edges(labels.len(), raw.iter().map(|(a, b)| (index[a], index[b])))?
            .with_labels(labels)?;
        Ok(ParsedGraph {
            graph,
            self_loops_dropped: self_loops,
            duplicates_dropped: duplicates,
        })
    }

    /// Writes the graph as `label_u label_v` lines, one per edge.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> Result<()> {
        for e in self.edges() {
            writeln!(out, "{} {}", self.labels[e.u], self.labels[e.v])?;
        }
        Ok(())
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.neighbors.len() / 2
    }

    /// `2m`, the total volume.
    #[inline]
    pub fn volume(&self) -> u64 {
        self.neighbors.len() as u64
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    /// Sorted neighbor ids of `v`.
    #[inline]
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.node_count() && v < self.node_count() && self.neighbors(u).binary_search(&v).is_ok()
    }

    pub fn labels(&self) -> &[u64] {
        &self.labels
    }

    pub fn label(&self, v: usize) -> u64 {
        self.labels[v]
    }

    /// Map from label back to node id.
    pub fn label_index(&self) -> HashMap<u64, usize> {
        self.labels.iter().enumerate().map(|(i, &l)| (l, i)).collect()
    }

    pub fn max_degree_node(&self) -> usize {
        // ties go to the smallest id
        (0..self.node_count())
            .max_by_key(|&v| (self.degree(v), std::cmp::Reverse(v)))
            .unwrap_or(0)
    }

    /// Edges with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = EdgeRef> + '_ {
        (0..self.node_count()).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .filter(move |&&v| v > u)
                .map(move |&v| EdgeRef { u, v })
        })
    }

    /// Returns a copy with edge `(u, v)` added.
    pub fn insert_edge(&self, u: usize, v: usize) -> Result<Graph> {
        let n = self.node_count();
        if u == v || u >= n || v >= n {
            return Err(Error::InvalidEdge(u, v));
        }
        if self.has_edge(u, v) {
            return Err(Error::DuplicateEdge(u.min(v), u.max(v)));
        }
        Ok(self.rebuild_with(|x, list| {
            if x == u {
                insert_sorted(list, v);
            } else if x == v {
                insert_sorted(list, u);
            }
        }))
    }

    /// Returns a copy with edge `(u, v)` removed. Fails if the edge is
    /// missing or is a bridge.
    pub fn delete_edge(&self, u: usize, v: usize) -> Result<Graph> {
        if !self.has_edge(u, v) {
            return Err(Error::EdgeNotFound(u.min(v), u.max(v)));
        }
        if !self.reachable_avoiding(u, v) {
            return Err(Error::ConnectivityViolation(u.min(v), u.max(v)));
        }
        Ok(self.rebuild_with(|x, list| {
            if x == u {
                list.retain(|&y| y != v);
            } else if x == v {
                list.retain(|&y| y != u);
            }
        }))
    }

    fn rebuild_with(&self, mut edit: impl FnMut(usize, &mut Vec<usize>)) -> Graph {
        let lists = (0..self.node_count())
            .map(|x| {
                let mut list = self.neighbors(x).to_vec();
                edit(x, &mut list);
                list
            })
            .collect();
        Graph::from_sorted_lists(lists, self.labels.clone())
    }

    /// BFS from `u` that ignores the edge `(u, v)`; true if `v` is reached.
    fn reachable_avoiding(&self, u: usize, v: usize) -> bool {
        let mut seen = vec![false; self.node_count()];
        let mut queue = VecDeque::from([u]);
        seen[u] = true;
        while let Some(x) = queue.pop_front() {
            for &y in self.neighbors(x) {
                if (x == u && y == v) || (x == v && y == u) || seen[y] {
                    continue;
                }
                if y == v {
                    return true;
                }
                seen[y] = true;
                queue.push_back(y);
            }
        }
        false
    }

    /// BFS distances from `source`; unreachable nodes get `usize::MAX`.
    pub fn bfs_distances(&self, source: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.node_count()];
        let mut queue = VecDeque::from([source]);
        dist[source] = 0;
        while let Some(x) = queue.pop_front() {
            for &y in self.neighbors(x) {
                if dist[y] == usize::MAX {
                    dist[y] = dist[x] + 1;
                    queue.push_back(y);
                }
            }
        }
        dist
    }

    /// Largest BFS layer index reached from `r`.
    pub fn eccentricity_from(&self, r: usize) -> usize {
        self.bfs_distances(r)
            .into_iter()
            .filter(|&d| d != usize::MAX)
            .max()
            .unwrap_or(0)
    }

    pub fn is_connected(&self) -> bool {
        self.node_count() <= 1 || self.bfs_distances(0).iter().all(|&d| d != usize::MAX)
    }

    /// Component id per node, numbered in order of smallest member.
    pub fn components(&self) -> (usize, Vec<usize>) {
        let n = self.node_count();
        let mut comp = vec![usize::MAX; n];
        let mut count = 0;
        for s in 0..n {
            if comp[s] != usize::MAX {
                continue;
            }
            comp[s] = count;
            let mut stack = vec![s];
            while let Some(x) = stack.pop() {
                for &y in self.neighbors(x) {
                    if comp[y] == usize::MAX {
                        comp[y] = count;
                        stack.push(y);
                    }
                }
            }
            count += 1;
        }
        (count, comp)
    }

    /// Extracts the largest connected component.
    ///
    /// Ties are broken by the smallest original label in the component. The
    /// returned map sends old node ids to new ones (`None` when dropped).
    pub fn largest_connected_component(&self) -> (Graph, Vec<Option<usize>>) {
        let (count, comp) = self.components();
        let mut size = vec![0usize; count];
        let mut min_label = vec![u64::MAX; count];
        for (v, &c) in comp.iter().enumerate() {
            size[c] += 1;
            min_label[c] = min_label[c].min(self.labels[v]);
        }
        let best = (0..count)
            .max_by_key(|&c| (size[c], std::cmp::Reverse(min_label[c])))
            .unwrap_or(0);

        let mut map = vec![None; self.node_count()];
        let mut labels = Vec::with_capacity(size.get(best).copied().unwrap_or(0));
        for v in 0..self.node_count() {
            if comp[v] == best {
                map[v] = Some(labels.len());
                labels.push(self.labels[v]);
            }
        }
        let lists = (0..self.node_count())
            .filter(|&v| comp[v] == best)
            .map(|v| self.neighbors(v).iter().map(|&y| map[y].unwrap()).collect())
            .collect();
        (Graph::from_sorted_lists(lists, labels), map)
    }

    /// All bridges, found with an iterative low-link DFS.
    pub fn bridges(&self) -> Vec<EdgeRef> {
        let n = self.node_count();
        let mut disc = vec![usize::MAX; n];
        let mut low = vec![0usize; n];
        let mut out = Vec::new();
        let mut time = 0;
        for s in 0..n {
            if disc[s] != usize::MAX {
                continue;
            }
            // (node, parent, next neighbor slot)
            let mut stack = vec![(s, usize::MAX, 0usize)];
            disc[s] = time;
            low[s] = time;
            time += 1;
            while let Some(&mut (x, parent, ref mut slot)) = stack.last_mut() {
                let nbrs = self.neighbors(x);
                if *slot < nbrs.len() {
                    let y = nbrs[*slot];
                    *slot += 1;
                    if y == parent {
                        continue;
                    }
                    if disc[y] == usize::MAX {
                        disc[y] = time;
                        low[y] = time;
                        time += 1;
                        stack.push((y, x, 0));
                    } else {
                        low[x] = low[x].min(disc[y]);
                    }
                } else {
                    stack.pop();
                    if parent != usize::MAX {
                        low[parent] = low[parent].min(low[x]);
                        if low[x] > disc[parent] {
                            out.push(EdgeRef::new(x, parent).unwrap());
                        }
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }
}

fn insert_sorted(list: &mut Vec<usize>, x: usize) {
    let pos = list.binary_search(&x).unwrap_or_else(|p| p);
    list.insert(pos, x);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate;

    fn parse(text: &str) -> Result<ParsedGraph> {
        Graph::parse_edge_list(text.as_bytes())
    }

    fn degree_sum(g: &Graph) -> usize {
        (0..g.node_count()).map(|v| g.degree(v)).sum()
    }

    #[test]
    fn parses_triangle() {
        let g = parse("0 1\n1 2\n0 2").unwrap().graph;
        assert_eq!((g.node_count(), g.edge_count()), (3, 3));
    }

    #[test]
    fn collapses_duplicates_in_either_orientation() {
        let p = parse("0 1\n0 1\n1 0").unwrap();
        assert_eq!((p.graph.node_count(), p.graph.edge_count()), (2, 1));
        assert_eq!(p.duplicates_dropped, 2);
    }

    #[test]
    fn remaps_ids_and_skips_comments() {
        let g = parse("# comment\n5 9").unwrap().graph;
        assert_eq!((g.node_count(), g.edge_count()), (2, 1));
        assert_eq!(g.labels(), &[5, 9]);
        assert!(g.has_edge(0, 1));
        let g = parse("% konect header\n3\t7\n").unwrap().graph;
        assert_eq!(g.labels(), &[3, 7]);
    }

    #[test]
    fn self_loops_are_counted_and_dropped() {
        let p = parse("0 0\n0 1\n").unwrap();
        assert_eq!(p.self_loops_dropped, 1);
        assert_eq!(p.graph.edge_count(), 1);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        match parse("0 1\n1 x\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse("0 1\n7\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse("# nothing\n3 3\n"), Err(Error::EmptyGraph)));
    }

    #[test]
    fn lcc_breaks_ties_by_smallest_label() {
        let g = parse("0 1\n1 2\n0 2\n3 4\n4 5\n3 5").unwrap().graph;
        let (lcc, map) = g.largest_connected_component();
        assert_eq!((lcc.node_count(), lcc.edge_count()), (3, 3));
        assert_eq!(lcc.labels(), &[0, 1, 2]);
        assert_eq!(map[3], None);
    }

    #[test]
    fn lcc_of_connected_graph_is_identity() {
        let g = generate::path(3);
        let (lcc, map) = g.largest_connected_component();
        assert_eq!(lcc, g);
        assert_eq!(map, vec![Some(0), Some(1), Some(2)]);
    }

    #[test]
    fn lcc_prefers_larger_component() {
        let g = parse("10 11\n0 1\n0 2\n0 3\n1 2\n1 3\n2 3").unwrap().graph;
        let (lcc, _) = g.largest_connected_component();
        assert_eq!((lcc.node_count(), lcc.edge_count()), (4, 6));
    }

    #[test]
    fn deletion_rules() {
        let k3 = generate::complete(3);
        let p3 = k3.delete_edge(0, 1).unwrap();
        assert_eq!(p3.edge_count(), 2);
        assert!(p3.is_connected());
        let path = generate::path(3);
        assert!(matches!(path.delete_edge(0, 1), Err(Error::ConnectivityViolation(0, 1))));
        assert!(matches!(path.delete_edge(0, 2), Err(Error::EdgeNotFound(0, 2))));
        let k4 = generate::complete(4);
        for e in k4.edges() {
            let g = k4.delete_edge(e.u, e.v).unwrap();
            assert_eq!(g.edge_count(), 5);
            assert!(g.is_connected());
        }
    }

    #[test]
    fn insertion_rules() {
        let p3 = generate::path(3);
        let k3 = p3.insert_edge(2, 0).unwrap();
        assert_eq!(k3, generate::complete(3));
        assert!(matches!(k3.insert_edge(0, 1), Err(Error::DuplicateEdge(0, 1))));
        assert!(matches!(k3.insert_edge(1, 1), Err(Error::InvalidEdge(1, 1))));
        assert_eq!(degree_sum(&k3), 2 * k3.edge_count());
    }

    #[test]
    fn eccentricity_examples() {
        let p3 = generate::path(3);
        assert_eq!(p3.eccentricity_from(1), 1);
        assert_eq!(p3.eccentricity_from(0), 2);
        let k6 = generate::complete(6);
        assert!((0..6).all(|v| k6.eccentricity_from(v) == 1));
    }

    #[test]
    fn bridges_of_small_graphs() {
        assert_eq!(generate::complete(4).bridges(), vec![]);
        assert_eq!(generate::path(4).bridges().len(), 3);
        // triangle with a pendant edge
        let g = Graph::from_edges(4, [(0, 1), (1, 2), (0, 2), (2, 3)]).unwrap();
        assert_eq!(g.bridges(), vec![EdgeRef { u: 2, v: 3 }]);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;
        use rand::SeedableRng;

        proptest! {
            #[test]
            fn edge_list_round_trip(seed in 0u64..500, n in 2usize..30) {
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
                let g = generate::random_connected(n, 0.2, &mut rng);
                let g = g.with_labels((0..n as u64).map(|l| l * 3 + 1).collect()).unwrap();
                let mut buf = Vec::new();
                g.write_edge_list(&mut buf).unwrap();
                let again = Graph::parse_edge_list(buf.as_slice()).unwrap().graph;
                prop_assert_eq!(again, g);
            }

            #[test]
            fn insert_then_delete_is_identity(seed in 0u64..500, n in 3usize..20) {
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
                let g = generate::random_connected(n, 0.3, &mut rng);
                let missing: Vec<_> = (0..n)
                    .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
                    .filter(|&(u, v)| !g.has_edge(u, v))
                    .collect();
                prop_assume!(!missing.is_empty());
                let (u, v) = missing[seed as usize % missing.len()];
                let bigger = g.insert_edge(u, v).unwrap();
                prop_assert_eq!(degree_sum(&bigger), 2 * bigger.edge_count());
                prop_assert_eq!(bigger.delete_edge(v, u).unwrap(), g);
            }
        }
    }
}
