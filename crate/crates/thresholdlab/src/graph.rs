//! Immutable simple undirected graphs with canonical serialization.
//!
//! `Graph` is the universal currency of the crate: cores, cherry graphs,
//! random hosts and pattern subgraphs are all plain `Graph` values. Edges are
//! stored canonically (each pair `(u, w)` with `u < w`, sorted
//! lexicographically), so equal graphs serialize to identical bytes.

use std::collections::HashSet;
use std::fmt;

use crate::{Error, Result};

/// Immutable simple undirected graph on vertices `0..vertex_count`.
///
/// Adjacency is kept both as sorted neighbor lists (driving the backtracking
/// enumerator) and as a pair-hash set for O(1) edge queries.
#[derive(Clone)]
pub struct Graph {
    vertex_count: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
    edge_set: HashSet<(usize, usize)>,
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.vertex_count == other.vertex_count && self.edges == other.edges
    }
}

impl Eq for Graph {}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph(v={}, e={:?})", self.vertex_count, self.edges)
    }
}

impl Graph {
    /// Builds a graph, validating simplicity and vertex ranges.
    ///
    /// Edge pairs may be given in any order and orientation; they are
    /// normalized to the canonical form. Self-loops, parallel edges and
    /// out-of-range endpoints are rejected.
    pub fn new(vertex_count: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut normalized: Vec<(usize, usize)> = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            if a == b {
                return Err(Error::InvalidInput(format!("self-loop at vertex {a}")));
            }
            if a >= vertex_count || b >= vertex_count {
                return Err(Error::InvalidInput(format!(
                    "edge ({a},{b}) has endpoint >= vertex count {vertex_count}"
                )));
            }
            normalized.push((a.min(b), a.max(b)));
        }
        normalized.sort_unstable();
        if normalized.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidInput("parallel edge".into()));
        }
        Ok(Self::from_canonical(vertex_count, normalized))
    }

    /// Internal constructor for edges already canonical (sorted, `u < w`, deduped).
    pub(crate) fn from_canonical(vertex_count: usize, edges: Vec<(usize, usize)>) -> Self {
        let mut adj = vec![Vec::new(); vertex_count];
        let mut edge_set = HashSet::with_capacity(edges.len());
        for &(u, w) in &edges {
            adj[u].push(w);
            adj[w].push(u);
            edge_set.insert((u, w));
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Graph {
            vertex_count,
            edges,
            adj,
            edge_set,
        }
    }

    pub fn empty(vertex_count: usize) -> Self {
        Self::from_canonical(vertex_count, Vec::new())
    }

    pub fn complete(vertex_count: usize) -> Self {
        let mut edges = Vec::new();
        for u in 0..vertex_count {
            for w in (u + 1)..vertex_count {
                edges.push((u, w));
            }
        }
        Self::from_canonical(vertex_count, edges)
    }

    /// Path on `vertex_count` vertices (`vertex_count - 1` edges).
    pub fn path(vertex_count: usize) -> Self {
        let edges: Vec<_> = (0..vertex_count.saturating_sub(1)).map(|i| (i, i + 1)).collect();
        Self::from_canonical(vertex_count, edges)
    }

    /// Cycle on `vertex_count >= 3` vertices.
    pub fn cycle(vertex_count: usize) -> Self {
        assert!(vertex_count >= 3, "cycle needs at least 3 vertices");
        let mut edges: Vec<(usize, usize)> =
            (0..vertex_count - 1).map(|i| (i, i + 1)).collect();
        edges.push((0, vertex_count - 1));
        edges.sort_unstable();
        Self::from_canonical(vertex_count, edges)
    }

    /// Star with `leaves` leaves: vertex 0 is the center.
    pub fn star(leaves: usize) -> Self {
        let edges: Vec<_> = (1..=leaves).map(|w| (0, w)).collect();
        Self::from_canonical(leaves + 1, edges)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Canonical edge list: pairs `(u, w)` with `u < w`, lexicographically sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Sorted neighbor list of `v`.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edge_set.contains(&(a.min(b), a.max(b)))
    }

    pub fn is_regular(&self, degree: usize) -> bool {
        (0..self.vertex_count).all(|v| self.degree(v) == degree)
    }

    /// Vertices with degree zero.
    pub fn isolated_vertices(&self) -> Vec<usize> {
        (0..self.vertex_count).filter(|&v| self.degree(v) == 0).collect()
    }

    /// Induced subgraph on the vertex set `w`, relabeled to `0..w.len()` in
    /// ascending order of original ids. Returns the graph together with the
    /// relabeling map (`map[new_id] = old_id`).
    pub fn induced_subgraph(&self, w: &[usize]) -> Result<(Graph, Vec<usize>)> {
        let mut sorted = w.to_vec();
        sorted.sort_unstable();
        if sorted.windows(2).any(|p| p[0] == p[1]) {
            return Err(Error::InvalidInput("duplicate vertex in induced set".into()));
        }
        if let Some(&v) = sorted.iter().find(|&&v| v >= self.vertex_count) {
            return Err(Error::InvalidInput(format!(
                "vertex {v} out of range (vertex count {})",
                self.vertex_count
            )));
        }
        let mut position = vec![usize::MAX; self.vertex_count];
        for (new, &old) in sorted.iter().enumerate() {
            position[old] = new;
        }
        let mut edges = Vec::new();
        for (new_u, &old_u) in sorted.iter().enumerate() {
            for &old_w in self.neighbors(old_u) {
                if old_w > old_u && position[old_w] != usize::MAX {
                    edges.push((new_u, position[old_w]));
                }
            }
        }
        edges.sort_unstable();
        Ok((Graph::from_canonical(sorted.len(), edges), sorted))
    }

    /// Connected components as relabeled graphs, each with its back-map
    /// (`map[new_id] = old_id`). Components are ordered by smallest original
    /// vertex id.
    pub fn connected_components(&self) -> Vec<(Graph, Vec<usize>)> {
        let mut seen = vec![false; self.vertex_count];
        let mut out = Vec::new();
        for start in 0..self.vertex_count {
            if seen[start] {
                continue;
            }
            let mut stack = vec![start];
            let mut members = Vec::new();
            seen[start] = true;
            while let Some(v) = stack.pop() {
                members.push(v);
                for &w in self.neighbors(v) {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
            members.sort_unstable();
            let (g, map) = self
                .induced_subgraph(&members)
                .expect("component vertices are valid");
            out.push((g, map));
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.vertex_count == 0 || self.connected_components().len() == 1
    }

    /// Applies a vertex relabeling: vertex `v` becomes `perm[v]`.
    /// `perm` must be a permutation of `0..vertex_count`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Graph> {
        if perm.len() != self.vertex_count {
            return Err(Error::InvalidInput("permutation length mismatch".into()));
        }
        let mut seen = vec![false; self.vertex_count];
        for &p in perm {
            if p >= self.vertex_count || seen[p] {
                return Err(Error::InvalidInput("not a permutation".into()));
            }
            seen[p] = true;
        }
        let edges: Vec<_> = self.edges.iter().map(|&(u, w)| (perm[u], perm[w])).collect();
        Graph::new(self.vertex_count, &edges)
    }

    /// The disjoint union of `self` and `other` (vertices of `other` shifted).
    pub fn disjoint_union(&self, other: &Graph) -> Graph {
        let shift = self.vertex_count;
        let mut edges = self.edges.clone();
        edges.extend(other.edges.iter().map(|&(u, w)| (u + shift, w + shift)));
        edges.sort_unstable();
        Graph::from_canonical(self.vertex_count + other.vertex_count, edges)
    }

    /// Canonical edge-list text format.
    ///
    /// Line 1 is `"v e"`, followed by `e` lines `"u w"` with `u < w`, sorted
    /// lexicographically, all 0-indexed. Parsing this output reproduces the
    /// exact bytes (round-trips are byte-identical).
    pub fn to_edge_list_string(&self) -> String {
        let mut s = String::with_capacity(8 + 8 * self.edges.len());
        s.push_str(&format!("{} {}\n", self.vertex_count, self.edges.len()));
        for &(u, w) in &self.edges {
            s.push_str(&format!("{u} {w}\n"));
        }
        s
    }

    /// Parses the canonical edge-list format. The input must already be
    /// canonical (`u < w`, lexicographically sorted, no duplicates); anything
    /// else is rejected so that parse/serialize round-trips byte-identically.
    pub fn from_edge_list_str(text: &str) -> Result<Graph> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::InvalidInput("empty edge list".into()))?;
        let mut parts = header.split_whitespace();
        let v: usize = parse_field(parts.next(), "vertex count")?;
        let e: usize = parse_field(parts.next(), "edge count")?;
        if parts.next().is_some() {
            return Err(Error::InvalidInput("trailing tokens on header line".into()));
        }
        let mut edges = Vec::with_capacity(e);
        for _ in 0..e {
            let line = lines
                .next()
                .ok_or_else(|| Error::InvalidInput("fewer edge lines than declared".into()))?;
            let mut parts = line.split_whitespace();
            let u: usize = parse_field(parts.next(), "edge endpoint")?;
            let w: usize = parse_field(parts.next(), "edge endpoint")?;
            if parts.next().is_some() {
                return Err(Error::InvalidInput("trailing tokens on edge line".into()));
            }
            if u >= w {
                return Err(Error::InvalidInput(format!(
                    "edge ({u},{w}) not in canonical order u < w"
                )));
            }
            if v <= w {
                return Err(Error::InvalidInput(format!(
                    "edge ({u},{w}) has endpoint >= vertex count {v}"
                )));
            }
            if let Some(&last) = edges.last() {
                if last >= (u, w) {
                    return Err(Error::InvalidInput(
                        "edges not sorted lexicographically or duplicated".into(),
                    ));
                }
            }
            edges.push((u, w));
        }
        if lines.next().is_some() {
            return Err(Error::InvalidInput("more edge lines than declared".into()));
        }
        Ok(Graph::from_canonical(v, edges))
    }
}

fn parse_field(tok: Option<&str>, what: &str) -> Result<usize> {
    tok.ok_or_else(|| Error::InvalidInput(format!("missing {what}")))?
        .parse()
        .map_err(|_| Error::InvalidInput(format!("malformed {what}")))
}

// Graphs serialize as their canonical edge-list text, which keeps JSON
// reports compact and diffable.
impl serde::Serialize for Graph {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_edge_list_string())
    }
}

impl<'de> serde::Deserialize<'de> for Graph {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        Graph::from_edge_list_str(&text).map_err(serde::de::Error::custom)
    }
}
