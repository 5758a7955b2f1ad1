//! Random 4-regular cores and the cherry augmentation.
//!
//! The construction takes a 4-regular graph `F` on `t` vertices and, for
//! every pair of core vertices, attaches one new degree-2 vertex adjacent to
//! both endpoints of the pair. The result `H` has `t + C(t,2)` vertices and
//! twice as many edges as vertices.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::graph::Graph;
use crate::{Error, Result};

/// A cherry-augmented graph together with its provenance: the core size `t`
/// and the map from core pairs to their cherry vertices.
///
/// Core vertices are `0..t`; the cherry on pair `{x, y}` is vertex
/// `t + index`, where `index` is the position of `(x, y)` in lexicographic
/// pair order, so the numbering is reproducible.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CherryGraph {
    graph: Graph,
    t: usize,
    cherry_of: Vec<((usize, usize), usize)>,
}

impl CherryGraph {
    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn core_vertices(&self) -> std::ops::Range<usize> {
        0..self.t
    }

    /// Cherry vertices `t..v`, an independent set.
    pub fn cherry_vertices(&self) -> std::ops::Range<usize> {
        self.t..self.graph.vertex_count()
    }

    /// Pairs `((x, y), z)` in lexicographic pair order: `z` is the cherry on
    /// core pair `{x, y}`.
    pub fn cherry_pairs(&self) -> &[((usize, usize), usize)] {
        &self.cherry_of
    }

    pub fn cherry_vertex(&self, x: usize, y: usize) -> Option<usize> {
        let key = (x.min(y), x.max(y));
        self.cherry_of
            .binary_search_by_key(&key, |&(pair, _)| pair)
            .ok()
            .map(|i| self.cherry_of[i].1)
    }

    /// The core graph `F = H[0..t]`, relabeled onto `0..t` (identity here).
    pub fn core_graph(&self) -> Graph {
        let core: Vec<usize> = self.core_vertices().collect();
        self.graph
            .induced_subgraph(&core)
            .expect("core vertices valid")
            .0
    }

    /// Checks every structural invariant:
    /// `v = t + C(t,2)`, `e = 2v`, core degrees `t + 3`, cherry degrees 2
    /// with both neighbors in the core, the core inducing a 4-regular graph,
    /// and the cherry set being independent.
    pub fn validate(&self) -> Result<()> {
        let t = self.t;
        let v = self.graph.vertex_count();
        let expected_v = t + t * (t - 1) / 2;
        if v != expected_v {
            return Err(Error::Internal(format!(
                "vertex count {v} != t + C(t,2) = {expected_v}"
            )));
        }
        if self.graph.edge_count() != 2 * v {
            return Err(Error::Internal(format!(
                "edge count {} != 2v = {}",
                self.graph.edge_count(),
                2 * v
            )));
        }
        for x in self.core_vertices() {
            if self.graph.degree(x) != t + 3 {
                return Err(Error::Internal(format!(
                    "core vertex {x} has degree {} != t + 3",
                    self.graph.degree(x)
                )));
            }
        }
        for z in self.cherry_vertices() {
            let nbrs = self.graph.neighbors(z);
            if nbrs.len() != 2 || nbrs.iter().any(|&w| w >= t) {
                return Err(Error::Internal(format!(
                    "cherry vertex {z} must have exactly two core neighbors"
                )));
            }
        }
        if !self.core_graph().is_regular(4) {
            return Err(Error::Internal("core is not 4-regular".into()));
        }
        if self.cherry_of.len() != t * (t - 1) / 2 {
            return Err(Error::Internal("cherry map incomplete".into()));
        }
        for &((x, y), z) in &self.cherry_of {
            if !(self.graph.has_edge(x, z) && self.graph.has_edge(y, z)) {
                return Err(Error::Internal(format!(
                    "cherry {z} not adjacent to its pair ({x},{y})"
                )));
            }
        }
        // Independence of the cherry set.
        for &(u, w) in self.graph.edges() {
            if u >= t && w >= t {
                return Err(Error::Internal(format!(
                    "cherry vertices {u},{w} are adjacent"
                )));
            }
        }
        Ok(())
    }

    /// JSON sidecar carrying the provenance next to an edge-list file.
    pub fn to_sidecar(&self) -> CherrySidecar {
        CherrySidecar {
            t: self.t,
            f_edges: self.core_graph().edges().to_vec(),
            cherry_of: self
                .cherry_of
                .iter()
                .map(|&((x, y), z)| (x, y, z))
                .collect(),
        }
    }

    /// Rebuilds a `CherryGraph` from an edge list plus its sidecar,
    /// revalidating all invariants.
    pub fn from_parts(graph: Graph, sidecar: &CherrySidecar) -> Result<CherryGraph> {
        let f = Graph::new(sidecar.t, &sidecar.f_edges)?;
        let rebuilt = build_cherry_graph(&f)?;
        if rebuilt.graph != graph {
            return Err(Error::InvalidInput(
                "edge list does not match the sidecar's core".into(),
            ));
        }
        let declared: Vec<((usize, usize), usize)> = sidecar
            .cherry_of
            .iter()
            .map(|&(x, y, z)| ((x, y), z))
            .collect();
        if declared != rebuilt.cherry_of {
            return Err(Error::InvalidInput("sidecar cherry map inconsistent".into()));
        }
        rebuilt.validate()?;
        Ok(rebuilt)
    }
}

/// Sidecar JSON schema: core size, core edges, and the pair -> cherry map.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct CherrySidecar {
    pub t: usize,
    pub f_edges: Vec<(usize, usize)>,
    pub cherry_of: Vec<(usize, usize, usize)>,
}

/// Maximum number of configuration-model restarts before giving up.
pub const REGULAR_GRAPH_RESTART_CAP: u64 = 1_000_000;

/// Samples a simple `degree`-regular graph on `t` vertices via the
/// configuration model, restarting from scratch whenever the pairing
/// produces a loop or multi-edge. Deterministic given the seed.
pub fn random_regular_graph(t: usize, degree: usize, seed: u64) -> Result<Graph> {
    if degree == 0 {
        return Ok(Graph::empty(t));
    }
    if t < degree + 1 {
        return Err(Error::InvalidInput(format!(
            "no simple {degree}-regular graph on {t} vertices (need t >= degree + 1)"
        )));
    }
    if !(t * degree).is_multiple_of(2) {
        return Err(Error::InvalidInput(format!(
            "degree sum {t}*{degree} is odd"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stubs: Vec<usize> = (0..t).flat_map(|v| std::iter::repeat_n(v, degree)).collect();
    'restart: for _ in 0..REGULAR_GRAPH_RESTART_CAP {
        stubs.shuffle(&mut rng);
        let mut edges: Vec<(usize, usize)> = Vec::with_capacity(t * degree / 2);
        for pair in stubs.chunks_exact(2) {
            let (a, b) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
            if a == b {
                continue 'restart;
            }
            edges.push((a, b));
        }
        edges.sort_unstable();
        if edges.windows(2).any(|w| w[0] == w[1]) {
            continue 'restart;
        }
        return Ok(Graph::from_canonical(t, edges));
    }
    Err(Error::Generation(format!(
        "configuration model failed to produce a simple graph after {REGULAR_GRAPH_RESTART_CAP} restarts"
    )))
}

/// Builds the cherry augmentation of a 4-regular simple graph `f`.
pub fn build_cherry_graph(f: &Graph) -> Result<CherryGraph> {
    if f.vertex_count() < 5 || !f.is_regular(4) {
        return Err(Error::InvalidInput("core graph must be 4-regular".into()));
    }
    let t = f.vertex_count();
    let mut edges: Vec<(usize, usize)> = f.edges().to_vec();
    let mut cherry_of = Vec::with_capacity(t * (t - 1) / 2);
    let mut next = t;
    for x in 0..t {
        for y in (x + 1)..t {
            edges.push((x, next));
            edges.push((y, next));
            cherry_of.push(((x, y), next));
            next += 1;
        }
    }
    let graph = Graph::new(next, &edges)?;
    let cherry = CherryGraph { graph, t, cherry_of };
    cherry.validate()?;
    Ok(cherry)
}

/// Result of the exhaustive small-subgraph sparsity check: every connected
/// vertex set of size at most `max_checked_size` must induce at most as many
/// edges as vertices.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SparsityReport {
    pub max_checked_size: usize,
    pub violating_subgraph: Option<Vec<usize>>,
    pub epsilon_note: String,
}

impl SparsityReport {
    pub fn passed(&self) -> bool {
        self.violating_subgraph.is_none()
    }
}

/// Exhaustively checks `e(F[S]) <= |S|` over connected vertex subsets `S`
/// with `|S| <= max_size`, reporting the first violation in size-ascending,
/// lexicographic order. Checking connected sets suffices: in a violating set
/// of minimum size some component already violates.
pub fn check_small_subgraph_sparsity(f: &Graph, max_size: usize) -> Result<SparsityReport> {
    if max_size > f.vertex_count() {
        return Err(Error::InvalidInput(format!(
            "max_size {max_size} exceeds vertex count {}",
            f.vertex_count()
        )));
    }
    if max_size > 12 {
        return Err(Error::BudgetExceeded(
            "exhaustive sparsity check supports max_size <= 12".into(),
        ));
    }
    let note = "size cap stands in for the uninstantiated eps * log t radius".to_string();
    let mut subset = Vec::new();
    for size in 1..=max_size {
        if let Some(violation) = scan_subsets(f, size, 0, &mut subset) {
            return Ok(SparsityReport {
                max_checked_size: max_size,
                violating_subgraph: Some(violation),
                epsilon_note: note,
            });
        }
    }
    Ok(SparsityReport {
        max_checked_size: max_size,
        violating_subgraph: None,
        epsilon_note: note,
    })
}

fn scan_subsets(f: &Graph, size: usize, from: usize, subset: &mut Vec<usize>) -> Option<Vec<usize>> {
    if subset.len() == size {
        let (induced, _) = f.induced_subgraph(subset).expect("subset valid");
        if induced.is_connected() && induced.edge_count() > induced.vertex_count() {
            return Some(subset.clone());
        }
        return None;
    }
    for v in from..f.vertex_count() {
        subset.push(v);
        if let Some(hit) = scan_subsets(f, size, v + 1, subset) {
            return Some(hit);
        }
        subset.pop();
    }
    None
}
