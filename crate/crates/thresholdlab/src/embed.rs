//! Labeled-embedding enumeration and the counting primitives built on it:
//! automorphism counts, copy counts, isomorphism tests.
//!
//! A labeled copy of `pattern` in `host` is an injection from pattern
//! vertices to host vertices mapping pattern edges to host edges. The
//! enumerator backtracks over pattern vertices in a connectivity-respecting,
//! degree-descending order so that adjacency constraints prune as early as
//! possible; candidates are generated in ascending host id, which makes the
//! enumeration order deterministic.

use std::ops::ControlFlow;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::graph::Graph;
use crate::{Error, Result};

/// A labeled embedding: `map[p]` is the host vertex carrying pattern vertex `p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Embedding {
    map: Vec<usize>,
}

impl Embedding {
    /// Wraps a raw map; validity against a concrete pattern/host pair is
    /// checked separately with [`Embedding::is_valid`].
    pub fn new(map: Vec<usize>) -> Self {
        Embedding { map }
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn image_of(&self, pattern_vertex: usize) -> usize {
        self.map[pattern_vertex]
    }

    /// Sorted image vertex set.
    pub fn image_set(&self) -> Vec<usize> {
        let mut s = self.map.clone();
        s.sort_unstable();
        s
    }

    /// Checks that this is a valid embedding of `pattern` into `host`.
    pub fn is_valid(&self, pattern: &Graph, host: &Graph) -> bool {
        if self.map.len() != pattern.vertex_count() {
            return false;
        }
        let mut seen = vec![false; host.vertex_count()];
        for &img in &self.map {
            if img >= host.vertex_count() || seen[img] {
                return false;
            }
            seen[img] = true;
        }
        pattern
            .edges()
            .iter()
            .all(|&(u, w)| host.has_edge(self.map[u], self.map[w]))
    }
}

/// Result of `enumerate_embeddings`: the embeddings found, plus a flag set
/// when a `limit` cut the enumeration short.
#[derive(Clone, Debug)]
pub struct EmbeddingList {
    pub embeddings: Vec<Embedding>,
    pub truncated: bool,
}

/// Pattern-vertex visit order: start from a maximum-degree vertex, then
/// repeatedly take the highest-degree vertex adjacent to the chosen prefix
/// (ties broken by smallest id); exhausted components are followed by the
/// next unvisited maximum-degree vertex. Isolated vertices come last.
pub fn default_order(pattern: &Graph) -> Vec<usize> {
    let n = pattern.vertex_count();
    let mut order = Vec::with_capacity(n);
    let mut chosen = vec![false; n];
    let mut frontier_deg = vec![0usize; n];
    while order.len() < n {
        // Prefer vertices attached to the prefix; fall back to a fresh start.
        let next = (0..n)
            .filter(|&v| !chosen[v] && frontier_deg[v] > 0)
            .max_by_key(|&v| (pattern.degree(v), std::cmp::Reverse(v)))
            .or_else(|| {
                (0..n)
                    .filter(|&v| !chosen[v])
                    .max_by_key(|&v| (pattern.degree(v), std::cmp::Reverse(v)))
            })
            .expect("unvisited vertex exists");
        chosen[next] = true;
        order.push(next);
        for &w in pattern.neighbors(next) {
            if !chosen[w] {
                frontier_deg[w] += 1;
            }
        }
    }
    order
}

struct Search<'a, F> {
    pattern: &'a Graph,
    host: &'a Graph,
    order: &'a [usize],
    // For order position i, the positions < i holding pattern-neighbors of order[i].
    mapped_neighbors: Vec<Vec<usize>>,
    assignment: Vec<usize>, // by order position
    used: Vec<bool>,
    nodes: u64,
    budget: u64,
    exhausted_budget: bool,
    callback: F,
}

impl<'a, F> Search<'a, F>
where
    F: FnMut(&[usize]) -> ControlFlow<()>,
{
    fn candidate_ok(&self, pos: usize, hv: usize) -> bool {
        if self.used[hv] {
            return false;
        }
        let pv = self.order[pos];
        if self.host.degree(hv) < self.pattern.degree(pv) {
            return false;
        }
        self.mapped_neighbors[pos]
            .iter()
            .all(|&earlier| self.host.has_edge(self.assignment[earlier], hv))
    }

    fn step(&mut self, pos: usize, hv: usize) -> ControlFlow<()> {
        self.nodes += 1;
        if self.nodes > self.budget {
            self.exhausted_budget = true;
            return ControlFlow::Break(());
        }
        if !self.candidate_ok(pos, hv) {
            return ControlFlow::Continue(());
        }
        self.assignment[pos] = hv;
        self.used[hv] = true;
        let flow = self.run(pos + 1);
        self.used[hv] = false;
        flow
    }

    /// Returns `Break` when the callback stopped the search.
    fn run(&mut self, pos: usize) -> ControlFlow<()> {
        if pos == self.order.len() {
            let mut map = vec![0usize; self.order.len()];
            for (p, &pv) in self.order.iter().enumerate() {
                map[pv] = self.assignment[p];
            }
            return (self.callback)(&map);
        }
        // Drive candidates off the mapped neighbor whose image has the
        // fewest host neighbors; scan all host vertices only when the
        // prefix is disconnected from this vertex.
        let host = self.host;
        let anchor = self.mapped_neighbors[pos]
            .iter()
            .copied()
            .min_by_key(|&earlier| host.degree(self.assignment[earlier]));
        match anchor {
            Some(earlier) => {
                let nbrs = host.neighbors(self.assignment[earlier]);
                for &hv in nbrs {
                    self.step(pos, hv)?;
                }
            }
            None => {
                for hv in 0..host.vertex_count() {
                    self.step(pos, hv)?;
                }
            }
        }
        ControlFlow::Continue(())
    }
}

/// Visits every labeled embedding of `pattern` into `host` once, in the
/// deterministic order induced by `order` (a permutation of the pattern
/// vertices) and ascending host candidates. The callback may stop the search
/// early with `ControlFlow::Break`.
///
/// Returns `Ok(complete)` where `complete` is false only if the callback
/// broke; exceeding `budget` backtracking nodes is an error.
pub fn visit_embeddings_in_order(
    pattern: &Graph,
    host: &Graph,
    order: &[usize],
    budget: u64,
    callback: impl FnMut(&[usize]) -> ControlFlow<()>,
) -> Result<bool> {
    assert_eq!(order.len(), pattern.vertex_count(), "order must cover the pattern");
    if pattern.vertex_count() > host.vertex_count() {
        return Ok(true); // no injection exists
    }
    let mapped_neighbors: Vec<Vec<usize>> = order
        .iter()
        .enumerate()
        .map(|(pos, &pv)| {
            (0..pos)
                .filter(|&earlier| pattern.has_edge(order[earlier], pv))
                .collect()
        })
        .collect();
    let mut search = Search {
        pattern,
        host,
        order,
        mapped_neighbors,
        assignment: vec![usize::MAX; order.len()],
        used: vec![false; host.vertex_count()],
        nodes: 0,
        budget,
        exhausted_budget: false,
        callback,
    };
    let flow = search.run(0);
    if search.exhausted_budget {
        return Err(Error::BudgetExceeded(format!(
            "embedding enumeration exceeded {budget} backtracking nodes"
        )));
    }
    Ok(flow.is_continue())
}

pub const DEFAULT_ENUMERATION_BUDGET: u64 = 100_000_000;

/// All labeled embeddings of `pattern` into `host`, each exactly once, in
/// deterministic order. With `limit = Some(k)` enumeration stops after `k`
/// embeddings and the result is flagged truncated.
pub fn enumerate_embeddings(
    pattern: &Graph,
    host: &Graph,
    limit: Option<usize>,
) -> Result<EmbeddingList> {
    let order = default_order(pattern);
    let mut embeddings = Vec::new();
    let complete = visit_embeddings_in_order(
        pattern,
        host,
        &order,
        DEFAULT_ENUMERATION_BUDGET,
        |map| {
            embeddings.push(Embedding { map: map.to_vec() });
            match limit {
                Some(k) if embeddings.len() >= k => ControlFlow::Break(()),
                _ => ControlFlow::Continue(()),
            }
        },
    )?;
    Ok(EmbeddingList {
        embeddings,
        truncated: !complete,
    })
}

/// `n (n-1) ... (n-k+1)` as a big integer.
pub fn falling_factorial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= BigUint::from(n - i);
    }
    acc
}

/// Counts labeled embeddings of `pattern` into `host` exactly.
///
/// Isolated pattern vertices are not enumerated: the embedding count of the
/// isolated-vertex-free part is multiplied by the falling factorial of the
/// remaining host vertices, which avoids a factorial blowup for patterns
/// with many isolated vertices.
pub fn count_embeddings_with_budget(
    pattern: &Graph,
    host: &Graph,
    budget: u64,
) -> Result<BigUint> {
    let isolated = pattern.isolated_vertices();
    let core_vertices: Vec<usize> = (0..pattern.vertex_count())
        .filter(|v| pattern.degree(*v) > 0)
        .collect();
    if pattern.vertex_count() > host.vertex_count() {
        return Ok(BigUint::zero());
    }
    let (core, _) = pattern.induced_subgraph(&core_vertices)?;
    let order = default_order(&core);
    let mut count: u64 = 0;
    visit_embeddings_in_order(&core, host, &order, budget, |_| {
        count += 1;
        ControlFlow::Continue(())
    })?;
    let placements = falling_factorial(host.vertex_count() - core.vertex_count(), isolated.len());
    Ok(BigUint::from(count) * placements)
}

pub fn count_embeddings(pattern: &Graph, host: &Graph) -> Result<BigUint> {
    count_embeddings_with_budget(pattern, host, u64::MAX)
}

/// Number of automorphisms of `g`: labeled embeddings of `g` into itself.
/// Every such embedding is bijective, hence edge-surjective, hence an
/// automorphism.
pub fn count_automorphisms(g: &Graph) -> BigUint {
    count_embeddings(g, g).expect("self-embedding enumeration has no budget")
}

/// Number of (unlabeled) copies of `pattern` in `host`:
/// labeled embeddings divided by `aut(pattern)`. The division is exact; a
/// nonzero remainder indicates an enumerator bug and is reported as an
/// internal error.
pub fn count_copies(host: &Graph, pattern: &Graph) -> Result<BigUint> {
    count_copies_with_budget(host, pattern, u64::MAX)
}

pub fn count_copies_with_budget(host: &Graph, pattern: &Graph, budget: u64) -> Result<BigUint> {
    let labeled = count_embeddings_with_budget(pattern, host, budget)?;
    let aut = count_automorphisms(pattern);
    let (q, r) = labeled.div_rem(&aut);
    if !r.is_zero() {
        return Err(Error::Internal(format!(
            "labeled embedding count {labeled} not divisible by aut {aut}"
        )));
    }
    Ok(q)
}

/// Isomorphism test by invariant screening plus first-embedding search.
pub fn is_isomorphic(a: &Graph, b: &Graph) -> bool {
    if a.vertex_count() != b.vertex_count() || a.edge_count() != b.edge_count() {
        return false;
    }
    let mut da: Vec<usize> = (0..a.vertex_count()).map(|v| a.degree(v)).collect();
    let mut db: Vec<usize> = (0..b.vertex_count()).map(|v| b.degree(v)).collect();
    da.sort_unstable();
    db.sort_unstable();
    if da != db {
        return false;
    }
    // An injective edge-preserving map between graphs of equal vertex and
    // edge count is an isomorphism.
    let order = default_order(a);
    let mut found = false;
    visit_embeddings_in_order(a, b, &order, u64::MAX, |_| {
        found = true;
        ControlFlow::Break(())
    })
    .expect("unlimited budget");
    found
}
