//! Exact containment decision for cherry-augmented graphs.
//!
//! A host contains a copy of `H(F)` exactly when some vertex set `X` of core
//! size both *is dangerous* (its induced subgraph contains a copy of `F`)
//! and *extends* (every pair in `X` has a distinct common neighbor outside
//! `X`). The decision procedure enumerates `F`-embeddings, deduplicates by
//! image set (the extension test depends only on the set), and solves the
//! distinct-common-neighbor system by maximum bipartite matching.

use std::collections::HashSet;
use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use crate::embed::{default_order, visit_embeddings_in_order, Embedding};
use crate::graph::Graph;
use crate::matching::hopcroft_karp;
use crate::{Error, Result};

/// Default backtracking-node budget for one containment decision; keeps a
/// single Monte Carlo trial bounded.
pub const DEFAULT_CONTAINMENT_BUDGET: u64 = 100_000_000;

/// Certificate that a host contains a copy of `H(F)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ContainmentWitness {
    /// Sorted host vertices carrying the core.
    pub core_image: Vec<usize>,
    /// The embedding of `F` onto `core_image`.
    pub f_embedding: Vec<usize>,
    /// For each pair of `core_image` (host ids, x < y), its cherry vertex.
    pub cherry_assignment: Vec<((usize, usize), usize)>,
}

impl ContainmentWitness {
    /// Independent validity check of all witness invariants.
    pub fn validate(&self, host: &Graph, f: &Graph) -> Result<()> {
        let emb = Embedding::new(self.f_embedding.clone());
        if !emb.is_valid(f, host) {
            return Err(Error::Internal("witness embedding invalid".into()));
        }
        if emb.image_set() != self.core_image {
            return Err(Error::Internal("witness image set mismatch".into()));
        }
        let core: HashSet<usize> = self.core_image.iter().copied().collect();
        let expected_pairs = self.core_image.len() * (self.core_image.len() - 1) / 2;
        if self.cherry_assignment.len() != expected_pairs {
            return Err(Error::Internal("witness misses cherry pairs".into()));
        }
        let mut used = HashSet::new();
        for &((x, y), z) in &self.cherry_assignment {
            if !core.contains(&x) || !core.contains(&y) || core.contains(&z) {
                return Err(Error::Internal("cherry endpoints misplaced".into()));
            }
            if !used.insert(z) {
                return Err(Error::Internal("cherry assignment not injective".into()));
            }
            if !(host.has_edge(x, z) && host.has_edge(y, z)) {
                return Err(Error::Internal("cherry not adjacent to its pair".into()));
            }
        }
        Ok(())
    }
}

/// An embedding of `f` into `host[x]`, if one exists. `x` must have exactly
/// `v_f` vertices. The returned embedding maps into host vertex ids.
pub fn is_dangerous(host: &Graph, x: &[usize], f: &Graph) -> Result<Option<Embedding>> {
    if x.len() != f.vertex_count() {
        return Err(Error::InvalidInput(format!(
            "dangerous test needs |x| = {} vertices, got {}",
            f.vertex_count(),
            x.len()
        )));
    }
    let (induced, back) = host.induced_subgraph(x)?;
    let order = default_order(f);
    let mut hit: Option<Embedding> = None;
    visit_embeddings_in_order(f, &induced, &order, u64::MAX, |map| {
        hit = Some(Embedding::new(map.iter().map(|&local| back[local]).collect()));
        ControlFlow::Break(())
    })?;
    Ok(hit)
}

/// Map from a pair of set vertices (x < y) to its assigned cherry vertex.
pub type CherryAssignment = Vec<((usize, usize), usize)>;

/// Tests whether `x` extends: every pair of `x` gets a distinct common
/// neighbor outside `x`. Returns the assignment (pairs in lexicographic
/// order) found by maximum bipartite matching, or `None` when the maximum
/// matching leaves some pair unmatched.
pub fn extends(host: &Graph, x: &[usize]) -> Result<Option<CherryAssignment>> {
    let mut sorted = x.to_vec();
    sorted.sort_unstable();
    if sorted.len() < 2 {
        return Err(Error::InvalidInput("extension test needs at least 2 vertices".into()));
    }
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidInput("duplicate vertex in extension set".into()));
    }
    if let Some(&v) = sorted.iter().find(|&&v| v >= host.vertex_count()) {
        return Err(Error::InvalidInput(format!("vertex {v} out of range")));
    }
    let inside: HashSet<usize> = sorted.iter().copied().collect();
    let mut pairs = Vec::new();
    for i in 0..sorted.len() {
        for j in (i + 1)..sorted.len() {
            pairs.push((sorted[i], sorted[j]));
        }
    }
    let adj: Vec<Vec<usize>> = pairs
        .iter()
        .map(|&(a, b)| {
            // Candidates: common neighbors of a and b outside x. Walk the
            // shorter neighbor list.
            let (small, large) = if host.degree(a) <= host.degree(b) { (a, b) } else { (b, a) };
            host.neighbors(small)
                .iter()
                .copied()
                .filter(|&z| !inside.contains(&z) && host.has_edge(large, z))
                .collect()
        })
        .collect();
    let matching = hopcroft_karp(&adj, host.vertex_count());
    if matching.iter().any(|m| m.is_none()) {
        return Ok(None);
    }
    Ok(Some(
        pairs
            .into_iter()
            .zip(matching)
            .map(|(pair, z)| (pair, z.expect("perfect on pairs side")))
            .collect(),
    ))
}

/// Decides whether `host` contains a copy of the cherry augmentation of `f`,
/// returning the first witness in deterministic search order.
///
/// Exact: no false positives (the witness validates) and no false negatives
/// (every `F`-image set is tested for extension).
pub fn contains_cherry_graph(host: &Graph, f: &Graph) -> Result<Option<ContainmentWitness>> {
    contains_cherry_graph_with_budget(host, f, DEFAULT_CONTAINMENT_BUDGET)
}

pub fn contains_cherry_graph_with_budget(
    host: &Graph,
    f: &Graph,
    budget: u64,
) -> Result<Option<ContainmentWitness>> {
    if host.vertex_count() < f.vertex_count() {
        return Err(Error::InvalidInput(
            "host smaller than the core pattern".into(),
        ));
    }
    if f.vertex_count() < 2 {
        return Err(Error::InvalidInput("core needs at least 2 vertices".into()));
    }
    let order = default_order(f);
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    let mut witness: Option<ContainmentWitness> = None;
    let mut inner_error: Option<Error> = None;
    visit_embeddings_in_order(f, host, &order, budget, |map| {
        let mut image: Vec<usize> = map.to_vec();
        image.sort_unstable();
        if !seen.insert(image.clone()) {
            return ControlFlow::Continue(());
        }
        match extends(host, &image) {
            Ok(Some(assignment)) => {
                witness = Some(ContainmentWitness {
                    core_image: image,
                    f_embedding: map.to_vec(),
                    cherry_assignment: assignment,
                });
                ControlFlow::Break(())
            }
            Ok(None) => ControlFlow::Continue(()),
            Err(e) => {
                inner_error = Some(e);
                ControlFlow::Break(())
            }
        }
    })?;
    if let Some(e) = inner_error {
        return Err(e);
    }
    if let Some(w) = &witness {
        w.validate(host, f)?;
    }
    Ok(witness)
}

/// Direct backtracking subgraph-containment test, used as an independent
/// oracle for `contains_cherry_graph` on small instances. Shares no search
/// machinery with the embedding enumerator.
pub fn contains_subgraph_bruteforce(host: &Graph, pattern: &Graph, budget: u64) -> Result<bool> {
    struct Brute<'a> {
        host: &'a Graph,
        pattern: &'a Graph,
        order: Vec<usize>,
        image: Vec<usize>,
        used: Vec<bool>,
        nodes: u64,
        budget: u64,
    }
    impl Brute<'_> {
        fn solve(&mut self, depth: usize) -> Result<bool> {
            if depth == self.order.len() {
                return Ok(true);
            }
            let pv = self.order[depth];
            for hv in 0..self.host.vertex_count() {
                self.nodes += 1;
                if self.nodes > self.budget {
                    return Err(Error::BudgetExceeded(
                        "brute-force containment exceeded its node budget".into(),
                    ));
                }
                if self.used[hv] || self.host.degree(hv) < self.pattern.degree(pv) {
                    continue;
                }
                let consistent = self.pattern.neighbors(pv).iter().all(|&pw| {
                    let placed = self.image[pw];
                    placed == usize::MAX || self.host.has_edge(placed, hv)
                });
                if !consistent {
                    continue;
                }
                self.image[pv] = hv;
                self.used[hv] = true;
                let found = self.solve(depth + 1)?;
                self.used[hv] = false;
                self.image[pv] = usize::MAX;
                if found {
                    return Ok(true);
                }
            }
            Ok(false)
        }
    }
    if pattern.vertex_count() > host.vertex_count() {
        return Ok(false);
    }
    // Static degree-descending order, ties by id.
    let mut order: Vec<usize> = (0..pattern.vertex_count()).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(pattern.degree(v)), v));
    let mut brute = Brute {
        host,
        pattern,
        order,
        image: vec![usize::MAX; pattern.vertex_count()],
        used: vec![false; host.vertex_count()],
        nodes: 0,
        budget,
    };
    brute.solve(0)
}
