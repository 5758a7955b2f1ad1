//! Exhaustive enumeration of subgraph isomorphism classes with exact copy
//! counts.
//!
//! A sweep walks every vertex subset `S` of the host up to a size cap and
//! every edge subset of `host[S]` whose support is exactly `S`; each such
//! pair is one subgraph copy. Copies are grouped into isomorphism classes by
//! a two-level scheme: exact labeled forms are deduplicated in a hash map,
//! and genuinely new forms are matched against class representatives that
//! share the same cheap invariants (degree sequence plus sorted
//! neighbor-degree profiles).

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::One;

use crate::embed::is_isomorphic;
use crate::graph::Graph;
use crate::Result;

/// One isomorphism class found by the sweep, with its exact number of copies
/// in the swept host.
#[derive(Clone, Debug)]
pub struct SubgraphClass {
    pub graph: Graph,
    pub copies: BigUint,
}

/// Sweep result; `complete` is false when the budget ran out, in which case
/// the returned classes and counts cover only the portion swept.
#[derive(Clone, Debug)]
pub struct ClassSweep {
    pub classes: Vec<SubgraphClass>,
    pub complete: bool,
}

type ExactForm = (usize, Vec<(u8, u8)>);

struct Classifier {
    classes: Vec<SubgraphClass>,
    exact_forms: HashMap<ExactForm, usize>,
    invariant_buckets: HashMap<Vec<u16>, Vec<usize>>,
}

impl Classifier {
    fn new() -> Self {
        Classifier {
            classes: Vec::new(),
            exact_forms: HashMap::new(),
            invariant_buckets: HashMap::new(),
        }
    }

    fn record(&mut self, size: usize, edges: &[(u8, u8)]) {
        let key = (size, edges.to_vec());
        if let Some(&idx) = self.exact_forms.get(&key) {
            self.classes[idx].copies += BigUint::one();
            return;
        }
        let g = Graph::new(
            size,
            &edges.iter().map(|&(a, b)| (a as usize, b as usize)).collect::<Vec<_>>(),
        )
        .expect("sweep emits valid edges");
        let inv = invariant_key(&g);
        let bucket = self.invariant_buckets.entry(inv).or_default();
        for &idx in bucket.iter() {
            if is_isomorphic(&g, &self.classes[idx].graph) {
                self.classes[idx].copies += BigUint::one();
                self.exact_forms.insert(key, idx);
                return;
            }
        }
        let idx = self.classes.len();
        bucket.push(idx);
        self.classes.push(SubgraphClass {
            graph: g,
            copies: BigUint::one(),
        });
        self.exact_forms.insert(key, idx);
    }
}

/// Degree sequence plus per-vertex sorted neighbor-degree profiles, all
/// sorted: cheap, isomorphism-invariant, and discriminating enough to keep
/// buckets tiny at these sizes.
fn invariant_key(g: &Graph) -> Vec<u16> {
    let mut profiles: Vec<Vec<u16>> = (0..g.vertex_count())
        .map(|v| {
            let mut p: Vec<u16> = g.neighbors(v).iter().map(|&w| g.degree(w) as u16).collect();
            p.sort_unstable();
            p.insert(0, g.degree(v) as u16);
            p
        })
        .collect();
    profiles.sort_unstable();
    let mut key = vec![g.vertex_count() as u16, g.edge_count() as u16];
    for p in profiles {
        key.push(u16::MAX); // separator
        key.extend(p);
    }
    key
}

/// Enumerates all isolated-vertex-free subgraphs of `host` on at most
/// `max_vertices` vertices, up to isomorphism, with exact copy counts.
/// With `connected_only` the sweep keeps only connected subgraphs.
///
/// `budget` bounds the number of edge-subset candidates examined.
pub fn isolated_free_subgraph_classes(
    host: &Graph,
    max_vertices: usize,
    connected_only: bool,
    budget: u64,
) -> Result<ClassSweep> {
    let mut classifier = Classifier::new();
    let mut consumed: u64 = 0;
    let mut complete = true;
    let mut subset: Vec<usize> = Vec::new();
    for size in 2..=max_vertices.min(host.vertex_count()) {
        if !subsets_of_size(
            host,
            size,
            0,
            &mut subset,
            connected_only,
            &mut classifier,
            &mut consumed,
            budget,
        ) {
            complete = false;
            break;
        }
    }
    Ok(ClassSweep {
        classes: classifier.classes,
        complete,
    })
}

#[allow(clippy::too_many_arguments)]
fn subsets_of_size(
    host: &Graph,
    size: usize,
    from: usize,
    subset: &mut Vec<usize>,
    connected_only: bool,
    classifier: &mut Classifier,
    consumed: &mut u64,
    budget: u64,
) -> bool {
    if subset.len() == size {
        return sweep_subset(host, subset, connected_only, classifier, consumed, budget);
    }
    let remaining = size - subset.len();
    for v in from..host.vertex_count().saturating_sub(remaining - 1) {
        subset.push(v);
        let ok = subsets_of_size(
            host,
            size,
            v + 1,
            subset,
            connected_only,
            classifier,
            consumed,
            budget,
        );
        subset.pop();
        if !ok {
            return false;
        }
    }
    true
}

/// Sweeps every covering edge subset of `host[subset]`. Returns false when
/// the budget is exhausted.
fn sweep_subset(
    host: &Graph,
    subset: &[usize],
    connected_only: bool,
    classifier: &mut Classifier,
    consumed: &mut u64,
    budget: u64,
) -> bool {
    let size = subset.len();
    // Position of each host vertex within the subset.
    let mut pos = HashMap::with_capacity(size);
    for (i, &v) in subset.iter().enumerate() {
        pos.insert(v, i as u8);
    }
    // Local edges of the induced subgraph; if any vertex is isolated there is
    // no covering edge subset and the subset is skipped.
    let mut local_edges: Vec<(u8, u8)> = Vec::new();
    let mut local_deg = vec![0u32; size];
    for (i, &v) in subset.iter().enumerate() {
        for &w in host.neighbors(v) {
            if w > v {
                if let Some(&j) = pos.get(&w) {
                    local_edges.push((i as u8, j));
                    local_deg[i] += 1;
                    local_deg[j as usize] += 1;
                }
            }
        }
    }
    if local_deg.contains(&0) {
        return true;
    }
    let e = local_edges.len();
    if e >= 63 {
        return false; // mask would overflow; treat as budget breach
    }
    let total_masks = 1u64 << e;
    if *consumed + total_masks > budget {
        return false;
    }
    *consumed += total_masks;

    let full: u64 = (1 << size) - 1;
    let vertex_mask: Vec<u64> = local_edges
        .iter()
        .map(|&(a, b)| (1 << a) | (1 << b))
        .collect();
    // cover[mask] built incrementally from cover[mask & (mask - 1)].
    let mut cover = vec![0u64; total_masks as usize];
    let mut chosen: Vec<(u8, u8)> = Vec::with_capacity(e);
    for mask in 1..total_masks {
        let low = mask.trailing_zeros() as usize;
        cover[mask as usize] = cover[(mask & (mask - 1)) as usize] | vertex_mask[low];
        if cover[mask as usize] != full {
            continue;
        }
        chosen.clear();
        for (i, &le) in local_edges.iter().enumerate() {
            if mask >> i & 1 == 1 {
                chosen.push(le);
            }
        }
        if connected_only && !edges_connected(size, &chosen) {
            continue;
        }
        classifier.record(size, &chosen);
    }
    true
}

fn edges_connected(size: usize, edges: &[(u8, u8)]) -> bool {
    let mut parent: Vec<u8> = (0..size as u8).collect();
    fn find(parent: &mut [u8], x: u8) -> u8 {
        let mut root = x;
        while parent[root as usize] != root {
            root = parent[root as usize];
        }
        let mut cur = x;
        while parent[cur as usize] != root {
            let next = parent[cur as usize];
            parent[cur as usize] = root;
            cur = next;
        }
        root
    }
    let mut components = size;
    for &(a, b) in edges {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra as usize] = rb;
            components -= 1;
        }
    }
    components == 1
}
