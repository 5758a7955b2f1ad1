//! Exact maximum subgraph density via max-flow.
//!
//! The maximum of `e(S)/|S|` over nonempty vertex sets is computed by binary
//! search over the finite set of candidate rationals `a/b` with `b <= v`,
//! testing each threshold with the standard source/sink network. Because
//! every achievable density lies in the candidate set and thresholds are
//! tested with integer-scaled capacities, the result is exact and certified
//! by the returned witness.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::flow::FlowNetwork;
use crate::graph::Graph;
use crate::{Error, Result};

/// Exact maximum density `e(S)/|S|` with a witness set achieving it.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DensityResult {
    pub density: Ratio<u64>,
    pub witness: Vec<usize>,
}

/// Tests whether some nonempty `S` has `e(S)/|S| > threshold`, returning the
/// witness side of the minimum cut when one exists.
///
/// Network: source -> each vertex with capacity `m`; vertex -> sink with
/// capacity `m + 2g - deg(v)`; each edge contributes capacity 1 in both
/// directions. A min cut below `v * m` exposes a set of density above `g`.
/// All capacities are scaled by the threshold's denominator to stay integer.
fn denser_than(g: &Graph, threshold: Ratio<u64>) -> Option<Vec<usize>> {
    let v = g.vertex_count();
    let m = g.edge_count() as i64;
    let a = *threshold.numer() as i64;
    let b = *threshold.denom() as i64;
    let source = v;
    let sink = v + 1;
    let mut net = FlowNetwork::new(v + 2);
    for x in 0..v {
        net.add_edge(source, x, m * b);
        let back = m * b + 2 * a - g.degree(x) as i64 * b;
        debug_assert!(back >= 0, "sink capacity must be nonnegative");
        net.add_edge(x, sink, back);
    }
    for &(x, y) in g.edges() {
        net.add_edge(x, y, b);
        net.add_edge(y, x, b);
    }
    let flow = net.max_flow(source, sink);
    if flow >= v as i64 * m * b {
        return None;
    }
    let reach = net.residual_reachable(source);
    let witness: Vec<usize> = (0..v).filter(|&x| reach[x]).collect();
    debug_assert!(!witness.is_empty());
    Some(witness)
}

fn density_of(g: &Graph, s: &[usize]) -> Ratio<u64> {
    let (induced, _) = g.induced_subgraph(s).expect("witness vertices valid");
    Ratio::new(induced.edge_count() as u64, induced.vertex_count() as u64)
}

/// Exact maximum subgraph density over all nonempty vertex subsets.
///
/// Binary search over the sorted candidate rationals; each step tests the
/// midpoint of two adjacent candidates, so a strict flow comparison at the
/// midpoint decides whether any set reaches the upper candidate.
pub fn max_subgraph_density(g: &Graph) -> Result<DensityResult> {
    if g.vertex_count() == 0 {
        return Err(Error::InvalidInput(
            "density undefined for the empty graph".into(),
        ));
    }
    if g.edge_count() == 0 {
        return Ok(DensityResult {
            density: Ratio::new(0, 1),
            witness: vec![0],
        });
    }
    let v = g.vertex_count() as u64;
    let e = g.edge_count() as u64;
    let mut candidates: Vec<Ratio<u64>> = Vec::new();
    for b in 1..=v {
        let a_max = e.min(b * (b - 1) / 2);
        for a in 0..=a_max {
            candidates.push(Ratio::new(a, b));
        }
    }
    candidates.sort_unstable();
    candidates.dedup();

    // Invariant: some set reaches candidates[lo]; none exceeds candidates[hi].
    let mut lo = 0usize;
    let mut hi = candidates.len() - 1;
    let mut witness: Vec<usize> = vec![(0..g.vertex_count())
        .max_by_key(|&x| g.degree(x))
        .expect("nonempty")];
    while lo < hi {
        let mid = (lo + hi).div_ceil(2);
        let test = midpoint(candidates[mid - 1], candidates[mid]);
        match denser_than(g, test) {
            Some(w) => {
                witness = w;
                lo = mid;
            }
            None => hi = mid - 1,
        }
    }
    let density = candidates[lo];
    let achieved = density_of(g, &witness);
    if achieved != density {
        return Err(Error::Internal(format!(
            "density witness achieves {achieved} but search settled on {density}"
        )));
    }
    Ok(DensityResult { density, witness })
}

fn midpoint(a: Ratio<u64>, b: Ratio<u64>) -> Ratio<u64> {
    (a + b) / Ratio::new(2, 1)
}
