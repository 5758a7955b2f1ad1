#![no_main]

use libfuzzer_sys::fuzz_target;
use thresholdlab::construction::{build_cherry_graph, CherryGraph, CherrySidecar};
use thresholdlab::graph::Graph;

fuzz_target!(|data: &[u8]| {
    let Ok(sidecar) = serde_json::from_slice::<CherrySidecar>(data) else {
        return;
    };
    // Cap the core size so a fuzzed sidecar cannot allocate quadratically.
    if sidecar.t > 24 {
        return;
    }
    let Ok(f) = Graph::new(sidecar.t, &sidecar.f_edges) else {
        return;
    };
    let Ok(h) = build_cherry_graph(&f) else {
        return;
    };
    // The loader either rejects the sidecar or yields a fully valid graph.
    if let Ok(rebuilt) = CherryGraph::from_parts(h.graph().clone(), &sidecar) {
        rebuilt.validate().expect("accepted sidecar validates");
    }
});
