#![no_main]

use libfuzzer_sys::fuzz_target;
use thresholdlab::graph::Graph;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(g) = Graph::from_edge_list_str(text) {
        // Serialization is a fixed point: the canonical form re-parses to an
        // equal graph and re-serializes to identical bytes.
        let canonical = g.to_edge_list_string();
        let again = Graph::from_edge_list_str(&canonical).expect("canonical form parses");
        assert_eq!(again, g);
        assert_eq!(again.to_edge_list_string(), canonical);
    }
});
