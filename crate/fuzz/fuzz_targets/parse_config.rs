#![no_main]

use libfuzzer_sys::fuzz_target;
use thresholdlab::experiments::ExperimentConfig;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(cfg) = ExperimentConfig::from_toml_str(text) {
        // Accepted configs round-trip by value.
        let serialized = cfg.to_toml().expect("valid config serializes");
        let parsed = ExperimentConfig::from_toml_str(&serialized).expect("round trip parses");
        assert_eq!(parsed, cfg);
    }
});
