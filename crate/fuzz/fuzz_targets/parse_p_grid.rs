#![no_main]

use libfuzzer_sys::fuzz_target;
use thresholdlab::experiments::parse_p_grid;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if text.len() > 256 {
        return;
    }
    if let Ok(grid) = parse_p_grid(text) {
        assert!(!grid.is_empty());
        assert!(grid.iter().all(|p| (0.0..=1.0).contains(p)));
        assert!(grid.windows(2).all(|w| w[0] <= w[1]));
    }
});
