#![no_main]

use conelab::harness::parse_ladder;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(v) = parse_ladder(text) {
            assert!(!v.is_empty() && v.len() <= 64);
            assert!(v.windows(2).all(|w| w[0] < w[1]));
            assert!(v.iter().all(|x| x.is_finite() && *x >= 0.0));
        }
    }
});
