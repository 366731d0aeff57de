#![no_main]

use conelab::harness::{diff_reports, DiffTolerance, SuiteReport};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(r) = SuiteReport::from_json(text) {
            let back = SuiteReport::from_json(&r.to_json()).expect("serialized report parses");
            let _ = diff_reports(&r, &back, &DiffTolerance::default());
        }
    }
});
