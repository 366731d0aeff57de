#![no_main]

use conelab::harness::SuiteConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(cfg) = SuiteConfig::from_toml(text) {
            let again = SuiteConfig::from_toml(&cfg.to_toml()).expect("serialized config parses");
            assert_eq!(again, cfg);
        }
    }
});
