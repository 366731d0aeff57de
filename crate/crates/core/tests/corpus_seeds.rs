use std::path::Path;

use conelab::harness::{parse_ladder, SuiteConfig, SuiteReport};

fn seeds(kind: &str) -> Vec<(String, String)> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(kind);
    let mut out: Vec<(String, String)> = std::fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read_to_string(&p).unwrap())
        })
        .collect();
    out.sort();
    out
}

#[test]
fn config_seeds() {
    for (name, text) in seeds("config") {
        let parsed = SuiteConfig::from_toml(&text);
        assert_eq!(parsed.is_ok(), !name.starts_with("invalid"), "{name}");
        if let Ok(c) = parsed {
            assert_eq!(SuiteConfig::from_toml(&c.to_toml()).unwrap(), c);
        }
    }
}

#[test]
fn report_seeds() {
    for (name, text) in seeds("report") {
        let r = SuiteReport::from_json(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(r.to_json(), text, "{name}");
    }
}

#[test]
fn ladder_seeds() {
    for (name, text) in seeds("ladder") {
        assert_eq!(parse_ladder(&text).is_ok(), name != "descending", "{name}");
    }
}
