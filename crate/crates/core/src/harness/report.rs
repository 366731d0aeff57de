use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    AtMost,
    AtLeast,
}

/// A computed value held against a bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Limit {
    pub key: String,
    pub value: f64,
    pub bound: f64,
    pub relation: Relation,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    /// kind of claim: "result", "oracle", "contract" or "plumbing"
    pub tag: String,
    pub values: BTreeMap<String, f64>,
    pub limits: Vec<Limit>,
    pub flags: BTreeMap<String, bool>,
    pub passed: bool,
    pub diagnostic: Option<String>,
}

impl CheckRecord {
    pub fn new(name: &str, tag: &str) -> Self {
        Self {
            name: name.into(),
            tag: tag.into(),
            values: BTreeMap::new(),
            limits: Vec::new(),
            flags: BTreeMap::new(),
            passed: true,
            diagnostic: None,
        }
    }

    pub fn value(&mut self, key: &str, v: f64) -> &mut Self {
        self.values.insert(key.into(), v);
        self
    }

    pub fn at_most(&mut self, key: &str, v: f64, bound: f64) -> &mut Self {
        self.limits.push(Limit { key: key.into(), value: v, bound, relation: Relation::AtMost, passed: false });
        self
    }

    pub fn at_least(&mut self, key: &str, v: f64, bound: f64) -> &mut Self {
        self.limits.push(Limit { key: key.into(), value: v, bound, relation: Relation::AtLeast, passed: false });
        self
    }

    pub fn flag(&mut self, key: &str, v: bool) -> &mut Self {
        self.flags.insert(key.into(), v);
        self
    }

    pub fn failed(name: &str, tag: &str, err: &Error) -> Self {
        let mut r = Self::new(name, tag);
        r.passed = false;
        r.diagnostic = Some(err.to_string());
        r
    }

    /// Applies overrides and settles pass/fail.
    pub fn finish(mut self, overrides: &BTreeMap<String, f64>) -> Self {
        if self.diagnostic.is_some() {
            self.passed = false;
            return self;
        }
        for l in &mut self.limits {
            if let Some(b) = overrides.get(&format!("{}.{}", self.name, l.key)) {
                l.bound = *b;
            }
            l.passed = match l.relation {
                Relation::AtMost => l.value <= l.bound,
                Relation::AtLeast => l.value >= l.bound,
            };
        }
        self.passed = self.limits.iter().all(|l| l.passed) && self.flags.values().all(|f| *f);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub schema_version: u32,
    pub seed: u64,
    pub suites: Vec<String>,
    pub checks: Vec<CheckRecord>,
    pub passed: bool,
}

impl SuiteReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let r: Self = serde_json::from_str(text).map_err(|e| Error::Config(format!("report: {e}")))?;
        if r.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "report schema version {} is not supported (expected {SCHEMA_VERSION})",
                r.schema_version
            )));
        }
        Ok(r)
    }

    pub fn check(&self, name: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// One field that moved between two reports.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldDiff {
    pub check: String,
    pub field: String,
    pub baseline: Option<f64>,
    pub current: Option<f64>,
}

/// Per-field tolerance: |a − b| ≤ abs + rel·|a|, with overrides keyed "check.field".
#[derive(Debug, Clone, PartialEq)]
pub struct DiffTolerance {
    pub rel: f64,
    pub abs: f64,
    pub fields: BTreeMap<String, f64>,
}

impl Default for DiffTolerance {
    fn default() -> Self {
        Self { rel: 1e-6, abs: 1e-12, fields: BTreeMap::new() }
    }
}

fn close(a: f64, b: f64, rel: f64, abs: f64) -> bool {
    if a.is_nan() || b.is_nan() {
        return a.is_nan() && b.is_nan();
    }
    a == b || (a - b).abs() <= abs + rel * a.abs()
}

/// Fields of `current` that differ from `baseline` beyond tolerance, plus
/// pass/fail flips and missing checks.
pub fn diff_reports(baseline: &SuiteReport, current: &SuiteReport, tol: &DiffTolerance) -> Vec<FieldDiff> {
    let mut out = Vec::new();
    let numeric = |c: &CheckRecord| -> BTreeMap<String, f64> {
        let mut m: BTreeMap<String, f64> = c.values.iter().map(|(k, v)| (k.clone(), *v)).collect();
        for l in &c.limits {
            m.insert(format!("limit:{}", l.key), l.value);
        }
        for (k, f) in &c.flags {
            m.insert(format!("flag:{k}"), f64::from(u8::from(*f)));
        }
        m.insert("passed".into(), f64::from(u8::from(c.passed)));
        m
    };
    let names: std::collections::BTreeSet<&str> =
        baseline.checks.iter().chain(&current.checks).map(|c| c.name.as_str()).collect();
    for name in names {
        let a = baseline.check(name).map(numeric).unwrap_or_default();
        let b = current.check(name).map(numeric).unwrap_or_default();
        let keys: std::collections::BTreeSet<&String> = a.keys().chain(b.keys()).collect();
        for k in keys {
            let (x, y) = (a.get(k).copied(), b.get(k).copied());
            let rel = tol.fields.get(&format!("{name}.{k}")).copied().unwrap_or(tol.rel);
            let same = match (x, y) {
                (Some(x), Some(y)) => close(x, y, rel, tol.abs),
                _ => false,
            };
            if !same {
                out.push(FieldDiff { check: name.into(), field: k.clone(), baseline: x, current: y });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> SuiteReport {
        let mut c = CheckRecord::new("demo", "plumbing");
        c.value("x", 1.0).at_most("err", 1e-9, 1e-8).flag("ok", true);
        SuiteReport {
            schema_version: SCHEMA_VERSION,
            seed: 1,
            suites: vec!["demo".into()],
            checks: vec![c.finish(&BTreeMap::new())],
            passed: true,
        }
    }

    #[test]
    fn override_to_zero_fails() {
        let mut c = CheckRecord::new("demo", "plumbing");
        c.at_most("err", 1e-12, 1e-8);
        let mut o = BTreeMap::new();
        o.insert("demo.err".to_string(), 0.0);
        assert!(!c.finish(&o).passed);
    }

    #[test]
    fn json_roundtrip_and_diff() {
        let r = sample();
        let back = SuiteReport::from_json(&r.to_json()).unwrap();
        assert_eq!(back, r);
        assert!(diff_reports(&r, &back, &DiffTolerance::default()).is_empty());
        let mut moved = r.clone();
        moved.checks[0].values.insert("x".into(), 1.1);
        let d = diff_reports(&r, &moved, &DiffTolerance::default());
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].field, "x");
    }

    #[test]
    fn wrong_schema_rejected() {
        let text = sample().to_json().replace("\"schema_version\": 1", "\"schema_version\": 99");
        assert!(SuiteReport::from_json(&text).is_err());
    }
}
