use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Cone grid and harmonic cutoff shared by the suites.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub order: usize,
    pub lmax: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { order: 12, lmax: 6 }
    }
}

/// Spectral ω rule: a GL panel on [0, min], log panels on [min, max].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OmegaConfig {
    pub min: f64,
    pub max: f64,
    pub panels_per_decade: usize,
    pub per_panel: usize,
}

impl Default for OmegaConfig {
    fn default() -> Self {
        Self { min: 1e-4, max: 12.0, panels_per_decade: 2, per_panel: 8 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FockConfig {
    pub n_max: usize,
    pub modes: usize,
}

impl Default for FockConfig {
    fn default() -> Self {
        Self { n_max: 4, modes: 12 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct McConfig {
    pub samples: usize,
}

impl Default for McConfig {
    fn default() -> Self {
        Self { samples: 100_000 }
    }
}

/// Ladders in the textual form accepted by [`parse_ladder`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LadderConfig {
    pub kg: String,
    pub scaled: String,
    pub null: String,
    pub dirac: String,
    pub refine: String,
}

impl Default for LadderConfig {
    fn default() -> Self {
        Self {
            kg: "20,40,80,160".into(),
            scaled: "1,4,16,64".into(),
            null: "1,4,16,64".into(),
            dirac: "5,10,20,40".into(),
            refine: "0,1,2".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SuiteConfig {
    pub seed: u64,
    pub output: Option<String>,
    pub grid: GridConfig,
    pub omega: OmegaConfig,
    pub fock: FockConfig,
    pub mc: McConfig,
    pub ladders: LadderConfig,
    /// Overrides keyed by "check.limit".
    pub tolerances: BTreeMap<String, f64>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: 20_240_611,
            output: None,
            grid: GridConfig::default(),
            omega: OmegaConfig::default(),
            fock: FockConfig::default(),
            mc: McConfig::default(),
            ladders: LadderConfig::default(),
            tolerances: BTreeMap::new(),
        }
    }
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Config(msg()))
    }
}

impl SuiteConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let g = &self.grid;
        check((4..=64).contains(&g.order), || format!("grid.order must be in 4..=64, got {}", g.order))?;
        check(g.lmax >= 2 && g.lmax <= g.order / 2, || {
            format!("grid.lmax must be in 2..=order/2 = {}, got {}", g.order / 2, g.lmax)
        })?;
        let o = &self.omega;
        check(o.min.is_finite() && o.min > 0.0, || format!("omega.min must be positive, got {}", o.min))?;
        check(o.max.is_finite() && o.max > o.min && o.max <= 1e3, || {
            format!("omega.max must lie in (omega.min, 1000], got {}", o.max)
        })?;
        check((1..=16).contains(&o.panels_per_decade), || "omega.panels_per_decade must be in 1..=16".into())?;
        check((2..=32).contains(&o.per_panel), || "omega.per_panel must be in 2..=32".into())?;
        check((2..=8).contains(&self.fock.n_max), || "fock.n_max must be in 2..=8".into())?;
        check((2..=12).contains(&self.fock.modes), || "fock.modes must be in 2..=12".into())?;
        check((100..=10_000_000).contains(&self.mc.samples), || "mc.samples must be in 100..=10^7".into())?;
        for (name, spec) in [
            ("kg", &self.ladders.kg),
            ("scaled", &self.ladders.scaled),
            ("null", &self.ladders.null),
            ("dirac", &self.ladders.dirac),
        ] {
            let l = parse_ladder(spec).map_err(|e| Error::Config(format!("ladders.{name}: {e}")))?;
            check(l.len() >= 2, || format!("ladders.{name} needs at least two rungs"))?;
        }
        let refine = parse_ladder(&self.ladders.refine).map_err(|e| Error::Config(format!("ladders.refine: {e}")))?;
        check(
            refine.iter().all(|x| x.fract() == 0.0 && *x <= 3.0),
            || "ladders.refine must be integer levels ≤ 3".into(),
        )?;
        for (k, v) in &self.tolerances {
            check(k.contains('.'), || format!("tolerance key '{k}' must have the form check.limit"))?;
            check(v.is_finite() && *v >= 0.0, || format!("tolerance '{k}' must be finite and non-negative"))?;
        }
        Ok(())
    }

    pub fn ladder(&self, spec: &str) -> Vec<f64> {
        parse_ladder(spec).expect("validated ladder")
    }
}

/// Parses a ladder: either a comma list `5,10,20,40` (ascending, non-negative)
/// or a geometric form `start*factor^count` such as `1*4^4` = 1,4,16,64.
pub fn parse_ladder(spec: &str) -> Result<Vec<f64>> {
    let spec = spec.trim();
    if spec.is_empty() {
        return Err(Error::Usage("empty ladder".into()));
    }
    let num = |s: &str| -> Result<f64> {
        let v: f64 = s.trim().parse().map_err(|_| Error::Usage(format!("not a number: '{}'", s.trim())))?;
        if !v.is_finite() || v < 0.0 {
            return Err(Error::Usage(format!("ladder values must be finite and non-negative, got {v}")));
        }
        Ok(v)
    };
    let values = if let Some((start, rest)) = spec.split_once('*') {
        let (factor, count) =
            rest.split_once('^').ok_or_else(|| Error::Usage(format!("geometric ladder needs start*factor^count: '{spec}'")))?;
        let (start, factor) = (num(start)?, num(factor)?);
        let count: usize = count.trim().parse().map_err(|_| Error::Usage(format!("bad count '{}'", count.trim())))?;
        if !(1..=64).contains(&count) {
            return Err(Error::Usage(format!("ladder count must be in 1..=64, got {count}")));
        }
        (0..count).map(|k| start * factor.powi(k as i32)).collect::<Vec<_>>()
    } else {
        let v = spec.split(',').map(num).collect::<Result<Vec<_>>>()?;
        if v.len() > 64 {
            return Err(Error::Usage("ladder has more than 64 rungs".into()));
        }
        v
    };
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Usage("ladder overflows".into()));
    }
    if values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Usage(format!("ladder must be strictly increasing: {values:?}")));
    }
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_roundtrip() {
        let c = SuiteConfig::default();
        c.validate().unwrap();
        assert_eq!(SuiteConfig::from_toml(&c.to_toml()).unwrap(), c);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(SuiteConfig::from_toml("seed = 1\nbogus = 2\n").is_err());
        assert!(SuiteConfig::from_toml("[grid]\norder = 12\nwidth = 3\n").is_err());
    }

    #[test]
    fn ranges_enforced() {
        assert!(SuiteConfig::from_toml("[grid]\norder = 2\n").is_err());
        assert!(SuiteConfig::from_toml("[omega]\nmin = -1.0\n").is_err());
        assert!(SuiteConfig::from_toml("[tolerances]\nbad = 1.0\n").is_err());
    }

    #[test]
    fn ladder_forms() {
        assert_eq!(parse_ladder("5,10,20,40").unwrap(), vec![5.0, 10.0, 20.0, 40.0]);
        assert_eq!(parse_ladder("1*4^4").unwrap(), vec![1.0, 4.0, 16.0, 64.0]);
        assert!(parse_ladder("4,2").is_err());
        assert!(parse_ladder("1*1^3").is_err());
        assert!(parse_ladder("nan").is_err());
        assert!(parse_ladder("").is_err());
    }
}
