//! JSON run configuration.

use std::path::Path;

use dcstring::{CoefficientSet, ProblemInstance, Tolerances};
use serde::Deserialize;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Coefficients {
    pub a: f64,
    pub b: f64,
    pub k: String,
    pub r: String,
    pub kappa: String,
    pub rho: String,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceOverride {
    pub rel: Option<f64>,
    pub abs: Option<f64>,
}

/// Index list written either as `[1, 2, 5]` or as a range string `"1..5"`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum IndexSpec {
    List(Vec<usize>),
    Range(String),
}

impl IndexSpec {
    pub fn resolve(&self) -> Result<Vec<usize>, String> {
        match self {
            IndexSpec::List(v) => Ok(v.clone()),
            IndexSpec::Range(s) => parse_indices(s),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub coefficients: Coefficients,
    pub epsilon: f64,
    #[serde(default)]
    pub n: Option<IndexSpec>,
    #[serde(default)]
    pub epsilons: Option<Vec<f64>>,
    #[serde(default)]
    pub quantity: Option<String>,
    #[serde(default)]
    pub grid_points: Option<usize>,
    #[serde(default)]
    pub tolerances: Option<ToleranceOverride>,
}

/// A validated configuration.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub raw: RunConfig,
    pub coeffs: CoefficientSet,
    pub instance: ProblemInstance,
    pub tol: Tolerances,
}

pub fn load(path: &Path) -> Result<Loaded, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    from_str(&text)
}

pub fn from_str(text: &str) -> Result<Loaded, String> {
    let raw: RunConfig = serde_json::from_str(text).map_err(|e| format!("invalid config: {e}"))?;
    let c = &raw.coefficients;
    let coeffs = CoefficientSet::new(c.a, c.b, &c.k, &c.r, &c.kappa, &c.rho).map_err(|e| e.to_string())?;
    let mut tol = Tolerances::default();
    if let Some(t) = raw.tolerances {
        if let Some(rel) = t.rel {
            tol.rel = rel;
        }
        if let Some(abs) = t.abs {
            tol.abs = abs;
        }
        if !(tol.rel > 0.0 && tol.abs > 0.0) {
            return Err("tolerances must be positive".into());
        }
    }
    let instance = ProblemInstance::new(coeffs.clone(), raw.epsilon).map_err(|e| e.to_string())?.with_tolerances(tol);
    Ok(Loaded { raw, coeffs, instance, tol })
}

/// Parses `"3"`, `"1..5"` (inclusive) or comma-separated mixtures such as `"1..3,7"`.
pub fn parse_indices(s: &str) -> Result<Vec<usize>, String> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let num = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("bad index '{t}' in '{s}'"));
        match part.split_once("..") {
            Some((lo, hi)) => {
                let (lo, hi) = (num(lo)?, num(hi)?);
                if lo > hi {
                    return Err(format!("empty range '{part}'"));
                }
                out.extend(lo..=hi);
            }
            None => out.push(num(part)?),
        }
    }
    if out.is_empty() {
        return Err(format!("no indices in '{s}'"));
    }
    if out.contains(&0) {
        return Err("indices start at 1".into());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_ranges() {
        assert_eq!(parse_indices("1..5").unwrap(), vec![1, 2, 3, 4, 5]);
        assert_eq!(parse_indices("2, 4..5").unwrap(), vec![2, 4, 5]);
        assert!(parse_indices("5..1").is_err());
        assert!(parse_indices("0..2").is_err());
        assert!(parse_indices("x").is_err());
    }

    #[test]
    fn minimal_config() {
        let cfg = r#"{"coefficients":{"a":-1,"b":1,"k":"1","r":"1","kappa":"1","rho":"1"},"epsilon":0.1,"n":"1..3"}"#;
        let l = from_str(cfg).unwrap();
        assert_eq!(l.raw.n.unwrap().resolve().unwrap(), vec![1, 2, 3]);
        assert!(from_str(&cfg.replace("0.1", "1.5")).is_err());
        assert!(from_str(&cfg.replace("\"r\":\"1\"", "\"r\":\"1+\"")).is_err());
    }
}
