//! Versioned JSON run configuration.
//!
//! ```json
//! {
//!   "version": 1,
//!   "seed": 7,
//!   "symbols": {"psi": {"kind": "const", "value": [1, 0]},
//!               "phi": {"components": [{"kind": "coord", "index": 1}]}},
//!   "params": {"n": 1, "p": "2", "q": "0", "s": "1", "alpha": "1"},
//!   "sampler": {"shells": 10, "per_shell": 256},
//!   "outputs": {"report": "report.json", "csv": "samples.csv"}
//! }
//! ```
//!
//! Optional blocks: `bloch` (`p_prime`, `q_prime`), `sweep` (lists `p`, `q`,
//! `s`, `alpha`), `policy` (verdict thresholds), `workers`.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::criteria::{Policy, ProfileConfig};
use crate::decimal::Decimal;
use crate::error::{Error, Result};
use crate::spaces::SpaceParams;
use crate::symbols::wire::expr_from_json_at;
use crate::symbols::{self_map_from_json, SymbolPair, WeightSymbol};

pub const CONFIG_VERSION: u64 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub shells: usize,
    pub per_shell: usize,
    /// Monte Carlo samples for integral estimates.
    pub mc_budget: usize,
    pub refine: bool,
    /// Samples for the self-map check.
    pub validation_samples: usize,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            shells: 10,
            per_shell: 256,
            mc_budget: 20_000,
            refine: true,
            validation_samples: 4096,
        }
    }
}

impl SamplerConfig {
    pub fn profile(&self, seed: u64) -> ProfileConfig {
        ProfileConfig {
            shells: self.shells,
            per_shell: self.per_shell,
            seed,
            refine: self.refine,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamsConfig {
    pub n: usize,
    pub p: Decimal,
    pub q: Decimal,
    pub s: Decimal,
    pub alpha: Decimal,
}

impl ParamsConfig {
    pub fn space(&self) -> Result<SpaceParams> {
        SpaceParams::from_decimals(self.n, self.p.clone(), self.q.clone(), self.s.clone(), self.alpha.clone())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlochConfig {
    pub p_prime: Decimal,
    pub q_prime: Decimal,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub p: Vec<Decimal>,
    pub q: Vec<Decimal>,
    pub s: Vec<Decimal>,
    pub alpha: Vec<Decimal>,
}

impl SweepGrid {
    /// Cartesian product in `p`-major order.
    pub fn points(&self) -> Vec<[Decimal; 4]> {
        let mut out = Vec::new();
        for p in &self.p {
            for q in &self.q {
                for s in &self.s {
                    for a in &self.alpha {
                        out.push([p.clone(), q.clone(), s.clone(), a.clone()]);
                    }
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutputConfig {
    pub report: String,
    pub csv: String,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            report: "report.json".into(),
            csv: "samples.csv".into(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub seed: u64,
    pub n: usize,
    pub pair: SymbolPair,
    pub params: Option<ParamsConfig>,
    pub bloch: Option<BlochConfig>,
    pub sweep: Option<SweepGrid>,
    pub sampler: SamplerConfig,
    pub policy: Policy,
    pub outputs: OutputConfig,
    pub workers: Option<usize>,
    /// The parsed document, echoed into reports.
    pub raw: Value,
}

fn object<'a>(value: &'a Value, path: &str) -> Result<&'a Map<String, Value>> {
    value
        .as_object()
        .ok_or_else(|| Error::config(path, "expected an object"))
}

fn decimal(value: &Value, path: &str) -> Result<Decimal> {
    let text = match value {
        Value::String(s) => s.clone(),
        Value::Number(n) => n.to_string(),
        _ => return Err(Error::config(path, "expected a decimal string")),
    };
    Decimal::parse(&text).map_err(|e| Error::config(path, e.to_string()))
}

fn uint(value: &Value, path: &str) -> Result<u64> {
    value
        .as_u64()
        .ok_or_else(|| Error::config(path, "expected a non-negative integer"))
}

fn decimal_list(obj: &Map<String, Value>, name: &str, path: &str) -> Result<Vec<Decimal>> {
    let p = format!("{path}.{name}");
    match obj.get(name) {
        None => Err(Error::config(p, "missing field")),
        Some(Value::Array(items)) => items
            .iter()
            .enumerate()
            .map(|(i, v)| decimal(v, &format!("{p}[{i}]")))
            .collect(),
        Some(_) => Err(Error::config(p, "expected an array of decimal strings")),
    }
}

fn typed<T: for<'de> Deserialize<'de>>(value: &Value, path: &str) -> Result<T> {
    serde_json::from_value(value.clone()).map_err(|e| Error::config(path, e.to_string()))
}

/// Fills missing fields of `value` from `T::default()`.
fn with_defaults<T>(value: Option<&Value>, path: &str) -> Result<T>
where
    T: Default + Serialize + for<'de> Deserialize<'de>,
{
    let Some(value) = value else {
        return Ok(T::default());
    };
    let given = object(value, path)?;
    let mut merged = serde_json::to_value(T::default())?;
    let target = merged.as_object_mut().expect("struct serializes to an object");
    for (k, v) in given {
        if !target.contains_key(k) {
            return Err(Error::config(format!("{path}.{k}"), "unknown field"));
        }
        target.insert(k.clone(), v.clone());
    }
    typed(&merged, path)
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let raw: Value = serde_json::from_str(text).map_err(|e| {
            Error::config(format!("line {}, column {}", e.line(), e.column()), e.to_string())
        })?;
        Self::from_value(raw)
    }

    pub fn from_value(raw: Value) -> Result<Self> {
        let root = object(&raw, "$")?;
        let version = uint(root.get("version").ok_or_else(|| Error::config("$.version", "missing field"))?, "$.version")?;
        if version != CONFIG_VERSION {
            return Err(Error::config("$.version", format!("unsupported version {version}, expected {CONFIG_VERSION}")));
        }
        let seed = uint(
            root.get("seed")
                .ok_or_else(|| Error::config("$.seed", "missing field; the seed is mandatory"))?,
            "$.seed",
        )?;

        let params = match root.get("params") {
            None => None,
            Some(v) => {
                let obj = object(v, "$.params")?;
                let get = |name: &str| {
                    obj.get(name)
                        .ok_or_else(|| Error::config(format!("$.params.{name}"), "missing field"))
                };
                let n = uint(get("n")?, "$.params.n")? as usize;
                let cfg = ParamsConfig {
                    n,
                    p: decimal(get("p")?, "$.params.p")?,
                    q: decimal(get("q")?, "$.params.q")?,
                    s: decimal(get("s")?, "$.params.s")?,
                    alpha: decimal(get("alpha")?, "$.params.alpha")?,
                };
                cfg.space().map_err(|e| Error::config("$.params", e.to_string()))?;
                Some(cfg)
            }
        };

        let symbols = object(
            root.get("symbols").ok_or_else(|| Error::config("$.symbols", "missing field"))?,
            "$.symbols",
        )?;
        let phi_value = symbols
            .get("phi")
            .ok_or_else(|| Error::config("$.symbols.phi", "missing field"))?;
        let phi = self_map_from_json(phi_value, "$.symbols.phi").map_err(to_config)?;
        let n = phi.dim();
        if let Some(p) = &params {
            if p.n != n {
                return Err(Error::config(
                    "$.params.n",
                    format!("n = {} but phi has {n} components", p.n),
                ));
            }
        }
        let psi = match symbols.get("psi") {
            None => WeightSymbol::one(n)?,
            Some(v) => {
                let expr = expr_from_json_at(v, "$.symbols.psi").map_err(to_config)?;
                WeightSymbol::new(expr, n).map_err(|e| match e {
                    Error::Symbol { message, .. } => Error::config("$.symbols.psi", message),
                    other => to_config(other),
                })?
            }
        };
        let pair = SymbolPair::new(psi, phi).map_err(to_config)?;

        let bloch = match root.get("bloch") {
            None => None,
            Some(v) => {
                let obj = object(v, "$.bloch")?;
                let get = |name: &str| {
                    obj.get(name)
                        .ok_or_else(|| Error::config(format!("$.bloch.{name}"), "missing field"))
                };
                Some(BlochConfig {
                    p_prime: decimal(get("p_prime")?, "$.bloch.p_prime")?,
                    q_prime: decimal(get("q_prime")?, "$.bloch.q_prime")?,
                })
            }
        };

        let sweep = match root.get("sweep") {
            None => None,
            Some(v) => {
                let obj = object(v, "$.sweep")?;
                Some(SweepGrid {
                    p: decimal_list(obj, "p", "$.sweep")?,
                    q: decimal_list(obj, "q", "$.sweep")?,
                    s: decimal_list(obj, "s", "$.sweep")?,
                    alpha: decimal_list(obj, "alpha", "$.sweep")?,
                })
            }
        };

        let sampler: SamplerConfig = with_defaults(root.get("sampler"), "$.sampler")?;
        if sampler.per_shell == 0 || sampler.validation_samples == 0 {
            return Err(Error::config("$.sampler", "sample counts must be positive"));
        }
        let policy: Policy = with_defaults(root.get("policy"), "$.policy")?;
        let outputs: OutputConfig = with_defaults(root.get("outputs"), "$.outputs")?;
        let workers = match root.get("workers") {
            None | Some(Value::Null) => None,
            Some(v) => Some(uint(v, "$.workers")? as usize),
        };
        if workers == Some(0) {
            return Err(Error::config("$.workers", "must be >= 1"));
        }

        Ok(RunConfig {
            seed,
            n,
            pair,
            params,
            bloch,
            sweep,
            sampler,
            policy,
            outputs,
            workers,
            raw,
        })
    }

    pub fn set_seed(&mut self, seed: u64) {
        self.seed = seed;
        if let Some(obj) = self.raw.as_object_mut() {
            obj.insert("seed".into(), Value::from(seed));
        }
    }

    pub fn require_params(&self) -> Result<SpaceParams> {
        self.params
            .as_ref()
            .ok_or_else(|| Error::config("$.params", "missing field"))?
            .space()
    }
}

fn to_config(e: Error) -> Error {
    match e {
        Error::Symbol { path, message } => Error::Config { path, message },
        Error::DimensionMismatch { expected, found } => Error::config(
            "$.symbols",
            format!("dimension mismatch: expected {expected}, found {found}"),
        ),
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "version": 1,
        "seed": 3,
        "symbols": {"phi": {"components": [{"kind": "coord", "index": 1}]}},
        "params": {"n": 1, "p": "2", "q": "0", "s": "1", "alpha": "1"}
    }"#;

    fn path_of(e: Error) -> String {
        match e {
            Error::Config { path, .. } => path,
            other => panic!("expected a config error, got {other}"),
        }
    }

    #[test]
    fn minimal_config_parses_with_defaults() {
        let cfg = RunConfig::parse(MINIMAL).unwrap();
        assert_eq!(cfg.seed, 3);
        assert_eq!(cfg.n, 1);
        assert_eq!(cfg.sampler, SamplerConfig::default());
        assert_eq!(cfg.policy, Policy::default());
        assert_eq!(cfg.require_params().unwrap().k(), 1.0);
    }

    #[test]
    fn field_paths_in_errors() {
        let bad = MINIMAL.replace(r#""p": "2""#, r#""p": "2.x""#);
        assert_eq!(path_of(RunConfig::parse(&bad).unwrap_err()), "$.params.p");
        let bad = MINIMAL.replace(r#""seed": 3,"#, "");
        assert_eq!(path_of(RunConfig::parse(&bad).unwrap_err()), "$.seed");
        let bad = MINIMAL.replace(r#""index": 1"#, r#""index": 0"#);
        assert!(path_of(RunConfig::parse(&bad).unwrap_err()).starts_with("$.symbols.phi.components[0]"));
        let bad = MINIMAL.replace(r#""n": 1"#, r#""n": 2"#);
        assert_eq!(path_of(RunConfig::parse(&bad).unwrap_err()), "$.params.n");
        let bad = MINIMAL.replace(r#""version": 1"#, r#""version": 9"#);
        assert_eq!(path_of(RunConfig::parse(&bad).unwrap_err()), "$.version");
        let bad = MINIMAL.replace("}\n", "} \"sampler\": {\"shels\": 3}\n");
        assert!(RunConfig::parse(&bad).is_err());
        let syntax = RunConfig::parse("{\n  \"version\": 1,\n  oops\n}").unwrap_err();
        assert!(path_of(syntax).starts_with("line 3"));
    }

    #[test]
    fn unknown_sampler_field_rejected() {
        let mut v: Value = serde_json::from_str(MINIMAL).unwrap();
        v["sampler"] = serde_json::json!({"shels": 4});
        assert_eq!(path_of(RunConfig::from_value(v).unwrap_err()), "$.sampler.shels");
    }

    #[test]
    fn sweep_grid_points() {
        let mut v: Value = serde_json::from_str(MINIMAL).unwrap();
        v["sweep"] = serde_json::json!({"p": ["1", "2"], "q": ["0"], "s": ["1"], "alpha": ["0.5", "1", "2"]});
        let cfg = RunConfig::from_value(v).unwrap();
        assert_eq!(cfg.sweep.unwrap().points().len(), 6);
    }
}
