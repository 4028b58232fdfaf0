//! Run configuration: a TOML file plus `--set KEY=VALUE` overrides.
//!
//! ```toml
//! model = "I"            # I, II, III or custom
//!
//! [params]
//! E1 = 1.0
//! E2 = 3.0
//! Tc = 1.0               # Tr defaults to Tc
//! Th = 4.0
//! p1 = 1e-3
//! p2 = 1e-3
//! p3 = 1e-3
//! g = 1e-3
//!
//! [sweep]
//! axis = "Th"
//! start = 1.0
//! stop = 20.0
//! count = 39
//! rules = ["p3 = p2"]
//! ```
//!
//! Custom models replace `[params]` with `[[particle]]` tables (each with
//! `energies` and `[[particle.bath]]` channels) and `[[interaction]]` tables.

use std::path::Path;

use serde::{Deserialize, Serialize};
use toml::{Table, Value};

use qfridge::experiments::{Axis, DerivedRule, Observable, SweepConfig};
use qfridge::{BathChannel, FridgeModel, InteractionTerm, ModelParams, ModelTag, ParticleSpec};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub model: ModelSpec,
    pub sweep: Option<SweepSection>,
    pub evolve: EvolveSection,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelSpec {
    Named(ModelParams),
    Custom(CustomModel),
}

impl ModelSpec {
    pub fn build(&self) -> Result<FridgeModel, CliError> {
        match self {
            ModelSpec::Named(p) => p.build().map_err(CliError::from_model),
            ModelSpec::Custom(c) => c.build(),
        }
    }

    /// Every parameter the model was built from.
    pub fn resolved(&self) -> serde_json::Value {
        match self {
            ModelSpec::Named(p) => {
                let params: serde_json::Map<_, _> = p
                    .entries()
                    .into_iter()
                    .map(|(k, v)| (k.to_string(), serde_json::json!(v)))
                    .collect();
                serde_json::json!({ "model": p.tag().to_string(), "params": params })
            }
            ModelSpec::Custom(c) => serde_json::json!({ "model": "custom", "custom": c }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomModel {
    pub particle: Vec<RawParticle>,
    #[serde(default)]
    pub interaction: Vec<RawInteraction>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawParticle {
    pub energies: Vec<f64>,
    #[serde(default)]
    pub bath: Vec<RawBath>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawBath {
    /// `full_reset` or `transition_jump`.
    pub kind: String,
    pub temperature: f64,
    pub rate: f64,
    pub lower: Option<usize>,
    pub upper: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawInteraction {
    pub coupling: f64,
    pub bra: Vec<usize>,
    pub ket: Vec<usize>,
}

impl CustomModel {
    fn build(&self) -> Result<FridgeModel, CliError> {
        let mut particles = Vec::new();
        for (i, p) in self.particle.iter().enumerate() {
            let baths = p
                .bath
                .iter()
                .enumerate()
                .map(|(k, b)| {
                    let at = format!("particle[{i}].bath[{k}]");
                    match (b.kind.as_str(), b.lower, b.upper) {
                        ("full_reset", None, None) => BathChannel::full_reset(b.temperature, b.rate),
                        ("transition_jump", Some(lo), Some(hi)) => {
                            BathChannel::transition_jump(lo, hi, b.temperature, b.rate)
                        }
                        ("transition_jump", _, _) => {
                            return Err(CliError::Usage(format!("{at}: transition_jump needs `lower` and `upper`")))
                        }
                        ("full_reset", _, _) => {
                            return Err(CliError::Usage(format!("{at}: full_reset takes no `lower`/`upper`")))
                        }
                        (other, _, _) => {
                            return Err(CliError::Usage(format!(
                                "{at}: unknown bath kind `{other}` (expected full_reset or transition_jump)"
                            )))
                        }
                    }
                    .map_err(|e| CliError::Usage(format!("{at}: {e}")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            particles.push(
                ParticleSpec::new(p.energies.clone(), baths)
                    .map_err(|e| CliError::Usage(format!("particle[{i}]: {e}")))?,
            );
        }
        let interactions = self
            .interaction
            .iter()
            .enumerate()
            .map(|(k, t)| {
                InteractionTerm::new(t.coupling, t.bra.clone(), t.ket.clone())
                    .map_err(|e| CliError::Usage(format!("interaction[{k}]: {e}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        FridgeModel::new(particles, interactions, ModelTag::Custom).map_err(CliError::from_model)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub axis: String,
    pub values: Option<Vec<f64>>,
    pub start: Option<f64>,
    pub stop: Option<f64>,
    pub count: Option<usize>,
    /// `linear` (default) or `log`.
    pub spacing: Option<String>,
    #[serde(default)]
    pub rules: Vec<String>,
    pub outputs: Option<Vec<String>>,
    pub label: Option<String>,
}

impl SweepSection {
    pub fn axis(&self) -> Result<Axis, CliError> {
        let axis = match (&self.values, self.start, self.stop, self.count) {
            (Some(v), None, None, None) => Axis::new(&self.axis, v.clone()),
            (None, Some(a), Some(b), Some(n)) => match self.spacing.as_deref().unwrap_or("linear") {
                "linear" => Axis::linear(&self.axis, a, b, n),
                "log" => Axis::logarithmic(&self.axis, a, b, n),
                other => {
                    return Err(CliError::Usage(format!(
                        "sweep.spacing: expected `linear` or `log`, got `{other}`"
                    )))
                }
            },
            _ => {
                return Err(CliError::Usage(
                    "sweep: give either `values` or all of `start`, `stop`, `count`".into(),
                ))
            }
        };
        axis.map_err(|e| CliError::Usage(format!("sweep: {e}")))
    }

    pub fn to_config(&self, base: ModelParams, tol: f64) -> Result<SweepConfig, CliError> {
        let mut config = SweepConfig::new(base, self.axis()?).with_tol(tol);
        if let Some(label) = &self.label {
            config = config.with_label(label.clone());
        }
        for rule in &self.rules {
            let parsed: DerivedRule = rule
                .parse()
                .map_err(|e| CliError::Usage(format!("sweep.rules: {e}")))?;
            config.rules.push(parsed);
        }
        if let Some(outputs) = &self.outputs {
            config.outputs = outputs
                .iter()
                .map(|o| o.parse::<Observable>())
                .collect::<Result<_, _>>()
                .map_err(|e| CliError::Usage(format!("sweep.outputs: {e}")))?;
        }
        config
            .validate()
            .map_err(|e| CliError::Usage(format!("sweep: {e}")))?;
        Ok(config)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveSection {
    #[serde(default = "default_t_final")]
    pub t_final: f64,
    pub dt: Option<f64>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// `mixed` (maximally mixed, default), `ground` or `excited`.
    #[serde(default = "default_initial")]
    pub initial: String,
}

fn default_t_final() -> f64 {
    1000.0
}

fn default_samples() -> usize {
    20
}

fn default_initial() -> String {
    "mixed".into()
}

impl Default for EvolveSection {
    fn default() -> Self {
        Self {
            t_final: default_t_final(),
            dt: None,
            samples: default_samples(),
            initial: default_initial(),
        }
    }
}

const TOP_LEVEL: [&str; 6] = ["model", "params", "sweep", "evolve", "particle", "interaction"];

/// Reads `path` (if any), applies `overrides` and resolves the model.
pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<RunConfig, CliError> {
    let mut table = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", p.display())))?;
            text.parse::<Table>()
                .map_err(|e| CliError::Usage(format!("{}: {e}", p.display())))?
        }
        None => Table::new(),
    };
    for item in overrides {
        apply_override(&mut table, item)?;
    }
    resolve(table)
}

/// `KEY=VALUE`. Bare keys go to `[params]` (except `model`); dotted keys
/// address a section, e.g. `sweep.axis=Th`.
pub fn apply_override(table: &mut Table, item: &str) -> Result<(), CliError> {
    let (key, raw) = item
        .split_once('=')
        .ok_or_else(|| CliError::Usage(format!("--set expects KEY=VALUE, got `{item}`")))?;
    let (key, raw) = (key.trim(), raw.trim());
    let value = parse_value(raw);
    let (section, name) = match key.split_once('.') {
        Some((s, n)) => (Some(s), n),
        None if key == "model" => (None, key),
        None => (Some("params"), key),
    };
    match section {
        None => {
            table.insert(name.to_string(), value);
        }
        Some(s) => {
            let entry = table
                .entry(s.to_string())
                .or_insert_with(|| Value::Table(Table::new()));
            let sub = entry
                .as_table_mut()
                .ok_or_else(|| CliError::Usage(format!("`{s}` is not a section")))?;
            sub.insert(name.to_string(), value);
        }
    }
    Ok(())
}

fn parse_value(raw: &str) -> Value {
    format!("v = {raw}")
        .parse::<Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| Value::String(raw.to_string()))
}

fn resolve(mut table: Table) -> Result<RunConfig, CliError> {
    if let Some(unknown) = table.keys().find(|k| !TOP_LEVEL.contains(&k.as_str())) {
        return Err(CliError::Usage(format!(
            "unknown top-level key `{unknown}` (expected one of {})",
            TOP_LEVEL.join(", ")
        )));
    }
    let model = match table.remove("model") {
        Some(Value::String(s)) => s,
        Some(other) => return Err(CliError::Usage(format!("`model` must be a string, got {other}"))),
        None => return Err(CliError::Usage("missing required field `model`".into())),
    };

    let spec = if model == "custom" {
        let mut custom = Table::new();
        for key in ["particle", "interaction"] {
            if let Some(v) = table.remove(key) {
                custom.insert(key.into(), v);
            }
        }
        if table.contains_key("params") {
            return Err(CliError::Usage("a custom model takes no [params] section".into()));
        }
        let custom: CustomModel = Value::Table(custom)
            .try_into()
            .map_err(|e| CliError::Usage(format!("custom model: {e}")))?;
        ModelSpec::Custom(custom)
    } else {
        if table.contains_key("particle") || table.contains_key("interaction") {
            return Err(CliError::Usage(format!(
                "[[particle]] and [[interaction]] need model = \"custom\", not \"{model}\""
            )));
        }
        let mut params = match table.remove("params") {
            Some(Value::Table(t)) => t,
            Some(_) => return Err(CliError::Usage("`params` must be a table".into())),
            None => Table::new(),
        };
        if (model == "I" || model == "III") && !params.contains_key("Tr") {
            if let Some(tc) = params.get("Tc").cloned() {
                params.insert("Tr".into(), tc);
            }
        }
        for (_, value) in params.iter_mut() {
            if let Value::Integer(i) = *value {
                *value = Value::Float(i as f64);
            }
        }
        params.insert("model".into(), Value::String(model.clone()));
        let parsed: ModelParams = Value::Table(params).try_into().map_err(|e: toml::de::Error| {
            CliError::Usage(format!("params (model {model}): {}", e.message()))
        })?;
        ModelSpec::Named(parsed)
    };

    let sweep = table
        .remove("sweep")
        .map(|v| v.try_into::<SweepSection>())
        .transpose()
        .map_err(|e| CliError::Usage(format!("sweep: {}", e.message())))?;
    let evolve = table
        .remove("evolve")
        .map(|v| v.try_into::<EvolveSection>())
        .transpose()
        .map_err(|e| CliError::Usage(format!("evolve: {}", e.message())))?
        .unwrap_or_default();

    Ok(RunConfig {
        model: spec,
        sweep,
        evolve,
    })
}
