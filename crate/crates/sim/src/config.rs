//! TOML scenario files.
//!
//! A file is a serialized [`ScenarioConfig`]. It may instead start from a
//! built-in preset with `preset = "paper-default"` and override any subset of
//! keys; tables are merged key by key.

use std::path::Path;

use flc_sldo_core::scenario::ScenarioConfig;
use toml::{Table, Value};

use crate::error::{Result, SimError};

pub const PRESETS: &[&str] = &["paper-default"];

pub fn preset(name: &str) -> Option<ScenarioConfig> {
    match name {
        "paper-default" => Some(ScenarioConfig::benchmark()),
        _ => None,
    }
}

pub fn to_toml(config: &ScenarioConfig) -> String {
    toml::to_string(config).expect("scenario config always serializes")
}

fn to_table(config: &ScenarioConfig) -> Table {
    Table::try_from(config).expect("scenario config always serializes")
}

fn merge(base: &mut Table, overrides: Table) {
    for (key, value) in overrides {
        match (base.get_mut(&key), value) {
            (Some(Value::Table(b)), Value::Table(o)) => merge(b, o),
            (_, v) => {
                base.insert(key, v);
            }
        }
    }
}

fn from_table(table: Table) -> Result<ScenarioConfig> {
    let config: ScenarioConfig = table
        .try_into()
        .map_err(|e: toml::de::Error| SimError::Config(e.to_string()))?;
    config.validate().map_err(|e| SimError::Config(e.to_string()))?;
    Ok(config)
}

pub fn parse_config(text: &str) -> Result<ScenarioConfig> {
    let mut table: Table = text
        .parse()
        .map_err(|e: toml::de::Error| SimError::Config(e.to_string()))?;
    let table = match table.remove("preset") {
        None => table,
        Some(Value::String(name)) => {
            let base = preset(&name).ok_or_else(|| {
                SimError::Config(format!("unknown preset `{name}` (known: {})", PRESETS.join(", ")))
            })?;
            let mut merged = to_table(&base);
            merge(&mut merged, table);
            merged
        }
        Some(other) => {
            return Err(SimError::Config(format!("`preset` must be a string, got {other}")));
        }
    };
    from_table(table)
}

/// Loads a scenario from a file, or from a preset when `source` names one.
pub fn load_config(source: &str) -> Result<ScenarioConfig> {
    let path = Path::new(source);
    if !path.exists() {
        if let Some(config) = preset(source) {
            return Ok(config);
        }
    }
    let text = std::fs::read_to_string(path).map_err(|e| SimError::Config(format!("{source}: {e}")))?;
    parse_config(&text)
}

/// Returns `config` with the dotted `path` set to `value` (parsed as a TOML
/// value, falling back to a bare string).
pub fn set_path(config: &ScenarioConfig, path: &str, value: &str) -> Result<ScenarioConfig> {
    let parsed: Value = format!("v = {value}")
        .parse::<Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| Value::String(value.to_owned()));
    let mut table = to_table(config);
    let mut cursor = &mut table;
    let keys: Vec<&str> = path.split('.').collect();
    let (last, parents) = keys
        .split_last()
        .ok_or_else(|| SimError::Config("empty parameter path".into()))?;
    for key in parents {
        cursor = match cursor.get_mut(*key) {
            Some(Value::Table(t)) => t,
            _ => return Err(SimError::Config(format!("no table `{key}` in `{path}`"))),
        };
    }
    if !cursor.contains_key(*last) && !matches!(*last, "noise") {
        return Err(SimError::Config(format!("unknown parameter `{path}`")));
    }
    cursor.insert((*last).to_owned(), parsed);
    from_table(table)
}
