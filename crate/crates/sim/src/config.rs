//! Scenario config ingestion: JSON parsing with field-path diagnostics,
//! default resolution tracking and validation.

use std::fs;
use std::path::Path;

use serde_json::Value;
use tot_core::{FieldError, ScenarioConfig};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{}", format_diagnostics(.0))]
    Invalid(Vec<FieldError>),
}

fn format_diagnostics(errs: &[FieldError]) -> String {
    errs.iter()
        .map(|e| format!("{}: {}", e.path, e.message))
        .collect::<Vec<_>>()
        .join("\n")
}

impl ConfigError {
    pub fn diagnostics(&self) -> Vec<FieldError> {
        match self {
            ConfigError::Io { path, source } => vec![FieldError {
                path: path.clone(),
                message: source.to_string(),
            }],
            ConfigError::Invalid(errs) => errs.clone(),
        }
    }
}

/// A parsed, validated config plus the field paths that took defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedConfig {
    pub config: ScenarioConfig,
    pub defaults_applied: Vec<String>,
}

impl LoadedConfig {
    /// The config with every default written out.
    pub fn normalized_json(&self) -> String {
        serde_json::to_string_pretty(&self.config).expect("config serializes")
    }
}

pub fn load_config(path: &Path) -> Result<LoadedConfig, ConfigError> {
    let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<LoadedConfig, ConfigError> {
    let raw: Value = serde_json::from_str(text).map_err(|e| {
        ConfigError::Invalid(vec![FieldError {
            path: format!("line {} column {}", e.line(), e.column()),
            message: e.to_string(),
        }])
    })?;
    let config: ScenarioConfig = serde_path_to_error::deserialize(&raw).map_err(|e| {
        let path = e.path().to_string();
        ConfigError::Invalid(vec![FieldError {
            path: if path == "." { "(root)".into() } else { path },
            message: e.into_inner().to_string(),
        }])
    })?;
    config
        .validate()
        .map_err(|errs| ConfigError::Invalid(errs.0))?;
    let resolved = serde_json::to_value(&config).expect("config serializes");
    let mut defaults_applied = Vec::new();
    collect_defaults(&raw, &resolved, "", &mut defaults_applied);
    Ok(LoadedConfig {
        config,
        defaults_applied,
    })
}

/// Paths present in `resolved` but absent from `given`.
fn collect_defaults(given: &Value, resolved: &Value, prefix: &str, out: &mut Vec<String>) {
    match (given, resolved) {
        (Value::Object(g), Value::Object(r)) => {
            for (key, rv) in r {
                let path = if prefix.is_empty() {
                    key.clone()
                } else {
                    format!("{prefix}.{key}")
                };
                match g.get(key) {
                    Some(gv) => collect_defaults(gv, rv, &path, out),
                    None => out.push(path),
                }
            }
        }
        (Value::Array(g), Value::Array(r)) => {
            for (i, (gv, rv)) in g.iter().zip(r).enumerate() {
                collect_defaults(gv, rv, &format!("{prefix}[{i}]"), out);
            }
        }
        _ => {}
    }
}
