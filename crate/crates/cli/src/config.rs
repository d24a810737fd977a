use std::path::Path;

use clap::parser::ValueSource;
use clap::ArgMatches;
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::CliError;

/// Parsed `--config` file: a flat object, or a manifest wrapping one.
pub struct ConfigFile {
    pub values: Map<String, Value>,
    pub command: Option<String>,
}

pub fn load_config(path: &Path) -> Result<ConfigFile, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
    let Value::Object(mut map) = value else {
        return Err(CliError::config(format!(
            "{}: expected a JSON object",
            path.display()
        )));
    };
    if let (Some(Value::Object(inner)), Some(Value::String(command))) =
        (map.get("config"), map.get("command"))
    {
        return Ok(ConfigFile {
            values: inner.clone(),
            command: Some(command.clone()),
        });
    }
    map.remove("threads");
    Ok(ConfigFile {
        values: map,
        command: None,
    })
}

/// Resolves `defaults < config file < explicit flags` and returns the typed
/// arguments with the flat map echoed into the manifest.
pub fn resolve<T: Serialize + DeserializeOwned>(
    parsed: &T,
    matches: &ArgMatches,
    config: Option<&ConfigFile>,
) -> Result<(T, Map<String, Value>), CliError> {
    let Value::Object(mut resolved) = serde_json::to_value(parsed).expect("arguments serialize")
    else {
        unreachable!("argument structs serialize to objects")
    };
    if let Some(config) = config {
        for (key, value) in &config.values {
            if !resolved.contains_key(key) {
                return Err(CliError::config(format!("unknown config key `{key}`")));
            }
            let id = key.replace('-', "_");
            if matches.value_source(&id) != Some(ValueSource::CommandLine) {
                resolved.insert(key.clone(), value.clone());
            }
        }
    }
    let typed = serde_json::from_value(Value::Object(resolved.clone()))
        .map_err(|e| CliError::config(format!("invalid config value: {e}")))?;
    Ok((typed, resolved))
}
