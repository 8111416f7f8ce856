use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::model::GameConfig;

/// Starting document when no `--config` file is given.
pub fn default_document() -> Value {
    json!({"cost": 0.5, "alpha_x": 1.0, "alpha_p": 1.0, "sigma_mu": 0.0, "mu_mean": 0.5})
}

/// Sections of the input document that are not part of the game itself.
const SECTIONS: [&str; 2] = ["simulate", "sweep"];

/// A parsed input document: the game plus optional command sections.
#[derive(Debug, Clone)]
pub struct Document {
    /// The game part as JSON, used as the template for sweeps.
    pub game_json: Value,
    pub game: GameConfig,
    pub simulate: Option<SimulateSpec>,
    pub sweep: Option<Value>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateSpec {
    pub theta: f64,
    pub psi_star: f64,
    #[serde(default = "default_agents")]
    pub n: u64,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

fn default_agents() -> u64 {
    1_000_000
}

fn default_seed() -> u64 {
    42
}

pub fn load_document(path: Option<&Path>, overrides: &[String]) -> Result<Document> {
    let mut doc = match path {
        Some(p) => {
            let text =
                std::fs::read_to_string(p).map_err(|e| Error::Config(format!("cannot read {}: {e}", p.display())))?;
            serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", p.display())))?
        }
        None => default_document(),
    };
    for item in overrides {
        apply_override(&mut doc, item)?;
    }
    split_document(doc)
}

pub fn split_document(doc: Value) -> Result<Document> {
    let Value::Object(mut map) = doc else {
        return Err(Error::Config("the config must be a JSON object".into()));
    };
    let mut take = |key: &str| map.remove(key);
    let simulate = take(SECTIONS[0])
        .map(serde_json::from_value::<SimulateSpec>)
        .transpose()
        .map_err(|e| Error::Config(format!("simulate: {e}")))?;
    let sweep = take(SECTIONS[1]);
    let game_json = Value::Object(map);
    let game = parse_game(&game_json)?;
    Ok(Document { game_json, game, simulate, sweep })
}

pub fn parse_game(value: &Value) -> Result<GameConfig> {
    serde_json::from_value(value.clone()).map_err(|e| Error::Config(e.to_string()))
}

/// Applies `key=value`, where `key` is a dotted path and `value` is JSON or a bare string.
pub fn apply_override(doc: &mut Value, item: &str) -> Result<()> {
    let (key, raw) = item.split_once('=').ok_or_else(|| Error::Config(format!("expected key=value, got `{item}`")))?;
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    set_path(doc, key, value)
}

pub fn set_path(doc: &mut Value, key: &str, value: Value) -> Result<()> {
    let mut parts = key.split('.').peekable();
    let mut node = doc;
    while let Some(part) = parts.next() {
        if part.is_empty() {
            return Err(Error::Config(format!("empty segment in key `{key}`")));
        }
        if node.is_null() {
            *node = Value::Object(Map::new());
        }
        let Value::Object(map) = node else {
            return Err(Error::Config(format!("`{key}`: `{part}` is inside a non-object value")));
        };
        if parts.peek().is_none() {
            map.insert(part.to_string(), value);
            return Ok(());
        }
        node = map.entry(part).or_insert(Value::Null);
    }
    Ok(())
}

/// Maps a bare environment field name to its path in the document.
pub fn resolve_key(key: &str) -> String {
    match key {
        "alpha_z" | "gamma" | "sigma_eps" | "z" | "s" => format!("env.{key}"),
        other => other.to_string(),
    }
}
