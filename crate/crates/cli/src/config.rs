use slide_core::io::{merge_toml, RunConfig};
use slide_core::{Error, Result};
use toml::{Table, Value};

use crate::GlobalArgs;

/// Command line values laid over the configuration before it is resolved, so
/// they go through the same validation as file values.
#[derive(Default)]
pub struct Overrides(Table);

impl Overrides {
    /// Sets the dotted `key`, creating intermediate tables.
    pub fn set(&mut self, key: &str, value: Value) {
        let mut parts: Vec<&str> = key.split('.').collect();
        let last = parts.pop().expect("nonempty key");
        let mut table = &mut self.0;
        for p in parts {
            table = table
                .entry(p)
                .or_insert_with(|| Value::Table(Table::new()))
                .as_table_mut()
                .expect("override keys nest tables");
        }
        table.insert(last.to_string(), value);
    }

    pub fn opt<V: Into<Value>>(&mut self, key: &str, value: Option<V>) {
        if let Some(v) = value {
            self.set(key, v.into());
        }
    }

    pub fn count(&mut self, key: &str, value: Option<usize>) {
        self.opt(key, value.map(int));
    }

    pub fn counts(&mut self, key: &str, value: Option<&[usize]>) {
        self.opt(key, value.map(|v| Value::Array(v.iter().copied().map(int).collect())));
    }

    pub fn floats(&mut self, key: &str, value: Option<&[f64]>) {
        self.opt(key, value.map(|v| Value::Array(v.iter().copied().map(Value::Float).collect())));
    }
}

fn int(n: usize) -> Value {
    Value::Integer(n.min(i64::MAX as usize) as i64)
}

/// Loads `--config` or `--preset`, or the preset named `fallback` when neither
/// is given, applies `overrides` and then the global seed.
pub fn load(g: &GlobalArgs, fallback: Option<&str>, overrides: Overrides) -> Result<RunConfig> {
    let mut value = match (&g.config, g.preset.as_deref(), fallback) {
        (Some(path), _, _) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::config("", format!("cannot read {}: {e}", path.display())))?;
            toml::from_str::<Value>(&text).map_err(|e| Error::config("", format!("{}: {e}", path.display())))?
        }
        (None, Some(name), _) | (None, None, Some(name)) => {
            let mut t = Table::new();
            t.insert("preset".into(), Value::String(name.to_string()));
            Value::Table(t)
        }
        (None, None, None) => return Err(Error::config("config", "pass --config FILE or --preset NAME")),
    };
    merge_toml(&mut value, Value::Table(overrides.0));
    let mut cfg = RunConfig::from_value(value)?;
    if let Some(seed) = g.seed {
        cfg.system.seed = seed;
        cfg.training.seed = seed;
        if let Some(e) = cfg.estimator.as_mut() {
            e.seed = Some(seed);
        }
    }
    Ok(cfg)
}
