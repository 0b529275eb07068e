//! Layered run settings: a command-line flag wins over a config-file key,
//! which wins over the built-in default. Config files are line-oriented
//! `key = value` text with `#` comments.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{anyhow, Context, Result};
use granulate_core::config::parse_keyval;

#[derive(Debug, Default)]
pub struct Cfg {
    map: BTreeMap<String, String>,
}

impl Cfg {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let map = match path {
            None => BTreeMap::new(),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .with_context(|| format!("reading config file {}", p.display()))?;
                parse_keyval(&text)
                    .with_context(|| format!("parsing config file {}", p.display()))?
            }
        };
        Ok(Self { map })
    }

    /// All keys with the given prefix, with the prefix stripped.
    pub fn with_prefix(&self, prefix: &str) -> BTreeMap<String, String> {
        self.map
            .iter()
            .filter_map(|(k, v)| {
                k.strip_prefix(prefix)
                    .map(|rest| (rest.to_string(), v.clone()))
            })
            .collect()
    }

    fn parsed<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.map.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse::<T>()
                .map(Some)
                .map_err(|_| anyhow!("config key {key}: cannot parse {v:?}")),
        }
    }

    /// Flag value if given, else config-file value, else the default.
    pub fn resolve<T: std::str::FromStr>(
        &self,
        flag: Option<T>,
        key: &str,
        default: T,
    ) -> Result<T> {
        match flag {
            Some(v) => Ok(v),
            None => Ok(self.parsed(key)?.unwrap_or(default)),
        }
    }

    /// Same, but with no default: absent everywhere stays `None`.
    pub fn resolve_opt<T: std::str::FromStr>(
        &self,
        flag: Option<T>,
        key: &str,
    ) -> Result<Option<T>> {
        match flag {
            Some(v) => Ok(Some(v)),
            None => self.parsed(key),
        }
    }

    /// Boolean switch: a bare CLI flag turns it on; otherwise the config key
    /// must be `true` or `false`.
    pub fn resolve_switch(&self, flag: bool, key: &str) -> Result<bool> {
        if flag {
            return Ok(true);
        }
        match self.map.get(key) {
            None => Ok(false),
            Some(v) => match v.as_str() {
                "true" => Ok(true),
                "false" => Ok(false),
                other => Err(anyhow!("config key {key}: expected true or false, got {other:?}")),
            },
        }
    }
}
