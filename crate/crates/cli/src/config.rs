//! Run configuration: one TOML or JSON file plus `key.path=value` overrides.

use std::fmt;
use std::path::{Path, PathBuf};

use qek_core::graph::{parse_tu_dataset, preprocess, Dataset};
use qek_core::pipeline::{BenchmarkConfig, DemoConfig, FeatureConfig, NoiseStudyConfig};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

/// Bad or inconsistent configuration; maps to exit code 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "configuration error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn config_err(msg: impl Into<String>) -> anyhow::Error {
    ConfigError(msg.into()).into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetConfig {
    /// Directory holding the `NAME_*.txt` files.
    pub path: PathBuf,
    pub name: String,
    #[serde(default = "default_max_nodes")]
    pub max_nodes: usize,
    #[serde(default)]
    pub keep_classes: Option<Vec<i64>>,
}

fn default_max_nodes() -> usize {
    16
}

impl DatasetConfig {
    pub fn load_raw(&self) -> anyhow::Result<Dataset> {
        Ok(parse_tu_dataset(&self.path, &self.name)?)
    }

    pub fn load(&self) -> anyhow::Result<Dataset> {
        let raw = self.load_raw()?;
        Ok(preprocess(&raw, self.max_nodes, self.keep_classes.as_deref())?)
    }
}

/// Graphs used by the noise study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "kebab-case", deny_unknown_fields)]
pub enum NoiseGraphs {
    /// First `limit` dataset graphs with at most `max_nodes` nodes in `classes`.
    Dataset {
        max_nodes: usize,
        classes: Vec<i64>,
        limit: usize,
    },
    /// Random geometric graphs with node positions.
    Proxy {
        count: usize,
        max_nodes: usize,
        seed: u64,
    },
}

impl Default for NoiseGraphs {
    fn default() -> Self {
        NoiseGraphs::Proxy {
            count: 50,
            max_nodes: 10,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub dataset: Option<DatasetConfig>,
    pub features: FeatureConfig,
    pub mu: f64,
    pub benchmark: BenchmarkConfig,
    pub demo: DemoConfig,
    pub noise_study: NoiseStudyConfig,
    pub noise_graphs: NoiseGraphs,
    pub output_dir: PathBuf,
    /// Worker threads; all cores when absent.
    pub threads: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            dataset: None,
            features: FeatureConfig::default(),
            mu: 1.0,
            benchmark: BenchmarkConfig::default(),
            demo: DemoConfig::default(),
            noise_study: NoiseStudyConfig::default(),
            noise_graphs: NoiseGraphs::default(),
            output_dir: PathBuf::from("qek-out"),
            threads: None,
        }
    }
}

impl RunConfig {
    pub fn dataset(&self) -> anyhow::Result<&DatasetConfig> {
        self.dataset
            .as_ref()
            .ok_or_else(|| config_err("this command needs a [dataset] section"))
    }

    /// Reads `path` (TOML unless the extension is `.json`) and applies
    /// `overrides` of the form `a.b.c=value`, where `value` is a TOML literal
    /// or a bare string.
    pub fn load(path: Option<&Path>, overrides: &[String]) -> anyhow::Result<Self> {
        let mut tree = match path {
            None => Value::Object(Map::new()),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| config_err(format!("cannot read {}: {e}", p.display())))?;
                parse_document(&text, p.extension().is_some_and(|e| e == "json"))
                    .map_err(|e| config_err(format!("{}: {e}", p.display())))?
            }
        };
        for o in overrides {
            apply_override(&mut tree, o)?;
        }
        serde_json::from_value(tree).map_err(|e| config_err(e.to_string()))
    }
}

fn parse_document(text: &str, json: bool) -> Result<Value, String> {
    if json {
        serde_json::from_str(text).map_err(|e| e.to_string())
    } else {
        let table: toml::Table = toml::from_str(text).map_err(|e| e.to_string())?;
        serde_json::to_value(table).map_err(|e| e.to_string())
    }
}

fn parse_literal(raw: &str) -> Value {
    toml::from_str::<toml::Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .and_then(|v| serde_json::to_value(v).ok())
        .unwrap_or_else(|| Value::String(raw.to_string()))
}

fn apply_override(tree: &mut Value, spec: &str) -> anyhow::Result<()> {
    let (key, raw) = spec
        .split_once('=')
        .ok_or_else(|| config_err(format!("override `{spec}` is not key=value")))?;
    let parts: Vec<&str> = key.trim().split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(config_err(format!("override key `{key}` is malformed")));
    }
    let mut node = tree;
    for part in &parts[..parts.len() - 1] {
        let map = node
            .as_object_mut()
            .ok_or_else(|| config_err(format!("`{key}` descends into a non-table value")))?;
        node = map
            .entry(part.to_string())
            .or_insert_with(|| Value::Object(Map::new()));
        if node.is_null() {
            *node = Value::Object(Map::new());
        }
    }
    node.as_object_mut()
        .ok_or_else(|| config_err(format!("`{key}` descends into a non-table value")))?
        .insert(parts[parts.len() - 1].to_string(), parse_literal(raw.trim()));
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_without_file() {
        let c = RunConfig::load(None, &[]).unwrap();
        assert_eq!(c, RunConfig::default());
    }

    #[test]
    fn overrides_create_nested_tables() {
        let c = RunConfig::load(
            None,
            &[
                "mu=0.5".into(),
                "features.shots=100".into(),
                "dataset.path=data/X".into(),
                "dataset.name=X".into(),
                "benchmark.cv.folds=4".into(),
            ],
        )
        .unwrap();
        assert_eq!(c.mu, 0.5);
        assert_eq!(c.features.shots, Some(100));
        assert_eq!(c.dataset.unwrap().path, PathBuf::from("data/X"));
        assert_eq!(c.benchmark.cv.folds, 4);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let e = RunConfig::load(None, &["bogus=1".into()]).unwrap_err();
        assert!(e.downcast_ref::<ConfigError>().is_some());
        assert!(RunConfig::load(None, &["nokey".into()]).is_err());
    }

    #[test]
    fn toml_and_json_files() {
        let dir = tempfile::tempdir().unwrap();
        let t = dir.path().join("c.toml");
        std::fs::write(&t, "mu = 2.0\n[demo]\nnodes = 12\n").unwrap();
        let c = RunConfig::load(Some(&t), &["demo.nodes=14".into()]).unwrap();
        assert_eq!((c.mu, c.demo.nodes), (2.0, 14));
        let j = dir.path().join("c.json");
        std::fs::write(&j, r#"{"noise_graphs": {"source": "proxy", "count": 3, "max_nodes": 5, "seed": 1}}"#).unwrap();
        let c = RunConfig::load(Some(&j), &[]).unwrap();
        assert!(matches!(c.noise_graphs, NoiseGraphs::Proxy { count: 3, .. }));
    }
}
