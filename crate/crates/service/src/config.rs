//! Service configuration (TOML) with environment overrides.
//!
//! ```toml
//! listen = "127.0.0.1:8080"
//! data_dir = "data"          # harness databases, one directory each
//! smm_dir = "mappings"       # optional extra mapping documents (*.json)
//! concepts = "kb/concepts.tsv"   # optional; the bundled fixture otherwise
//! triples = "kb/triples.tsv"
//! lexicon = "kb/lexicon.tsv"
//! catalog = "kb/catalog.txt"
//! ```
//!
//! Relative paths resolve against the configuration file's directory.
//! `LFQ_PORT` replaces the port of `listen` and `LFQ_DATA_DIR` replaces
//! `data_dir`.

use std::path::{Path, PathBuf};

use lfq_core::fixture;
use lfq_core::kb::KnowledgeBase;
use lfq_core::llf::FunctionCatalog;
use lfq_core::normalize::Lexicon;
use lfq_core::pipeline::Engine;
use lfq_core::smm::load_smm_file;
use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default = "default_listen")]
    pub listen: String,
    #[serde(default = "default_data_dir")]
    pub data_dir: PathBuf,
    #[serde(default)]
    pub smm_dir: Option<PathBuf>,
    #[serde(default)]
    pub concepts: Option<PathBuf>,
    #[serde(default)]
    pub triples: Option<PathBuf>,
    #[serde(default)]
    pub lexicon: Option<PathBuf>,
    #[serde(default)]
    pub catalog: Option<PathBuf>,
}

fn default_listen() -> String {
    "127.0.0.1:8080".into()
}

fn default_data_dir() -> PathBuf {
    PathBuf::from("data")
}

impl Default for Config {
    fn default() -> Self {
        toml::from_str("").expect("defaults")
    }
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    /// Reads a file and resolves its relative paths against its directory.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::Io { path: path.display().to_string(), message: e.to_string() })?;
        let mut c = Self::parse(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut c.data_dir);
        for p in [&mut c.smm_dir, &mut c.concepts, &mut c.triples, &mut c.lexicon, &mut c.catalog].into_iter().flatten()
        {
            fix(p);
        }
        Ok(c)
    }

    /// Applies `LFQ_PORT` and `LFQ_DATA_DIR` as looked up by `var`.
    pub fn with_overrides(mut self, var: impl Fn(&str) -> Option<String>) -> Result<Self, ConfigError> {
        if let Some(port) = var("LFQ_PORT") {
            let port: u16 = port.trim().parse().map_err(|_| ConfigError::Invalid(format!("LFQ_PORT `{port}`")))?;
            let host = self.listen.rsplit_once(':').map(|(h, _)| h).unwrap_or(&self.listen);
            self.listen = format!("{host}:{port}");
        }
        if let Some(dir) = var("LFQ_DATA_DIR") {
            self.data_dir = PathBuf::from(dir);
        }
        Ok(self)
    }

    pub fn with_env(self) -> Result<Self, ConfigError> {
        self.with_overrides(|k| std::env::var(k).ok())
    }

    /// The engine over the configured resources, falling back to the
    /// bundled fixtures.
    pub fn engine(&self) -> Result<Engine, ConfigError> {
        let io = |p: &Path, m: String| ConfigError::Io { path: p.display().to_string(), message: m };
        let kb = match (&self.concepts, &self.triples) {
            (None, None) => fixture::knowledge_base(),
            (Some(c), Some(t)) => KnowledgeBase::load_files(c, t).map_err(|e| io(c, e.to_string()))?,
            _ => return Err(ConfigError::Invalid("give both `concepts` and `triples`, or neither".into())),
        };
        let lexicon = match &self.lexicon {
            None => fixture::lexicon(),
            Some(p) => Lexicon::load(p).map_err(|e| io(p, e.to_string()))?,
        };
        let catalog = match &self.catalog {
            None => FunctionCatalog::builtin(),
            Some(p) => FunctionCatalog::load(p).map_err(|e| io(p, e.to_string()))?,
        };
        let mut smms: Vec<_> = fixture::SMM_DOCUMENTS.iter().filter_map(|(n, _)| fixture::smm(n)).collect();
        if let Some(dir) = &self.smm_dir {
            let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
                .map_err(|e| io(dir, e.to_string()))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "json"))
                .collect();
            files.sort();
            for f in files {
                let loaded = load_smm_file(&f, &kb).map_err(|e| io(&f, e.to_string()))?;
                for d in &loaded.diagnostics {
                    tracing::warn!(file = %f.display(), path = %d.path, cui = %d.cui, "unknown concept tag");
                }
                smms.retain(|s| s.name != loaded.mapping.name);
                smms.push(loaded.mapping);
            }
        }
        Ok(Engine::new(kb, lexicon, catalog, smms))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_overrides() {
        let c = Config::parse("").unwrap();
        assert_eq!(c.listen, "127.0.0.1:8080");
        let c = c
            .with_overrides(|k| match k {
                "LFQ_PORT" => Some("9001".into()),
                "LFQ_DATA_DIR" => Some("/srv/db".into()),
                _ => None,
            })
            .unwrap();
        assert_eq!(c.listen, "127.0.0.1:9001");
        assert_eq!(c.data_dir, PathBuf::from("/srv/db"));
    }

    #[test]
    fn bad_port_and_unknown_keys() {
        assert!(Config::default().with_overrides(|_| Some("x".into())).is_err());
        assert!(Config::parse("listen = 1").is_err());
        assert!(Config::parse("colour = \"red\"").is_err());
    }

    #[test]
    fn relative_paths_follow_the_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("lfq.toml");
        std::fs::write(&path, "data_dir = \"dbs\"\n").unwrap();
        assert_eq!(Config::load(&path).unwrap().data_dir, dir.path().join("dbs"));
    }

    #[test]
    fn half_a_knowledge_base_is_rejected() {
        let c = Config { concepts: Some("c.tsv".into()), ..Config::default() };
        assert!(matches!(c.engine(), Err(ConfigError::Invalid(_))));
    }
}
