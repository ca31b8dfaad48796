use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::LfError;

const BUILTIN: &str = include_str!("../../data/catalog.txt");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FunctionKind {
    Entity,
    Demographic,
    Structural,
    Value,
    Comparison,
    Predicate,
}

impl FromStr for FunctionKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "entity" => FunctionKind::Entity,
            "demographic" => FunctionKind::Demographic,
            "structural" => FunctionKind::Structural,
            "value" => FunctionKind::Value,
            "comparison" => FunctionKind::Comparison,
            "predicate" => FunctionKind::Predicate,
            other => return Err(format!("unknown kind `{other}`")),
        })
    }
}

/// Allowed argument counts. `max == None` means unbounded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Arity {
    pub min: usize,
    pub max: Option<usize>,
}

impl Arity {
    pub fn exactly(n: usize) -> Self {
        Arity { min: n, max: Some(n) }
    }

    pub fn accepts(&self, n: usize) -> bool {
        n >= self.min && self.max.is_none_or(|m| n <= m)
    }
}

impl fmt::Display for Arity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.max {
            Some(m) if m == self.min => write!(f, "{m}"),
            Some(m) => write!(f, "{}..{}", self.min, m),
            None => write!(f, "{}..", self.min),
        }
    }
}

impl FromStr for Arity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let num = |t: &str| t.parse::<usize>().map_err(|_| format!("bad arity `{s}`"));
        match s.split_once("..") {
            None => Ok(Arity::exactly(num(s)?)),
            Some((lo, "")) => Ok(Arity { min: num(lo)?, max: None }),
            Some((lo, hi)) => {
                let (min, max) = (num(lo)?, num(hi)?);
                if max < min {
                    return Err(format!("bad arity `{s}`"));
                }
                Ok(Arity { min, max: Some(max) })
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub kind: FunctionKind,
    pub arity: Arity,
    pub chainable: bool,
}

/// The set of logical-form functions known to the parser and validator.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct FunctionCatalog {
    entries: BTreeMap<String, CatalogEntry>,
}

impl FunctionCatalog {
    /// The bundled catalog.
    pub fn builtin() -> Self {
        Self::parse(BUILTIN).expect("bundled catalog is well formed")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, LfError> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| LfError::Catalog { line: 0, message: format!("{}: {e}", path.as_ref().display()) })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, LfError> {
        let mut catalog = FunctionCatalog::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| LfError::Catalog { line: idx + 1, message };
            let mut name = None;
            let mut kind = None;
            let mut arity = None;
            let mut chainable = false;
            for field in line.split_whitespace() {
                let (key, value) =
                    field.split_once('=').ok_or_else(|| err(format!("expected key=value, found `{field}`")))?;
                match key {
                    "name" => name = Some(value.to_string()),
                    "kind" => kind = Some(value.parse().map_err(err)?),
                    "arity" => arity = Some(value.parse().map_err(err)?),
                    "chainable" => {
                        chainable = value.parse().map_err(|_| err(format!("bad chainable flag `{value}`")))?
                    }
                    other => return Err(err(format!("unknown key `{other}`"))),
                }
            }
            let name = name.ok_or_else(|| err("missing name".into()))?;
            if !is_function_name(&name) {
                return Err(err(format!("invalid function name `{name}`")));
            }
            let entry = CatalogEntry {
                kind: kind.ok_or_else(|| err("missing kind".into()))?,
                arity: arity.ok_or_else(|| err("missing arity".into()))?,
                chainable,
            };
            catalog.entries.insert(name, entry);
        }
        Ok(catalog)
    }

    pub fn get(&self, name: &str) -> Option<&CatalogEntry> {
        self.entries.get(name)
    }

    pub fn kind(&self, name: &str) -> Option<FunctionKind> {
        self.get(name).map(|e| e.kind)
    }

    pub fn insert(&mut self, name: impl Into<String>, entry: CatalogEntry) {
        self.entries.insert(name.into(), entry);
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &CatalogEntry)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn names_of_kind(&self, kind: FunctionKind) -> Vec<&str> {
        self.iter().filter(|(_, e)| e.kind == kind).map(|(n, _)| n).collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// `[a-z_][a-z0-9_]*`
pub fn is_function_name(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_lowercase() || c == '_')
        && chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_')
}
