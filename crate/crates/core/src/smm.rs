//! Semantic metadata mappings: declarative descriptions of a target schema
//! whose tables and columns are tagged with knowledge-base concepts.
//!
//! Document format (JSON):
//!
//! ```json
//! {
//!   "name": "omop_lite_tall",
//!   "demographics": {
//!     "table": "person", "person_id_column": "person_id",
//!     "birth_date_column": "birth_date", "gender_column": "gender",
//!     "female_value": "F", "male_value": "M"
//!   },
//!   "tables": [
//!     {
//!       "table": "measurement", "person_id_column": "person_id",
//!       "date_column": "measurement_datetime", "strategy": "tall",
//!       "concepts": ["C0022885"],
//!       "code_column": { "name": "loinc_code", "system": "LOINC" },
//!       "value_column": "value_num"
//!     },
//!     {
//!       "table": "complete_blood_counts", "person_id_column": "patient_id",
//!       "date_column": "drawn_time", "strategy": "pivoted",
//!       "columns": [
//!         { "column_name": "platelet_count", "concepts": ["C0362994"], "role": "value" }
//!       ]
//!     }
//!   ]
//! }
//! ```
//!
//! A tall `code_column` names either one `system`, or a `system_column`
//! holding the code system of each row together with the `systems` it may
//! contain.

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kb::{CodeSystem, KnowledgeBase};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SmmError {
    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },
    #[error("duplicate table `{0}`")]
    DuplicateTable(String),
    #[error("reading {path}: {message}")]
    Io { path: String, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Tall,
    Pivoted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnRole {
    /// A numeric result; a row has the finding when the column is non-null.
    Value,
    /// A 0/1 indicator.
    Flag,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodeColumn {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub system: Option<CodeSystem>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub system_column: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub systems: Vec<CodeSystem>,
}

impl CodeColumn {
    /// Code systems stored in this column.
    pub fn code_systems(&self) -> Vec<CodeSystem> {
        match self.system {
            Some(s) => vec![s],
            None => self.systems.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PivotColumn {
    pub column_name: String,
    #[serde(rename = "concepts")]
    pub tag_concepts: BTreeSet<String>,
    pub role: ColumnRole,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableMapping {
    #[serde(rename = "table")]
    pub table_name: String,
    pub person_id_column: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub date_column: Option<String>,
    pub strategy: Strategy,
    #[serde(rename = "concepts", default)]
    pub tag_concepts: BTreeSet<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub code_column: Option<CodeColumn>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value_column: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub columns: Vec<PivotColumn>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Demographics {
    pub table: String,
    pub person_id_column: String,
    pub birth_date_column: String,
    pub gender_column: String,
    pub female_value: String,
    pub male_value: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SemanticMetadataMapping {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub demographics: Option<Demographics>,
    pub tables: Vec<TableMapping>,
}

impl SemanticMetadataMapping {
    pub fn table(&self, name: &str) -> Option<&TableMapping> {
        self.tables.iter().find(|t| t.table_name == name)
    }

    /// Concepts that have a dedicated pivoted column somewhere in this
    /// mapping.
    pub fn pivoted_concepts(&self) -> BTreeSet<&str> {
        self.tables.iter().flat_map(|t| &t.columns).flat_map(|c| c.tag_concepts.iter().map(String::as_str)).collect()
    }
}

/// A concept tag that does not resolve against the knowledge base.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SmmDiagnostic {
    pub path: String,
    pub cui: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoadedSmm {
    pub mapping: SemanticMetadataMapping,
    pub diagnostics: Vec<SmmDiagnostic>,
}

pub fn load_smm(document: &str, kb: &KnowledgeBase) -> Result<LoadedSmm, SmmError> {
    let mapping: SemanticMetadataMapping = serde_json::from_str(document).map_err(|e| SmmError::Schema {
        path: format!("line {} column {}", e.line(), e.column()),
        message: e.to_string(),
    })?;
    validate(&mapping)?;
    let mut diagnostics = Vec::new();
    for (i, t) in mapping.tables.iter().enumerate() {
        for cui in &t.tag_concepts {
            if kb.concept(cui).is_none() {
                diagnostics.push(SmmDiagnostic { path: format!("tables[{i}].concepts"), cui: cui.clone() });
            }
        }
        for (j, c) in t.columns.iter().enumerate() {
            for cui in &c.tag_concepts {
                if kb.concept(cui).is_none() {
                    diagnostics
                        .push(SmmDiagnostic { path: format!("tables[{i}].columns[{j}].concepts"), cui: cui.clone() });
                }
            }
        }
    }
    Ok(LoadedSmm { mapping, diagnostics })
}

pub fn load_smm_file(path: impl AsRef<Path>, kb: &KnowledgeBase) -> Result<LoadedSmm, SmmError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| SmmError::Io { path: path.display().to_string(), message: e.to_string() })?;
    load_smm(&text, kb)
}

fn validate(m: &SemanticMetadataMapping) -> Result<(), SmmError> {
    let schema = |path: String, message: &str| SmmError::Schema { path, message: message.to_string() };
    if m.name.trim().is_empty() {
        return Err(schema("name".into(), "empty mapping name"));
    }
    let mut seen = BTreeSet::new();
    for (i, t) in m.tables.iter().enumerate() {
        let at = |field: &str| format!("tables[{i}].{field}");
        if !seen.insert(t.table_name.as_str()) {
            return Err(SmmError::DuplicateTable(t.table_name.clone()));
        }
        for (field, value) in [("table", &t.table_name), ("person_id_column", &t.person_id_column)] {
            if value.trim().is_empty() {
                return Err(schema(at(field), "must not be empty"));
            }
        }
        match t.strategy {
            Strategy::Tall => {
                let Some(cc) = &t.code_column else {
                    return Err(schema(at("code_column"), "tall tables must declare a code column"));
                };
                match (&cc.system, &cc.system_column) {
                    (Some(_), None) if cc.systems.is_empty() => {}
                    (None, Some(_)) if !cc.systems.is_empty() => {}
                    _ => {
                        return Err(schema(
                            at("code_column"),
                            "give either `system`, or `system_column` with a non-empty `systems` list",
                        ))
                    }
                }
                if !t.columns.is_empty() {
                    return Err(schema(at("columns"), "tall tables have no pivoted columns"));
                }
            }
            Strategy::Pivoted => {
                if !t.columns.iter().any(|c| !c.tag_concepts.is_empty()) {
                    return Err(schema(at("columns"), "pivoted tables must declare a tagged column"));
                }
                if t.code_column.is_some() || t.value_column.is_some() {
                    return Err(schema(at("code_column"), "pivoted tables take no code or value column"));
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixture;

    #[test]
    fn duplicate_table() {
        let doc = r#"{"name":"x","tables":[
            {"table":"a","person_id_column":"p","strategy":"tall","code_column":{"name":"c","system":"LOINC"}},
            {"table":"a","person_id_column":"p","strategy":"tall","code_column":{"name":"c","system":"LOINC"}}]}"#;
        assert_eq!(load_smm(doc, &fixture::knowledge_base()), Err(SmmError::DuplicateTable("a".into())));
    }

    #[test]
    fn tall_needs_code_column() {
        let doc = r#"{"name":"x","tables":[{"table":"a","person_id_column":"p","strategy":"tall"}]}"#;
        let err = load_smm(doc, &fixture::knowledge_base()).unwrap_err();
        assert!(matches!(err, SmmError::Schema { ref path, .. } if path == "tables[0].code_column"));
    }

    #[test]
    fn pivoted_needs_tagged_column() {
        let doc = r#"{"name":"x","tables":[{"table":"a","person_id_column":"p","strategy":"pivoted",
            "columns":[{"column_name":"c","concepts":[],"role":"value"}]}]}"#;
        assert!(matches!(load_smm(doc, &fixture::knowledge_base()), Err(SmmError::Schema { .. })));
    }

    #[test]
    fn unknown_tag_is_a_diagnostic() {
        let doc = r#"{"name":"x","tables":[{"table":"a","person_id_column":"p","strategy":"tall",
            "concepts":["C0022885","C7777777"],"code_column":{"name":"c","system":"LOINC"}}]}"#;
        let loaded = load_smm(doc, &fixture::knowledge_base()).unwrap();
        assert_eq!(
            loaded.diagnostics,
            vec![SmmDiagnostic { path: "tables[0].concepts".into(), cui: "C7777777".into() }]
        );
    }

    #[test]
    fn malformed_json() {
        assert!(matches!(load_smm("{", &fixture::knowledge_base()), Err(SmmError::Schema { .. })));
    }
}
