//! Plan execution against an embedded SQLite database.

use std::collections::BTreeSet;
use std::path::Path;
use std::sync::OnceLock;

use lfq_core::codegen::{LineStatus, QueryPlan};
use lfq_core::llf::Polarity;
use regex::Regex;
use rusqlite::Connection;
use serde::{Deserialize, Serialize};

use crate::db::{SyntheticDb, Table, Value, Variant};
use crate::HarnessError;

/// Rewrites the generator's ANSI date and interval syntax into SQLite's.
///
/// `TIMESTAMP 'x'` and `DATE 'x'` become `'x'` (dates are stored as ISO
/// text), and `c + INTERVAL 'n' UNIT` becomes `datetime(c, '+n units')`.
pub fn lower(sql: &str) -> String {
    static LITERAL: OnceLock<Regex> = OnceLock::new();
    static INTERVAL: OnceLock<Regex> = OnceLock::new();
    let literal = LITERAL.get_or_init(|| Regex::new(r"\b(?:TIMESTAMP|DATE) ('[^']*')").unwrap());
    let interval =
        INTERVAL.get_or_init(|| Regex::new(r"([A-Za-z_][\w.]*) \+ INTERVAL '(\d+)' (MINUTE|HOUR|DAY)\b").unwrap());
    let sql = literal.replace_all(sql, "$1");
    interval
        .replace_all(&sql, |c: &regex::Captures| {
            let unit = match &c[3] {
                "MINUTE" => "minutes",
                "HOUR" => "hours",
                _ => "days",
            };
            format!("datetime({}, '+{} {unit}')", &c[1], &c[2])
        })
        .into_owned()
}

pub struct SqliteDb {
    conn: Connection,
}

impl SqliteDb {
    /// An in-memory database holding one layout of `db`.
    pub fn load(db: &SyntheticDb, variant: Variant) -> Result<Self, HarnessError> {
        let mut conn = Connection::open_in_memory()?;
        let tables = db.tables(variant);
        let tx = conn.transaction()?;
        for t in &tables {
            tx.execute_batch(&t.ddl())?;
            insert_rows(&tx, t)?;
        }
        tx.commit()?;
        Ok(SqliteDb { conn })
    }

    /// Loads `schema.sql` and `data.sql` from a layout directory.
    pub fn open_dir(dir: &Path) -> Result<Self, HarnessError> {
        let conn = Connection::open_in_memory()?;
        for file in ["schema.sql", "data.sql"] {
            let path = dir.join(file);
            let sql = std::fs::read_to_string(&path).map_err(|e| HarnessError::io(&path, e))?;
            conn.execute_batch(&sql)?;
        }
        Ok(SqliteDb { conn })
    }

    /// Runs generated SQL and returns its distinct first-column ids.
    pub fn person_ids(&self, sql: &str) -> Result<BTreeSet<i64>, rusqlite::Error> {
        let mut stmt = self.conn.prepare(&lower(sql))?;
        let rows = stmt.query_map([], |r| r.get::<_, i64>(0))?;
        rows.collect()
    }

    pub fn connection(&self) -> &Connection {
        &self.conn
    }
}

fn insert_rows(conn: &Connection, t: &Table) -> Result<(), rusqlite::Error> {
    let cols: Vec<&str> = t.columns.iter().map(|(c, _)| *c).collect();
    let marks = vec!["?"; cols.len()].join(", ");
    let mut stmt = conn.prepare(&format!("INSERT INTO {} ({}) VALUES ({marks})", t.name, cols.join(", ")))?;
    for row in &t.rows {
        let params: Vec<rusqlite::types::Value> = row
            .iter()
            .map(|v| match v {
                Value::Int(i) => rusqlite::types::Value::Integer(*i),
                Value::Real(r) => rusqlite::types::Value::Real(*r),
                Value::Text(s) => rusqlite::types::Value::Text(s.clone()),
                Value::Null => rusqlite::types::Value::Null,
            })
            .collect();
        stmt.execute(rusqlite::params_from_iter(params))?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineResult {
    pub line_number: usize,
    pub polarity: Polarity,
    pub status: LineStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    /// The line's own cohort, when its SQL ran.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cohort: Option<BTreeSet<i64>>,
    /// The combined cohort after this line; undefined before the first
    /// executed inclusion.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cumulative: Option<BTreeSet<i64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Execution {
    pub lines: Vec<LineResult>,
    pub final_cohort: Option<BTreeSet<i64>>,
}

/// Running state of the combined cohort: included ∩ … minus excluded ∪ ….
#[derive(Default)]
struct Combined {
    included: Option<BTreeSet<i64>>,
    excluded: BTreeSet<i64>,
}

impl Combined {
    fn with(&self, polarity: Polarity, cohort: &BTreeSet<i64>) -> Combined {
        match polarity {
            Polarity::Inclusion => Combined {
                included: Some(match &self.included {
                    None => cohort.clone(),
                    Some(i) => i.intersection(cohort).copied().collect(),
                }),
                excluded: self.excluded.clone(),
            },
            Polarity::Exclusion => {
                Combined { included: self.included.clone(), excluded: self.excluded.union(cohort).copied().collect() }
            }
        }
    }

    fn current(&self) -> Option<BTreeSet<i64>> {
        self.included.as_ref().map(|i| i.difference(&self.excluded).copied().collect())
    }
}

/// Executes every executed plan line. With `skip_zero`, a line that would
/// leave the combined cohort empty is demoted to skipped and not applied.
pub fn execute(plan: &QueryPlan, db: &SqliteDb, skip_zero: bool) -> Result<Execution, HarnessError> {
    let mut state = Combined::default();
    let mut lines = Vec::with_capacity(plan.lines.len());
    for line in &plan.lines {
        let mut result = LineResult {
            line_number: line.line_number,
            polarity: line.polarity,
            status: line.status,
            reason: line.reason.as_ref().map(|r| format!("{:?}: {}", r.kind, r.detail)),
            cohort: None,
            cumulative: None,
        };
        if let (LineStatus::Executed, Some(sql)) = (line.status, &line.sql) {
            let cohort = db
                .person_ids(sql)
                .map_err(|e| HarnessError::Execution { line: line.line_number, message: e.to_string() })?;
            let next = state.with(line.polarity, &cohort);
            if skip_zero && next.current().is_some_and(|c| c.is_empty()) {
                result.status = LineStatus::Skipped;
                result.reason = Some("ZeroResult: applying this line leaves no eligible patients".into());
            } else {
                state = next;
            }
            result.cohort = Some(cohort);
        }
        result.cumulative = state.current();
        lines.push(result);
    }
    Ok(Execution { final_cohort: state.current(), lines })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lowers_literals_and_intervals() {
        let sql = "SELECT 1 WHERE a1.t <= e.t AND e.t <= a1.t + INTERVAL '2' DAY AND e.t <= TIMESTAMP '2020-01-01 23:59:59' AND b <= DATE '2020-01-01'";
        assert_eq!(
            lower(sql),
            "SELECT 1 WHERE a1.t <= e.t AND e.t <= datetime(a1.t, '+2 days') AND e.t <= '2020-01-01 23:59:59' AND b <= '2020-01-01'"
        );
    }

    #[test]
    fn code_literals_are_untouched() {
        assert_eq!(lower("code IN ('DATE', 'X')"), "code IN ('DATE', 'X')");
    }
}
