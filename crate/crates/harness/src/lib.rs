//! Synthetic cohort databases, an in-memory oracle over reasoned logical
//! forms, SQLite execution of query plans and per-line recall analysis.

pub mod check;
pub mod criteria;
pub mod db;
pub mod exec;
pub mod generate;
pub mod oracle;
pub mod recall;
pub mod trial;

use std::path::Path;

use thiserror::Error;

pub use db::{SyntheticDb, Variant};
pub use exec::{execute, Execution, LineResult, SqliteDb};
pub use generate::{generate_db, GenConfig, Plant, PlantFile};
pub use oracle::oracle_eval;
pub use recall::{recall_curve, RecallCurve, RecallPoint};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HarnessError {
    #[error("infeasible plant: {0}")]
    InfeasiblePlant(String),
    #[error("gold set is empty")]
    EmptyGold,
    #[error("line {line}: {message}")]
    Execution { line: usize, message: String },
    #[error("database error: {0}")]
    Sqlite(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("parse error: {0}")]
    Parse(String),
}

impl HarnessError {
    /// Short machine-readable name of the error variant.
    pub fn code(&self) -> &'static str {
        match self {
            HarnessError::InfeasiblePlant(_) => "InfeasiblePlant",
            HarnessError::EmptyGold => "EmptyGold",
            HarnessError::Execution { .. } => "ExecutionError",
            HarnessError::Sqlite(_) => "DatabaseError",
            HarnessError::Io { .. } => "IoError",
            HarnessError::Parse(_) => "ParseError",
        }
    }

    pub(crate) fn io(path: &Path, e: std::io::Error) -> Self {
        HarnessError::Io { path: path.display().to_string(), message: e.to_string() }
    }
}

impl From<rusqlite::Error> for HarnessError {
    fn from(e: rusqlite::Error) -> Self {
        HarnessError::Sqlite(e.to_string())
    }
}
