//! The bundled six-line trial with its plant file and gold set.
//!
//! Forty enrolled persons (ids 1 to 40) and twenty decoys (41 to 60) carry
//! the diagnosis. Line 3 keeps 30 of the enrolled, line 4 cannot be
//! computed, line 5 removes 10 more and line 6 removes 5 more, so recall
//! runs 1, 1, 0.75, 0.75, 0.5, 0.375.

use std::collections::BTreeSet;

use chrono::NaiveDate;
use lfq_core::pipeline::{InputMode, QueryRequest};
use serde::{Deserialize, Serialize};

use crate::generate::PlantFile;
use crate::recall::parse_gold;
use crate::HarnessError;

pub const TRIAL: &str = include_str!("../data/trial/trial.json");
pub const PLANTS: &str = include_str!("../data/trial/plants.json");
pub const GOLD: &str = include_str!("../data/trial/gold.txt");
pub const RECALL: &str = include_str!("../data/trial/recall.tsv");
pub const SEED: u64 = 42;
pub const PATIENTS: usize = 1000;

/// Criteria of one trial, independent of the target mapping.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrialFile {
    #[serde(default)]
    pub input_mode: InputMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pin_date: Option<NaiveDate>,
    #[serde(default)]
    pub inclusion: Vec<String>,
    #[serde(default)]
    pub exclusion: Vec<String>,
}

impl TrialFile {
    pub fn parse(text: &str) -> Result<Self, HarnessError> {
        serde_json::from_str(text).map_err(|e| HarnessError::Parse(format!("trial file: {e}")))
    }

    pub fn request(&self, smm_name: &str) -> QueryRequest {
        let mut r = QueryRequest::new(smm_name, self.input_mode);
        r.inclusion = self.inclusion.clone();
        r.exclusion = self.exclusion.clone();
        r.pin_date = self.pin_date;
        r
    }
}

pub fn trial() -> TrialFile {
    TrialFile::parse(TRIAL).expect("bundled trial is valid")
}

pub fn plants() -> PlantFile {
    PlantFile::parse(PLANTS).expect("bundled plants are valid")
}

pub fn gold() -> BTreeSet<i64> {
    parse_gold(GOLD).expect("bundled gold set is valid")
}
