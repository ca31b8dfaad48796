//! Per-line recall of the combined cohort against a gold set.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use lfq_core::codegen::LineStatus;
use serde::{Deserialize, Serialize};

use crate::exec::Execution;
use crate::HarnessError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecallPoint {
    pub line_number: usize,
    pub status: LineStatus,
    /// False before the first executed inclusion, where no cohort exists yet.
    pub defined: bool,
    pub size: usize,
    pub recall: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecallCurve {
    pub gold: BTreeSet<i64>,
    pub points: Vec<RecallPoint>,
}

/// One point per plan line: |cohort ∩ gold| / |gold| for the combined
/// cohort after that line. Skipped lines repeat the previous cohort.
pub fn recall_curve(execution: &Execution, gold: &BTreeSet<i64>) -> Result<RecallCurve, HarnessError> {
    if gold.is_empty() {
        return Err(HarnessError::EmptyGold);
    }
    let points = execution
        .lines
        .iter()
        .map(|l| {
            let (defined, size, hits) = match &l.cumulative {
                Some(c) => (true, c.len(), c.intersection(gold).count()),
                None => (false, 0, 0),
            };
            RecallPoint {
                line_number: l.line_number,
                status: l.status,
                defined,
                size,
                recall: hits as f64 / gold.len() as f64,
            }
        })
        .collect();
    Ok(RecallCurve { gold: gold.clone(), points })
}

impl RecallCurve {
    /// Two-column tab-separated `line`, `recall`.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("line\trecall\n");
        for p in &self.points {
            writeln!(out, "{}\t{:.4}", p.line_number, p.recall).unwrap();
        }
        out
    }

    /// `(line, recall)` pairs for plotting.
    pub fn series(&self) -> Vec<(usize, f64)> {
        self.points.iter().map(|p| (p.line_number, p.recall)).collect()
    }
}

/// Reads a gold set: one person id per line; blank lines and `#` comments
/// are ignored, as is a non-numeric header.
pub fn parse_gold(text: &str) -> Result<BTreeSet<i64>, HarnessError> {
    let mut out = BTreeSet::new();
    for (i, line) in text.lines().enumerate() {
        let t = line.split([',', '\t']).next().unwrap_or("").trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        match t.parse() {
            Ok(id) => {
                out.insert(id);
            }
            Err(_) if i == 0 => {}
            Err(_) => return Err(HarnessError::Parse(format!("gold line {}: `{t}` is not a person id", i + 1))),
        }
    }
    Ok(out)
}
