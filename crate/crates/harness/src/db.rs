//! Canonical synthetic records and their tall and pivoted table layouts.

use std::fmt::Write as _;
use std::path::Path;

use chrono::{NaiveDate, NaiveDateTime};
use lfq_core::kb::{Code, CodeSystem, KnowledgeBase};
use serde::{Deserialize, Serialize};

use crate::HarnessError;

pub const DATETIME_FORMAT: &str = "%Y-%m-%d %H:%M:%S";
pub const DATE_FORMAT: &str = "%Y-%m-%d";

/// Root concepts deciding which table family a coded concept is recorded in.
pub const CONDITION_ROOTS: [&str; 2] = ["C0012634", "C9000001"];
pub const PROCEDURE_ROOT: &str = "C0087111";
pub const DRUG_ROOT: &str = "C0013227";
pub const LAB_ROOT: &str = "C0022885";

/// LOINC codes stored in dedicated pivoted columns: (code, table, column).
pub const PIVOT_COLUMNS: [(&str, &str, &str); 5] = [
    ("777-3", "complete_blood_counts", "platelet_count"),
    ("718-7", "complete_blood_counts", "hemoglobin"),
    ("6690-2", "complete_blood_counts", "wbc_count"),
    ("2160-0", "chemistry_panel", "serum_creatinine"),
    ("2345-7", "chemistry_panel", "glucose"),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    Condition,
    Procedure,
    Drug,
    Measurement,
}

impl Domain {
    pub fn systems(self) -> &'static [CodeSystem] {
        match self {
            Domain::Condition => &[CodeSystem::Icd10, CodeSystem::Snomed],
            Domain::Procedure => &[CodeSystem::Snomed],
            Domain::Drug => &[CodeSystem::RxNorm],
            Domain::Measurement => &[CodeSystem::Loinc],
        }
    }

    /// Table family of a concept, from its position under the root concepts.
    pub fn of_concept(kb: &KnowledgeBase, cui: &str) -> Option<Domain> {
        if kb.is_a(cui, LAB_ROOT) {
            Some(Domain::Measurement)
        } else if kb.is_a(cui, DRUG_ROOT) {
            Some(Domain::Drug)
        } else if kb.is_a(cui, PROCEDURE_ROOT) {
            Some(Domain::Procedure)
        } else if CONDITION_ROOTS.iter().any(|r| kb.is_a(cui, r)) {
            Some(Domain::Condition)
        } else {
            None
        }
    }
}

/// Every recordable code with its domain, ordered.
pub fn code_pool(kb: &KnowledgeBase) -> Vec<(Domain, Code)> {
    let mut out = Vec::new();
    for c in kb.concepts() {
        let Some(d) = Domain::of_concept(kb, &c.cui) else { continue };
        out.extend(c.codes.iter().filter(|code| d.systems().contains(&code.system)).map(|code| (d, code.clone())));
    }
    out.sort();
    out.dedup();
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Person {
    pub person_id: i64,
    pub birth_date: NaiveDate,
    pub female: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub person_id: i64,
    pub domain: Domain,
    pub code: Code,
    pub at: NaiveDateTime,
    /// Measurements always carry a value.
    pub value: Option<f64>,
}

/// A synthetic database in canonical form, independent of table layout.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SyntheticDb {
    pub persons: Vec<Person>,
    pub events: Vec<Event>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Tall,
    Pivoted,
}

impl Variant {
    pub fn dir_name(self) -> &'static str {
        match self {
            Variant::Tall => "tall",
            Variant::Pivoted => "pivoted",
        }
    }

    /// The bundled mapping describing this layout.
    pub fn smm_name(self) -> &'static str {
        match self {
            Variant::Tall => "omop_lite_tall",
            Variant::Pivoted => "omop_lite_pivoted",
        }
    }

    pub fn for_smm(name: &str) -> Option<Variant> {
        [Variant::Tall, Variant::Pivoted].into_iter().find(|v| v.smm_name() == name)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Int(i64),
    Real(f64),
    Text(String),
    Null,
}

impl Value {
    fn sql(&self) -> String {
        match self {
            Value::Int(i) => i.to_string(),
            Value::Real(r) => format!("{r:?}"),
            Value::Text(t) => format!("'{}'", t.replace('\'', "''")),
            Value::Null => "NULL".into(),
        }
    }

    fn csv(&self) -> String {
        match self {
            Value::Int(i) => i.to_string(),
            Value::Real(r) => format!("{r:?}"),
            Value::Text(t) => t.clone(),
            Value::Null => String::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: &'static str,
    /// (column, SQL type)
    pub columns: Vec<(&'static str, &'static str)>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    fn new(name: &'static str, columns: &[(&'static str, &'static str)]) -> Self {
        Table { name, columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn ddl(&self) -> String {
        let cols: Vec<String> = self.columns.iter().map(|(c, t)| format!("{c} {t}")).collect();
        let mut s = format!("CREATE TABLE {} ({});\n", self.name, cols.join(", "));
        let (pid, _) = self.columns[0];
        writeln!(s, "CREATE INDEX idx_{0}_{1} ON {0} ({1});", self.name, pid).unwrap();
        s
    }

    pub fn inserts(&self, out: &mut String) {
        let cols: Vec<&str> = self.columns.iter().map(|(c, _)| *c).collect();
        for r in &self.rows {
            let vals: Vec<String> = r.iter().map(Value::sql).collect();
            writeln!(out, "INSERT INTO {} ({}) VALUES ({});", self.name, cols.join(", "), vals.join(", ")).unwrap();
        }
    }
}

fn ts(at: &NaiveDateTime) -> Value {
    Value::Text(at.format(DATETIME_FORMAT).to_string())
}

fn text(s: &str) -> Value {
    Value::Text(s.to_string())
}

pub fn unit_for(loinc: &str) -> &'static str {
    match loinc {
        "777-3" | "6690-2" => "10*3/uL",
        "718-7" => "g/dL",
        "2160-0" | "2345-7" => "mg/dL",
        _ => "U",
    }
}

impl SyntheticDb {
    /// Events sorted canonically, for stable output.
    pub fn sorted_events(&self) -> Vec<&Event> {
        let mut ev: Vec<&Event> = self.events.iter().collect();
        ev.sort_by(|a, b| {
            (a.person_id, a.at, a.domain, &a.code)
                .cmp(&(b.person_id, b.at, b.domain, &b.code))
                .then(a.value.partial_cmp(&b.value).unwrap_or(std::cmp::Ordering::Equal))
        });
        ev
    }

    pub fn tables(&self, variant: Variant) -> Vec<Table> {
        match variant {
            Variant::Tall => self.tall_tables(),
            Variant::Pivoted => self.pivoted_tables(),
        }
    }

    fn tall_tables(&self) -> Vec<Table> {
        let mut person = Table::new("person", &[("person_id", "INTEGER"), ("birth_date", "TEXT"), ("gender", "TEXT")]);
        let mut cond = Table::new(
            "condition_occurrence",
            &[("person_id", "INTEGER"), ("code_system", "TEXT"), ("code", "TEXT"), ("start_datetime", "TEXT")],
        );
        let mut proc = Table::new(
            "procedure_occurrence",
            &[("person_id", "INTEGER"), ("snomed_code", "TEXT"), ("procedure_datetime", "TEXT")],
        );
        let mut drug = Table::new(
            "drug_exposure",
            &[("person_id", "INTEGER"), ("rxnorm_code", "TEXT"), ("drug_datetime", "TEXT")],
        );
        let mut meas = Table::new(
            "measurement",
            &[
                ("person_id", "INTEGER"),
                ("loinc_code", "TEXT"),
                ("value_num", "REAL"),
                ("unit", "TEXT"),
                ("measurement_datetime", "TEXT"),
            ],
        );
        for p in &self.persons {
            person.rows.push(vec![
                Value::Int(p.person_id),
                Value::Text(p.birth_date.format(DATE_FORMAT).to_string()),
                text(if p.female { "F" } else { "M" }),
            ]);
        }
        for e in self.sorted_events() {
            let pid = Value::Int(e.person_id);
            match e.domain {
                Domain::Condition => {
                    cond.rows.push(vec![pid, text(e.code.system.as_str()), text(&e.code.code), ts(&e.at)])
                }
                Domain::Procedure => proc.rows.push(vec![pid, text(&e.code.code), ts(&e.at)]),
                Domain::Drug => drug.rows.push(vec![pid, text(&e.code.code), ts(&e.at)]),
                Domain::Measurement => meas.rows.push(vec![
                    pid,
                    text(&e.code.code),
                    e.value.map(Value::Real).unwrap_or(Value::Null),
                    text(unit_for(&e.code.code)),
                    ts(&e.at),
                ]),
            }
        }
        vec![person, cond, proc, drug, meas]
    }

    fn pivoted_tables(&self) -> Vec<Table> {
        let mut patients = Table::new("patients", &[("patient_id", "INTEGER"), ("dob", "TEXT"), ("sex", "TEXT")]);
        let mut diagnoses =
            Table::new("diagnoses", &[("patient_id", "INTEGER"), ("icd10_code", "TEXT"), ("diagnosis_time", "TEXT")]);
        let mut problems =
            Table::new("problem_list", &[("patient_id", "INTEGER"), ("snomed_code", "TEXT"), ("noted_time", "TEXT")]);
        let mut procedures =
            Table::new("procedures", &[("patient_id", "INTEGER"), ("snomed_code", "TEXT"), ("performed_time", "TEXT")]);
        let mut meds =
            Table::new("medications", &[("patient_id", "INTEGER"), ("rxnorm_code", "TEXT"), ("ordered_time", "TEXT")]);
        let mut cbc = Table::new(
            "complete_blood_counts",
            &[
                ("patient_id", "INTEGER"),
                ("platelet_count", "REAL"),
                ("hemoglobin", "REAL"),
                ("wbc_count", "REAL"),
                ("drawn_time", "TEXT"),
            ],
        );
        let mut chem = Table::new(
            "chemistry_panel",
            &[("patient_id", "INTEGER"), ("serum_creatinine", "REAL"), ("glucose", "REAL"), ("drawn_time", "TEXT")],
        );
        let mut other = Table::new(
            "other_labs",
            &[("patient_id", "INTEGER"), ("loinc_code", "TEXT"), ("result_value", "REAL"), ("result_time", "TEXT")],
        );
        for p in &self.persons {
            patients.rows.push(vec![
                Value::Int(p.person_id),
                Value::Text(p.birth_date.format(DATE_FORMAT).to_string()),
                text(if p.female { "female" } else { "male" }),
            ]);
        }
        for e in self.sorted_events() {
            let pid = Value::Int(e.person_id);
            match (e.domain, e.code.system) {
                (Domain::Condition, CodeSystem::Icd10) => diagnoses.rows.push(vec![pid, text(&e.code.code), ts(&e.at)]),
                (Domain::Condition, _) => problems.rows.push(vec![pid, text(&e.code.code), ts(&e.at)]),
                (Domain::Procedure, _) => procedures.rows.push(vec![pid, text(&e.code.code), ts(&e.at)]),
                (Domain::Drug, _) => meds.rows.push(vec![pid, text(&e.code.code), ts(&e.at)]),
                (Domain::Measurement, _) => {
                    let v = e.value.map(Value::Real).unwrap_or(Value::Null);
                    match PIVOT_COLUMNS.iter().find(|(c, _, _)| *c == e.code.code) {
                        Some((_, table, column)) => {
                            let t = if *table == "complete_blood_counts" { &mut cbc } else { &mut chem };
                            let mut row = vec![pid];
                            for (name, _) in &t.columns[1..t.columns.len() - 1] {
                                row.push(if name == column { v.clone() } else { Value::Null });
                            }
                            row.push(ts(&e.at));
                            t.rows.push(row);
                        }
                        None => other.rows.push(vec![pid, text(&e.code.code), v, ts(&e.at)]),
                    }
                }
            }
        }
        vec![patients, diagnoses, problems, procedures, meds, cbc, chem, other]
    }

    /// Writes `tall/` and `pivoted/` under `dir`, each with `schema.sql`,
    /// `data.sql` and one CSV file per table.
    pub fn write(&self, dir: &Path) -> Result<(), HarnessError> {
        for variant in [Variant::Tall, Variant::Pivoted] {
            let vdir = dir.join(variant.dir_name());
            std::fs::create_dir_all(&vdir).map_err(|e| HarnessError::io(&vdir, e))?;
            let tables = self.tables(variant);
            let schema: String = tables.iter().map(Table::ddl).collect();
            let mut data = String::from("BEGIN;\n");
            for t in &tables {
                t.inserts(&mut data);
            }
            data.push_str("COMMIT;\n");
            write_file(&vdir.join("schema.sql"), &schema)?;
            write_file(&vdir.join("data.sql"), &data)?;
            for t in &tables {
                let path = vdir.join(format!("{}.csv", t.name));
                let mut w = csv::Writer::from_path(&path)
                    .map_err(|e| HarnessError::Io { path: path.display().to_string(), message: e.to_string() })?;
                let csv_err =
                    |e: csv::Error| HarnessError::Io { path: path.display().to_string(), message: e.to_string() };
                w.write_record(t.columns.iter().map(|(c, _)| *c)).map_err(csv_err)?;
                for r in &t.rows {
                    w.write_record(r.iter().map(Value::csv)).map_err(csv_err)?;
                }
                w.flush().map_err(|e| HarnessError::io(&path, e))?;
            }
        }
        let json = serde_json::to_string(self).expect("db serializes");
        write_file(&dir.join("canonical.json"), &json)
    }

    pub fn read(dir: &Path) -> Result<Self, HarnessError> {
        let path = dir.join("canonical.json");
        let text = std::fs::read_to_string(&path).map_err(|e| HarnessError::io(&path, e))?;
        serde_json::from_str(&text)
            .map_err(|e| HarnessError::Io { path: path.display().to_string(), message: e.to_string() })
    }

    /// Checks that the pivoted layout holds exactly the tall layout's rows.
    pub fn pivot_mismatch(&self) -> Option<String> {
        pivot_mismatch(&self.tables(Variant::Tall), &self.tables(Variant::Pivoted))
    }
}

/// Recovers tall rows from a pivoted layout and compares them with a tall
/// layout, row by row after sorting. Returns the first mismatch.
pub fn pivot_mismatch(tall: &[Table], piv: &[Table]) -> Option<String> {
    let by_name = |ts: &[Table], n: &str| ts.iter().find(|t| t.name == n).cloned().expect("table exists");
    let key = |v: &Value| v.csv();
    let mut expected: Vec<String> = Vec::new();
    for t in tall {
        for r in &t.rows {
            let line = match t.name {
                "person" => {
                    let g = if r[2] == text("F") { "female" } else { "male" };
                    format!("person|{}|{}|{g}", key(&r[0]), key(&r[1]))
                }
                "condition_occurrence" => format!("event|{}|{}:{}|{}|", key(&r[0]), key(&r[1]), key(&r[2]), key(&r[3])),
                "procedure_occurrence" => format!("event|{}|PROC:{}|{}|", key(&r[0]), key(&r[1]), key(&r[2])),
                "drug_exposure" => format!("event|{}|RXNORM:{}|{}|", key(&r[0]), key(&r[1]), key(&r[2])),
                _ => format!("event|{}|LOINC:{}|{}|{}", key(&r[0]), key(&r[1]), key(&r[4]), key(&r[2])),
            };
            expected.push(line);
        }
    }
    let mut actual: Vec<String> = Vec::new();
    for t in piv {
        for r in &t.rows {
            match t.name {
                "patients" => actual.push(format!("person|{}|{}|{}", key(&r[0]), key(&r[1]), key(&r[2]))),
                "diagnoses" => actual.push(format!("event|{}|ICD10:{}|{}|", key(&r[0]), key(&r[1]), key(&r[2]))),
                "problem_list" => actual.push(format!("event|{}|SNOMED:{}|{}|", key(&r[0]), key(&r[1]), key(&r[2]))),
                "procedures" => actual.push(format!("event|{}|PROC:{}|{}|", key(&r[0]), key(&r[1]), key(&r[2]))),
                "medications" => actual.push(format!("event|{}|RXNORM:{}|{}|", key(&r[0]), key(&r[1]), key(&r[2]))),
                "other_labs" => {
                    actual.push(format!("event|{}|LOINC:{}|{}|{}", key(&r[0]), key(&r[1]), key(&r[3]), key(&r[2])))
                }
                name => {
                    let cols = &by_name(piv, name).columns;
                    let filled: Vec<usize> = (1..cols.len() - 1).filter(|&i| r[i] != Value::Null).collect();
                    if filled.len() != 1 {
                        return Some(format!("{name} row with {} filled columns", filled.len()));
                    }
                    let col = cols[filled[0]].0;
                    let Some(code) = PIVOT_COLUMNS.iter().find(|(_, t, c)| *t == name && *c == col).map(|(c, _, _)| *c)
                    else {
                        return Some(format!("{name}.{col} is not a known lab column"));
                    };
                    actual.push(format!(
                        "event|{}|LOINC:{code}|{}|{}",
                        key(&r[0]),
                        key(&r[cols.len() - 1]),
                        key(&r[filled[0]])
                    ));
                }
            }
        }
    }
    expected.sort();
    actual.sort();
    if expected == actual {
        return None;
    }
    let diff = expected.iter().zip(&actual).find(|(a, b)| a != b);
    Some(match diff {
        Some((a, b)) => format!("tall `{a}` vs pivoted `{b}`"),
        None => format!("{} tall rows vs {} pivoted rows", expected.len(), actual.len()),
    })
}

fn write_file(path: &Path, text: &str) -> Result<(), HarnessError> {
    std::fs::write(path, text).map_err(|e| HarnessError::io(path, e))
}
