//! The `lfq` command line: logical-form tooling, metrics, trial compilation
//! and execution, synthetic databases and the HTTP service.
//!
//! Failures print `error: <Code>: <message>` on stderr and exit 1; usage
//! errors exit 2.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use clap::{Parser, Subcommand};
use lfq_core::llf::{
    convert_style, extract_spans, is_annotation, parse, parse_style, read_annotation, serialize, validate,
    DiagnosticKind, LfError, LfNode, Style,
};
use lfq_core::metrics::{score_pair, MetricError};
use lfq_core::pipeline::{Engine, PipelineError};
use lfq_harness::db::Variant;
use lfq_harness::recall::parse_gold;
use lfq_harness::trial::TrialFile;
use lfq_harness::{execute, generate_db, recall_curve, GenConfig, HarnessError, PlantFile, SqliteDb};
use lfq_service::{Config, ConfigError};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Parser)]
#[command(name = "lfq", version, about = "Cohort queries from logical forms of eligibility criteria")]
pub struct Cli {
    /// Service configuration (TOML); the bundled resources otherwise.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// error, warn, info, debug or trace.
    #[arg(long, global = true, default_value = "warn")]
    pub log_level: tracing::Level,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse and validate a logical form or an annotation file.
    Parse {
        file: PathBuf,
        #[arg(long, default_value = "standard")]
        style: Style,
        /// JSON array of spans, for span-index input.
        #[arg(long)]
        spans: Option<PathBuf>,
        /// Print on one line.
        #[arg(long)]
        compact: bool,
    },
    /// Convert a logical form between styles.
    Convert {
        file: PathBuf,
        #[arg(long)]
        from: Style,
        #[arg(long)]
        to: Style,
        /// JSON array of spans, for span-index input.
        #[arg(long)]
        spans: Option<PathBuf>,
        /// Write the spans of the input here (JSON array).
        #[arg(long)]
        spans_out: Option<PathBuf>,
    },
    /// Score tab-separated candidate/reference pairs with BLEU and ROUGE-L.
    Score {
        #[arg(long)]
        pairs: PathBuf,
    },
    /// Compile a trial file into a query plan.
    Compile {
        #[arg(long)]
        criteria: PathBuf,
        #[arg(long)]
        smm: String,
        #[arg(long)]
        pin_date: Option<NaiveDate>,
        /// Write plan.json, response.json and line_N.sql here instead of
        /// printing the plan.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Execute a query plan against a generated database.
    Run {
        #[arg(long)]
        plan: PathBuf,
        /// A generated database directory, or one of its layout directories.
        #[arg(long)]
        db: PathBuf,
        /// One person id per line; adds the recall curve.
        #[arg(long)]
        gold: Option<PathBuf>,
        /// Skip lines that would empty the cohort.
        #[arg(long)]
        skip_zero: bool,
        /// Write cohorts.json and recall.tsv here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a synthetic database in both layouts.
    GenDb {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        patients: usize,
        #[arg(long)]
        plant: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Serve the HTTP API.
    Serve,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("{0}")]
    Lf(#[from] LfError),
    #[error("{code} at {path}: {message}")]
    Invalid { code: &'static str, path: String, message: String },
    #[error("{0}")]
    Metric(#[from] MetricError),
    #[error("{0}")]
    Pipeline(#[from] PipelineError),
    #[error("{0}")]
    Harness(#[from] HarnessError),
    #[error("{0}")]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Input(String),
}

impl CliError {
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Io { .. } => "IoError",
            CliError::Lf(e) => e.code(),
            CliError::Invalid { code, .. } => code,
            CliError::Metric(MetricError::EmptyReference) => "EmptyReference",
            CliError::Metric(MetricError::EmptyCorpus) => "EmptyCorpus",
            CliError::Pipeline(e) => e.code(),
            CliError::Harness(e) => e.code(),
            CliError::Config(_) => "ConfigError",
            CliError::Input(_) => "InvalidInput",
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| io_err(path, e))
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| io_err(path, e))
}

fn io_err(path: &Path, e: impl ToString) -> CliError {
    CliError::Io { path: path.display().to_string(), message: e.to_string() }
}

fn out_err(e: std::io::Error) -> CliError {
    io_err(Path::new("<stdout>"), e)
}

fn read_spans(path: Option<&Path>) -> Result<Option<Vec<String>>, CliError> {
    path.map(|p| serde_json::from_str(&read(p)?).map_err(|e| CliError::Input(format!("{}: {e}", p.display()))))
        .transpose()
}

fn config(path: Option<&Path>) -> Result<Config, CliError> {
    let c = match path {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    Ok(c.with_env()?)
}

pub fn engine(config_path: Option<&Path>) -> Result<Engine, CliError> {
    Ok(config(config_path)?.engine()?)
}

fn kind_code(kind: &DiagnosticKind) -> &'static str {
    match kind {
        DiagnosticKind::UnknownFunction => "UnknownFunction",
        DiagnosticKind::ArityError { .. } => "ArityError",
        DiagnosticKind::ArgumentKindError { .. } => "ArgumentKindError",
        DiagnosticKind::ChainingError => "ChainingError",
    }
}

/// Parses `text` in `style` and checks it against the engine's catalog.
fn checked(engine: &Engine, text: &str, style: Style, spans: Option<&[String]>) -> Result<LfNode, CliError> {
    let node = match style {
        Style::Standard => parse(text, engine.catalog())?,
        _ => parse_style(text, style, spans)?,
    };
    check(engine, node)
}

fn check(engine: &Engine, node: LfNode) -> Result<LfNode, CliError> {
    if let Some(d) = validate(&node, engine.catalog()).into_iter().next() {
        return Err(CliError::Invalid { code: kind_code(&d.kind), path: d.path, message: d.message });
    }
    Ok(node)
}

pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    let config_path = cli.config.as_deref();
    match &cli.command {
        Command::Parse { file, style, spans, compact } => {
            let engine = engine(config_path)?;
            let text = read(file)?;
            let node = if *style == Style::Standard && is_annotation(&text) {
                read_annotation(&text, engine.catalog(), 1)?.logical_form.map(|n| check(&engine, n)).transpose()?
            } else {
                let spans = read_spans(spans.as_deref())?;
                Some(checked(&engine, &text, *style, spans.as_deref())?)
            };
            if let Some(node) = node {
                writeln!(out, "{}", serialize(&node, !compact)).map_err(out_err)?;
            }
        }
        Command::Convert { file, from, to, spans, spans_out } => {
            let text = read(file)?;
            let spans = read_spans(spans.as_deref())?;
            let converted = convert_style(text.trim(), *from, *to, spans.as_deref())?;
            if let Some(p) = spans_out {
                let found = match (from, &spans) {
                    (Style::SpanIndex, Some(s)) => s.clone(),
                    (Style::SpanIndex, None) => return Err(LfError::MissingSpanTable.into()),
                    _ => extract_spans(text.trim())?,
                };
                write_file(p, &serde_json::to_string(&found).expect("strings serialize"))?;
            }
            writeln!(out, "{converted}").map_err(out_err)?;
        }
        Command::Score { pairs } => score(pairs, out)?,
        Command::Compile { criteria, smm, pin_date, out: dir } => {
            let engine = engine(config_path)?;
            let trial = TrialFile::parse(&read(criteria)?)?;
            let mut request = trial.request(smm);
            if pin_date.is_some() {
                request.pin_date = *pin_date;
            }
            let response = engine.generate(&request)?;
            match dir {
                None => {
                    let json = serde_json::to_string_pretty(&response.plan).expect("plans serialize");
                    writeln!(out, "{json}").map_err(out_err)?;
                }
                Some(dir) => {
                    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
                    write_file(&dir.join("plan.json"), &pretty(&response.plan))?;
                    write_file(&dir.join("response.json"), &pretty(&response))?;
                    for line in &response.plan.lines {
                        if let Some(sql) = &line.sql {
                            write_file(&dir.join(format!("line_{}.sql", line.line_number)), &format!("{sql}\n"))?;
                        }
                    }
                    writeln!(out, "plan_id\t{}", response.plan_id).map_err(out_err)?;
                    for line in &response.plan.lines {
                        let reason =
                            line.reason.as_ref().map(|r| format!("{:?}: {}", r.kind, r.detail)).unwrap_or_default();
                        writeln!(out, "{}\t{:?}\t{:?}\t{reason}", line.line_number, line.polarity, line.status)
                            .map_err(out_err)?;
                    }
                }
            }
        }
        Command::Run { plan, db, gold, skip_zero, out: dir } => {
            let plan: lfq_core::codegen::QueryPlan =
                serde_json::from_str(&read(plan)?).map_err(|e| CliError::Input(format!("{}: {e}", plan.display())))?;
            let db_dir = if db.join("schema.sql").is_file() {
                db.clone()
            } else {
                let variant = Variant::for_smm(&plan.smm)
                    .ok_or_else(|| CliError::Input(format!("no generated layout for mapping `{}`", plan.smm)))?;
                db.join(variant.dir_name())
            };
            if !db_dir.join("schema.sql").is_file() {
                return Err(io_err(&db_dir, "not a database directory"));
            }
            let sqlite = SqliteDb::open_dir(&db_dir)?;
            let execution = execute(&plan, &sqlite, *skip_zero)?;
            let curve = match gold {
                Some(g) => Some(recall_curve(&execution, &parse_gold(&read(g)?)?)?),
                None => None,
            };
            if let Some(dir) = dir {
                fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
                write_file(&dir.join("cohorts.json"), &pretty(&execution))?;
                if let Some(c) = &curve {
                    write_file(&dir.join("recall.tsv"), &c.to_tsv())?;
                }
            }
            writeln!(out, "line\tpolarity\tstatus\tmatched\tcohort").map_err(out_err)?;
            for l in &execution.lines {
                let size = |s: &Option<std::collections::BTreeSet<i64>>| {
                    s.as_ref().map_or("-".into(), |s| s.len().to_string())
                };
                writeln!(
                    out,
                    "{}\t{:?}\t{:?}\t{}\t{}",
                    l.line_number,
                    l.polarity,
                    l.status,
                    size(&l.cohort),
                    size(&l.cumulative)
                )
                .map_err(out_err)?;
            }
            if let Some(c) = &curve {
                write!(out, "{}", c.to_tsv()).map_err(out_err)?;
            }
        }
        Command::GenDb { seed, patients, plant, out: dir } => {
            let engine = engine(config_path)?;
            let mut cfg = GenConfig::new(*seed, *patients);
            if let Some(p) = plant {
                cfg = cfg.with_plants(PlantFile::parse(&read(p)?)?);
            }
            let db = generate_db(&cfg, &engine)?;
            db.write(dir)?;
            writeln!(out, "persons\t{}\nevents\t{}", db.persons.len(), db.events.len()).map_err(out_err)?;
        }
        Command::Serve => {
            let config = config(config_path)?;
            if !config.data_dir.is_dir() {
                return Err(io_err(&config.data_dir, "data directory does not exist"));
            }
            let rt = tokio::runtime::Runtime::new().map_err(|e| io_err(Path::new("<runtime>"), e))?;
            rt.block_on(lfq_service::serve(&config))?;
        }
    }
    Ok(())
}

/// Tab-separated `candidate<TAB>reference` lines, no header, no quoting.
fn score(pairs: &Path, out: &mut dyn Write) -> Result<(), CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(b'\t')
        .has_headers(false)
        .quoting(false)
        .flexible(true)
        .from_path(pairs)
        .map_err(|e| io_err(pairs, e))?;
    let mut scored = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| io_err(pairs, e))?;
        if record.len() != 2 {
            return Err(CliError::Input(format!("line {}: expected 2 fields, found {}", i + 1, record.len())));
        }
        scored.push(score_pair(&record[0], &record[1])?);
    }
    if scored.is_empty() {
        return Err(MetricError::EmptyCorpus.into());
    }
    writeln!(out, "pair\tbleu\trouge_l_f1").map_err(out_err)?;
    for (i, s) in scored.iter().enumerate() {
        writeln!(out, "{}\t{:.6}\t{:.6}", i + 1, s.bleu, s.rouge_l_f1).map_err(out_err)?;
    }
    let n = scored.len() as f64;
    let mean = |f: fn(&lfq_core::metrics::ScoredPair) -> f64| scored.iter().map(f).sum::<f64>() / n;
    writeln!(out, "mean\t{:.6}\t{:.6}", mean(|s| s.bleu), mean(|s| s.rouge_l_f1)).map_err(out_err)?;
    Ok(())
}

fn pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("documents serialize");
    s.push('\n');
    s
}
