#![allow(dead_code)]

use std::collections::BTreeSet;

use chrono::NaiveDate;
use lfq_core::codegen::{compile_line, CodegenError, CompileOptions, CompiledLine};
use lfq_core::llf::parse;
use lfq_core::pipeline::Engine;
use lfq_core::reason::ReasonedNode;
use lfq_core::smm::SemanticMetadataMapping;

pub fn date(s: &str) -> NaiveDate {
    NaiveDate::parse_from_str(s, "%Y-%m-%d").unwrap()
}

pub fn reason(engine: &Engine, lf: &str) -> ReasonedNode {
    engine.reason(&parse(lf, engine.catalog()).unwrap())
}

pub fn compile(
    engine: &Engine,
    lf: &str,
    smm: &SemanticMetadataMapping,
    pin: Option<&str>,
) -> Result<CompiledLine, CodegenError> {
    compile_line(&reason(engine, lf), smm, engine.kb(), &CompileOptions { pin_date: pin.map(date) })
}

pub fn ids(v: impl IntoIterator<Item = i64>) -> BTreeSet<i64> {
    v.into_iter().collect()
}
