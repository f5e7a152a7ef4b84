//! The worked-example corpus: query documents with expected report values.

use std::path::{Path, PathBuf};

use causex_core::dsl::query::{check_expectations, execute, Mismatch, QueryError};
use causex_core::dsl::{parse_query, Query};
use serde_json::Value as Json;

use crate::load::{Embedded, LoadError, Source};

include!(concat!(env!("OUT_DIR"), "/corpus_files.rs"));

#[derive(Debug, Clone)]
pub struct CorpusCase {
    pub id: String,
    pub provenance: String,
    /// Path of the query document, relative to the corpus root.
    pub path: PathBuf,
    pub query: Query,
}

#[derive(Debug)]
pub enum CaseFailure {
    Load(LoadError),
    Query(QueryError),
    Mismatch(Mismatch),
}

impl std::fmt::Display for CaseFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CaseFailure::Load(e) => write!(f, "{e}"),
            CaseFailure::Query(e) => write!(f, "{e}"),
            CaseFailure::Mismatch(m) => write!(f, "{m}"),
        }
    }
}

/// Every case document under `cases/`, sorted by id.
pub fn load_cases(source: &dyn Source, names: &[String]) -> Result<Vec<CorpusCase>, String> {
    let mut out = Vec::new();
    for name in names.iter().filter(|n| n.starts_with("cases/") && n.ends_with(".query.txt")) {
        let path = PathBuf::from(name);
        let text = source.read(&path)?;
        let query = parse_query(&text).map_err(|e| format!("{name}:{e}"))?;
        let id = query.id.clone().ok_or_else(|| format!("{name}: corpus cases need an `id` line"))?;
        let provenance = query.provenance.clone().ok_or_else(|| format!("{name}: corpus cases need a `provenance` line"))?;
        if query.expect.is_empty() {
            return Err(format!("{name}: corpus cases need at least one `expect` line"));
        }
        out.push(CorpusCase { id, provenance, path, query });
    }
    out.sort_by(|a, b| a.id.cmp(&b.id));
    if let Some(w) = out.windows(2).find(|w| w[0].id == w[1].id) {
        return Err(format!("duplicate case id `{}`", w[0].id));
    }
    Ok(out)
}

/// The corpus compiled into the binary.
pub fn build_corpus() -> Vec<CorpusCase> {
    let names: Vec<String> = FILES.iter().map(|(n, _)| n.to_string()).collect();
    load_cases(&Embedded, &names).expect("the embedded corpus is well formed")
}

/// Evaluates a case and returns its report, or the first failure.
pub fn run_case(case: &CorpusCase, source: &dyn Source, root: &Path) -> Result<Json, CaseFailure> {
    let env = crate::load_env(&case.query, &root.join(&case.path), source).map_err(CaseFailure::Load)?;
    let report = execute(&case.query, &env).map_err(CaseFailure::Query)?;
    check_expectations(&case.query, &report).map_err(CaseFailure::Mismatch)?;
    Ok(report)
}
