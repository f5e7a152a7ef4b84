//! Query documents: one query per document, one directive per line.
//!
//! ```text
//! # comment
//! id K1-L-explains-F
//! query check-explanation
//! models forest.scm.txt
//! states forest.state.txt
//! state K1
//! phi F=1
//! x L=1
//! expect is_explanation = true
//! ```

use std::fmt::{self, Write as _};
use std::sync::Arc;

use serde_json::Value as Json;

use super::formula::{parse_conjunction, parse_formula_in, parse_values};
use super::lexer::Pos;
use super::report;
use super::state::parse_context;
use super::{ErrorKind, ParseError, ParseResult};
use crate::causality::{self, CandidateCause};
use crate::error::Error;
use crate::explanation::{self, EpistemicState, Ex1bMode};
use crate::logic::{BoolFormula, Conjunction};
use crate::model::{CausalModel, Setting, Signature};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QueryKind {
    Validate,
    Solve,
    CheckCause,
    FindCauses,
    CheckExplanation,
    FindExplanations,
    Score,
    Compare,
}

impl QueryKind {
    pub const ALL: [QueryKind; 8] = [
        QueryKind::Validate,
        QueryKind::Solve,
        QueryKind::CheckCause,
        QueryKind::FindCauses,
        QueryKind::CheckExplanation,
        QueryKind::FindExplanations,
        QueryKind::Score,
        QueryKind::Compare,
    ];

    pub fn name(self) -> &'static str {
        match self {
            QueryKind::Validate => "validate",
            QueryKind::Solve => "solve",
            QueryKind::CheckCause => "check-cause",
            QueryKind::FindCauses => "find-causes",
            QueryKind::CheckExplanation => "check-explanation",
            QueryKind::FindExplanations => "find-explanations",
            QueryKind::Score => "score",
            QueryKind::Compare => "compare",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        QueryKind::ALL.into_iter().find(|k| k.name() == s)
    }
}

impl fmt::Display for QueryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Directive text with the position of its first character.
#[derive(Debug, Clone)]
pub struct Text {
    pub text: String,
    pub pos: Pos,
}

impl Text {
    pub fn new(text: impl Into<String>) -> Self {
        Text { text: text.into(), pos: Pos { line: 1, column: 1 } }
    }
}

#[derive(Debug, Clone)]
pub struct Expectation {
    /// Dotted path into the report tree.
    pub path: String,
    pub value: Json,
    pub pos: Pos,
}

#[derive(Debug, Clone)]
pub struct Query {
    pub id: Option<String>,
    pub provenance: Option<String>,
    pub kind: QueryKind,
    pub kind_pos: Pos,
    pub models: Vec<Text>,
    pub states: Vec<Text>,
    pub model: Option<Text>,
    pub state: Option<Text>,
    pub context: Option<Text>,
    pub phi: Option<Text>,
    pub x: Option<Text>,
    pub y: Option<Text>,
    pub contrast: Option<Text>,
    pub max_size: Option<usize>,
    pub ex1b_conditional: bool,
    pub expect: Vec<Expectation>,
}

impl Query {
    pub fn new(kind: QueryKind) -> Self {
        Query {
            id: None,
            provenance: None,
            kind,
            kind_pos: Pos { line: 1, column: 1 },
            models: Vec::new(),
            states: Vec::new(),
            model: None,
            state: None,
            context: None,
            phi: None,
            x: None,
            y: None,
            contrast: None,
            max_size: None,
            ex1b_conditional: false,
            expect: Vec::new(),
        }
    }
}

/// Queries are equal when they print identically; positions are ignored.
impl PartialEq for Query {
    fn eq(&self, other: &Self) -> bool {
        print_query(self) == print_query(other)
    }
}

impl Eq for Query {}

pub fn parse_query(text: &str) -> ParseResult<Query> {
    let mut q: Option<Query> = None;
    let mut pending: Vec<(String, Text)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim_start();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let key_col = raw.len() - trimmed.len() + 1;
        let (key, rest) = trimmed.split_once(char::is_whitespace).unwrap_or((trimmed, ""));
        let rest_trim = rest.trim_start();
        let col = key_col + key.chars().count() + (rest.len() - rest_trim.len()) + usize::from(!rest.is_empty());
        let value = Text { text: rest_trim.trim_end().to_string(), pos: Pos { line, column: col } };
        let key_pos = Pos { line, column: key_col };
        if key == "query" {
            if q.is_some() {
                return Err(key_pos.error(ErrorKind::Syntax, "a query document holds exactly one `query` line"));
            }
            let kind = QueryKind::from_name(&value.text).ok_or_else(|| {
                let names: Vec<&str> = QueryKind::ALL.iter().map(|k| k.name()).collect();
                value.pos.error(ErrorKind::Syntax, format!("unknown query kind `{}`; expected one of {}", value.text, names.join(", ")))
            })?;
            let mut query = Query::new(kind);
            query.kind_pos = key_pos;
            q = Some(query);
        } else {
            pending.push((key.to_string(), value));
        }
    }
    let Some(mut q) = q else {
        let end = Pos { line: text.lines().count().max(1), column: 1 };
        return Err(end.error(ErrorKind::Syntax, "missing `query <kind>` line"));
    };
    for (key, value) in pending {
        directive(&mut q, &key, value)?;
    }
    Ok(q)
}

fn directive(q: &mut Query, key: &str, value: Text) -> ParseResult<()> {
    let pos = value.pos;
    let need_value = |v: &Text| {
        if v.text.is_empty() {
            Err(v.pos.error(ErrorKind::Syntax, format!("`{key}` needs a value")))
        } else {
            Ok(())
        }
    };
    let once = |slot: &mut Option<Text>, v: Text| {
        need_value(&v)?;
        if slot.is_some() {
            return Err(v.pos.error(ErrorKind::Syntax, format!("`{key}` given twice")));
        }
        *slot = Some(v);
        Ok(())
    };
    match key {
        "id" | "provenance" => {
            need_value(&value)?;
            let slot = if key == "id" { &mut q.id } else { &mut q.provenance };
            if slot.is_some() {
                return Err(pos.error(ErrorKind::Syntax, format!("`{key}` given twice")));
            }
            *slot = Some(value.text);
        }
        "models" => {
            need_value(&value)?;
            q.models.push(value);
        }
        "states" => {
            need_value(&value)?;
            q.states.push(value);
        }
        "model" => once(&mut q.model, value)?,
        "state" => once(&mut q.state, value)?,
        "context" => {
            if q.context.is_some() {
                return Err(pos.error(ErrorKind::Syntax, "`context` given twice"));
            }
            q.context = Some(value);
        }
        "phi" => once(&mut q.phi, value)?,
        "x" => once(&mut q.x, value)?,
        "y" => once(&mut q.y, value)?,
        "contrast" => once(&mut q.contrast, value)?,
        "max-size" => {
            let n = value
                .text
                .parse::<std::num::NonZeroUsize>()
                .map_err(|_| pos.error(ErrorKind::Syntax, "`max-size` needs a positive integer"))?;
            q.max_size = Some(n.get());
        }
        "ex1b-conditional" => {
            if !value.text.is_empty() {
                return Err(pos.error(ErrorKind::Syntax, "`ex1b-conditional` takes no value"));
            }
            q.ex1b_conditional = true;
        }
        "expect" => {
            let (path, rhs) =
                value.text.split_once('=').ok_or_else(|| pos.error(ErrorKind::Syntax, "expected `expect <path> = <value>`"))?;
            let path = path.trim();
            if path.is_empty() || !path.split('.').all(|s| !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')) {
                return Err(pos.error(ErrorKind::Syntax, format!("`{path}` is not a report path")));
            }
            let rhs = rhs.trim();
            let v = serde_json::from_str(rhs).unwrap_or_else(|_| Json::String(rhs.to_string()));
            q.expect.push(Expectation { path: path.to_string(), value: v, pos });
        }
        other => {
            let col = Pos { line: pos.line, column: 1 };
            return Err(col.error(ErrorKind::Syntax, format!("unknown directive `{other}`")));
        }
    }
    Ok(())
}

pub fn print_query(q: &Query) -> String {
    let mut s = String::new();
    let mut line = |k: &str, v: &str| {
        if v.is_empty() {
            writeln!(s, "{k}").unwrap();
        } else {
            writeln!(s, "{k} {v}").unwrap();
        }
    };
    if let Some(id) = &q.id {
        line("id", id);
    }
    if let Some(p) = &q.provenance {
        line("provenance", p);
    }
    line("query", q.kind.name());
    for m in &q.models {
        line("models", &m.text);
    }
    for m in &q.states {
        line("states", &m.text);
    }
    for (k, v) in [
        ("model", &q.model),
        ("state", &q.state),
        ("context", &q.context),
        ("phi", &q.phi),
        ("x", &q.x),
        ("y", &q.y),
        ("contrast", &q.contrast),
    ] {
        if let Some(v) = v {
            line(k, &v.text);
        }
    }
    if let Some(n) = q.max_size {
        line("max-size", &n.to_string());
    }
    if q.ex1b_conditional {
        line("ex1b-conditional", "");
    }
    for e in &q.expect {
        line("expect", &format!("{} = {}", e.path, e.value));
    }
    s
}

/// Loaded models and states a query is evaluated against.
#[derive(Debug, Clone, Default)]
pub struct Env {
    pub models: Vec<Arc<CausalModel>>,
    pub states: Vec<(String, EpistemicState)>,
}

impl Env {
    pub fn model(&self, id: &str) -> Option<&Arc<CausalModel>> {
        self.models.iter().find(|m| m.id() == id)
    }

    pub fn state(&self, name: &str) -> Option<&EpistemicState> {
        self.states.iter().find(|(n, _)| n == name).map(|(_, s)| s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QueryError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("{0}")]
    Engine(#[from] Error),
}

/// The first expectation that the report does not meet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    pub path: String,
    pub expected: Json,
    pub actual: Option<Json>,
    pub pos: Pos,
}

impl fmt::Display for Mismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}:{}: mismatch at `{}`", self.pos.line, self.pos.column, self.path)?;
        writeln!(f, "  - expected: {}", self.expected)?;
        match &self.actual {
            Some(a) => write!(f, "  + actual:   {a}"),
            None => write!(f, "  + actual:   (path absent from report)"),
        }
    }
}

pub fn check_expectations(q: &Query, report: &Json) -> Result<(), Mismatch> {
    for e in &q.expect {
        let actual = report::lookup(report, &e.path);
        if actual != Some(&e.value) {
            return Err(Mismatch { path: e.path.clone(), expected: e.value.clone(), actual: actual.cloned(), pos: e.pos });
        }
    }
    Ok(())
}

fn required<'q>(q: &'q Query, field: &'q Option<Text>, name: &str) -> ParseResult<&'q Text> {
    field.as_ref().ok_or_else(|| q.kind_pos.error(ErrorKind::Syntax, format!("`{}` queries need `{name}`", q.kind)))
}

fn lookup_model<'e>(q: &Query, env: &'e Env) -> ParseResult<&'e Arc<CausalModel>> {
    let t = required(q, &q.model, "model")?;
    env.model(&t.text).ok_or_else(|| t.pos.error(ErrorKind::Resolution, format!("unknown model `{}`", t.text)))
}

fn lookup_state<'e>(q: &Query, env: &'e Env) -> ParseResult<(String, &'e EpistemicState)> {
    let t = required(q, &q.state, "state")?;
    let state = env.state(&t.text).ok_or_else(|| t.pos.error(ErrorKind::Resolution, format!("unknown state `{}`", t.text)))?;
    Ok((t.text.clone(), state))
}

/// The distinct signatures of a state's models, in first-use order.
fn signatures(state: &EpistemicState) -> Vec<&Signature> {
    let mut seen: Vec<&str> = Vec::new();
    let mut out = Vec::new();
    for s in state.settings() {
        if !seen.contains(&s.model().id()) {
            seen.push(s.model().id());
            out.push(s.signature());
        }
    }
    out
}

/// `phi` must be a plain Boolean combination of events.
fn explanandum(q: &Query, sigs: &[&Signature]) -> ParseResult<BoolFormula> {
    let t = required(q, &q.phi, "phi")?;
    let f = parse_formula_in(&t.text, sigs, t.pos)?;
    if !f.interventions.is_empty() {
        return Err(t.pos.error(ErrorKind::Type, "the explanandum cannot contain an intervention prefix"));
    }
    Ok(f.body)
}

fn conjunction(q: &Query, field: &Option<Text>, name: &str, sigs: &[&Signature]) -> ParseResult<Conjunction> {
    let t = required(q, field, name)?;
    parse_conjunction(&t.text, sigs, t.pos)
}

fn setting(q: &Query, env: &Env) -> Result<Setting, QueryError> {
    let model = lookup_model(q, env)?;
    let context = match &q.context {
        Some(t) => parse_context(&t.text, t.pos)?,
        None => Default::default(),
    };
    Ok(Setting::new(model.clone(), context)?)
}

/// Evaluates a query and returns its report tree.
pub fn execute(q: &Query, env: &Env) -> Result<Json, QueryError> {
    let mode = if q.ex1b_conditional { Ex1bMode::ConditionalOnPhi } else { Ex1bMode::Unconditional };
    Ok(match q.kind {
        QueryKind::Validate => report::validation(lookup_model(q, env)?),
        QueryKind::Solve => {
            let s = setting(q, env)?;
            report::solution(s.model(), &s.context().render(Some(s.signature())), &s.solve())
        }
        QueryKind::CheckCause => {
            let s = setting(q, env)?;
            let sigs = [s.signature()];
            let phi = explanandum(q, &sigs)?;
            let x = conjunction(q, &q.x, "x", &sigs)?;
            let contrast = match &q.contrast {
                Some(t) => Some(parse_values(&t.text, t.pos)?),
                None => None,
            };
            let cand = CandidateCause::new(x, contrast)?;
            let v = causality::is_actual_cause(&s, &cand, &phi)?;
            report::cause(&s, &cand, &phi.to_string(), &v)
        }
        QueryKind::FindCauses => {
            let s = setting(q, env)?;
            let phi = explanandum(q, &[s.signature()])?;
            let found = causality::find_actual_causes(&s, &phi, q.max_size)?;
            report::causes(&s, &phi.to_string(), &found)
        }
        QueryKind::CheckExplanation => {
            let (name, state) = lookup_state(q, env)?;
            let sigs = signatures(state);
            let phi = explanandum(q, &sigs)?;
            let x = conjunction(q, &q.x, "x", &sigs)?;
            let v = explanation::is_explanation(state, &x, &phi)?;
            report::explanation(&name, state, &x, &phi.to_string(), &v)
        }
        QueryKind::FindExplanations => {
            let (name, state) = lookup_state(q, env)?;
            let phi = explanandum(q, &signatures(state))?;
            let found = explanation::find_explanations(state, &phi, q.max_size)?;
            report::explanations(&name, &phi.to_string(), &found)
        }
        QueryKind::Score => {
            let (name, state) = lookup_state(q, env)?;
            let sigs = signatures(state);
            let phi = explanandum(q, &sigs)?;
            let x = conjunction(q, &q.x, "x", &sigs)?;
            let defined = |r: crate::Result<_>| match r {
                Ok(p) => Ok(Some(p)),
                Err(Error::ZeroProbability(_)) => Ok(None),
                Err(e) => Err(e),
            };
            let s = [
                defined(explanation::ex1a_score(state, &x, &phi))?,
                defined(explanation::ex1b_score(state, &x, &phi, mode))?,
                defined(explanation::prior_score(state, &x, &phi))?,
            ];
            report::scores(&name, &x, &phi.to_string(), q.ex1b_conditional, s)
        }
        QueryKind::Compare => {
            let (name, state) = lookup_state(q, env)?;
            let sigs = signatures(state);
            let phi = explanandum(q, &sigs)?;
            let x = conjunction(q, &q.x, "x", &sigs)?;
            let y = conjunction(q, &q.y, "y", &sigs)?;
            let c = explanation::compare_explanations(state, &x, &y, &phi, mode)?;
            report::comparison(&name, &x, &y, &phi.to_string(), q.ex1b_conditional, &c)
        }
    })
}
