use std::collections::HashSet;
use std::fmt::Write as _;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::lexer::{lex, Cursor, Pos, Tok};
use super::{value, ErrorKind, ParseResult, START};
use crate::explanation::{format_probability, EpistemicState, Probability};
use crate::model::{CausalModel, Context, Setting};

/// A state document before model ids are resolved.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct StateDocument {
    /// Paths named by `models "..."` directives.
    pub imports: Vec<(String, Pos)>,
    pub states: Vec<StateSource>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateSource {
    pub name: String,
    pub pos: Pos,
    pub entries: Vec<StateEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateEntry {
    pub model: String,
    pub context: Context,
    pub probability: Probability,
    pub pos: Pos,
}

pub fn parse_state_document(text: &str) -> ParseResult<StateDocument> {
    let mut c = Cursor::new(lex(text, START)?);
    let mut doc = StateDocument::default();
    let mut names = HashSet::new();
    while !c.at_end() {
        if c.eat_keyword("models") {
            let pos = c.pos();
            match c.bump().tok {
                Tok::Str(path) => doc.imports.push((path, pos)),
                _ => return Err(pos.error(ErrorKind::Syntax, "expected a quoted path after `models`")),
            }
            continue;
        }
        c.expect_keyword("state")?;
        let (name, pos) = state_name(&mut c)?;
        if !names.insert(name.clone()) {
            return Err(pos.error(ErrorKind::Resolution, format!("state `{name}` is defined twice")));
        }
        c.expect(&Tok::LBrace)?;
        let mut entries = Vec::new();
        while !c.eat(&Tok::RBrace) {
            entries.push(entry(&mut c)?);
        }
        doc.states.push(StateSource { name, pos, entries });
    }
    Ok(doc)
}

/// `IDENT ('-' (IDENT | INT))*`, so that names like `Kprime-uniform` work.
fn state_name(c: &mut Cursor) -> ParseResult<(String, Pos)> {
    let (mut name, pos) = c.ident("a state name")?;
    while *c.peek() == Tok::Minus && matches!(c.peek2(), Tok::Ident(_) | Tok::Int(_)) {
        c.bump();
        match c.bump().tok {
            Tok::Ident(s) => name = format!("{name}-{s}"),
            Tok::Int(n) => name = format!("{name}-{n}"),
            _ => unreachable!(),
        }
    }
    Ok((name, pos))
}

fn entry(c: &mut Cursor) -> ParseResult<StateEntry> {
    let (model, pos) = c.ident("a model id or `}`")?;
    c.expect(&Tok::LParen)?;
    let context = assignments(c)?;
    c.expect(&Tok::RParen)?;
    c.expect(&Tok::Colon)?;
    let probability = probability(c)?;
    Ok(StateEntry { model, context, probability, pos })
}

/// `NAME=v, ...`, possibly empty.
fn assignments(c: &mut Cursor) -> ParseResult<Context> {
    let mut context = Context::new();
    if !matches!(c.peek(), Tok::Ident(_)) {
        return Ok(context);
    }
    loop {
        let (name, npos) = c.ident("an exogenous variable")?;
        c.expect(&Tok::Eq)?;
        let (v, _) = value(c)?;
        if context.insert(name.clone(), v).is_some() {
            return Err(npos.error(ErrorKind::Type, format!("`{name}` is assigned twice")));
        }
        if !c.eat(&Tok::Comma) {
            return Ok(context);
        }
    }
}

/// A context written as `UL=1, UMD=0`, optionally parenthesised.
pub fn parse_context(text: &str, origin: Pos) -> ParseResult<Context> {
    let mut c = Cursor::new(lex(text, origin)?);
    let paren = c.eat(&Tok::LParen);
    let context = assignments(&mut c)?;
    if paren {
        c.expect(&Tok::RParen)?;
    }
    if !c.at_end() {
        return Err(c.unexpected("`,` or end of context"));
    }
    Ok(context)
}

/// `INT` or `INT/INT`.
fn probability(c: &mut Cursor) -> ParseResult<Probability> {
    let pos = c.pos();
    let Tok::Int(n) = *c.peek() else {
        return Err(c.unexpected("a probability such as `1/4`"));
    };
    c.bump();
    let d = if c.eat(&Tok::Slash) {
        match *c.peek() {
            Tok::Int(d) => {
                c.bump();
                d
            }
            _ => return Err(c.unexpected("a denominator")),
        }
    } else {
        1
    };
    if d == 0 {
        return Err(pos.error(ErrorKind::Probability, "zero denominator"));
    }
    Ok(Probability::new(BigInt::from(n), BigInt::from(d)))
}

/// Resolves model ids against `models` and builds each state.
pub fn resolve_states(doc: &StateDocument, models: &[Arc<CausalModel>]) -> ParseResult<Vec<(String, EpistemicState)>> {
    doc.states.iter().map(|s| Ok((s.name.clone(), resolve_one(s, models)?))).collect()
}

fn resolve_one(src: &StateSource, models: &[Arc<CausalModel>]) -> ParseResult<EpistemicState> {
    if src.entries.is_empty() {
        return Err(src.pos.error(ErrorKind::Probability, format!("state `{}` has no settings", src.name)));
    }
    let mut entries = Vec::new();
    let mut total = Probability::zero();
    let mut seen = HashSet::new();
    for e in &src.entries {
        if !seen.insert((&e.model, &e.context)) {
            return Err(e.pos.error(ErrorKind::Probability, format!("setting {}({}) is listed twice", e.model, e.context.render(None))));
        }
        let model = models
            .iter()
            .find(|m| m.id() == e.model)
            .ok_or_else(|| e.pos.error(ErrorKind::Resolution, format!("unknown model `{}`", e.model)))?;
        if e.probability.is_zero() {
            return Err(e.pos.error(ErrorKind::Probability, "probabilities must be strictly positive"));
        }
        let setting = Setting::new(model.clone(), e.context.clone()).map_err(|err| e.pos.error(ErrorKind::Type, err.to_string()))?;
        total += &e.probability;
        entries.push((setting, e.probability.clone()));
    }
    if !total.is_one() {
        return Err(src
            .pos
            .error(ErrorKind::Probability, format!("probabilities of `{}` sum to {}, not 1", src.name, format_probability(&total))));
    }
    EpistemicState::new(entries).map_err(|err| src.pos.error(ErrorKind::Probability, err.to_string()))
}

/// Parses a state document whose models are already loaded. `models`
/// directives are ignored here; callers that read files resolve them first.
pub fn parse_state(text: &str, models: &[Arc<CausalModel>]) -> ParseResult<Vec<(String, EpistemicState)>> {
    resolve_states(&parse_state_document(text)?, models)
}

pub fn print_state(name: &str, state: &EpistemicState) -> String {
    let mut s = format!("state {name} {{\n");
    for (setting, p) in state.iter() {
        let p = if p.denom().is_one() { p.numer().to_string() } else { format_probability(p) };
        writeln!(s, "  {} : {p}", setting.label()).unwrap();
    }
    s.push_str("}\n");
    s
}
