//! Verdict reports as a JSON tree. Object keys are sorted, so output is
//! byte-identical for identical input.

use std::cmp::Ordering;

use serde_json::{json, Map, Value as Json};

use crate::causality::{CandidateCause, CauseVerdict};
use crate::explanation::{format_probability, Comparison, CriterionComparison, EpistemicState, ExplanationVerdict, Probability};
use crate::logic::{Conjunction, PrimitiveEvent};
use crate::model::{Assignment, CausalModel, Setting, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    /// Aligned `path  value` lines.
    #[default]
    Table,
    /// Pretty-printed JSON.
    Tree,
}

pub fn emit(report: &Json, format: Format) -> String {
    match format {
        Format::Tree => {
            let mut s = serde_json::to_string_pretty(report).expect("reports are plain JSON");
            s.push('\n');
            s
        }
        Format::Table => {
            let mut rows = Vec::new();
            flatten("", report, &mut rows);
            let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
            rows.iter().map(|(k, v)| format!("{k:width$}  {v}\n")).collect()
        }
    }
}

fn flatten(prefix: &str, v: &Json, out: &mut Vec<(String, String)>) {
    let join = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Json::Object(m) if !m.is_empty() => m.iter().for_each(|(k, v)| flatten(&join(k), v, out)),
        Json::Array(a) if !a.is_empty() => a.iter().enumerate().for_each(|(i, v)| flatten(&join(&i.to_string()), v, out)),
        Json::String(s) => out.push((prefix.to_string(), s.clone())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

pub fn value_json(v: &Value) -> Json {
    match v {
        Value::Int(n) => json!(n),
        Value::Sym(s) => json!(s),
    }
}

pub fn probability_json(p: &Probability) -> Json {
    json!(format_probability(p))
}

fn events_json(events: &[PrimitiveEvent]) -> Json {
    Json::Object(events.iter().map(|e| (e.variable.clone(), value_json(&e.value))).collect())
}

fn strings<T: ToString>(items: impl IntoIterator<Item = T>) -> Json {
    Json::Array(items.into_iter().map(|x| json!(x.to_string())).collect())
}

fn header(kind: &str, fields: &[(&str, Json)]) -> Map<String, Json> {
    let mut m = Map::new();
    m.insert("query".into(), json!(kind));
    for (k, v) in fields {
        m.insert((*k).into(), v.clone());
    }
    m
}

pub fn validation(model: &CausalModel) -> Json {
    let report = model.validate();
    let graph = model.dependency_graph();
    let mut m = header("validate", &[("model", json!(model.id()))]);
    m.insert("valid".into(), json!(report.is_valid()));
    m.insert("violations".into(), strings(&report.violations));
    m.insert("dependencies".into(), Json::Array(graph.edges.iter().map(|(a, b)| json!([a, b])).collect()));
    Json::Object(m)
}

pub fn solution(model: &CausalModel, context: &str, a: &Assignment) -> Json {
    let mut m = header("solve", &[("model", json!(model.id())), ("context", json!(context))]);
    m.insert("values".into(), Json::Object(a.iter().map(|(k, v)| (k.to_string(), value_json(v))).collect()));
    Json::Object(m)
}

pub fn cause(setting: &Setting, cand: &CandidateCause, phi: &str, v: &CauseVerdict) -> Json {
    let mut m =
        header("check-cause", &[("setting", json!(setting.label())), ("phi", json!(phi)), ("x", json!(cand.conjunction.to_string()))]);
    m.insert("ac1".into(), json!(v.ac1));
    m.insert(
        "ac2".into(),
        match &v.ac2 {
            Some(w) => json!({
                "holds": true,
                "witness": { "W": strings(w.fixed.iter().map(|e| &e.variable)), "w": events_json(&w.fixed) },
                "contrast": events_json(&w.contrast),
            }),
            None => json!({ "holds": false, "witness": null, "contrast": null }),
        },
    );
    m.insert("ac3".into(), json!({ "holds": v.ac3, "violation": v.ac3_violation.as_ref().map(|c| c.to_string()) }));
    m.insert("is_cause".into(), json!(v.is_cause));
    m.insert("is_but_for".into(), json!(v.is_but_for));
    Json::Object(m)
}

pub fn causes(setting: &Setting, phi: &str, found: &[CandidateCause]) -> Json {
    let mut m = header("find-causes", &[("setting", json!(setting.label())), ("phi", json!(phi))]);
    m.insert("causes".into(), strings(found.iter().map(|c| &c.conjunction)));
    Json::Object(m)
}

pub fn explanation(state_name: &str, state: &EpistemicState, expl: &Conjunction, phi: &str, v: &ExplanationVerdict) -> Json {
    let label = |i: usize| state.settings()[i].label();
    let mut m = header("check-explanation", &[("state", json!(state_name)), ("phi", json!(phi)), ("x", json!(expl.to_string()))]);
    let evidence: Vec<Json> = v
        .ex1a
        .evidence
        .iter()
        .map(|e| {
            json!({
                "setting": label(e.setting),
                "cause": e.found.as_ref().map(|f| json!({
                    "conjunct": f.conjunct.to_string(),
                    "augmentation": strings(&f.augmentation),
                })),
            })
        })
        .collect();
    m.insert("ex1a".into(), json!({ "holds": v.ex1a.holds, "evidence": evidence }));
    m.insert("ex1b".into(), json!({ "holds": v.ex1b.holds, "failing": strings(v.ex1b.failing.iter().map(|&i| label(i))) }));
    m.insert("ex2".into(), json!({ "holds": v.ex2, "violation": v.ex2_violation.as_ref().map(|c| c.to_string()) }));
    m.insert("ex3".into(), json!(v.ex3));
    m.insert("ex4".into(), json!(v.ex4));
    m.insert("is_explanation".into(), json!(v.is_explanation));
    m.insert("is_nontrivial".into(), json!(v.is_nontrivial));
    Json::Object(m)
}

pub fn explanations(state_name: &str, phi: &str, found: &[(Conjunction, ExplanationVerdict)]) -> Json {
    let mut m = header("find-explanations", &[("state", json!(state_name)), ("phi", json!(phi))]);
    m.insert("explanations".into(), strings(found.iter().map(|(c, _)| c)));
    m.insert("nontrivial".into(), strings(found.iter().filter(|(_, v)| v.is_nontrivial).map(|(c, _)| c)));
    Json::Object(m)
}

/// Scores that are undefined (conditioning on a null event) appear as `null`.
pub fn scores(state_name: &str, expl: &Conjunction, phi: &str, conditional: bool, s: [Option<Probability>; 3]) -> Json {
    let [ex1a, ex1b, prior] = s.map(|p| p.as_ref().map_or(Json::Null, probability_json));
    let mut m = header("score", &[("state", json!(state_name)), ("phi", json!(phi)), ("x", json!(expl.to_string()))]);
    m.insert("ex1b_mode".into(), json!(if conditional { "conditional" } else { "unconditional" }));
    m.insert("ex1a_score".into(), ex1a);
    m.insert("ex1b_score".into(), ex1b);
    m.insert("prior_score".into(), prior);
    Json::Object(m)
}

pub fn comparison(state_name: &str, left: &Conjunction, right: &Conjunction, phi: &str, conditional: bool, c: &Comparison) -> Json {
    let crit = |c: &CriterionComparison| {
        json!({
            "left": probability_json(&c.left),
            "right": probability_json(&c.right),
            "better": match c.order {
                Ordering::Greater => "left",
                Ordering::Less => "right",
                Ordering::Equal => "tie",
            },
        })
    };
    let mut m = header(
        "compare",
        &[("state", json!(state_name)), ("phi", json!(phi)), ("x", json!(left.to_string())), ("y", json!(right.to_string()))],
    );
    m.insert("ex1b_mode".into(), json!(if conditional { "conditional" } else { "unconditional" }));
    m.insert("prior".into(), crit(&c.prior));
    m.insert("ex1a".into(), crit(&c.ex1a));
    m.insert("ex1b".into(), crit(&c.ex1b));
    Json::Object(m)
}

/// Looks up a dotted path; numeric segments index arrays.
pub fn lookup<'a>(report: &'a Json, path: &str) -> Option<&'a Json> {
    path.split('.').try_fold(report, |v, seg| match v {
        Json::Object(m) => m.get(seg),
        Json::Array(a) => seg.parse::<usize>().ok().and_then(|i| a.get(i)),
        _ => None,
    })
}
