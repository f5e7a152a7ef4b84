//! Test-only oracles and generators.
//!
//! The oracle works on its own representation of binary models (one truth
//! table per endogenous variable) and re-implements solving, formula
//! evaluation, actual causation and explanation by plain enumeration, with
//! no pruning or caching. Generated models are converted to engine models so
//! that both sides see the same structure.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::sync::Arc;

use causex_core::expr::CmpOp;
use causex_core::{
    BoolFormula, CausalModel, Conjunction, Context, EpistemicState, Equation, Expr, PrimitiveEvent, Probability, Range, Setting, Signature,
    Value, VarDecl,
};
use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;

pub use rand::{Rng, SeedableRng};

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    TestRng::seed_from_u64(seed)
}

pub const EXO: [&str; 2] = ["U0", "U1"];
pub const ENDO: [&str; 4] = ["A", "B", "C", "D"];

/// A parent of an endogenous variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parent {
    Exo(usize),
    Endo(usize),
}

/// Binary model in topological order: variable `i` only reads exogenous
/// variables and endogenous variables `< i`.
#[derive(Debug, Clone)]
pub struct TableModel {
    pub parents: Vec<Vec<Parent>>,
    /// `tables[i][k]` is the value of variable `i` when the parents, read as
    /// bits with the first parent most significant, spell `k`.
    pub tables: Vec<Vec<bool>>,
    /// Engine declaration order, a permutation of `0..n`.
    pub declared: Vec<usize>,
}

impl TableModel {
    pub fn random(rng: &mut TestRng, n: usize) -> Self {
        let mut parents = Vec::new();
        let mut tables = Vec::new();
        for i in 0..n {
            let mut pool: Vec<Parent> = (0..EXO.len()).map(Parent::Exo).chain((0..i).map(Parent::Endo)).collect();
            pool.shuffle(rng);
            let k = rng.gen_range(0..=pool.len().min(3));
            let ps: Vec<Parent> = pool.into_iter().take(k).collect();
            let table = (0..1usize << ps.len()).map(|_| rng.gen_bool(0.5)).collect();
            parents.push(ps);
            tables.push(table);
        }
        let mut declared: Vec<usize> = (0..n).collect();
        declared.shuffle(rng);
        TableModel { parents, tables, declared }
    }

    pub fn len(&self) -> usize {
        self.tables.len()
    }

    /// Same structure, fresh tables.
    pub fn retabled(&self, rng: &mut TestRng) -> Self {
        let mut m = self.clone();
        for t in &mut m.tables {
            for b in t.iter_mut() {
                *b = rng.gen_bool(0.5);
            }
        }
        m
    }

    /// Endogenous values in `ctx`, with `fixed[i]` overriding variable `i`.
    pub fn solve(&self, ctx: [bool; 2], fixed: &[Option<bool>]) -> Vec<bool> {
        let mut vals = vec![false; self.len()];
        for i in 0..self.len() {
            vals[i] = match fixed.get(i).copied().flatten() {
                Some(v) => v,
                None => {
                    let mut k = 0;
                    for p in &self.parents[i] {
                        let bit = match *p {
                            Parent::Exo(j) => ctx[j],
                            Parent::Endo(j) => vals[j],
                        };
                        k = (k << 1) | bit as usize;
                    }
                    self.tables[i][k]
                }
            };
        }
        vals
    }

    pub fn to_model(&self, id: &str) -> CausalModel {
        let sig = Signature::new(
            EXO.iter().map(|n| VarDecl::boolean(*n)).collect(),
            self.declared.iter().map(|&i| VarDecl::boolean(ENDO[i])).collect(),
        );
        let eqs = self.declared.iter().map(|&i| Equation::new(ENDO[i], table_expr(&self.parents[i], &self.tables[i], 0, 0))).collect();
        CausalModel::new(id, sig, eqs)
    }
}

fn parent_name(p: Parent) -> &'static str {
    match p {
        Parent::Exo(j) => EXO[j],
        Parent::Endo(j) => ENDO[j],
    }
}

fn table_expr(ps: &[Parent], table: &[bool], depth: usize, k: usize) -> Expr {
    if depth == ps.len() {
        return Expr::int(table[k] as i64);
    }
    let test = Expr::Cmp(CmpOp::Eq, Box::new(Expr::var(parent_name(ps[depth]))), Box::new(Expr::int(1)));
    Expr::If(Box::new(test), Box::new(table_expr(ps, table, depth + 1, (k << 1) | 1)), Box::new(table_expr(ps, table, depth + 1, k << 1)))
}

pub fn context(ctx: [bool; 2]) -> Context {
    Context::new().with(EXO[0], ctx[0] as i64).with(EXO[1], ctx[1] as i64)
}

pub fn setting(m: &TableModel, id: &str, ctx: [bool; 2]) -> Setting {
    Setting::new(Arc::new(m.to_model(id)), context(ctx)).expect("generated models are valid")
}

/// Boolean formula over endogenous variables, oracle side.
#[derive(Debug, Clone)]
pub enum F {
    Ev(usize, bool),
    Not(Box<F>),
    And(Box<F>, Box<F>),
    Or(Box<F>, Box<F>),
}

impl F {
    pub fn random(rng: &mut TestRng, n: usize, depth: u32) -> F {
        if depth == 0 || rng.gen_bool(0.4) {
            return F::Ev(rng.gen_range(0..n), rng.gen_bool(0.5));
        }
        match rng.gen_range(0..3) {
            0 => F::Not(Box::new(F::random(rng, n, depth - 1))),
            1 => F::And(Box::new(F::random(rng, n, depth - 1)), Box::new(F::random(rng, n, depth - 1))),
            _ => F::Or(Box::new(F::random(rng, n, depth - 1)), Box::new(F::random(rng, n, depth - 1))),
        }
    }

    pub fn eval(&self, vals: &[bool]) -> bool {
        match self {
            F::Ev(i, b) => vals[*i] == *b,
            F::Not(f) => !f.eval(vals),
            F::And(a, b) => a.eval(vals) && b.eval(vals),
            F::Or(a, b) => a.eval(vals) || b.eval(vals),
        }
    }

    pub fn to_formula(&self) -> BoolFormula {
        match self {
            F::Ev(i, b) => BoolFormula::event(ENDO[*i], *b as i64),
            F::Not(f) => f.to_formula().not(),
            F::And(a, b) => BoolFormula::And(vec![a.to_formula(), b.to_formula()]),
            F::Or(a, b) => BoolFormula::Or(vec![a.to_formula(), b.to_formula()]),
        }
    }
}

/// A conjunction of endogenous events, oracle side, sorted by variable.
pub type Conj = Vec<(usize, bool)>;

pub fn conj_key(c: &Conj) -> BTreeSet<(String, i64)> {
    c.iter().map(|&(i, b)| (ENDO[i].to_string(), b as i64)).collect()
}

pub fn engine_key(c: &Conjunction) -> BTreeSet<(String, i64)> {
    c.events().iter().map(|e| (e.variable.clone(), e.value.as_int().expect("binary"))).collect()
}

pub fn to_conjunction(c: &Conj) -> Conjunction {
    Conjunction::new(c.iter().map(|&(i, b)| PrimitiveEvent::new(ENDO[i], b as i64)).collect()).expect("distinct variables")
}

/// All subsets of `items`, in no particular order.
pub fn all_subsets<T: Clone>(items: &[T]) -> Vec<Vec<T>> {
    (0..1usize << items.len())
        .map(|mask| items.iter().enumerate().filter(|(j, _)| mask >> j & 1 == 1).map(|(_, x)| x.clone()).collect())
        .collect()
}

/// All assignments of booleans to `k` positions.
pub fn all_bits(k: usize) -> Vec<Vec<bool>> {
    (0..1usize << k).map(|mask| (0..k).map(|j| mask >> j & 1 == 1).collect()).collect()
}

pub fn naive_ac1(m: &TableModel, ctx: [bool; 2], cand: &Conj, phi: &F) -> bool {
    let actual = m.solve(ctx, &[]);
    phi.eval(&actual) && cand.iter().all(|&(i, b)| actual[i] == b)
}

/// Every `W` and every `x'` (including `x` itself) is tried.
pub fn naive_ac2(m: &TableModel, ctx: [bool; 2], cand: &Conj, phi: &F) -> bool {
    let actual = m.solve(ctx, &[]);
    let vars: Vec<usize> = cand.iter().map(|c| c.0).collect();
    let rest: Vec<usize> = (0..m.len()).filter(|i| !vars.contains(i)).collect();
    for w in all_subsets(&rest) {
        for xp in all_bits(vars.len()) {
            let mut fixed = vec![None; m.len()];
            for &i in &w {
                fixed[i] = Some(actual[i]);
            }
            for (&i, &b) in vars.iter().zip(&xp) {
                fixed[i] = Some(b);
            }
            if !phi.eval(&m.solve(ctx, &fixed)) {
                return true;
            }
        }
    }
    false
}

pub fn naive_is_cause(m: &TableModel, ctx: [bool; 2], cand: &Conj, phi: &F) -> bool {
    naive_ac1(m, ctx, cand, phi)
        && naive_ac2(m, ctx, cand, phi)
        && all_subsets(cand)
            .into_iter()
            .filter(|s| !s.is_empty() && s.len() < cand.len())
            .all(|s| !(naive_ac1(m, ctx, &s, phi) && naive_ac2(m, ctx, &s, phi)))
}

/// A random candidate over distinct variables with random values.
pub fn random_conj(rng: &mut TestRng, n: usize) -> Conj {
    let mut vars: Vec<usize> = (0..n).collect();
    vars.shuffle(rng);
    let k = rng.gen_range(1..=n);
    let mut c: Conj = vars.into_iter().take(k).map(|i| (i, rng.gen_bool(0.5))).collect();
    c.sort();
    c
}

/// Oracle-side epistemic state: settings `(model index, context)`.
#[derive(Debug, Clone)]
pub struct TableState {
    pub models: Vec<TableModel>,
    pub settings: Vec<(usize, [bool; 2])>,
    pub weights: Vec<u32>,
}

impl TableState {
    /// One to three models over the same variables, and up to six
    /// distinct settings.
    pub fn random(rng: &mut TestRng) -> Self {
        let n = rng.gen_range(1..=ENDO.len());
        let base = TableModel::random(rng, n);
        let n_models = rng.gen_range(1..=3);
        let models: Vec<TableModel> = (0..n_models).map(|k| if k == 0 { base.clone() } else { base.retabled(rng) }).collect();
        let mut all: Vec<(usize, [bool; 2])> =
            (0..n_models).flat_map(|m| [[false, false], [true, false], [false, true], [true, true]].map(|c| (m, c))).collect();
        all.shuffle(rng);
        let k = rng.gen_range(1..=all.len().min(6));
        let settings: Vec<_> = all.into_iter().take(k).collect();
        let weights = settings.iter().map(|_| rng.gen_range(1..=5)).collect();
        TableState { models, settings, weights }
    }

    pub fn n(&self) -> usize {
        self.models[0].len()
    }

    pub fn to_state(&self) -> EpistemicState {
        let engine: Vec<Arc<CausalModel>> = self.models.iter().enumerate().map(|(k, m)| Arc::new(m.to_model(&format!("M{k}")))).collect();
        let total: u32 = self.weights.iter().sum();
        let entries = self
            .settings
            .iter()
            .zip(&self.weights)
            .map(|(&(m, ctx), &w)| {
                let s = Setting::new(engine[m].clone(), context(ctx)).expect("valid");
                (s, Probability::new(BigInt::from(w), BigInt::from(total)))
            })
            .collect();
        EpistemicState::new(entries).expect("distinct settings with positive weights")
    }

    fn holds(&self, s: usize, c: &Conj) -> bool {
        let (m, ctx) = self.settings[s];
        let actual = self.models[m].solve(ctx, &[]);
        c.iter().all(|&(i, b)| actual[i] == b)
    }

    fn phi_at(&self, s: usize, phi: &F) -> bool {
        let (m, ctx) = self.settings[s];
        phi.eval(&self.models[m].solve(ctx, &[]))
    }

    pub fn ex1a(&self, c: &Conj, phi: &F) -> bool {
        let n = self.n();
        (0..self.settings.len()).filter(|&s| self.holds(s, c) && self.phi_at(s, phi)).all(|s| {
            let (m, ctx) = self.settings[s];
            let rest: Vec<usize> = (0..n).filter(|i| c.iter().all(|x| x.0 != *i)).collect();
            c.iter().any(|&x| {
                all_subsets(&rest).into_iter().any(|ys| {
                    all_bits(ys.len()).into_iter().any(|yv| {
                        let mut cause: Conj = ys.iter().copied().zip(yv).collect();
                        cause.push(x);
                        cause.sort();
                        naive_is_cause(&self.models[m], ctx, &cause, phi)
                    })
                })
            })
        })
    }

    pub fn ex1b(&self, c: &Conj, phi: &F) -> bool {
        self.settings.iter().all(|&(m, ctx)| {
            let mut fixed = vec![None; self.n()];
            for &(i, b) in c {
                fixed[i] = Some(b);
            }
            phi.eval(&self.models[m].solve(ctx, &fixed))
        })
    }

    pub fn ex3(&self, c: &Conj, phi: &F) -> bool {
        (0..self.settings.len()).any(|s| self.holds(s, c) && self.phi_at(s, phi))
    }

    pub fn ex4(&self, c: &Conj, phi: &F) -> bool {
        (0..self.settings.len()).any(|s| !self.holds(s, c) && self.phi_at(s, phi))
    }

    pub fn is_explanation(&self, c: &Conj, phi: &F) -> bool {
        self.ex1a(c, phi)
            && self.ex1b(c, phi)
            && self.ex3(c, phi)
            && all_subsets(c)
                .into_iter()
                .filter(|s| !s.is_empty() && s.len() < c.len())
                .all(|s| !(self.ex1a(&s, phi) && self.ex1b(&s, phi)))
    }

    /// Every explanation of size at most `max`, with its EX4 flag.
    pub fn explanations(&self, phi: &F, max: usize) -> BTreeSet<(BTreeSet<(String, i64)>, bool)> {
        let vars: Vec<usize> = (0..self.n()).collect();
        let mut out = BTreeSet::new();
        for vs in all_subsets(&vars).into_iter().filter(|v| !v.is_empty() && v.len() <= max) {
            for bits in all_bits(vs.len()) {
                let c: Conj = vs.iter().copied().zip(bits).collect();
                if self.is_explanation(&c, phi) {
                    out.insert((conj_key(&c), self.ex4(&c, phi)));
                }
            }
        }
        out
    }
}

/// Random model document text exercising the whole expression grammar.
/// Equations need not be total; only the parser sees these.
pub fn random_model_text(rng: &mut TestRng, id: &str) -> String {
    let n_exo = rng.gen_range(1..=3);
    let n_endo = rng.gen_range(1..=4);
    let mut names: Vec<String> = Vec::new();
    let mut s = format!("model {id} {{\n");
    for i in 0..n_exo {
        let name = format!("U{i}");
        s.push_str(&format!("  exo {name} : {}\n", random_range(rng)));
        names.push(name);
    }
    let endo: Vec<String> = (0..n_endo).map(|i| format!("V{i}_x")).collect();
    let all: Vec<String> = names.iter().chain(&endo).cloned().collect();
    for name in &endo {
        s.push_str(&format!("  endo {name} : {} = {}\n", random_range(rng), random_expr(rng, &all, 3)));
    }
    s.push_str("}\n");
    s
}

fn random_value(rng: &mut TestRng) -> String {
    match rng.gen_range(0..4) {
        0 => format!("-{}", rng.gen_range(1..5)),
        1 => ["red", "green", "blue"].choose(rng).unwrap().to_string(),
        2 => "\"amber\"".to_string(),
        _ => rng.gen_range(0..4).to_string(),
    }
}

fn random_range(rng: &mut TestRng) -> String {
    let mut vals: Vec<String> = Vec::new();
    for _ in 0..rng.gen_range(1..=4) {
        let v = random_value(rng);
        if !vals.contains(&v) {
            vals.push(v);
        }
    }
    format!("{{{}}}", vals.join(", "))
}

fn random_expr(rng: &mut TestRng, vars: &[String], depth: u32) -> String {
    if depth == 0 || rng.gen_bool(0.3) {
        return match rng.gen_range(0..4) {
            // A bare identifier in an expression is a variable, so symbols are quoted.
            0 => match random_value(rng) {
                v if v.starts_with(|c: char| c.is_ascii_alphabetic()) => format!("\"{v}\""),
                v => v,
            },
            1 => ["true", "false"].choose(rng).unwrap().to_string(),
            _ => vars.choose(rng).unwrap().clone(),
        };
    }
    let mut sub = || random_expr(rng, vars, depth - 1);
    let (a, b) = (sub(), sub());
    match rng.gen_range(0..12) {
        0 => format!("(not {a})"),
        1 => format!("({a} and {b})"),
        2 => format!("({a} or {b})"),
        3 => format!("-{a}"),
        4 => format!("({a} + {b})"),
        5 => format!("({a} - {b})"),
        6 => format!("({a} * {b})"),
        7 => format!("({a} {} {b})", ["=", "!=", "<", "<=", ">", ">="].choose(rng).unwrap()),
        8 => format!("min({a}, {b})"),
        9 => format!("max({a})"),
        10 => format!("(if {a} then {b} else {})", random_expr(rng, vars, depth - 1)),
        _ => format!("({a})"),
    }
}

/// Random causal formula text over `vars` (name, range) pairs.
pub fn random_formula_text(rng: &mut TestRng, vars: &[(String, Vec<Value>)], endo: usize, depth: u32) -> String {
    let mut s = String::new();
    if endo > 0 && rng.gen_bool(0.3) {
        let (name, range) = &vars[vars.len() - endo + rng.gen_range(0..endo)];
        s.push_str(&format!("[{name} <- {}] ", value_text(range.choose(rng).unwrap())));
    }
    s.push_str(&random_bool_text(rng, vars, depth));
    s
}

fn value_text(v: &Value) -> String {
    match v {
        Value::Int(n) => n.to_string(),
        Value::Sym(s) if s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') => s.clone(),
        Value::Sym(s) => format!("\"{s}\""),
    }
}

fn random_bool_text(rng: &mut TestRng, vars: &[(String, Vec<Value>)], depth: u32) -> String {
    if depth == 0 || rng.gen_bool(0.3) {
        if rng.gen_bool(0.1) {
            return ["true", "false"].choose(rng).unwrap().to_string();
        }
        let (name, range) = vars.choose(rng).unwrap();
        let op = if rng.gen_bool(0.2) { "!=" } else { "=" };
        return format!("{name} {op} {}", value_text(range.choose(rng).unwrap()));
    }
    let a = random_bool_text(rng, vars, depth - 1);
    let b = random_bool_text(rng, vars, depth - 1);
    match rng.gen_range(0..5) {
        0 => format!("!{a}"),
        1 => format!("({a} & {b})"),
        2 => format!("({a} | {b})"),
        3 => format!("({a} -> {b})"),
        _ => format!("({a})"),
    }
}

/// Range of a declared variable, for formula generation.
pub fn variables(m: &CausalModel) -> Vec<(String, Vec<Value>)> {
    let sig = m.signature();
    sig.exogenous().iter().chain(sig.endogenous()).map(|d| (d.name.clone(), Range::values(&d.range).to_vec())).collect()
}

/// Random state document over binary table models `M0..`, with the models
/// it refers to.
pub fn random_state_text(rng: &mut TestRng) -> (String, Vec<Arc<CausalModel>>) {
    let ts = TableState::random(rng);
    let models: Vec<Arc<CausalModel>> = ts.models.iter().enumerate().map(|(k, m)| Arc::new(m.to_model(&format!("M{k}")))).collect();
    let total: u32 = ts.weights.iter().sum();
    let mut s = format!("state S-{} {{\n", rng.gen_range(0..100));
    for (&(m, ctx), &w) in ts.settings.iter().zip(&ts.weights) {
        s.push_str(&format!("  M{m}(U0={}, U1={}) : {w}/{total}\n", ctx[0] as u8, ctx[1] as u8));
    }
    s.push_str("}\n");
    (s, models)
}

/// The `corpus/` directory at the workspace root.
pub fn corpus_dir() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

/// `(file name, contents)` for every corpus file with the given suffix.
pub fn corpus_files(suffix: &str) -> Vec<(String, String)> {
    let mut out = Vec::new();
    for dir in [corpus_dir(), corpus_dir().join("cases")] {
        for e in std::fs::read_dir(&dir).expect("corpus directory") {
            let p = e.unwrap().path();
            let name = p.file_name().unwrap().to_string_lossy().into_owned();
            if name.ends_with(suffix) {
                out.push((name, std::fs::read_to_string(&p).unwrap()));
            }
        }
    }
    out.sort();
    out
}
