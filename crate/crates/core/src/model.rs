//! Finite acyclic causal models: signatures, structural equations,
//! validation, solving and interventions.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};
use crate::expr::{Compiled, Expr};
pub use crate::value::{Range, RangeError, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VarKind {
    Exogenous,
    Endogenous,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VarDecl {
    pub name: String,
    pub range: Range,
}

impl VarDecl {
    pub fn new(name: impl Into<String>, range: Range) -> Self {
        VarDecl { name: name.into(), range }
    }

    pub fn boolean(name: impl Into<String>) -> Self {
        VarDecl::new(name, Range::boolean())
    }
}

/// Exogenous and endogenous variables with their ranges.
///
/// Variables are addressed by a position: exogenous variables occupy
/// `0..exogenous().len()`, endogenous ones follow in declaration order.
#[derive(Debug, Clone)]
pub struct Signature {
    exogenous: Vec<VarDecl>,
    endogenous: Vec<VarDecl>,
    index: HashMap<String, usize>,
}

impl PartialEq for Signature {
    fn eq(&self, other: &Self) -> bool {
        self.exogenous == other.exogenous && self.endogenous == other.endogenous
    }
}

impl Eq for Signature {}

impl Signature {
    pub fn new(exogenous: Vec<VarDecl>, endogenous: Vec<VarDecl>) -> Self {
        let mut index = HashMap::new();
        for (i, d) in exogenous.iter().chain(&endogenous).enumerate() {
            index.entry(d.name.clone()).or_insert(i);
        }
        Signature { exogenous, endogenous, index }
    }

    pub fn exogenous(&self) -> &[VarDecl] {
        &self.exogenous
    }

    pub fn endogenous(&self) -> &[VarDecl] {
        &self.endogenous
    }

    pub fn len(&self) -> usize {
        self.exogenous.len() + self.endogenous.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Position of `name` among all variables.
    pub fn position(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn decl(&self, pos: usize) -> &VarDecl {
        let n = self.exogenous.len();
        if pos < n {
            &self.exogenous[pos]
        } else {
            &self.endogenous[pos - n]
        }
    }

    pub fn kind(&self, pos: usize) -> VarKind {
        if pos < self.exogenous.len() {
            VarKind::Exogenous
        } else {
            VarKind::Endogenous
        }
    }

    pub fn lookup(&self, name: &str) -> Option<(VarKind, &VarDecl)> {
        self.position(name).map(|p| (self.kind(p), self.decl(p)))
    }

    /// Index of an endogenous variable within `endogenous()`.
    pub fn endo_index(&self, name: &str) -> Option<usize> {
        let p = self.position(name)?;
        p.checked_sub(self.exogenous.len())
    }

    pub fn endo_offset(&self) -> usize {
        self.exogenous.len()
    }

    /// Resolves an endogenous variable and checks `value` is in its range.
    pub fn check_endogenous(&self, name: &str, value: &Value) -> Result<usize> {
        let (kind, decl) = self.lookup(name).ok_or_else(|| Error::UnknownVariable(name.to_string()))?;
        if kind != VarKind::Endogenous {
            return Err(Error::NotEndogenous(name.to_string()));
        }
        check_in_range(decl, value)?;
        Ok(self.endo_index(name).expect("endogenous"))
    }

    /// Resolves any variable and checks `value` is in its range.
    pub fn check_event(&self, name: &str, value: &Value) -> Result<usize> {
        let pos = self.position(name).ok_or_else(|| Error::UnknownVariable(name.to_string()))?;
        check_in_range(self.decl(pos), value)?;
        Ok(pos)
    }
}

fn check_in_range(decl: &VarDecl, value: &Value) -> Result<()> {
    if decl.range.contains(value) {
        Ok(())
    } else {
        Err(Error::ValueOutOfRange { variable: decl.name.clone(), value: value.clone() })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Equation {
    pub target: String,
    pub body: Expr,
}

impl Equation {
    pub fn new(target: impl Into<String>, body: Expr) -> Self {
        Equation { target: target.into(), body }
    }
}

/// One problem found by [`CausalModel::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    NameClash { name: String },
    MissingEquation { variable: String },
    DuplicateEquation { variable: String },
    NotEndogenousTarget { target: String },
    UnknownReference { target: String, name: String },
    SelfReference { target: String },
    OutOfRange { target: String, witness: Vec<(String, Value)>, output: Value },
    EvalFailure { target: String, witness: Vec<(String, Value)>, message: String },
    Cycle { path: Vec<String> },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn witness(f: &mut fmt::Formatter<'_>, w: &[(String, Value)]) -> fmt::Result {
            for (i, (n, v)) in w.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{n}={v}")?;
            }
            Ok(())
        }
        match self {
            Violation::NameClash { name } => write!(f, "variable `{name}` is declared more than once"),
            Violation::MissingEquation { variable } => write!(f, "no equation for `{variable}`"),
            Violation::DuplicateEquation { variable } => write!(f, "more than one equation for `{variable}`"),
            Violation::NotEndogenousTarget { target } => {
                write!(f, "equation target `{target}` is not an endogenous variable")
            }
            Violation::UnknownReference { target, name } => {
                write!(f, "equation for `{target}` references unknown variable `{name}`")
            }
            Violation::SelfReference { target } => write!(f, "equation for `{target}` references itself"),
            Violation::OutOfRange { target, witness: w, output } => {
                write!(f, "equation for `{target}` yields {output}, outside its range, at ")?;
                witness(f, w)
            }
            Violation::EvalFailure { target, witness: w, message } => {
                write!(f, "equation for `{target}` fails ({message}) at ")?;
                witness(f, w)
            }
            Violation::Cycle { path } => write!(f, "dependency cycle {}", path.join(" -> ")),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Edges `from -> to` meaning `to` depends on `from`, over endogenous variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DependencyGraph {
    pub nodes: Vec<String>,
    pub edges: Vec<(String, String)>,
}

#[derive(Debug, Clone)]
struct Analysis {
    report: ValidationReport,
    graph: DependencyGraph,
    /// Compiled body per endogenous index (only when the model is valid).
    compiled: Vec<Compiled>,
    /// Endogenous indices in evaluation order (only when the model is valid).
    order: Vec<usize>,
}

/// A causal model: a signature plus one structural equation per endogenous
/// variable. Models are immutable once built; validation results are
/// computed on first use and cached.
#[derive(Debug, Clone)]
pub struct CausalModel {
    id: String,
    signature: Signature,
    equations: Vec<Equation>,
    analysis: OnceLock<Analysis>,
}

impl PartialEq for CausalModel {
    fn eq(&self, other: &Self) -> bool {
        fn canon(m: &CausalModel) -> BTreeMap<&String, &Expr> {
            m.equations.iter().map(|e| (&e.target, &e.body)).collect()
        }
        self.id == other.id
            && self.signature == other.signature
            && self.equations.len() == other.equations.len()
            && canon(self) == canon(other)
    }
}

impl Eq for CausalModel {}

impl CausalModel {
    pub fn new(id: impl Into<String>, signature: Signature, equations: Vec<Equation>) -> Self {
        CausalModel { id: id.into(), signature, equations, analysis: OnceLock::new() }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn equations(&self) -> &[Equation] {
        &self.equations
    }

    pub fn equation(&self, target: &str) -> Option<&Equation> {
        self.equations.iter().find(|e| e.target == target)
    }

    pub fn validate(&self) -> ValidationReport {
        self.analysis().report.clone()
    }

    pub fn is_valid(&self) -> bool {
        self.analysis().report.is_valid()
    }

    pub fn dependency_graph(&self) -> DependencyGraph {
        self.analysis().graph.clone()
    }

    fn analysis(&self) -> &Analysis {
        self.analysis.get_or_init(|| analyze(self))
    }

    pub(crate) fn ensure_valid(&self) -> Result<()> {
        let report = &self.analysis().report;
        match report.violations.first() {
            None => Ok(()),
            Some(v) => Err(Error::InvalidModel { model: self.id.clone(), reason: v.to_string() }),
        }
    }

    /// Returns `M_{X <- x}`: the same model with each intervened variable's
    /// equation replaced by a constant.
    pub fn intervene(&self, iv: &Intervention) -> Result<CausalModel> {
        let mut equations = self.equations.clone();
        for (name, value) in &iv.0 {
            self.signature.check_endogenous(name, value)?;
            let constant = Expr::Lit(value.clone());
            let mut replaced = false;
            for eq in equations.iter_mut().filter(|e| &e.target == name) {
                eq.body = constant.clone();
                replaced = true;
            }
            if !replaced {
                equations.push(Equation::new(name.clone(), constant));
            }
        }
        Ok(CausalModel::new(self.id.clone(), self.signature.clone(), equations))
    }

    /// The unique solution of the equations in `context`.
    pub fn solve(&self, context: &Context) -> Result<Assignment> {
        self.ensure_valid()?;
        let exo = context.values_for(&self.signature)?;
        let vals = self.solve_values(&exo, &[]);
        Ok(Assignment::from_values(&self.signature, vals))
    }

    /// Solves with exogenous values `exo` and optional per-endogenous-index
    /// overrides. The model must be valid.
    pub(crate) fn solve_values(&self, exo: &[Value], overrides: &[Option<Value>]) -> Vec<Value> {
        let a = self.analysis();
        debug_assert!(a.report.is_valid());
        let n = self.signature.exogenous.len();
        let mut vals: Vec<Value> = exo.to_vec();
        vals.extend(self.signature.endogenous.iter().map(|d| d.range.values()[0].clone()));
        for &i in &a.order {
            vals[n + i] = match overrides.get(i).and_then(Option::as_ref) {
                Some(v) => v.clone(),
                None => a.compiled[i].eval(&vals).expect("validated equations are total"),
            };
        }
        vals
    }
}

/// A total assignment to the exogenous variables.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Context(BTreeMap<String, Value>);

impl Context {
    pub fn new() -> Self {
        Context::default()
    }

    pub fn with(mut self, name: impl Into<String>, value: impl Into<Value>) -> Self {
        self.0.insert(name.into(), value.into());
        self
    }

    pub fn insert(&mut self, name: impl Into<String>, value: Value) -> Option<Value> {
        self.0.insert(name.into(), value)
    }

    pub fn get(&self, name: &str) -> Option<&Value> {
        self.0.get(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Value)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Exogenous values in signature order, checking totality and ranges.
    pub fn values_for(&self, sig: &Signature) -> Result<Vec<Value>> {
        for name in self.0.keys() {
            match sig.lookup(name) {
                Some((VarKind::Exogenous, _)) => {}
                _ => return Err(Error::UnexpectedContextValue(name.clone())),
            }
        }
        sig.exogenous()
            .iter()
            .map(|d| {
                let v = self.0.get(&d.name).ok_or_else(|| Error::MissingContextValue(d.name.clone()))?;
                check_in_range(d, v)?;
                Ok(v.clone())
            })
            .collect()
    }

    /// `UL=1, UMD=0` in the order of `sig` (or name order without one).
    pub fn render(&self, sig: Option<&Signature>) -> String {
        let pairs: Vec<String> = match sig {
            Some(sig) => sig.exogenous().iter().filter_map(|d| self.0.get(&d.name).map(|v| format!("{}={v}", d.name))).collect(),
            None => self.0.iter().map(|(k, v)| format!("{k}={v}")).collect(),
        };
        pairs.join(", ")
    }
}

impl<S: Into<String>> FromIterator<(S, Value)> for Context {
    fn from_iter<I: IntoIterator<Item = (S, Value)>>(iter: I) -> Self {
        Context(iter.into_iter().map(|(k, v)| (k.into(), v)).collect())
    }
}

/// Values assigned to endogenous variables by an intervention.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Intervention(BTreeMap<String, Value>);

impl Intervention {
    pub fn new() -> Self {
        Intervention::default()
    }

    /// Sets `name <- value`; a later set of the same variable wins.
    pub fn set(mut self, name: impl Into<String>, value: impl Into<Value>) -> Self {
        self.0.insert(name.into(), value.into());
        self
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Value)> {
        self.0.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl<S: Into<String>> FromIterator<(S, Value)> for Intervention {
    fn from_iter<I: IntoIterator<Item = (S, Value)>>(iter: I) -> Self {
        Intervention(iter.into_iter().map(|(k, v)| (k.into(), v)).collect())
    }
}

/// A total assignment over all variables, in signature order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    entries: Vec<(String, Value)>,
}

impl Assignment {
    pub(crate) fn from_values(sig: &Signature, vals: Vec<Value>) -> Self {
        let entries = sig.exogenous().iter().chain(sig.endogenous()).map(|d| d.name.clone()).zip(vals).collect();
        Assignment { entries }
    }

    pub fn get(&self, name: &str) -> Option<&Value> {
        self.entries.iter().find(|(n, _)| n == name).map(|(_, v)| v)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Value)> {
        self.entries.iter().map(|(n, v)| (n.as_str(), v))
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (n, v)) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{n}={v}")?;
        }
        Ok(())
    }
}

/// A model together with a context. Construction validates both and caches
/// the actual solution.
#[derive(Debug, Clone)]
pub struct Setting {
    model: Arc<CausalModel>,
    context: Context,
    exo: Vec<Value>,
    actual: Vec<Value>,
}

impl Setting {
    pub fn new(model: Arc<CausalModel>, context: Context) -> Result<Self> {
        model.ensure_valid()?;
        let exo = context.values_for(model.signature())?;
        let actual = model.solve_values(&exo, &[]);
        Ok(Setting { model, context, exo, actual })
    }

    pub fn model(&self) -> &CausalModel {
        &self.model
    }

    pub fn model_arc(&self) -> &Arc<CausalModel> {
        &self.model
    }

    pub fn context(&self) -> &Context {
        &self.context
    }

    pub fn signature(&self) -> &Signature {
        self.model.signature()
    }

    pub fn solve(&self) -> Assignment {
        Assignment::from_values(self.model.signature(), self.actual.clone())
    }

    /// Actual values of all variables, by signature position.
    pub fn actual_values(&self) -> &[Value] {
        &self.actual
    }

    pub(crate) fn solve_with(&self, overrides: &[Option<Value>]) -> Vec<Value> {
        self.model.solve_values(&self.exo, overrides)
    }

    /// Identity used for duplicate detection in epistemic states.
    pub fn key(&self) -> (&str, &Context) {
        (self.model.id(), &self.context)
    }

    /// `Md(UL=1, UMD=1)`.
    pub fn label(&self) -> String {
        format!("{}({})", self.model.id(), self.context.render(Some(self.model.signature())))
    }
}

fn analyze(model: &CausalModel) -> Analysis {
    let sig = &model.signature;
    let mut violations = Vec::new();

    let mut seen = HashMap::new();
    for d in sig.exogenous.iter().chain(&sig.endogenous) {
        let count = seen.entry(d.name.as_str()).or_insert(0usize);
        *count += 1;
        if *count == 2 {
            violations.push(Violation::NameClash { name: d.name.clone() });
        }
    }

    let n_exo = sig.exogenous.len();
    let n_endo = sig.endogenous.len();
    let mut eq_of: Vec<Option<&Equation>> = vec![None; n_endo];
    for eq in &model.equations {
        match sig.lookup(&eq.target) {
            Some((VarKind::Endogenous, _)) => {
                let i = sig.endo_index(&eq.target).expect("endogenous");
                if eq_of[i].is_some() {
                    violations.push(Violation::DuplicateEquation { variable: eq.target.clone() });
                } else {
                    eq_of[i] = Some(eq);
                }
            }
            _ => violations.push(Violation::NotEndogenousTarget { target: eq.target.clone() }),
        }
    }

    // deps[i] = endogenous indices that endogenous i depends on
    let mut deps: Vec<Vec<usize>> = vec![Vec::new(); n_endo];
    let mut compiled: Vec<Option<Compiled>> = vec![None; n_endo];
    for (i, decl) in sig.endogenous.iter().enumerate() {
        let Some(eq) = eq_of[i] else {
            violations.push(Violation::MissingEquation { variable: decl.name.clone() });
            continue;
        };
        let refs = eq.body.references();
        let mut ok = true;
        for r in &refs {
            if *r == decl.name {
                violations.push(Violation::SelfReference { target: decl.name.clone() });
                ok = false;
            } else if sig.position(r).is_none() {
                violations.push(Violation::UnknownReference { target: decl.name.clone(), name: r.to_string() });
                ok = false;
            }
        }
        if !ok {
            continue;
        }
        let ref_pos: Vec<usize> = refs.iter().map(|r| sig.position(r).expect("checked")).collect();
        let local = eq.body.compile(&|name| refs.iter().position(|r| *r == name)).expect("refs resolved");
        let (table, radices) = truth_table(sig, &ref_pos, &local);

        // Totality: every output exists and lies in the target range.
        for (code, out) in table.iter().enumerate() {
            let witness = || decode(sig, &ref_pos, &radices, code);
            match out {
                Ok(v) if decl.range.contains(v) => {}
                Ok(v) => {
                    violations.push(Violation::OutOfRange { target: decl.name.clone(), witness: witness(), output: v.clone() });
                    break;
                }
                Err(e) => {
                    violations.push(Violation::EvalFailure { target: decl.name.clone(), witness: witness(), message: e.to_string() });
                    break;
                }
            }
        }

        for (k, &p) in ref_pos.iter().enumerate() {
            if p >= n_exo && varies_with(&table, &radices, k) {
                deps[i].push(p - n_exo);
            }
        }
        deps[i].sort_unstable();
        compiled[i] = eq.body.compile(&|name| sig.position(name));
    }

    let nodes: Vec<String> = sig.endogenous.iter().map(|d| d.name.clone()).collect();
    let mut edges: Vec<(usize, usize)> = deps.iter().enumerate().flat_map(|(to, fs)| fs.iter().map(move |&f| (f, to))).collect();
    edges.sort_unstable();
    let graph = DependencyGraph { edges: edges.iter().map(|&(f, t)| (nodes[f].clone(), nodes[t].clone())).collect(), nodes: nodes.clone() };

    let (order, cycles) = topo_order(n_endo, &edges);
    for cycle in cycles {
        violations.push(Violation::Cycle { path: cycle.into_iter().map(|i| nodes[i].clone()).collect() });
    }

    let valid = violations.is_empty();
    Analysis {
        report: ValidationReport { violations },
        graph,
        compiled: if valid { compiled.into_iter().map(|c| c.expect("valid")).collect() } else { Vec::new() },
        order: if valid { order } else { Vec::new() },
    }
}

/// Evaluates `body` on every joint assignment of the referenced variables.
/// Assignment codes are mixed-radix with the first reference most significant.
fn truth_table(
    sig: &Signature,
    ref_pos: &[usize],
    body: &Compiled,
) -> (Vec<std::result::Result<Value, crate::expr::EvalError>>, Vec<usize>) {
    let radices: Vec<usize> = ref_pos.iter().map(|&p| sig.decl(p).range.len()).collect();
    let total: usize = radices.iter().product();
    let mut table = Vec::with_capacity(total);
    let mut digits = vec![0usize; ref_pos.len()];
    for _ in 0..total {
        let vals: Vec<Value> = ref_pos.iter().zip(&digits).map(|(&p, &d)| sig.decl(p).range.values()[d].clone()).collect();
        table.push(body.eval(&vals));
        for k in (0..digits.len()).rev() {
            digits[k] += 1;
            if digits[k] < radices[k] {
                break;
            }
            digits[k] = 0;
        }
    }
    (table, radices)
}

fn decode(sig: &Signature, ref_pos: &[usize], radices: &[usize], mut code: usize) -> Vec<(String, Value)> {
    let mut out = vec![(String::new(), Value::Int(0)); ref_pos.len()];
    for k in (0..ref_pos.len()).rev() {
        let d = code % radices[k];
        code /= radices[k];
        let decl = sig.decl(ref_pos[k]);
        out[k] = (decl.name.clone(), decl.range.values()[d].clone());
    }
    out
}

/// Whether the output changes when only reference `k` varies.
fn varies_with<T: PartialEq>(table: &[T], radices: &[usize], k: usize) -> bool {
    let stride: usize = radices[k + 1..].iter().product();
    let radix = radices[k];
    (0..table.len())
        .filter(|code| (code / stride).is_multiple_of(radix))
        .any(|base| (1..radix).any(|d| table[base + d * stride] != table[base]))
}

/// Kahn's algorithm with smallest-index tie breaking. Returns the order and,
/// if the graph is cyclic, the cycles found among the leftover nodes.
fn topo_order(n: usize, edges: &[(usize, usize)]) -> (Vec<usize>, Vec<Vec<usize>>) {
    let mut succ = vec![Vec::new(); n];
    let mut indeg = vec![0usize; n];
    for &(f, t) in edges {
        succ[f].push(t);
        indeg[t] += 1;
    }
    let mut ready: std::collections::BTreeSet<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(i) = ready.pop_first() {
        order.push(i);
        for &t in &succ[i] {
            indeg[t] -= 1;
            if indeg[t] == 0 {
                ready.insert(t);
            }
        }
    }
    if order.len() == n {
        return (order, Vec::new());
    }
    // Every leftover node has a leftover predecessor, so walking backwards
    // from any of them must close a cycle.
    let mut pred = vec![Vec::new(); n];
    for &(f, t) in edges {
        pred[t].push(f);
    }
    let placed: Vec<bool> = (0..n).map(|i| order.contains(&i)).collect();
    let mut done = placed.clone();
    let mut cycles = Vec::new();
    for start in 0..n {
        if done[start] {
            continue;
        }
        let mut path = vec![start];
        let mut cur = start;
        loop {
            let prev = pred[cur].iter().copied().find(|&p| !placed[p]).expect("leftover node has a leftover predecessor");
            if let Some(from) = path.iter().position(|&p| p == prev) {
                let mut cycle = path[from..].to_vec();
                cycle.push(prev);
                cycle.reverse();
                if !cycle.iter().any(|&c| done[c]) {
                    cycles.push(cycle);
                }
                break;
            }
            if done[prev] {
                break;
            }
            path.push(prev);
            cur = prev;
        }
        for p in path {
            done[p] = true;
        }
    }
    (order, cycles)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn forest(id: &str, conjunctive: bool) -> CausalModel {
        let body =
            if conjunctive { Expr::min(vec![Expr::var("L"), Expr::var("MD")]) } else { Expr::max(vec![Expr::var("L"), Expr::var("MD")]) };
        CausalModel::new(
            id,
            Signature::new(
                vec![VarDecl::boolean("UL"), VarDecl::boolean("UMD")],
                vec![VarDecl::boolean("L"), VarDecl::boolean("MD"), VarDecl::boolean("F")],
            ),
            vec![Equation::new("L", Expr::var("UL")), Equation::new("MD", Expr::var("UMD")), Equation::new("F", body)],
        )
    }

    fn ctx(l: i64, md: i64) -> Context {
        Context::new().with("UL", l).with("UMD", md)
    }

    fn edges(m: &CausalModel) -> Vec<(String, String)> {
        m.dependency_graph().edges
    }

    #[test]
    fn disjunctive_model_is_valid() {
        assert!(forest("Md", false).validate().is_valid());
    }

    #[test]
    fn two_variable_cycle_reported() {
        let m = CausalModel::new(
            "cyc",
            Signature::new(vec![], vec![VarDecl::boolean("X"), VarDecl::boolean("Y")]),
            vec![Equation::new("X", Expr::var("Y")), Equation::new("Y", Expr::var("X"))],
        );
        assert_eq!(m.validate().violations, vec![Violation::Cycle { path: vec!["X".into(), "Y".into(), "X".into()] }]);
        assert!(matches!(m.solve(&Context::new()), Err(Error::InvalidModel { .. })));
    }

    #[test]
    fn out_of_range_witness() {
        let m = CausalModel::new(
            "inc",
            Signature::new(vec![VarDecl::boolean("X")], vec![VarDecl::boolean("Y")]),
            vec![Equation::new("Y", Expr::Arith(crate::expr::ArithOp::Add, Box::new(Expr::var("X")), Box::new(Expr::int(1))))],
        );
        assert_eq!(
            m.validate().violations,
            vec![Violation::OutOfRange { target: "Y".into(), witness: vec![("X".into(), Value::Int(1))], output: Value::Int(2) }]
        );
    }

    #[test]
    fn missing_duplicate_and_clash() {
        let m = CausalModel::new(
            "bad",
            Signature::new(vec![VarDecl::boolean("A")], vec![VarDecl::boolean("A"), VarDecl::boolean("B"), VarDecl::boolean("C")]),
            vec![Equation::new("B", Expr::int(0)), Equation::new("B", Expr::int(1)), Equation::new("Z", Expr::int(0))],
        );
        let v = m.validate().violations;
        assert!(v.contains(&Violation::NameClash { name: "A".into() }));
        assert!(v.contains(&Violation::DuplicateEquation { variable: "B".into() }));
        assert!(v.contains(&Violation::NotEndogenousTarget { target: "Z".into() }));
        assert!(v.contains(&Violation::MissingEquation { variable: "C".into() }));
    }

    #[test]
    fn dependency_edges() {
        let e = |a: &str, b: &str| (a.to_string(), b.to_string());
        assert_eq!(edges(&forest("Md", false)), vec![e("L", "F"), e("MD", "F")]);
        assert_eq!(edges(&forest("Mc", true)), vec![e("L", "F"), e("MD", "F")]);
        let constant = CausalModel::new(
            "k",
            Signature::new(vec![], vec![VarDecl::boolean("X"), VarDecl::boolean("Y")]),
            vec![Equation::new("X", Expr::int(1)), Equation::new("Y", Expr::int(0))],
        );
        assert!(edges(&constant).is_empty());
    }

    #[test]
    fn syntactic_but_not_semantic_reference_is_not_an_edge() {
        // Y = X * 0 and X = Y is syntactically cyclic but recursive.
        let m = CausalModel::new(
            "s",
            Signature::new(vec![], vec![VarDecl::boolean("X"), VarDecl::boolean("Y")]),
            vec![
                Equation::new("X", Expr::var("Y")),
                Equation::new("Y", Expr::Arith(crate::expr::ArithOp::Mul, Box::new(Expr::var("X")), Box::new(Expr::int(0)))),
            ],
        );
        assert!(m.is_valid());
        let a = m.solve(&Context::new()).unwrap();
        assert_eq!(a.get("X"), Some(&Value::Int(0)));
    }

    #[test]
    fn solve_examples() {
        let md = forest("Md", false);
        let a = md.solve(&ctx(1, 1)).unwrap();
        assert_eq!(a.to_string(), "UL=1, UMD=1, L=1, MD=1, F=1");
        assert_eq!(md.solve(&ctx(0, 0)).unwrap().get("F"), Some(&Value::Int(0)));
        let mc = forest("Mc", true);
        assert_eq!(mc.solve(&ctx(1, 0)).unwrap().to_string(), "UL=1, UMD=0, L=1, MD=0, F=0");
    }

    #[test]
    fn intervene_examples() {
        let mc = forest("Mc", true);
        let m = mc.intervene(&Intervention::new().set("L", 1)).unwrap();
        assert_eq!(m.solve(&ctx(1, 0)).unwrap().get("F"), Some(&Value::Int(0)));
        assert_eq!(mc.intervene(&Intervention::new()).unwrap(), mc);

        let md = forest("Md", false);
        let m = md.intervene(&Intervention::new().set("F", 0)).unwrap();
        assert_eq!(m.solve(&ctx(1, 1)).unwrap().to_string(), "UL=1, UMD=1, L=1, MD=1, F=0");
        // input untouched
        assert_eq!(md.solve(&ctx(1, 1)).unwrap().get("F"), Some(&Value::Int(1)));
    }

    #[test]
    fn intervene_errors_and_last_value_wins() {
        let md = forest("Md", false);
        assert_eq!(md.intervene(&Intervention::new().set("Q", 1)), Err(Error::UnknownVariable("Q".into())));
        assert_eq!(md.intervene(&Intervention::new().set("UL", 1)), Err(Error::NotEndogenous("UL".into())));
        assert!(matches!(md.intervene(&Intervention::new().set("F", 2)), Err(Error::ValueOutOfRange { .. })));
        let twice = md.intervene(&Intervention::new().set("F", 1)).unwrap().intervene(&Intervention::new().set("F", 0)).unwrap();
        assert_eq!(twice.solve(&ctx(1, 1)).unwrap().get("F"), Some(&Value::Int(0)));
    }

    #[test]
    fn context_checks() {
        let md = forest("Md", false);
        assert_eq!(md.solve(&Context::new().with("UL", 1)), Err(Error::MissingContextValue("UMD".into())));
        assert_eq!(md.solve(&ctx(1, 1).with("L", 1)), Err(Error::UnexpectedContextValue("L".into())));
        assert!(matches!(md.solve(&ctx(1, 2)), Err(Error::ValueOutOfRange { .. })));
    }
}
