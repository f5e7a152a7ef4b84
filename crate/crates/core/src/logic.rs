//! Causal formulas and the satisfaction relation `(M, u) |= psi`.

use std::collections::HashSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::model::{Setting, Signature, Value};

/// `X = x`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PrimitiveEvent {
    pub variable: String,
    pub value: Value,
}

impl PrimitiveEvent {
    pub fn new(variable: impl Into<String>, value: impl Into<Value>) -> Self {
        PrimitiveEvent { variable: variable.into(), value: value.into() }
    }
}

impl fmt::Display for PrimitiveEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}={}", self.variable, self.value)
    }
}

/// Boolean combination of primitive events.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum BoolFormula {
    True,
    False,
    Event(PrimitiveEvent),
    Not(Box<BoolFormula>),
    And(Vec<BoolFormula>),
    Or(Vec<BoolFormula>),
    Implies(Box<BoolFormula>, Box<BoolFormula>),
}

impl BoolFormula {
    pub fn event(variable: &str, value: impl Into<Value>) -> Self {
        BoolFormula::Event(PrimitiveEvent::new(variable, value))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Self {
        BoolFormula::Not(Box::new(self))
    }

    /// Resolves variables against `sig`, checking ranges.
    pub fn compile(&self, sig: &Signature) -> Result<CompiledFormula> {
        Ok(CompiledFormula(self.compile_node(sig)?))
    }

    fn compile_node(&self, sig: &Signature) -> Result<Node> {
        Ok(match self {
            BoolFormula::True => Node::Const(true),
            BoolFormula::False => Node::Const(false),
            BoolFormula::Event(e) => Node::Event(sig.check_event(&e.variable, &e.value)?, e.value.clone()),
            BoolFormula::Not(f) => Node::Not(Box::new(f.compile_node(sig)?)),
            BoolFormula::And(fs) => Node::And(fs.iter().map(|f| f.compile_node(sig)).collect::<Result<_>>()?),
            BoolFormula::Or(fs) => Node::Or(fs.iter().map(|f| f.compile_node(sig)).collect::<Result<_>>()?),
            BoolFormula::Implies(a, b) => Node::Implies(Box::new(a.compile_node(sig)?), Box::new(b.compile_node(sig)?)),
        })
    }
}

impl BoolFormula {
    // Binding strength for printing; higher binds tighter.
    fn precedence(&self) -> u8 {
        match self {
            BoolFormula::Implies(..) => 1,
            BoolFormula::Or(xs) if !xs.is_empty() => 2,
            BoolFormula::And(xs) if !xs.is_empty() => 3,
            _ => 4,
        }
    }

    fn fmt_operand(&self, f: &mut fmt::Formatter<'_>, above: u8) -> fmt::Result {
        if self.precedence() <= above {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

impl fmt::Display for BoolFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |f: &mut fmt::Formatter<'_>, xs: &[BoolFormula], sep: &str, p: u8| -> fmt::Result {
            for (i, x) in xs.iter().enumerate() {
                if i > 0 {
                    f.write_str(sep)?;
                }
                x.fmt_operand(f, p)?;
            }
            Ok(())
        };
        match self {
            BoolFormula::True => f.write_str("true"),
            BoolFormula::False => f.write_str("false"),
            BoolFormula::Event(e) => write!(f, "{e}"),
            BoolFormula::Not(x) => match x.as_ref() {
                BoolFormula::Event(_) => write!(f, "!({x})"),
                _ => {
                    f.write_str("!")?;
                    x.fmt_operand(f, 3)
                }
            },
            BoolFormula::And(xs) if xs.is_empty() => f.write_str("true"),
            BoolFormula::Or(xs) if xs.is_empty() => f.write_str("false"),
            BoolFormula::And(xs) => join(f, xs, " & ", 3),
            BoolFormula::Or(xs) => join(f, xs, " | ", 2),
            BoolFormula::Implies(a, b) => {
                a.fmt_operand(f, 1)?;
                f.write_str(" -> ")?;
                b.fmt_operand(f, 1)
            }
        }
    }
}

#[derive(Debug, Clone)]
enum Node {
    Const(bool),
    Event(usize, Value),
    Not(Box<Node>),
    And(Vec<Node>),
    Or(Vec<Node>),
    Implies(Box<Node>, Box<Node>),
}

impl Node {
    fn eval(&self, vals: &[Value]) -> bool {
        match self {
            Node::Const(b) => *b,
            Node::Event(p, v) => &vals[*p] == v,
            Node::Not(x) => !x.eval(vals),
            Node::And(xs) => xs.iter().all(|x| x.eval(vals)),
            Node::Or(xs) => xs.iter().any(|x| x.eval(vals)),
            Node::Implies(a, b) => !a.eval(vals) || b.eval(vals),
        }
    }
}

/// A [`BoolFormula`] type-checked against one signature.
#[derive(Debug, Clone)]
pub struct CompiledFormula(Node);

impl CompiledFormula {
    /// Evaluates against a full assignment in signature order.
    pub fn eval(&self, vals: &[Value]) -> bool {
        self.0.eval(vals)
    }
}

/// `[Y1 <- y1, ..., Yk <- yk] phi`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CausalFormula {
    pub interventions: Vec<PrimitiveEvent>,
    pub body: BoolFormula,
}

impl CausalFormula {
    pub fn new(interventions: Vec<PrimitiveEvent>, body: BoolFormula) -> Self {
        CausalFormula { interventions, body }
    }

    pub fn plain(body: BoolFormula) -> Self {
        CausalFormula { interventions: Vec::new(), body }
    }

    /// Intervention overrides indexed by endogenous position.
    pub(crate) fn overrides(&self, sig: &Signature) -> Result<Vec<Option<Value>>> {
        overrides(sig, &self.interventions)
    }
}

impl From<BoolFormula> for CausalFormula {
    fn from(body: BoolFormula) -> Self {
        CausalFormula::plain(body)
    }
}

impl fmt::Display for CausalFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.interventions.is_empty() {
            return write!(f, "{}", self.body);
        }
        f.write_str("[")?;
        for (i, e) in self.interventions.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}<-{}", e.variable, e.value)?;
        }
        write!(f, "]({})", self.body)
    }
}

pub(crate) fn overrides(sig: &Signature, events: &[PrimitiveEvent]) -> Result<Vec<Option<Value>>> {
    let mut out = vec![None; sig.endogenous().len()];
    for e in events {
        let i = sig.check_endogenous(&e.variable, &e.value)?;
        if out[i].is_some() {
            return Err(Error::DuplicateVariable(e.variable.clone()));
        }
        out[i] = Some(e.value.clone());
    }
    Ok(out)
}

/// Decides `(M, u) |= [Y <- y] phi`: solve `M_{Y <- y}` in `u` and evaluate
/// `phi` on the solution.
pub fn satisfies(setting: &Setting, formula: &CausalFormula) -> Result<bool> {
    let sig = setting.signature();
    let body = formula.body.compile(sig)?;
    let ov = formula.overrides(sig)?;
    if ov.iter().all(Option::is_none) {
        return Ok(body.eval(setting.actual_values()));
    }
    Ok(body.eval(&setting.solve_with(&ov)))
}

/// Canonical conjunction of events, sorted by variable name. The empty
/// list yields `true`; a single event yields the event itself.
pub fn conjunction_of(events: &[PrimitiveEvent]) -> Result<BoolFormula> {
    let mut seen = HashSet::new();
    for e in events {
        if !seen.insert(e.variable.as_str()) {
            return Err(Error::DuplicateVariable(e.variable.clone()));
        }
    }
    let mut sorted = events.to_vec();
    sorted.sort_by(|a, b| a.variable.cmp(&b.variable));
    Ok(match sorted.len() {
        0 => BoolFormula::True,
        1 => BoolFormula::Event(sorted.pop().expect("one")),
        _ => BoolFormula::And(sorted.into_iter().map(BoolFormula::Event).collect()),
    })
}

/// A conjunction `X1=x1 & ... & Xk=xk` over distinct variables, kept in the
/// order given.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Conjunction(Vec<PrimitiveEvent>);

impl Conjunction {
    pub fn new(events: Vec<PrimitiveEvent>) -> Result<Self> {
        let mut seen = HashSet::new();
        for e in &events {
            if !seen.insert(e.variable.as_str()) {
                return Err(Error::DuplicateVariable(e.variable.clone()));
            }
        }
        Ok(Conjunction(events))
    }

    pub fn events(&self) -> &[PrimitiveEvent] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn variables(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(|e| e.variable.as_str())
    }

    pub fn to_formula(&self) -> BoolFormula {
        conjunction_of(&self.0).expect("distinct variables")
    }

    /// The sub-conjunction at `positions`.
    pub fn restrict(&self, positions: &[usize]) -> Conjunction {
        Conjunction(positions.iter().map(|&i| self.0[i].clone()).collect())
    }

    /// Endogenous positions of the variables, checking ranges.
    pub(crate) fn endo_indices(&self, sig: &Signature) -> Result<Vec<usize>> {
        self.0.iter().map(|e| sig.check_endogenous(&e.variable, &e.value)).collect()
    }
}

impl fmt::Display for Conjunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("true");
        }
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" & ")?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl FromIterator<PrimitiveEvent> for std::result::Result<Conjunction, Error> {
    fn from_iter<I: IntoIterator<Item = PrimitiveEvent>>(iter: I) -> Self {
        Conjunction::new(iter.into_iter().collect())
    }
}
