//! Structural-equation bodies.

use std::fmt;

use crate::value::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

impl ArithOp {
    pub fn symbol(self) -> &'static str {
        match self {
            ArithOp::Add => "+",
            ArithOp::Sub => "-",
            ArithOp::Mul => "*",
        }
    }
}

/// Expression AST over variable references and value literals.
///
/// Logical operators treat integers as truth values (non-zero is true) and
/// produce `0`/`1`; comparisons produce `0`/`1` as well.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Lit(Value),
    Var(String),
    Not(Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Arith(ArithOp, Box<Expr>, Box<Expr>),
    Cmp(CmpOp, Box<Expr>, Box<Expr>),
    Min(Vec<Expr>),
    Max(Vec<Expr>),
    If(Box<Expr>, Box<Expr>, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("unbound variable `{0}`")]
    Unbound(String),
    #[error("`{0}` is not an integer")]
    NotInteger(Value),
    #[error("integer overflow")]
    Overflow,
    #[error("min/max of no arguments")]
    EmptyArgs,
}

impl Expr {
    pub fn var(name: &str) -> Self {
        Expr::Var(name.to_string())
    }

    pub fn int(n: i64) -> Self {
        Expr::Lit(Value::Int(n))
    }

    pub fn min(args: Vec<Expr>) -> Self {
        Expr::Min(args)
    }

    pub fn max(args: Vec<Expr>) -> Self {
        Expr::Max(args)
    }

    /// Variable names referenced by the expression, deduplicated, in order of
    /// first occurrence.
    pub fn references(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_refs(&mut out);
        out
    }

    fn collect_refs<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Expr::Lit(_) => {}
            Expr::Var(name) => {
                if !out.contains(&name.as_str()) {
                    out.push(name);
                }
            }
            Expr::Not(e) | Expr::Neg(e) => e.collect_refs(out),
            Expr::And(a, b) | Expr::Or(a, b) | Expr::Arith(_, a, b) | Expr::Cmp(_, a, b) => {
                a.collect_refs(out);
                b.collect_refs(out);
            }
            Expr::Min(args) | Expr::Max(args) => args.iter().for_each(|a| a.collect_refs(out)),
            Expr::If(c, t, e) => {
                c.collect_refs(out);
                t.collect_refs(out);
                e.collect_refs(out);
            }
        }
    }

    pub fn eval<'v>(&self, lookup: &impl Fn(&str) -> Option<&'v Value>) -> Result<Value, EvalError> {
        self.eval_with(&|name: &str| lookup(name).cloned().ok_or_else(|| EvalError::Unbound(name.to_string())))
    }

    fn eval_with(&self, lookup: &dyn Fn(&str) -> Result<Value, EvalError>) -> Result<Value, EvalError> {
        Ok(match self {
            Expr::Lit(v) => v.clone(),
            Expr::Var(name) => lookup(name)?,
            Expr::Not(e) => bool_value(!truthy(&e.eval_with(lookup)?)?),
            Expr::And(a, b) => bool_value(truthy(&a.eval_with(lookup)?)? && truthy(&b.eval_with(lookup)?)?),
            Expr::Or(a, b) => bool_value(truthy(&a.eval_with(lookup)?)? || truthy(&b.eval_with(lookup)?)?),
            Expr::Neg(e) => Value::Int(int(&e.eval_with(lookup)?)?.checked_neg().ok_or(EvalError::Overflow)?),
            Expr::Arith(op, a, b) => arith(*op, &a.eval_with(lookup)?, &b.eval_with(lookup)?)?,
            Expr::Cmp(op, a, b) => compare(*op, &a.eval_with(lookup)?, &b.eval_with(lookup)?)?,
            Expr::Min(args) | Expr::Max(args) => {
                let is_min = matches!(self, Expr::Min(_));
                let mut best: Option<i64> = None;
                for a in args {
                    let n = int(&a.eval_with(lookup)?)?;
                    best = Some(match best {
                        None => n,
                        Some(b) if is_min => b.min(n),
                        Some(b) => b.max(n),
                    });
                }
                Value::Int(best.ok_or(EvalError::EmptyArgs)?)
            }
            Expr::If(c, t, e) => {
                if truthy(&c.eval_with(lookup)?)? {
                    t.eval_with(lookup)?
                } else {
                    e.eval_with(lookup)?
                }
            }
        })
    }

    /// Replaces variable references by positions using `resolve`.
    pub(crate) fn compile(&self, resolve: &impl Fn(&str) -> Option<usize>) -> Option<Compiled> {
        Some(match self {
            Expr::Lit(v) => Compiled::Lit(v.clone()),
            Expr::Var(name) => Compiled::Var(resolve(name)?),
            Expr::Not(e) => Compiled::Not(Box::new(e.compile(resolve)?)),
            Expr::Neg(e) => Compiled::Neg(Box::new(e.compile(resolve)?)),
            Expr::And(a, b) => Compiled::And(Box::new(a.compile(resolve)?), Box::new(b.compile(resolve)?)),
            Expr::Or(a, b) => Compiled::Or(Box::new(a.compile(resolve)?), Box::new(b.compile(resolve)?)),
            Expr::Arith(op, a, b) => Compiled::Arith(*op, Box::new(a.compile(resolve)?), Box::new(b.compile(resolve)?)),
            Expr::Cmp(op, a, b) => Compiled::Cmp(*op, Box::new(a.compile(resolve)?), Box::new(b.compile(resolve)?)),
            Expr::Min(args) => Compiled::Min(args.iter().map(|a| a.compile(resolve)).collect::<Option<_>>()?),
            Expr::Max(args) => Compiled::Max(args.iter().map(|a| a.compile(resolve)).collect::<Option<_>>()?),
            Expr::If(c, t, e) => Compiled::If(Box::new(c.compile(resolve)?), Box::new(t.compile(resolve)?), Box::new(e.compile(resolve)?)),
        })
    }
}

/// Position-resolved form of [`Expr`] evaluated against a value slice.
#[derive(Debug, Clone)]
pub(crate) enum Compiled {
    Lit(Value),
    Var(usize),
    Not(Box<Compiled>),
    And(Box<Compiled>, Box<Compiled>),
    Or(Box<Compiled>, Box<Compiled>),
    Neg(Box<Compiled>),
    Arith(ArithOp, Box<Compiled>, Box<Compiled>),
    Cmp(CmpOp, Box<Compiled>, Box<Compiled>),
    Min(Vec<Compiled>),
    Max(Vec<Compiled>),
    If(Box<Compiled>, Box<Compiled>, Box<Compiled>),
}

impl Compiled {
    pub(crate) fn eval(&self, vals: &[Value]) -> Result<Value, EvalError> {
        Ok(match self {
            Compiled::Lit(v) => v.clone(),
            Compiled::Var(i) => vals[*i].clone(),
            Compiled::Not(e) => bool_value(!truthy(&e.eval(vals)?)?),
            Compiled::And(a, b) => bool_value(truthy(&a.eval(vals)?)? && truthy(&b.eval(vals)?)?),
            Compiled::Or(a, b) => bool_value(truthy(&a.eval(vals)?)? || truthy(&b.eval(vals)?)?),
            Compiled::Neg(e) => Value::Int(int(&e.eval(vals)?)?.checked_neg().ok_or(EvalError::Overflow)?),
            Compiled::Arith(op, a, b) => arith(*op, &a.eval(vals)?, &b.eval(vals)?)?,
            Compiled::Cmp(op, a, b) => compare(*op, &a.eval(vals)?, &b.eval(vals)?)?,
            Compiled::Min(args) => Value::Int(fold_ints(args, vals, i64::min)?),
            Compiled::Max(args) => Value::Int(fold_ints(args, vals, i64::max)?),
            Compiled::If(c, t, e) => {
                if truthy(&c.eval(vals)?)? {
                    t.eval(vals)?
                } else {
                    e.eval(vals)?
                }
            }
        })
    }
}

fn fold_ints(args: &[Compiled], vals: &[Value], f: fn(i64, i64) -> i64) -> Result<i64, EvalError> {
    let mut acc: Option<i64> = None;
    for a in args {
        let n = int(&a.eval(vals)?)?;
        acc = Some(acc.map_or(n, |b| f(b, n)));
    }
    acc.ok_or(EvalError::EmptyArgs)
}

fn int(v: &Value) -> Result<i64, EvalError> {
    v.as_int().ok_or_else(|| EvalError::NotInteger(v.clone()))
}

fn truthy(v: &Value) -> Result<bool, EvalError> {
    Ok(int(v)? != 0)
}

fn bool_value(b: bool) -> Value {
    Value::Int(b as i64)
}

fn arith(op: ArithOp, a: &Value, b: &Value) -> Result<Value, EvalError> {
    let (a, b) = (int(a)?, int(b)?);
    let r = match op {
        ArithOp::Add => a.checked_add(b),
        ArithOp::Sub => a.checked_sub(b),
        ArithOp::Mul => a.checked_mul(b),
    };
    r.map(Value::Int).ok_or(EvalError::Overflow)
}

fn compare(op: CmpOp, a: &Value, b: &Value) -> Result<Value, EvalError> {
    let r = match op {
        CmpOp::Eq => a == b,
        CmpOp::Ne => a != b,
        _ => {
            let (a, b) = (int(a)?, int(b)?);
            match op {
                CmpOp::Lt => a < b,
                CmpOp::Le => a <= b,
                CmpOp::Gt => a > b,
                _ => a >= b,
            }
        }
    };
    Ok(bool_value(r))
}

// Binding strength used by the printer; higher binds tighter.
pub(crate) fn precedence(e: &Expr) -> u8 {
    match e {
        Expr::If(..) => 0,
        Expr::Or(..) => 1,
        Expr::And(..) => 2,
        Expr::Not(..) => 3,
        Expr::Cmp(..) => 4,
        Expr::Arith(ArithOp::Add | ArithOp::Sub, ..) => 5,
        Expr::Arith(ArithOp::Mul, ..) => 6,
        Expr::Neg(..) => 7,
        Expr::Lit(Value::Int(n)) if *n < 0 => 7,
        Expr::Lit(_) | Expr::Var(_) | Expr::Min(_) | Expr::Max(_) => 8,
    }
}

impl Expr {
    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let p = precedence(self);
        if p < min {
            f.write_str("(")?;
            self.fmt_prec(f, 0)?;
            return f.write_str(")");
        }
        match self {
            Expr::Lit(Value::Int(n)) => write!(f, "{n}"),
            Expr::Lit(Value::Sym(s)) => write!(f, "\"{s}\""),
            Expr::Var(name) => f.write_str(name),
            Expr::Not(e) => {
                f.write_str("not ")?;
                e.fmt_prec(f, 3)
            }
            Expr::Neg(e) => {
                f.write_str("-")?;
                // `--x` would lex as two minus signs anyway, but keep literals unambiguous.
                e.fmt_prec(f, 8)
            }
            Expr::And(a, b) => {
                a.fmt_prec(f, 2)?;
                f.write_str(" and ")?;
                b.fmt_prec(f, 3)
            }
            Expr::Or(a, b) => {
                a.fmt_prec(f, 1)?;
                f.write_str(" or ")?;
                b.fmt_prec(f, 2)
            }
            Expr::Arith(op, a, b) => {
                let p = precedence(self);
                a.fmt_prec(f, p)?;
                write!(f, " {} ", op.symbol())?;
                b.fmt_prec(f, p + 1)
            }
            Expr::Cmp(op, a, b) => {
                a.fmt_prec(f, 5)?;
                write!(f, " {} ", op.symbol())?;
                b.fmt_prec(f, 5)
            }
            Expr::Min(args) | Expr::Max(args) => {
                f.write_str(if matches!(self, Expr::Min(_)) { "min(" } else { "max(" })?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    a.fmt_prec(f, 0)?;
                }
                f.write_str(")")
            }
            Expr::If(c, t, e) => {
                f.write_str("if ")?;
                c.fmt_prec(f, 0)?;
                f.write_str(" then ")?;
                t.fmt_prec(f, 0)?;
                f.write_str(" else ")?;
                e.fmt_prec(f, 0)
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    fn env(pairs: &[(&str, i64)]) -> HashMap<String, Value> {
        pairs.iter().map(|(k, v)| (k.to_string(), Value::Int(*v))).collect()
    }

    #[test]
    fn eval_forest_fire_bodies() {
        let e = env(&[("L", 1), ("MD", 0)]);
        let look = |n: &str| e.get(n);
        let max = Expr::max(vec![Expr::var("L"), Expr::var("MD")]);
        let min = Expr::min(vec![Expr::var("L"), Expr::var("MD")]);
        assert_eq!(max.eval(&look), Ok(Value::Int(1)));
        assert_eq!(min.eval(&look), Ok(Value::Int(0)));
    }

    #[test]
    fn symbols_only_compare_for_equality() {
        let e: HashMap<String, Value> = [("C".to_string(), Value::Sym("red".into()))].into();
        let look = |n: &str| e.get(n);
        let eq = Expr::Cmp(CmpOp::Eq, Box::new(Expr::var("C")), Box::new(Expr::Lit(Value::Sym("red".into()))));
        assert_eq!(eq.eval(&look), Ok(Value::Int(1)));
        let lt = Expr::Cmp(CmpOp::Lt, Box::new(Expr::var("C")), Box::new(Expr::int(1)));
        assert!(matches!(lt.eval(&look), Err(EvalError::NotInteger(_))));
    }

    #[test]
    fn printer_parenthesizes_by_precedence() {
        let e = Expr::Arith(
            ArithOp::Mul,
            Box::new(Expr::Arith(ArithOp::Add, Box::new(Expr::var("A")), Box::new(Expr::int(1)))),
            Box::new(Expr::var("B")),
        );
        assert_eq!(e.to_string(), "(A + 1) * B");
        let right = Expr::Arith(
            ArithOp::Sub,
            Box::new(Expr::var("A")),
            Box::new(Expr::Arith(ArithOp::Sub, Box::new(Expr::var("B")), Box::new(Expr::var("C")))),
        );
        assert_eq!(right.to_string(), "A - (B - C)");
    }

    #[test]
    fn references_are_deduplicated() {
        let e = Expr::max(vec![Expr::var("L"), Expr::var("MD"), Expr::var("L")]);
        assert_eq!(e.references(), vec!["L", "MD"]);
    }
}
