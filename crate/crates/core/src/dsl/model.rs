use std::collections::HashSet;
use std::fmt::Write as _;

use super::lexer::{lex, Cursor, Pos, Tok};
use super::{signed, value, ErrorKind, ParseError, ParseResult, START};
use crate::expr::{ArithOp, CmpOp, Expr};
use crate::model::{CausalModel, Equation, Range, Signature, Value, VarDecl};

/// Parses a model document into its models, in document order.
pub fn parse_model(text: &str) -> ParseResult<Vec<CausalModel>> {
    let mut c = Cursor::new(lex(text, START)?);
    let mut out: Vec<CausalModel> = Vec::new();
    let mut ids = HashSet::new();
    while !c.at_end() {
        c.expect_keyword("model")?;
        let (id, pos) = c.ident("a model id")?;
        if !ids.insert(id.clone()) {
            return Err(pos.error(ErrorKind::Resolution, format!("model `{id}` is defined twice")));
        }
        out.push(model_body(&mut c, id)?);
    }
    Ok(out)
}

fn model_body(c: &mut Cursor, id: String) -> ParseResult<CausalModel> {
    c.expect(&Tok::LBrace)?;
    let mut exo = Vec::new();
    let mut endo = Vec::new();
    let mut equations = Vec::new();
    let mut refs: Vec<(String, Pos)> = Vec::new();
    let mut names = HashSet::new();
    let mut declare = |c: &mut Cursor| -> ParseResult<String> {
        let (name, pos) = c.ident("a variable name")?;
        if !names.insert(name.clone()) {
            return Err(pos.error(ErrorKind::Resolution, format!("`{name}` is declared twice in model `{id}`")));
        }
        Ok(name)
    };
    loop {
        if c.eat_keyword("exo") {
            let name = declare(c)?;
            c.expect(&Tok::Colon)?;
            exo.push(VarDecl::new(name, range(c)?));
        } else if c.eat_keyword("endo") {
            let name = declare(c)?;
            c.expect(&Tok::Colon)?;
            let r = range(c)?;
            c.expect(&Tok::Eq)?;
            let body = ExprParser { c, refs: &mut refs }.expr()?;
            endo.push(VarDecl::new(name.clone(), r));
            equations.push(Equation::new(name, body));
        } else if c.eat(&Tok::RBrace) {
            break;
        } else {
            return Err(c.unexpected("`exo`, `endo` or `}`"));
        }
    }
    let declared: HashSet<&str> = exo.iter().chain(&endo).map(|d| d.name.as_str()).collect();
    if let Some((name, pos)) = refs.iter().find(|(n, _)| !declared.contains(n.as_str())) {
        return Err(pos.error(ErrorKind::Resolution, format!("unknown variable `{name}` in model `{id}`")));
    }
    Ok(CausalModel::new(id, Signature::new(exo, endo), equations))
}

fn range(c: &mut Cursor) -> ParseResult<Range> {
    c.expect(&Tok::LBrace)?;
    let mut values: Vec<Value> = Vec::new();
    loop {
        let (v, pos) = value(c)?;
        if values.contains(&v) {
            return Err(pos.error(ErrorKind::Type, format!("range lists `{v}` twice")));
        }
        values.push(v);
        if !c.eat(&Tok::Comma) {
            break;
        }
    }
    c.expect(&Tok::RBrace)?;
    Ok(Range::new(values).expect("distinct, non-empty values"))
}

struct ExprParser<'c> {
    c: &'c mut Cursor,
    refs: &'c mut Vec<(String, Pos)>,
}

impl ExprParser<'_> {
    fn expr(&mut self) -> ParseResult<Expr> {
        if self.c.eat_keyword("if") {
            let cond = self.expr()?;
            self.c.expect_keyword("then")?;
            let then = self.expr()?;
            self.c.expect_keyword("else")?;
            let other = self.expr()?;
            return Ok(Expr::If(Box::new(cond), Box::new(then), Box::new(other)));
        }
        self.or()
    }

    fn or(&mut self) -> ParseResult<Expr> {
        let mut e = self.and()?;
        while self.c.eat_keyword("or") {
            e = Expr::Or(Box::new(e), Box::new(self.and()?));
        }
        Ok(e)
    }

    fn and(&mut self) -> ParseResult<Expr> {
        let mut e = self.not()?;
        while self.c.eat_keyword("and") {
            e = Expr::And(Box::new(e), Box::new(self.not()?));
        }
        Ok(e)
    }

    fn not(&mut self) -> ParseResult<Expr> {
        if self.c.eat_keyword("not") {
            return Ok(Expr::Not(Box::new(self.not()?)));
        }
        self.cmp()
    }

    fn cmp(&mut self) -> ParseResult<Expr> {
        let lhs = self.add()?;
        let op = match self.c.peek() {
            Tok::Eq => CmpOp::Eq,
            Tok::Ne => CmpOp::Ne,
            Tok::Lt | Tok::LArrow => CmpOp::Lt,
            Tok::Le => CmpOp::Le,
            Tok::Gt => CmpOp::Gt,
            Tok::Ge => CmpOp::Ge,
            _ => return Ok(lhs),
        };
        // `a<-1` lexes as an arrow; inside an expression it means `a < -1`.
        let arrow = self.c.bump().tok == Tok::LArrow;
        let rhs = if arrow { negate(self.unary()?) } else { self.add()? };
        let rhs = if arrow {
            let r = self.mul_tail(rhs)?;
            self.add_tail(r)?
        } else {
            rhs
        };
        if matches!(self.c.peek(), Tok::Eq | Tok::Ne | Tok::Lt | Tok::Le | Tok::Gt | Tok::Ge | Tok::LArrow) {
            return Err(self.c.pos().error(ErrorKind::Syntax, "comparisons do not chain; add parentheses"));
        }
        Ok(Expr::Cmp(op, Box::new(lhs), Box::new(rhs)))
    }

    fn add(&mut self) -> ParseResult<Expr> {
        let e = self.mul()?;
        self.add_tail(e)
    }

    fn add_tail(&mut self, mut e: Expr) -> ParseResult<Expr> {
        loop {
            let op = match self.c.peek() {
                Tok::Plus => ArithOp::Add,
                Tok::Minus => ArithOp::Sub,
                _ => return Ok(e),
            };
            self.c.bump();
            e = Expr::Arith(op, Box::new(e), Box::new(self.mul()?));
        }
    }

    fn mul(&mut self) -> ParseResult<Expr> {
        let e = self.unary()?;
        self.mul_tail(e)
    }

    fn mul_tail(&mut self, mut e: Expr) -> ParseResult<Expr> {
        while self.c.eat(&Tok::Star) {
            e = Expr::Arith(ArithOp::Mul, Box::new(e), Box::new(self.unary()?));
        }
        Ok(e)
    }

    fn unary(&mut self) -> ParseResult<Expr> {
        let pos = self.c.pos();
        if self.c.eat(&Tok::Minus) {
            if let Tok::Int(n) = *self.c.peek() {
                self.c.bump();
                return Ok(Expr::Lit(Value::Int(signed(n, true, pos)?)));
            }
            return Ok(negate(self.unary()?));
        }
        self.atom()
    }

    fn atom(&mut self) -> ParseResult<Expr> {
        let pos = self.c.pos();
        match self.c.peek().clone() {
            Tok::Int(n) => {
                self.c.bump();
                Ok(Expr::Lit(Value::Int(signed(n, false, pos)?)))
            }
            Tok::Str(_) => Ok(Expr::Lit(value(self.c)?.0)),
            Tok::LParen => {
                self.c.bump();
                let e = self.expr()?;
                self.c.expect(&Tok::RParen)?;
                Ok(e)
            }
            Tok::Ident(s) => match s.as_str() {
                "true" | "false" => {
                    self.c.bump();
                    Ok(Expr::int((s == "true") as i64))
                }
                "min" | "max" => {
                    self.c.bump();
                    self.c.expect(&Tok::LParen)?;
                    let mut args = Vec::new();
                    if *self.c.peek() != Tok::RParen {
                        args.push(self.expr()?);
                        while self.c.eat(&Tok::Comma) {
                            args.push(self.expr()?);
                        }
                    }
                    self.c.expect(&Tok::RParen)?;
                    if args.is_empty() {
                        return Err(pos.error(ErrorKind::Resolution, format!("`{s}` needs at least one argument")));
                    }
                    Ok(if s == "min" { Expr::Min(args) } else { Expr::Max(args) })
                }
                _ => {
                    let (name, pos) = self.c.ident("an expression")?;
                    self.refs.push((name.clone(), pos));
                    Ok(Expr::Var(name))
                }
            },
            _ => Err(self.c.unexpected("an expression")),
        }
    }
}

/// `-e`, folding non-negative integer literals so that printing and
/// re-parsing agree.
fn negate(e: Expr) -> Expr {
    match e {
        Expr::Lit(Value::Int(n)) if n >= 0 => Expr::Lit(Value::Int(-n)),
        e => Expr::Neg(Box::new(e)),
    }
}

/// Prints one model in the document syntax. Endogenous variables without
/// an equation cannot be expressed and are reported as an error.
pub fn print_model(m: &CausalModel) -> Result<String, ParseError> {
    let mut s = String::new();
    writeln!(s, "model {} {{", m.id()).unwrap();
    for d in m.signature().exogenous() {
        writeln!(s, "  exo {} : {}", d.name, d.range).unwrap();
    }
    for d in m.signature().endogenous() {
        let eq = m
            .equation(&d.name)
            .ok_or_else(|| Pos::default().error(ErrorKind::Resolution, format!("model `{}` has no equation for `{}`", m.id(), d.name)))?;
        writeln!(s, "  endo {} : {} = {}", d.name, d.range, eq.body).unwrap();
    }
    s.push_str("}\n");
    Ok(s)
}

pub fn print_models(models: &[CausalModel]) -> Result<String, ParseError> {
    let parts = models.iter().map(print_model).collect::<Result<Vec<_>, _>>()?;
    Ok(parts.join("\n"))
}
