use super::lexer::{lex, Cursor, Pos, Tok};
use super::{value, ErrorKind, ParseResult, START};
use crate::logic::{BoolFormula, CausalFormula, Conjunction, PrimitiveEvent};
use crate::model::{Signature, Value};

/// Parses `[X<-x, ...] body` and type-checks it against `sig`.
pub fn parse_formula(text: &str, sig: &Signature) -> ParseResult<CausalFormula> {
    parse_formula_in(text, &[sig], START)
}

/// As [`parse_formula`], checking against every signature in `sigs` and
/// reporting positions relative to `origin`.
pub fn parse_formula_in(text: &str, sigs: &[&Signature], origin: Pos) -> ParseResult<CausalFormula> {
    let mut p = FormulaParser { c: Cursor::new(lex(text, origin)?), sigs };
    let f = p.causal()?;
    p.end()?;
    Ok(f)
}

/// Parses `X=x & Y=y ...` (at least one event, distinct variables), each
/// event checked against every signature as an endogenous variable.
pub fn parse_conjunction(text: &str, sigs: &[&Signature], origin: Pos) -> ParseResult<Conjunction> {
    let mut p = FormulaParser { c: Cursor::new(lex(text, origin)?), sigs };
    let mut events: Vec<PrimitiveEvent> = Vec::new();
    loop {
        let (name, pos) = p.c.ident("a variable")?;
        p.c.expect(&Tok::Eq)?;
        let (v, vpos) = value(&mut p.c)?;
        p.check(&name, &v, pos, vpos, true)?;
        if events.iter().any(|e| e.variable == name) {
            return Err(pos.error(ErrorKind::Type, format!("`{name}` appears twice in the conjunction")));
        }
        events.push(PrimitiveEvent::new(name, v));
        if !p.c.eat(&Tok::Amp) {
            break;
        }
    }
    p.end()?;
    Conjunction::new(events).map_err(|e| origin.error(ErrorKind::Type, e.to_string()))
}

/// A comma-separated list of values, as used for contrasts.
pub fn parse_values(text: &str, origin: Pos) -> ParseResult<Vec<Value>> {
    let mut c = Cursor::new(lex(text, origin)?);
    let mut out = vec![value(&mut c)?.0];
    while c.eat(&Tok::Comma) {
        out.push(value(&mut c)?.0);
    }
    if !c.at_end() {
        return Err(c.unexpected("`,` or end of input"));
    }
    Ok(out)
}

struct FormulaParser<'s> {
    c: Cursor,
    sigs: &'s [&'s Signature],
}

impl FormulaParser<'_> {
    fn end(&self) -> ParseResult<()> {
        if self.c.at_end() {
            Ok(())
        } else {
            Err(self.c.unexpected("end of formula"))
        }
    }

    fn check(&self, name: &str, v: &Value, pos: Pos, vpos: Pos, endogenous: bool) -> ParseResult<()> {
        for sig in self.sigs {
            let Some((kind, decl)) = sig.lookup(name) else {
                return Err(pos.error(ErrorKind::Type, format!("unknown variable `{name}`")));
            };
            if endogenous && kind != crate::model::VarKind::Endogenous {
                return Err(pos.error(ErrorKind::Type, format!("`{name}` is exogenous; only endogenous variables can appear here")));
            }
            if !decl.range.contains(v) {
                return Err(vpos.error(ErrorKind::Type, format!("value `{v}` is outside the range {} of `{name}`", decl.range)));
            }
        }
        Ok(())
    }

    fn causal(&mut self) -> ParseResult<CausalFormula> {
        let mut interventions: Vec<PrimitiveEvent> = Vec::new();
        if self.c.eat(&Tok::LBracket) {
            loop {
                let (name, pos) = self.c.ident("a variable")?;
                self.c.expect(&Tok::LArrow)?;
                let (v, vpos) = value(&mut self.c)?;
                self.check(&name, &v, pos, vpos, true)?;
                if interventions.iter().any(|e| e.variable == name) {
                    return Err(pos.error(ErrorKind::Type, format!("`{name}` is intervened on twice")));
                }
                interventions.push(PrimitiveEvent::new(name, v));
                if !self.c.eat(&Tok::Comma) {
                    break;
                }
            }
            self.c.expect(&Tok::RBracket)?;
        }
        Ok(CausalFormula::new(interventions, self.implies()?))
    }

    fn implies(&mut self) -> ParseResult<BoolFormula> {
        let lhs = self.or()?;
        if self.c.eat(&Tok::RArrow) {
            return Ok(BoolFormula::Implies(Box::new(lhs), Box::new(self.implies()?)));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> ParseResult<BoolFormula> {
        let mut items = vec![self.and()?];
        while self.c.eat(&Tok::Pipe) {
            items.push(self.and()?);
        }
        Ok(if items.len() == 1 { items.pop().unwrap() } else { BoolFormula::Or(items) })
    }

    fn and(&mut self) -> ParseResult<BoolFormula> {
        let mut items = vec![self.unary()?];
        while self.c.eat(&Tok::Amp) {
            items.push(self.unary()?);
        }
        Ok(if items.len() == 1 { items.pop().unwrap() } else { BoolFormula::And(items) })
    }

    fn unary(&mut self) -> ParseResult<BoolFormula> {
        if self.c.eat(&Tok::Bang) {
            return Ok(BoolFormula::Not(Box::new(self.unary()?)));
        }
        match self.c.peek() {
            Tok::LParen => {
                self.c.bump();
                let f = self.implies()?;
                self.c.expect(&Tok::RParen)?;
                Ok(f)
            }
            Tok::Ident(s) if s == "true" || s == "false" => {
                let t = s == "true";
                self.c.bump();
                Ok(if t { BoolFormula::True } else { BoolFormula::False })
            }
            Tok::Ident(_) => {
                let (name, pos) = self.c.ident("a variable")?;
                let negated = match self.c.peek() {
                    Tok::Eq => false,
                    Tok::Ne => true,
                    _ => return Err(self.c.unexpected("`=` or `!=`")),
                };
                self.c.bump();
                let (v, vpos) = value(&mut self.c)?;
                self.check(&name, &v, pos, vpos, false)?;
                let e = BoolFormula::Event(PrimitiveEvent::new(name, v));
                Ok(if negated { e.not() } else { e })
            }
            _ => Err(self.c.unexpected("a formula")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::VarDecl;

    fn forest() -> Signature {
        Signature::new(
            vec![VarDecl::boolean("UL"), VarDecl::boolean("UMD")],
            vec![VarDecl::boolean("L"), VarDecl::boolean("MD"), VarDecl::boolean("F")],
        )
    }

    #[test]
    fn intervention_prefix() {
        let f = parse_formula("[L<-1](F=1)", &forest()).unwrap();
        assert_eq!(f, CausalFormula::new(vec![PrimitiveEvent::new("L", 1)], BoolFormula::event("F", 1)));
    }

    #[test]
    fn precedence_and_round_trip() {
        let src = "[L<-1, MD<-0] (F=1 & !(L=0) | MD=1 -> F=1)";
        let f = parse_formula(src, &forest()).unwrap();
        let BoolFormula::Implies(lhs, _) = &f.body else { panic!("{f:?}") };
        assert!(matches!(**lhs, BoolFormula::Or(_)));
        assert_eq!(parse_formula(&f.to_string(), &forest()).unwrap(), f);
        let g = parse_formula("a=1 -> b=1 -> c=1".replace(['a', 'b', 'c'], "F").as_str(), &forest()).unwrap();
        assert!(matches!(g.body, BoolFormula::Implies(_, ref r) if matches!(**r, BoolFormula::Implies(..))));
    }

    #[test]
    fn not_equal_is_sugar() {
        let f = parse_formula("F!=1", &forest()).unwrap();
        assert_eq!(f.body, BoolFormula::event("F", 1).not());
    }

    #[test]
    fn type_errors() {
        let e = parse_formula("F=2", &forest()).unwrap_err();
        assert_eq!((e.kind, e.column), (ErrorKind::Type, 3));
        let e = parse_formula("[UL<-1](F=1)", &forest()).unwrap_err();
        assert_eq!(e.kind, ErrorKind::Type);
        let e = parse_formula("G=1", &forest()).unwrap_err();
        assert!(e.message.contains("`G`"));
        let e = parse_formula("[L<-1, L<-0] F=1", &forest()).unwrap_err();
        assert_eq!(e.column, 8);
        assert_eq!(parse_formula("F=1 &", &forest()).unwrap_err().kind, ErrorKind::Syntax);
    }

    #[test]
    fn conjunctions() {
        let sig = forest();
        let c = parse_conjunction("L=1 & MD=1", &[&sig], START).unwrap();
        assert_eq!(c.to_string(), "L=1 & MD=1");
        assert!(parse_conjunction("L=1 & L=0", &[&sig], START).is_err());
        assert!(parse_conjunction("UL=1", &[&sig], START).is_err());
        assert!(parse_conjunction("", &[&sig], START).is_err());
    }
}
