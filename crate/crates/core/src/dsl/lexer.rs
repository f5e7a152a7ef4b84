use std::fmt;

use super::{ErrorKind, ParseError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    /// Unsigned; a leading minus is a separate token.
    Int(u64),
    Str(String),
    LBrace,
    RBrace,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Colon,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    LArrow,
    RArrow,
    Plus,
    Minus,
    Star,
    Slash,
    Amp,
    Pipe,
    Bang,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(s) => return write!(f, "`{s}`"),
            Tok::Int(n) => return write!(f, "`{n}`"),
            Tok::Str(s) => return write!(f, "\"{s}\""),
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBracket => "[",
            Tok::RBracket => "]",
            Tok::Comma => ",",
            Tok::Colon => ":",
            Tok::Eq => "=",
            Tok::Ne => "!=",
            Tok::Lt => "<",
            Tok::Le => "<=",
            Tok::Gt => ">",
            Tok::Ge => ">=",
            Tok::LArrow => "<-",
            Tok::RArrow => "->",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Star => "*",
            Tok::Slash => "/",
            Tok::Amp => "&",
            Tok::Pipe => "|",
            Tok::Bang => "!",
            Tok::Eof => return f.write_str("end of input"),
        };
        write!(f, "`{s}`")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub column: usize,
}

impl Pos {
    pub(crate) fn error(self, kind: ErrorKind, message: impl Into<String>) -> ParseError {
        ParseError { line: self.line, column: self.column, kind, message: message.into() }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

/// Splits `src` into tokens. `origin` is the position of the first
/// character, so that text embedded in a larger document reports
/// positions in that document.
pub(crate) fn lex(src: &str, origin: Pos) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut line, mut col) = (origin.line, origin.column);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, column: col };
        let next = chars.get(i + 1).copied();
        let single = |t: Tok| (t, 1);
        let (tok, width) = match c {
            '\n' => {
                line += 1;
                col = 1;
                i += 1;
                continue;
            }
            c if c.is_whitespace() => {
                col += 1;
                i += 1;
                continue;
            }
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
                continue;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                col += i - start;
                out.push(Token { tok: Tok::Ident(s), pos });
                continue;
            }
            c if c.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                if i < chars.len() && (chars[i].is_ascii_alphabetic() || chars[i] == '_') {
                    return Err(
                        pos.error(ErrorKind::Lexical, "identifiers cannot start with a digit (use an alias such as `OneM4` for `1M4`)")
                    );
                }
                if i < chars.len() && chars[i] == '.' {
                    return Err(pos.error(ErrorKind::Lexical, "decimal numbers are not allowed; write an exact ratio such as `1/8`"));
                }
                let s: String = chars[start..i].iter().collect();
                let n = s.parse::<u64>().map_err(|_| pos.error(ErrorKind::Lexical, format!("integer `{s}` is too large")))?;
                col += i - start;
                out.push(Token { tok: Tok::Int(n), pos });
                continue;
            }
            '"' => {
                let start = i + 1;
                let mut j = start;
                while j < chars.len() && chars[j] != '"' && chars[j] != '\n' {
                    j += 1;
                }
                if j >= chars.len() || chars[j] != '"' {
                    return Err(pos.error(ErrorKind::Lexical, "unterminated string"));
                }
                let s: String = chars[start..j].iter().collect();
                (Tok::Str(s), j + 1 - i)
            }
            '{' => single(Tok::LBrace),
            '}' => single(Tok::RBrace),
            '(' => single(Tok::LParen),
            ')' => single(Tok::RParen),
            '[' => single(Tok::LBracket),
            ']' => single(Tok::RBracket),
            ',' => single(Tok::Comma),
            ':' => single(Tok::Colon),
            '=' => single(Tok::Eq),
            '+' => single(Tok::Plus),
            '*' => single(Tok::Star),
            '/' => single(Tok::Slash),
            '&' => single(Tok::Amp),
            '|' => single(Tok::Pipe),
            '!' if next == Some('=') => (Tok::Ne, 2),
            '!' => single(Tok::Bang),
            '<' if next == Some('=') => (Tok::Le, 2),
            '<' if next == Some('-') => (Tok::LArrow, 2),
            '<' => single(Tok::Lt),
            '>' if next == Some('=') => (Tok::Ge, 2),
            '>' => single(Tok::Gt),
            '-' if next == Some('>') => (Tok::RArrow, 2),
            '-' => single(Tok::Minus),
            other => return Err(pos.error(ErrorKind::Lexical, format!("unexpected character `{other}`"))),
        };
        out.push(Token { tok, pos });
        i += width;
        col += width;
    }
    out.push(Token { tok: Tok::Eof, pos: Pos { line, column: col } });
    Ok(out)
}

/// Cursor over a token list with the usual helpers.
pub(crate) struct Cursor {
    toks: Vec<Token>,
    at: usize,
}

impl Cursor {
    pub fn new(toks: Vec<Token>) -> Self {
        Cursor { toks, at: 0 }
    }

    pub fn peek(&self) -> &Tok {
        &self.toks[self.at].tok
    }

    pub fn peek2(&self) -> &Tok {
        &self.toks[(self.at + 1).min(self.toks.len() - 1)].tok
    }

    pub fn pos(&self) -> Pos {
        self.toks[self.at].pos
    }

    pub fn bump(&mut self) -> Token {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    pub fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    pub fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    pub fn eat_keyword(&mut self, kw: &str) -> bool {
        if self.is_keyword(kw) {
            self.bump();
            true
        } else {
            false
        }
    }

    pub fn unexpected(&self, wanted: &str) -> ParseError {
        self.pos().error(ErrorKind::Syntax, format!("expected {wanted}, found {}", self.peek()))
    }

    pub fn expect(&mut self, t: &Tok) -> Result<Pos, ParseError> {
        if self.peek() == t {
            Ok(self.bump().pos)
        } else {
            Err(self.unexpected(&t.to_string()))
        }
    }

    pub fn expect_keyword(&mut self, kw: &str) -> Result<Pos, ParseError> {
        if self.is_keyword(kw) {
            Ok(self.bump().pos)
        } else {
            Err(self.unexpected(&format!("`{kw}`")))
        }
    }

    /// A non-reserved identifier.
    pub fn ident(&mut self, what: &str) -> Result<(String, Pos), ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) if super::is_reserved(&s) => {
                Err(self.pos().error(ErrorKind::Syntax, format!("`{s}` is a reserved word and cannot be used as {what}")))
            }
            Tok::Ident(s) => Ok((s, self.bump().pos)),
            _ => Err(self.unexpected(what)),
        }
    }

    pub fn at_end(&self) -> bool {
        *self.peek() == Tok::Eof
    }
}
