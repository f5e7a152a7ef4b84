use std::fmt;

/// A value literal. Integers carry a numeric interpretation for the
/// arithmetic and ordering operators; symbols only support equality.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Int(i64),
    Sym(String),
}

impl Value {
    pub fn int(n: i64) -> Self {
        Value::Int(n)
    }

    /// Parses a bare token: an optionally negative integer, or an identifier.
    pub fn from_token(token: &str) -> Option<Self> {
        if let Ok(n) = token.parse::<i64>() {
            return Some(Value::Int(n));
        }
        is_identifier(token).then(|| Value::Sym(token.to_string()))
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            Value::Int(n) => Some(*n),
            Value::Sym(_) => None,
        }
    }
}

impl From<i64> for Value {
    fn from(n: i64) -> Self {
        Value::Int(n)
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(n) => write!(f, "{n}"),
            Value::Sym(s) => f.write_str(s),
        }
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// The ordered, finite, non-empty set of values a variable ranges over.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Range {
    values: Vec<Value>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RangeError {
    #[error("range is empty")]
    Empty,
    #[error("range lists `{0}` twice")]
    Duplicate(Value),
}

impl Range {
    pub fn new(values: Vec<Value>) -> Result<Self, RangeError> {
        if values.is_empty() {
            return Err(RangeError::Empty);
        }
        for (i, v) in values.iter().enumerate() {
            if values[..i].contains(v) {
                return Err(RangeError::Duplicate(v.clone()));
            }
        }
        Ok(Range { values })
    }

    /// `{0, 1}`.
    pub fn boolean() -> Self {
        Range { values: vec![Value::Int(0), Value::Int(1)] }
    }

    pub fn values(&self) -> &[Value] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn contains(&self, v: &Value) -> bool {
        self.values.contains(v)
    }

    pub fn position(&self, v: &Value) -> Option<usize> {
        self.values.iter().position(|x| x == v)
    }
}

impl fmt::Display for Range {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, v) in self.values.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str("}")
    }
}
