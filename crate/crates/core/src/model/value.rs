use std::fmt;
use std::sync::Arc;

/// A domain element: either an integer or a symbol.
///
/// Integers order by magnitude, symbols by name, and every integer sorts
/// before every symbol. A single CSP never mixes the two.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Int(i64),
    Sym(Arc<str>),
}

impl Value {
    pub fn sym(name: &str) -> Self {
        Value::Sym(Arc::from(name))
    }

    /// Reads a token the way all text formats do: integer literals become
    /// `Int`, anything else is a symbol.
    pub fn parse(token: &str) -> Self {
        match token.parse::<i64>() {
            Ok(n) => Value::Int(n),
            Err(_) => Value::sym(token),
        }
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            Value::Int(n) => Some(*n),
            Value::Sym(_) => None,
        }
    }

    pub fn is_int(&self) -> bool {
        matches!(self, Value::Int(_))
    }
}

impl From<i64> for Value {
    fn from(n: i64) -> Self {
        Value::Int(n)
    }
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::sym(s)
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

/// 0-based position of a variable in its CSP.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub usize);

impl VarId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering() {
        assert!(Value::Int(-3) < Value::Int(2));
        assert!(Value::Int(100) < Value::sym("a"));
        assert!(Value::sym("f") < Value::sym("t"));
    }

    #[test]
    fn parse_tokens() {
        assert_eq!(Value::parse("-12"), Value::Int(-12));
        assert_eq!(Value::parse("u"), Value::sym("u"));
    }
}
