use std::fmt;
use std::sync::Arc;

/// An opaque value token. Integers sort numerically and before symbols.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Int(i64),
    Sym(Arc<str>),
}

impl Value {
    pub fn sym(s: impl AsRef<str>) -> Value {
        Value::Sym(Arc::from(s.as_ref()))
    }

    /// Reads a token as an integer when it looks like one, else as a symbol.
    pub fn parse_token(s: &str) -> Value {
        let t = s.trim();
        match t.parse::<i64>() {
            // Only canonical spellings, so that printing gives the token back.
            Ok(n) if n.to_string() == t => Value::Int(n),
            _ => Value::sym(t),
        }
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            Value::Int(n) => Some(*n),
            Value::Sym(_) => None,
        }
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

impl fmt::Debug for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
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

/// What a variable stands for in a measurement scenario.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum Role {
    Measurement,
    Outcome,
    Hidden,
    Plain,
}

impl Role {
    /// Naming convention: x.. measurement, y.. outcome, z.. hidden.
    pub fn infer(name: &str) -> Role {
        match name.chars().next() {
            Some('x') => Role::Measurement,
            Some('y') => Role::Outcome,
            Some('z') => Role::Hidden,
            _ => Role::Plain,
        }
    }

    pub fn code(self) -> &'static str {
        match self {
            Role::Measurement => "m",
            Role::Outcome => "o",
            Role::Hidden => "h",
            Role::Plain => "p",
        }
    }

    pub fn from_code(s: &str) -> Option<Role> {
        match s.trim() {
            "m" | "measurement" => Some(Role::Measurement),
            "o" | "outcome" => Some(Role::Outcome),
            "h" | "hidden" => Some(Role::Hidden),
            "p" | "plain" => Some(Role::Plain),
            _ => None,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct Variable {
    pub name: String,
    pub role: Role,
}

impl Variable {
    pub fn new(name: impl Into<String>, role: Role) -> Variable {
        Variable {
            name: name.into(),
            role,
        }
    }

    /// Role taken from the name prefix.
    pub fn inferred(name: impl Into<String>) -> Variable {
        let name = name.into();
        let role = Role::infer(&name);
        Variable { name, role }
    }
}

pub fn vars(names: &[&str]) -> Vec<Variable> {
    names.iter().map(|n| Variable::inferred(*n)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ints_sort_before_symbols() {
        let mut v = vec![Value::sym("a"), Value::Int(10), Value::Int(2)];
        v.sort();
        assert_eq!(v, vec![Value::Int(2), Value::Int(10), Value::sym("a")]);
    }

    #[test]
    fn token_parsing() {
        assert_eq!(Value::parse_token(" 7 "), Value::Int(7));
        assert_eq!(Value::parse_token("-3"), Value::Int(-3));
        assert_eq!(Value::parse_token("h:0:1:0"), Value::sym("h:0:1:0"));
        assert_eq!(Value::parse_token("+3"), Value::sym("+3"));
    }

    #[test]
    fn role_prefixes() {
        assert_eq!(Role::infer("x12"), Role::Measurement);
        assert_eq!(Role::infer("y"), Role::Outcome);
        assert_eq!(Role::infer("z_1"), Role::Hidden);
        assert_eq!(Role::infer("w"), Role::Plain);
    }
}
