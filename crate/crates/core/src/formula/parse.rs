use std::fmt;

use super::ast::Formula;
use crate::value::Role;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    /// Byte offset into the input.
    pub pos: usize,
    pub msg: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "syntax error at offset {}: {}", self.pos, self.msg)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Indep,
    And,
    Or,
    Eq,
    Neq,
    LParen,
    RParen,
    Semi,
    Dot,
    Bar,
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(s) => return write!(f, "`{s}`"),
            Tok::Indep => "`_||_`",
            Tok::And => "`/\\`",
            Tok::Or => "`\\/`",
            Tok::Eq => "`=`",
            Tok::Neq => "`!=`",
            Tok::LParen => "`(`",
            Tok::RParen => "`)`",
            Tok::Semi => "`;`",
            Tok::Dot => "`.`",
            Tok::Bar => "`|`",
            Tok::End => "end of input",
        };
        f.write_str(s)
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let b = src.as_bytes();
    let mut i = 0;
    let mut out = Vec::new();
    while i < b.len() {
        let c = b[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let rest = &src[i..];
        let (tok, len) = if rest.starts_with("_||_") {
            (Tok::Indep, 4)
        } else if rest.starts_with("/\\") {
            (Tok::And, 2)
        } else if rest.starts_with("\\/") {
            (Tok::Or, 2)
        } else if rest.starts_with("!=") {
            (Tok::Neq, 2)
        } else {
            match c {
                b'=' => (Tok::Eq, 1),
                b'(' => (Tok::LParen, 1),
                b')' => (Tok::RParen, 1),
                b';' => (Tok::Semi, 1),
                b'.' => (Tok::Dot, 1),
                b'|' => (Tok::Bar, 1),
                c if c.is_ascii_alphabetic() || c == b'_' => {
                    let mut j = i;
                    while j < b.len()
                        && (b[j].is_ascii_alphanumeric() || b[j] == b'_' || b[j] == b'\'')
                    {
                        j += 1;
                    }
                    (Tok::Ident(src[i..j].to_string()), j - i)
                }
                _ => {
                    let ch = rest.chars().next().unwrap();
                    return Err(ParseError {
                        pos: start,
                        msg: format!("unexpected character {ch:?}"),
                    });
                }
            }
        };
        out.push((tok, start));
        i += len;
    }
    out.push((Tok::End, src.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
}

const QUANTIFIERS: [&str; 4] = ["E", "A", "Eh", "Ah"];

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.at + k).min(self.toks.len() - 1)].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            pos: self.pos(),
            msg: msg.into(),
        })
    }

    fn expect(&mut self, t: Tok) -> Result<(), ParseError> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            self.err(format!("expected {t}, found {}", self.peek()))
        }
    }

    fn disj(&mut self) -> Result<Formula, ParseError> {
        let mut parts = vec![self.conj()?];
        while *self.peek() == Tok::Or {
            self.bump();
            parts.push(self.conj()?);
        }
        Ok(Formula::or(parts))
    }

    fn conj(&mut self) -> Result<Formula, ParseError> {
        let mut parts = vec![self.unit()?];
        while *self.peek() == Tok::And {
            self.bump();
            parts.push(self.unit()?);
        }
        Ok(Formula::and(parts))
    }

    fn is_quantifier(&self) -> bool {
        matches!(self.peek(), Tok::Ident(q) if QUANTIFIERS.contains(&q.as_str()))
            && matches!(self.peek_at(1), Tok::Ident(_))
            && *self.peek_at(2) == Tok::Dot
    }

    fn idents(&mut self) -> Vec<String> {
        let mut out = Vec::new();
        while let Tok::Ident(s) = self.peek() {
            out.push(s.clone());
            self.bump();
        }
        out
    }

    /// A nonempty run of variables, or `()` for the empty tuple.
    fn tuple(&mut self) -> Result<Vec<String>, ParseError> {
        if *self.peek() == Tok::LParen && *self.peek_at(1) == Tok::RParen {
            self.bump();
            self.bump();
            return Ok(vec![]);
        }
        let t = self.idents();
        if t.is_empty() {
            return self.err(format!("expected a variable, found {}", self.peek()));
        }
        Ok(t)
    }

    fn unit(&mut self) -> Result<Formula, ParseError> {
        if self.is_quantifier() {
            let Tok::Ident(q) = self.bump() else {
                unreachable!()
            };
            let Tok::Ident(v) = self.bump() else {
                unreachable!()
            };
            self.bump();
            let body = Box::new(self.unit()?);
            return Ok(match q.as_str() {
                "E" => Formula::Exists(v, body),
                "A" => Formula::Forall(v, body),
                "Eh" => Formula::ExistsNew(v, body),
                _ => Formula::ForallNew(v, body),
            });
        }
        match self.peek().clone() {
            Tok::Eq => {
                self.bump();
                self.expect(Tok::LParen)?;
                let first = self.idents();
                if *self.peek() == Tok::Semi {
                    self.bump();
                    let second = self.idents();
                    self.expect(Tok::RParen)?;
                    Ok(Formula::Dep {
                        x: first,
                        y: second,
                    })
                } else {
                    self.expect(Tok::RParen)?;
                    Ok(Formula::Const(first))
                }
            }
            Tok::LParen => {
                if *self.peek_at(1) == Tok::RParen {
                    self.bump();
                    self.bump();
                    return self.indep_rest(vec![]);
                }
                self.bump();
                let f = self.disj()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::Ident(_) => {
                let start = self.pos();
                let t = self.idents();
                match self.peek() {
                    Tok::Indep => self.indep_rest(t),
                    Tok::Eq | Tok::Neq if t.len() == 1 => {
                        let neq = self.bump() == Tok::Neq;
                        let Tok::Ident(w) = self.bump() else {
                            return Err(ParseError {
                                pos: start,
                                msg: "comparison needs a variable on the right".into(),
                            });
                        };
                        let v = t.into_iter().next().unwrap();
                        Ok(if neq {
                            Formula::Neq(v, w)
                        } else {
                            Formula::Eq(v, w)
                        })
                    }
                    other => self.err(format!("expected `_||_`, `=` or `!=`, found {other}")),
                }
            }
            other => self.err(format!("expected a formula, found {other}")),
        }
    }

    fn indep_rest(&mut self, y: Vec<String>) -> Result<Formula, ParseError> {
        self.expect(Tok::Indep)?;
        let z = self.tuple()?;
        let x = if *self.peek() == Tok::Bar {
            self.bump();
            self.tuple()?
        } else {
            vec![]
        };
        Ok(Formula::Indep { y, x, z })
    }
}

/// Parses the DSL; bound variables are renamed apart from free ones.
pub fn parse(src: &str) -> Result<Formula, ParseError> {
    let mut p = Parser {
        toks: lex(src)?,
        at: 0,
    };
    let f = p.disj()?;
    if *p.peek() != Tok::End {
        return p.err(format!("unexpected {} after formula", p.peek()));
    }
    Ok(f.rename_bound())
}

/// Like [`parse`], also listing variables whose name prefix gives no role.
pub fn parse_with_warnings(src: &str) -> Result<(Formula, Vec<String>), ParseError> {
    let f = parse(src)?;
    let warnings = f
        .all_vars()
        .into_iter()
        .filter(|v| Role::infer(v) == Role::Plain)
        .map(|v| format!("variable `{v}` has no x/y/z prefix; treated as plain"))
        .collect();
    Ok((f, warnings))
}

/// One atom per nonempty line; `#` starts a comment.
pub fn parse_lines(src: &str) -> Result<Vec<Formula>, (usize, ParseError)> {
    let mut out = Vec::new();
    for (i, line) in src.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        out.push(parse(line).map_err(|e| (i + 1, e))?);
    }
    Ok(out)
}
