use std::collections::BTreeSet;
use std::fmt;

/// Independence-logic formulas. Variables are referred to by name; a bound
/// variable's role comes from its name prefix.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Formula {
    Eq(String, String),
    Neq(String, String),
    /// `y ⊥_x z`
    Indep {
        y: Vec<String>,
        x: Vec<String>,
        z: Vec<String>,
    },
    /// `=(x, y)`: x determines y.
    Dep {
        x: Vec<String>,
        y: Vec<String>,
    },
    /// `=(z)`
    Const(Vec<String>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Exists(String, Box<Formula>),
    Forall(String, Box<Formula>),
    /// Existential over a new sort.
    ExistsNew(String, Box<Formula>),
    ForallNew(String, Box<Formula>),
}

fn strs(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

impl Formula {
    pub fn indep(y: &[&str], x: &[&str], z: &[&str]) -> Formula {
        Formula::Indep {
            y: strs(y),
            x: strs(x),
            z: strs(z),
        }
    }

    pub fn dep(x: &[&str], y: &[&str]) -> Formula {
        Formula::Dep {
            x: strs(x),
            y: strs(y),
        }
    }

    pub fn constant(z: &[&str]) -> Formula {
        Formula::Const(strs(z))
    }

    /// Conjunction; a single conjunct is returned as is.
    pub fn and(mut parts: Vec<Formula>) -> Formula {
        if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            Formula::And(parts)
        }
    }

    pub fn or(mut parts: Vec<Formula>) -> Formula {
        if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            Formula::Or(parts)
        }
    }

    /// Dep and Const written as the independence atoms they abbreviate.
    pub fn as_indep(&self) -> Option<(Vec<String>, Vec<String>, Vec<String>)> {
        match self {
            Formula::Indep { y, x, z } => Some((y.clone(), x.clone(), z.clone())),
            Formula::Dep { x, y } => Some((y.clone(), x.clone(), y.clone())),
            Formula::Const(z) => Some((z.clone(), vec![], z.clone())),
            _ => None,
        }
    }

    pub fn is_atom(&self) -> bool {
        matches!(
            self,
            Formula::Eq(..)
                | Formula::Neq(..)
                | Formula::Indep { .. }
                | Formula::Dep { .. }
                | Formula::Const(_)
        )
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Formula::And(ps) | Formula::Or(ps) => ps.iter().all(|p| p.is_quantifier_free()),
            Formula::Exists(..)
            | Formula::Forall(..)
            | Formula::ExistsNew(..)
            | Formula::ForallNew(..) => false,
            _ => true,
        }
    }

    /// Built only from first-order and dependence atoms; such formulas are
    /// downward closed and weakly flat.
    pub fn is_dependence_formula(&self) -> bool {
        match self {
            Formula::Eq(..) | Formula::Neq(..) | Formula::Dep { .. } | Formula::Const(_) => true,
            Formula::Indep { y, z, .. } => y == z,
            Formula::And(ps) | Formula::Or(ps) => ps.iter().all(|p| p.is_dependence_formula()),
            Formula::Exists(_, b)
            | Formula::Forall(_, b)
            | Formula::ExistsNew(_, b)
            | Formula::ForallNew(_, b) => b.is_dependence_formula(),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        let mut add = |v: &String, bound: &Vec<String>| {
            if !bound.contains(v) {
                out.insert(v.clone());
            }
        };
        match self {
            Formula::Eq(a, b) | Formula::Neq(a, b) => {
                add(a, bound);
                add(b, bound);
            }
            Formula::Indep { y, x, z } => {
                for v in y.iter().chain(x).chain(z) {
                    add(v, bound);
                }
            }
            Formula::Dep { x, y } => {
                for v in x.iter().chain(y) {
                    add(v, bound);
                }
            }
            Formula::Const(z) => {
                for v in z {
                    add(v, bound);
                }
            }
            Formula::And(ps) | Formula::Or(ps) => {
                for p in ps {
                    p.collect_free(bound, out);
                }
            }
            Formula::Exists(v, b)
            | Formula::Forall(v, b)
            | Formula::ExistsNew(v, b)
            | Formula::ForallNew(v, b) => {
                bound.push(v.clone());
                b.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// Every variable name occurring anywhere, bound or free.
    pub fn all_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit_names(&mut |n| {
            out.insert(n.to_string());
        });
        out
    }

    fn visit_names(&self, f: &mut dyn FnMut(&str)) {
        match self {
            Formula::Eq(a, b) | Formula::Neq(a, b) => {
                f(a);
                f(b);
            }
            Formula::Indep { y, x, z } => y.iter().chain(x).chain(z).for_each(|v| f(v)),
            Formula::Dep { x, y } => x.iter().chain(y).for_each(|v| f(v)),
            Formula::Const(z) => z.iter().for_each(|v| f(v)),
            Formula::And(ps) | Formula::Or(ps) => ps.iter().for_each(|p| p.visit_names(f)),
            Formula::Exists(v, b)
            | Formula::Forall(v, b)
            | Formula::ExistsNew(v, b)
            | Formula::ForallNew(v, b) => {
                f(v);
                b.visit_names(f);
            }
        }
    }

    /// Renames bound variables so that none shadows a free variable or an
    /// enclosing binder. New names keep the first character (and so the role).
    pub fn rename_bound(&self) -> Formula {
        let free = self.free_vars();
        let mut taken: BTreeSet<String> = self.all_vars();
        let mut scope: Vec<(String, String)> = Vec::new();
        self.rename_in(&free, &mut taken, &mut scope, &mut Vec::new())
    }

    fn rename_in(
        &self,
        free: &BTreeSet<String>,
        taken: &mut BTreeSet<String>,
        scope: &mut Vec<(String, String)>,
        binders: &mut Vec<String>,
    ) -> Formula {
        let map = |v: &String, scope: &Vec<(String, String)>| -> String {
            scope
                .iter()
                .rev()
                .find(|(from, _)| from == v)
                .map(|(_, to)| to.clone())
                .unwrap_or_else(|| v.clone())
        };
        let map_all = |vs: &Vec<String>, scope: &Vec<(String, String)>| {
            vs.iter().map(|v| map(v, scope)).collect()
        };
        match self {
            Formula::Eq(a, b) => Formula::Eq(map(a, scope), map(b, scope)),
            Formula::Neq(a, b) => Formula::Neq(map(a, scope), map(b, scope)),
            Formula::Indep { y, x, z } => Formula::Indep {
                y: map_all(y, scope),
                x: map_all(x, scope),
                z: map_all(z, scope),
            },
            Formula::Dep { x, y } => Formula::Dep {
                x: map_all(x, scope),
                y: map_all(y, scope),
            },
            Formula::Const(z) => Formula::Const(map_all(z, scope)),
            Formula::And(ps) => Formula::And(
                ps.iter()
                    .map(|p| p.rename_in(free, taken, scope, binders))
                    .collect(),
            ),
            Formula::Or(ps) => Formula::Or(
                ps.iter()
                    .map(|p| p.rename_in(free, taken, scope, binders))
                    .collect(),
            ),
            Formula::Exists(v, b)
            | Formula::Forall(v, b)
            | Formula::ExistsNew(v, b)
            | Formula::ForallNew(v, b) => {
                let new = if free.contains(v) || binders.contains(v) {
                    fresh_name(v, taken)
                } else {
                    v.clone()
                };
                binders.push(new.clone());
                scope.push((v.clone(), new.clone()));
                let body = Box::new(b.rename_in(free, taken, scope, binders));
                scope.pop();
                match self {
                    Formula::Exists(..) => Formula::Exists(new, body),
                    Formula::Forall(..) => Formula::Forall(new, body),
                    Formula::ExistsNew(..) => Formula::ExistsNew(new, body),
                    _ => Formula::ForallNew(new, body),
                }
            }
        }
    }
}

fn fresh_name(v: &str, taken: &mut BTreeSet<String>) -> String {
    let mut k = 1;
    loop {
        let cand = format!("{v}_{k}");
        if !taken.contains(&cand) {
            taken.insert(cand.clone());
            return cand;
        }
        k += 1;
    }
}

fn write_tuple(f: &mut fmt::Formatter<'_>, t: &[String]) -> fmt::Result {
    if t.is_empty() {
        f.write_str("()")
    } else {
        f.write_str(&t.join(" "))
    }
}

impl Formula {
    fn fmt_child(&self, child: &Formula, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wrap = match (self, child) {
            (Formula::And(_), Formula::And(_) | Formula::Or(_)) => true,
            (Formula::Or(_), Formula::Or(_)) => true,
            _ => false,
        };
        if wrap {
            write!(f, "({child})")
        } else {
            write!(f, "{child}")
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Eq(a, b) => write!(f, "{a} = {b}"),
            Formula::Neq(a, b) => write!(f, "{a} != {b}"),
            Formula::Indep { y, x, z } => {
                write_tuple(f, y)?;
                f.write_str(" _||_ ")?;
                write_tuple(f, z)?;
                if !x.is_empty() {
                    f.write_str(" | ")?;
                    write_tuple(f, x)?;
                }
                Ok(())
            }
            Formula::Dep { x, y } => {
                f.write_str("=(")?;
                if !x.is_empty() {
                    f.write_str(&x.join(" "))?;
                    f.write_str(" ")?;
                }
                f.write_str("; ")?;
                f.write_str(&y.join(" "))?;
                f.write_str(")")
            }
            Formula::Const(z) => write!(f, "=({})", z.join(" ")),
            Formula::And(ps) | Formula::Or(ps) => {
                let sep = if matches!(self, Formula::And(_)) {
                    " /\\ "
                } else {
                    " \\/ "
                };
                for (i, p) in ps.iter().enumerate() {
                    if i > 0 {
                        f.write_str(sep)?;
                    }
                    self.fmt_child(p, f)?;
                }
                Ok(())
            }
            Formula::Exists(v, b)
            | Formula::Forall(v, b)
            | Formula::ExistsNew(v, b)
            | Formula::ForallNew(v, b) => {
                let q = match self {
                    Formula::Exists(..) => "E",
                    Formula::Forall(..) => "A",
                    Formula::ExistsNew(..) => "Eh",
                    _ => "Ah",
                };
                if b.is_atom()
                    || matches!(
                        **b,
                        Formula::Exists(..)
                            | Formula::Forall(..)
                            | Formula::ExistsNew(..)
                            | Formula::ForallNew(..)
                    )
                {
                    write!(f, "{q} {v} . {b}")
                } else {
                    write!(f, "{q} {v} . ({b})")
                }
            }
        }
    }
}
