use std::collections::{BTreeMap, BTreeSet};

use crate::value::{Role, Value, Variable};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TeamError {
    #[error("duplicate variable `{0}`")]
    DuplicateVariable(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("row has {got} values, domain has {want}")]
    Arity { got: usize, want: usize },
    #[error("empty value domain for `{0}`")]
    EmptyDomain(String),
    #[error("kernel has no entry for row {0:?}")]
    KernelMissing(Vec<Value>),
    #[error("kernel image for row {0:?} is empty")]
    KernelEmpty(Vec<Value>),
    #[error("domain mismatch: {0}")]
    DomainMismatch(String),
    #[error("team is empty")]
    Empty,
    #[error("weights: {0}")]
    Weights(String),
}

pub type Row = Vec<Value>;

/// A set of assignments over an ordered variable domain. Rows are kept in
/// canonical (lexicographic) order.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Team {
    vars: Vec<Variable>,
    rows: BTreeSet<Row>,
}

pub(crate) fn check_unique(vars: &[Variable]) -> Result<(), TeamError> {
    let mut seen = BTreeSet::new();
    for v in vars {
        if !seen.insert(v.name.as_str()) {
            return Err(TeamError::DuplicateVariable(v.name.clone()));
        }
    }
    Ok(())
}

pub(crate) fn indices_of(vars: &[Variable], names: &[&str]) -> Result<Vec<usize>, TeamError> {
    names
        .iter()
        .map(|n| {
            vars.iter()
                .position(|v| v.name == *n)
                .ok_or_else(|| TeamError::UnknownVariable(n.to_string()))
        })
        .collect()
}

pub(crate) fn pick(row: &[Value], idx: &[usize]) -> Row {
    idx.iter().map(|&i| row[i].clone()).collect()
}

impl Team {
    pub fn new(vars: Vec<Variable>) -> Result<Team, TeamError> {
        check_unique(&vars)?;
        Ok(Team {
            vars,
            rows: BTreeSet::new(),
        })
    }

    pub fn from_rows<I>(vars: Vec<Variable>, rows: I) -> Result<Team, TeamError>
    where
        I: IntoIterator<Item = Row>,
    {
        let mut t = Team::new(vars)?;
        for r in rows {
            t.insert(r)?;
        }
        Ok(t)
    }

    /// Integer-valued team with roles inferred from the names.
    pub fn ints<R: AsRef<[i64]>>(names: &[&str], rows: &[R]) -> Result<Team, TeamError> {
        Team::from_rows(
            crate::value::vars(names),
            rows.iter()
                .map(|r| r.as_ref().iter().map(|&n| Value::Int(n)).collect()),
        )
    }

    pub fn insert(&mut self, row: Row) -> Result<bool, TeamError> {
        if row.len() != self.vars.len() {
            return Err(TeamError::Arity {
                got: row.len(),
                want: self.vars.len(),
            });
        }
        Ok(self.rows.insert(row))
    }

    pub fn remove(&mut self, row: &[Value]) -> bool {
        self.rows.remove(row)
    }

    pub fn vars(&self) -> &[Variable] {
        &self.vars
    }

    pub fn names(&self) -> Vec<&str> {
        self.vars.iter().map(|v| v.name.as_str()).collect()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v.name == name)
    }

    pub fn indices(&self, names: &[&str]) -> Result<Vec<usize>, TeamError> {
        indices_of(&self.vars, names)
    }

    pub fn rows(&self) -> impl Iterator<Item = &Row> + '_ {
        self.rows.iter()
    }

    pub fn row_set(&self) -> &BTreeSet<Row> {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn contains(&self, row: &[Value]) -> bool {
        self.rows.contains(row)
    }

    pub fn names_with_role(&self, role: Role) -> Vec<&str> {
        self.vars
            .iter()
            .filter(|v| v.role == role)
            .map(|v| v.name.as_str())
            .collect()
    }

    /// Same rows, different role tags.
    pub fn with_roles(&self, roles: &[Role]) -> Result<Team, TeamError> {
        if roles.len() != self.vars.len() {
            return Err(TeamError::Arity {
                got: roles.len(),
                want: self.vars.len(),
            });
        }
        let vars = self
            .vars
            .iter()
            .zip(roles)
            .map(|(v, r)| Variable::new(v.name.clone(), *r))
            .collect();
        Ok(Team {
            vars,
            rows: self.rows.clone(),
        })
    }

    pub fn column(&self, name: &str) -> Result<BTreeSet<Value>, TeamError> {
        let i = self
            .index_of(name)
            .ok_or_else(|| TeamError::UnknownVariable(name.to_string()))?;
        Ok(self.rows.iter().map(|r| r[i].clone()).collect())
    }

    /// rng(X): every value occurring anywhere.
    pub fn range(&self) -> BTreeSet<Value> {
        self.rows.iter().flat_map(|r| r.iter().cloned()).collect()
    }

    /// Restriction of every row to `names`, in the given order.
    pub fn project(&self, names: &[&str]) -> Result<Team, TeamError> {
        let idx = self.indices(names)?;
        let vars: Vec<Variable> = idx.iter().map(|&i| self.vars[i].clone()).collect();
        check_unique(&vars)?;
        let rows = self.rows.iter().map(|r| pick(r, &idx)).collect();
        Ok(Team { vars, rows })
    }

    /// Values of the tuple `names` over the team.
    pub fn tuples(&self, names: &[&str]) -> Result<BTreeSet<Row>, TeamError> {
        let idx = self.indices(names)?;
        Ok(self.rows.iter().map(|r| pick(r, &idx)).collect())
    }

    pub fn filter(&self, mut keep: impl FnMut(&Row) -> bool) -> Team {
        Team {
            vars: self.vars.clone(),
            rows: self.rows.iter().filter(|r| keep(r)).cloned().collect(),
        }
    }

    pub fn union(&self, other: &Team) -> Result<Team, TeamError> {
        if self.vars != other.vars {
            return Err(TeamError::DomainMismatch(
                "union of teams over different domains".into(),
            ));
        }
        Ok(Team {
            vars: self.vars.clone(),
            rows: self.rows.union(&other.rows).cloned().collect(),
        })
    }

    pub fn is_subteam_of(&self, other: &Team) -> bool {
        self.vars == other.vars && self.rows.is_subset(&other.rows)
    }

    /// Position at which `v` lives after extension; replaces an existing column.
    fn extended_vars(&self, v: &Variable) -> (Vec<Variable>, usize) {
        match self.index_of(&v.name) {
            Some(i) => {
                let mut vars = self.vars.clone();
                vars[i] = v.clone();
                (vars, i)
            }
            None => {
                let mut vars = self.vars.clone();
                vars.push(v.clone());
                (vars, self.vars.len())
            }
        }
    }

    /// X[A/v].
    pub fn duplicate(&self, v: Variable, dom: &[Value]) -> Result<Team, TeamError> {
        if dom.is_empty() {
            return Err(TeamError::EmptyDomain(v.name));
        }
        let (vars, at) = self.extended_vars(&v);
        let mut rows = BTreeSet::new();
        for r in &self.rows {
            for a in dom {
                rows.insert(set_at(r, at, a.clone()));
            }
        }
        Ok(Team { vars, rows })
    }

    /// X[F/v] for a kernel given as a map.
    pub fn supplement(&self, v: Variable, kernel: &SetKernel) -> Result<Team, TeamError> {
        self.supplement_with(v, |r| {
            kernel
                .get(r)
                .cloned()
                .ok_or_else(|| TeamError::KernelMissing(r.to_vec()))
        })
    }

    pub fn supplement_with<F>(&self, v: Variable, mut kernel: F) -> Result<Team, TeamError>
    where
        F: FnMut(&[Value]) -> Result<BTreeSet<Value>, TeamError>,
    {
        let (vars, at) = self.extended_vars(&v);
        let mut rows = BTreeSet::new();
        for r in &self.rows {
            let img = kernel(r)?;
            if img.is_empty() {
                return Err(TeamError::KernelEmpty(r.clone()));
            }
            for a in img {
                rows.insert(set_at(r, at, a));
            }
        }
        Ok(Team { vars, rows })
    }

    /// Appends columns in order; `values` gives the appended values per row.
    pub fn extend_columns<F>(
        &self,
        new_vars: Vec<Variable>,
        mut values: F,
    ) -> Result<Team, TeamError>
    where
        F: FnMut(&Row) -> Vec<Row>,
    {
        let mut vars = self.vars.clone();
        vars.extend(new_vars);
        check_unique(&vars)?;
        let mut out = Team::new(vars)?;
        for r in &self.rows {
            for ext in values(r) {
                let mut row = r.clone();
                row.extend(ext);
                out.insert(row)?;
            }
        }
        Ok(out)
    }
}

pub type SetKernel = BTreeMap<Row, BTreeSet<Value>>;

pub(crate) fn set_at(r: &[Value], at: usize, a: Value) -> Row {
    let mut row = r.to_vec();
    if at == row.len() {
        row.push(a);
    } else {
        row[at] = a;
    }
    row
}

/// Names of the measurement and outcome variables, in domain order.
pub fn empirical_names(vars: &[Variable]) -> Vec<&str> {
    vars.iter()
        .filter(|v| matches!(v.role, Role::Measurement | Role::Outcome))
        .map(|v| v.name.as_str())
        .collect()
}

/// Whether `hidden` realizes `empirical`: projecting away the hidden
/// variables gives back exactly the empirical team.
pub fn realizes(hidden: &Team, empirical: &Team) -> Result<bool, TeamError> {
    let emp: BTreeSet<&str> = empirical.vars().iter().map(|v| v.name.as_str()).collect();
    let hid: BTreeSet<&str> = empirical_names(hidden.vars()).into_iter().collect();
    if emp != hid {
        return Err(TeamError::DomainMismatch(format!(
            "empirical variables {emp:?} differ from measurement/outcome variables {hid:?}"
        )));
    }
    for v in empirical.vars() {
        let h = hidden
            .vars()
            .iter()
            .find(|w| w.name == v.name)
            .expect("checked above");
        if h.role != v.role {
            return Err(TeamError::DomainMismatch(format!(
                "role of `{}` differs",
                v.name
            )));
        }
    }
    Ok(hidden.project(&empirical.names())? == *empirical)
}
