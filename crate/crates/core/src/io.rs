//! Team files: CSV with an optional `#roles:` line and `prob` column, and a
//! JSON mirror.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::prob::ProbTeam;
use crate::rational::{fmt_q, parse_q, Q};
use crate::team::{Row, Team, TeamError};
use crate::value::{Role, Value, Variable};

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Team(#[from] TeamError),
}

fn syntax(line: usize, msg: impl Into<String>) -> IoError {
    IoError::Syntax {
        line,
        msg: msg.into(),
    }
}

/// A team as read from a file: weights present or not.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TeamFile {
    Plain(Team),
    Prob(ProbTeam),
}

impl TeamFile {
    pub fn vars(&self) -> &[Variable] {
        match self {
            TeamFile::Plain(t) => t.vars(),
            TeamFile::Prob(p) => p.vars(),
        }
    }

    /// The team itself, or the support of a probabilistic one.
    pub fn team(&self) -> Team {
        match self {
            TeamFile::Plain(t) => t.clone(),
            TeamFile::Prob(p) => p.collapse(),
        }
    }

    /// The probabilistic team, or the uniform lift of a plain one.
    pub fn prob(&self) -> Result<ProbTeam, TeamError> {
        match self {
            TeamFile::Plain(t) => ProbTeam::uniform_lift(t),
            TeamFile::Prob(p) => Ok(p.clone()),
        }
    }
}

fn parse_roles(line: usize, s: &str, width: usize) -> Result<Vec<Role>, IoError> {
    let roles: Vec<Role> = s
        .split(',')
        .map(|r| {
            Role::from_code(r).ok_or_else(|| syntax(line, format!("unknown role `{}`", r.trim())))
        })
        .collect::<Result<_, _>>()?;
    if roles.len() != width {
        return Err(syntax(
            line,
            format!("{} roles for {} variables", roles.len(), width),
        ));
    }
    Ok(roles)
}

pub fn read_team_csv(text: &str) -> Result<TeamFile, IoError> {
    // The roles line is pulled out first; every other `#` line is a comment.
    let mut roles_line = None;
    let mut body = String::new();
    for (i, l) in text.lines().enumerate() {
        let t = l.trim_start();
        if let Some(r) = t.strip_prefix("#roles:") {
            roles_line = Some((i + 1, r.to_string()));
            body.push('\n');
        } else if t.starts_with('#') {
            body.push('\n');
        } else {
            body.push_str(l);
            body.push('\n');
        }
    }
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(body.as_bytes());
    let mut records = rdr.records();
    let line_of = |r: &csv::StringRecord| r.position().map_or(0, |p| p.line() as usize);
    let header = loop {
        match records.next() {
            None => return Err(syntax(1, "missing header")),
            Some(Err(e)) => {
                return Err(syntax(
                    e.position().map_or(0, |p| p.line() as usize),
                    e.to_string(),
                ))
            }
            Some(Ok(r)) if r.iter().all(str::is_empty) => continue,
            Some(Ok(r)) => break r,
        }
    };
    let mut names: Vec<String> = header.iter().map(String::from).collect();
    let weighted = names.last().is_some_and(|n| n == "prob");
    if weighted {
        names.pop();
    }
    if let Some(n) = names.iter().find(|n| n.is_empty()) {
        return Err(syntax(
            line_of(&header),
            format!("empty variable name {n:?}"),
        ));
    }
    let vars: Vec<Variable> = match &roles_line {
        Some((line, r)) => {
            let roles = parse_roles(*line, r, names.len())?;
            names
                .iter()
                .zip(roles)
                .map(|(n, r)| Variable::new(n.clone(), r))
                .collect()
        }
        None => names
            .iter()
            .map(|n| Variable::inferred(n.clone()))
            .collect(),
    };
    let want = names.len() + weighted as usize;
    let mut rows: Vec<(Row, Option<Q>)> = Vec::new();
    for rec in records {
        let rec =
            rec.map_err(|e| syntax(e.position().map_or(0, |p| p.line() as usize), e.to_string()))?;
        if rec.iter().all(str::is_empty) {
            continue;
        }
        let line = line_of(&rec);
        if rec.len() != want {
            return Err(syntax(
                line,
                format!("{} fields, expected {want}", rec.len()),
            ));
        }
        let row: Row = rec
            .iter()
            .take(names.len())
            .map(Value::parse_token)
            .collect();
        let w = if weighted {
            let s = &rec[names.len()];
            Some(parse_q(s).map_err(|_| syntax(line, format!("bad probability `{s}`")))?)
        } else {
            None
        };
        rows.push((row, w));
    }
    if weighted {
        let pairs = rows.into_iter().map(|(r, w)| (r, w.expect("weighted")));
        Ok(TeamFile::Prob(ProbTeam::from_pairs(vars, pairs)?))
    } else {
        Ok(TeamFile::Plain(Team::from_rows(
            vars,
            rows.into_iter().map(|(r, _)| r),
        )?))
    }
}

fn roles_of(vars: &[Variable]) -> String {
    vars.iter()
        .map(|v| v.role.code())
        .collect::<Vec<_>>()
        .join(",")
}

fn write_csv(vars: &[Variable], rows: Vec<Vec<String>>, weighted: bool) -> String {
    let mut w = csv::WriterBuilder::new().from_writer(vec![]);
    let mut header: Vec<&str> = vars.iter().map(|v| v.name.as_str()).collect();
    if weighted {
        header.push("prob");
    }
    w.write_record(&header).expect("in-memory write");
    let mut out = String::from_utf8(w.into_inner().expect("flush")).expect("utf8");
    out.push_str(&format!("#roles: {}\n", roles_of(vars)));
    let mut w = csv::WriterBuilder::new().from_writer(vec![]);
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    out.push_str(&String::from_utf8(w.into_inner().expect("flush")).expect("utf8"));
    out
}

pub fn write_team_csv(t: &Team) -> String {
    write_csv(
        t.vars(),
        t.rows()
            .map(|r| r.iter().map(Value::to_string).collect())
            .collect(),
        false,
    )
}

/// Every stored row, zero weights included.
pub fn write_prob_csv(p: &ProbTeam) -> String {
    let rows = p
        .entries()
        .map(|(r, w)| {
            let mut v: Vec<String> = r.iter().map(Value::to_string).collect();
            v.push(fmt_q(w));
            v
        })
        .collect();
    write_csv(p.vars(), rows, true)
}

pub fn write_team_file(f: &TeamFile) -> String {
    match f {
        TeamFile::Plain(t) => write_team_csv(t),
        TeamFile::Prob(p) => write_prob_csv(p),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TeamJson {
    pub domain: Vec<String>,
    pub roles: Vec<String>,
    pub rows: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<String>>,
}

impl TeamJson {
    pub fn from_file(f: &TeamFile) -> TeamJson {
        let vars = f.vars();
        let domain = vars.iter().map(|v| v.name.clone()).collect();
        let roles = vars.iter().map(|v| v.role.code().to_string()).collect();
        let cells = |r: &Row| r.iter().map(Value::to_string).collect::<Vec<_>>();
        match f {
            TeamFile::Plain(t) => TeamJson {
                domain,
                roles,
                rows: t.rows().map(cells).collect(),
                weights: None,
            },
            TeamFile::Prob(p) => TeamJson {
                domain,
                roles,
                rows: p.entries().map(|(r, _)| cells(r)).collect(),
                weights: Some(p.entries().map(|(_, w)| fmt_q(w)).collect()),
            },
        }
    }

    pub fn to_file(&self) -> Result<TeamFile, IoError> {
        if self.roles.len() != self.domain.len() {
            return Err(syntax(0, "roles and domain differ in length"));
        }
        let vars: Vec<Variable> = self
            .domain
            .iter()
            .zip(&self.roles)
            .map(|(n, r)| {
                Role::from_code(r)
                    .map(|r| Variable::new(n.clone(), r))
                    .ok_or_else(|| syntax(0, format!("unknown role `{r}`")))
            })
            .collect::<Result<_, _>>()?;
        let rows = self
            .rows
            .iter()
            .map(|r| r.iter().map(|c| Value::parse_token(c)).collect::<Row>());
        match &self.weights {
            None => Ok(TeamFile::Plain(Team::from_rows(vars, rows)?)),
            Some(ws) => {
                if ws.len() != self.rows.len() {
                    return Err(syntax(0, "weights and rows differ in length"));
                }
                let ws = ws
                    .iter()
                    .enumerate()
                    .map(|(i, w)| {
                        parse_q(w).map_err(|_| syntax(i + 1, format!("bad probability `{w}`")))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                let weights: BTreeMap<Row, Q> = rows.zip(ws).collect();
                if weights.len() != self.rows.len() {
                    return Err(syntax(0, "repeated row"));
                }
                Ok(TeamFile::Prob(ProbTeam::new(vars, weights)?))
            }
        }
    }
}

pub fn read_team_json(text: &str) -> Result<TeamFile, IoError> {
    serde_json::from_str::<TeamJson>(text)?.to_file()
}

pub fn write_team_json(f: &TeamFile) -> String {
    serde_json::to_string_pretty(&TeamJson::from_file(f)).expect("plain data")
}

/// JSON when the text starts with `{`, CSV otherwise.
pub fn read_team(text: &str) -> Result<TeamFile, IoError> {
    if text.trim_start().starts_with('{') {
        read_team_json(text)
    } else {
        read_team_csv(text)
    }
}
