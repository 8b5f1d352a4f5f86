//! Hidden-variable realizations, the probabilistic lift and the entropy
//! tools.

use std::collections::{BTreeMap, BTreeSet};

use crate::properties::{check, product, Property, PropertyError, RoleSplit};
use crate::team::{Row, Team, TeamError};
use crate::value::{Role, Value, Variable};

mod lift;
mod probe;

pub use lift::{
    entropy, lift_counts, measurement_prior, outcome_conditional, probabilistic_lift, team_entropy,
    LiftCounts, MeasurementPrior,
};
pub use probe::{
    search_probabilistic_realization, search_realization_of, ProbeConfig, ProbeResult,
};

/// Default bound on the number of selector functions (or canonical rows).
pub const DEFAULT_CAP: usize = 1_000_000;

#[derive(Debug, thiserror::Error)]
pub enum ConstructionError {
    #[error("expected an empirical team, found hidden variable `{0}`")]
    NotEmpirical(String),
    #[error("{what} would need {size} candidates, over the cap of {cap}")]
    Cap {
        what: &'static str,
        size: u128,
        cap: usize,
    },
    #[error("precondition failed: team does not support {0}")]
    Precondition(&'static str),
    #[error("section {0} has zero mass")]
    ZeroMass(String),
    #[error(transparent)]
    Property(#[from] PropertyError),
    #[error(transparent)]
    Eval(#[from] crate::formula::EvalError),
    #[error(transparent)]
    Team(#[from] TeamError),
}

/// `z` for a single hidden variable, `z0 … z{l-1}` otherwise.
pub fn hidden_names(l: usize) -> Vec<String> {
    if l == 1 {
        vec!["z".to_string()]
    } else {
        (0..l).map(|i| format!("z{i}")).collect()
    }
}

fn require_empirical(x: &Team) -> Result<RoleSplit, ConstructionError> {
    if let Some(v) = x.vars().iter().find(|v| v.role == Role::Hidden) {
        return Err(ConstructionError::NotEmpirical(v.name.clone()));
    }
    Ok(RoleSplit::from_vars(x.vars())?)
}

fn hidden_vars(names: &[String]) -> Vec<Variable> {
    names
        .iter()
        .map(|n| Variable::new(n.clone(), Role::Hidden))
        .collect()
}

fn cols(x: &Team, names: &[String]) -> Result<Vec<usize>, TeamError> {
    let n: Vec<&str> = names.iter().map(String::as_str).collect();
    x.indices(&n)
}

fn pick(r: &[Value], ix: &[usize]) -> Row {
    ix.iter().map(|&i| r[i].clone()).collect()
}

fn tuple_str(vals: &[Value]) -> String {
    let parts: Vec<String> = vals.iter().map(|v| v.to_string()).collect();
    format!("({})", parts.join(","))
}

/// The least value occurring anywhere in the team.
fn least_value(x: &Team) -> Value {
    x.range().into_iter().next().unwrap_or(Value::Int(0))
}

/// Appends `l` constant hidden columns; the result realizes `x` and supports
/// single-valuedness.
pub fn extend_single_valued(x: &Team, l: usize) -> Result<Team, ConstructionError> {
    require_empirical(x)?;
    let g = least_value(x);
    Ok(x.extend_columns(hidden_vars(&hidden_names(l)), |_| vec![vec![g.clone(); l]])?)
}

/// A realization supporting strong determinism. Row s gets one hidden
/// column per site, holding the token `h:i:a:j` where a = s(x_i) and j is the
/// position of s(y_i) among the outcomes seen at x_i = a.
pub fn realize_strong_determinism(x: &Team) -> Result<Team, ConstructionError> {
    let r = require_empirical(x)?;
    let (xi, yi) = (cols(x, &r.x)?, cols(x, &r.y)?);
    let n = r.n();
    let mut outcomes: Vec<BTreeMap<Value, Vec<Value>>> = vec![BTreeMap::new(); n];
    for row in x.rows() {
        for i in 0..n {
            outcomes[i]
                .entry(row[xi[i]].clone())
                .or_default()
                .push(row[yi[i]].clone());
        }
    }
    for per in &mut outcomes {
        for bs in per.values_mut() {
            bs.sort();
            bs.dedup();
        }
    }
    Ok(x.extend_columns(hidden_vars(&hidden_names(n)), |row| {
        let toks = (0..n)
            .map(|i| {
                let a = &row[xi[i]];
                let j = outcomes[i][a]
                    .binary_search(&row[yi[i]])
                    .expect("outcome was collected");
                Value::sym(format!("h:{i}:{a}:{j}"))
            })
            .collect();
        vec![toks]
    })?)
}

/// A realization supporting weak determinism and z-independence: z ranges
/// over the selector functions γ: M → O whose graph lies in `x`, and each
/// γ contributes the rows (a⃗, γ(a⃗), γ).
pub fn realize_weak_det_z_indep(x: &Team, cap: usize) -> Result<Team, ConstructionError> {
    let r = require_empirical(x)?;
    if let Some(v) = x.vars().iter().find(|v| v.role == Role::Plain) {
        return Err(ConstructionError::Team(TeamError::DomainMismatch(format!(
            "plain variable `{}` has no measurement or outcome role",
            v.name
        ))));
    }
    let (xi, yi) = (cols(x, &r.x)?, cols(x, &r.y)?);
    let mut sections: BTreeMap<Row, Vec<Row>> = BTreeMap::new();
    for row in x.rows() {
        sections
            .entry(pick(row, &xi))
            .or_default()
            .push(pick(row, &yi));
    }
    let size = sections
        .values()
        .try_fold(1u128, |acc, v| acc.checked_mul(v.len() as u128))
        .unwrap_or(u128::MAX);
    if size > cap as u128 {
        return Err(ConstructionError::Cap {
            what: "selector functions",
            size,
            cap,
        });
    }
    let keys: Vec<&Row> = sections.keys().collect();
    let choices: Vec<Vec<Row>> = sections.values().cloned().collect();
    let mut vars = x.vars().to_vec();
    vars.push(Variable::new("z", Role::Hidden));
    let mut out = Team::new(vars)?;
    let names = x.names();
    product(&choices, &mut Vec::new(), &mut |gamma: &[Row]| {
        let graph: Vec<String> = keys
            .iter()
            .zip(gamma)
            .map(|(a, b)| format!("{}->{}", tuple_str(a), tuple_str(b)))
            .collect();
        let g = Value::sym(format!("g:{}", graph.join(";")));
        for (a, b) in keys.iter().zip(gamma) {
            let mut row = vec![Value::Int(0); names.len() + 1];
            for (k, &c) in xi.iter().enumerate() {
                row[c] = a[k].clone();
            }
            for (k, &c) in yi.iter().enumerate() {
                row[c] = b[k].clone();
            }
            row[names.len()] = g.clone();
            out.insert(row).expect("arity matches");
        }
        true
    });
    Ok(out)
}

/// Replaces a local, z-independent team by an equivalent strongly
/// deterministic one. The new z0 holds (γ⃗, f) with f_i choosing an outcome
/// from O_i^{a,γ⃗} for every a ∈ M_i; any further hidden variables are set to
/// the least value of the team.
pub fn canonicalize_local_to_sd(x: &Team, cap: usize) -> Result<Team, ConstructionError> {
    if !check(Property::ZI, x)? {
        return Err(ConstructionError::Precondition("z-independence"));
    }
    if !check(Property::Local, x)? {
        return Err(ConstructionError::Precondition("locality"));
    }
    let r = RoleSplit::from_vars(x.vars())?;
    let (xi, yi, zi) = (cols(x, &r.x)?, cols(x, &r.y)?, cols(x, &r.z)?);
    let n = r.n();
    let star = least_value(x);
    let ms: BTreeSet<Row> = x.rows().map(|s| pick(s, &xi)).collect();
    let gammas: BTreeSet<Row> = x.rows().map(|s| pick(s, &zi)).collect();
    let m_i: Vec<BTreeSet<Value>> = (0..n)
        .map(|i| x.rows().map(|s| s[xi[i]].clone()).collect())
        .collect();
    // O_i^{a,γ}
    let mut o: BTreeMap<(usize, Value, Row), BTreeSet<Value>> = BTreeMap::new();
    for s in x.rows() {
        for i in 0..n {
            o.entry((i, s[xi[i]].clone(), pick(s, &zi)))
                .or_default()
                .insert(s[yi[i]].clone());
        }
    }
    let mut total: u128 = 0;
    let mut plans = Vec::new();
    for g in &gammas {
        let mut slots: Vec<(usize, Value)> = Vec::new();
        let mut opts: Vec<Vec<Value>> = Vec::new();
        for i in 0..n {
            for a in &m_i[i] {
                let set = o
                    .get(&(i, a.clone(), g.clone()))
                    .cloned()
                    .unwrap_or_default();
                slots.push((i, a.clone()));
                opts.push(set.into_iter().collect());
            }
        }
        let count = opts
            .iter()
            .try_fold(ms.len() as u128, |acc, v| acc.checked_mul(v.len() as u128))
            .unwrap_or(u128::MAX);
        total = total.saturating_add(count);
        plans.push((g, slots, opts));
    }
    if total > cap as u128 {
        return Err(ConstructionError::Cap {
            what: "canonical rows",
            size: total,
            cap,
        });
    }
    let hidden = if r.z.is_empty() {
        vec!["z0".to_string()]
    } else {
        r.z.clone()
    };
    let mut vars: Vec<Variable> = x
        .vars()
        .iter()
        .filter(|v| v.role != Role::Hidden)
        .cloned()
        .collect();
    let width = vars.len();
    vars.extend(hidden_vars(&hidden));
    let pos = |name: &str| {
        vars.iter()
            .position(|v| v.name == name)
            .expect("kept column")
    };
    let xo: Vec<usize> = r.x.iter().map(|n| pos(n)).collect();
    let yo: Vec<usize> = r.y.iter().map(|n| pos(n)).collect();
    let mut out = Team::new(vars.clone())?;
    for (g, slots, opts) in plans {
        product(&opts, &mut Vec::new(), &mut |f: &[Value]| {
            let desc: Vec<String> = slots
                .iter()
                .zip(f)
                .map(|((i, a), b)| format!("{i}:{a}->{b}"))
                .collect();
            let z0 = Value::sym(format!("{}|{}", tuple_str(g), desc.join(";")));
            for a in &ms {
                let mut row = vec![star.clone(); vars.len()];
                row[width] = z0.clone();
                for i in 0..n {
                    row[xo[i]] = a[i].clone();
                    let k = slots
                        .iter()
                        .position(|(j, v)| *j == i && *v == a[i])
                        .expect("a_i ∈ M_i");
                    row[yo[i]] = f[k].clone();
                }
                out.insert(row).expect("arity matches");
            }
            true
        });
    }
    Ok(out)
}

/// Same projection onto the measurement and outcome variables.
pub fn empirically_equivalent(a: &Team, b: &Team) -> Result<bool, TeamError> {
    let names = crate::team::empirical_names(a.vars());
    let other = crate::team::empirical_names(b.vars());
    let sa: BTreeSet<&str> = names.iter().copied().collect();
    let sb: BTreeSet<&str> = other.iter().copied().collect();
    if sa != sb {
        return Ok(false);
    }
    Ok(a.project(&names)? == b.project(&names)?)
}
