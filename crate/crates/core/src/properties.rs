//! The empirical and hidden-variable properties, as formulas and as direct
//! checks in both semantics.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use crate::formula::{eval_possibilistic, eval_probabilistic, EvalContext, EvalError, Formula};
use crate::prob::ProbTeam;
use crate::rational::Q;
use crate::team::{Row, Team, TeamError};
use crate::value::{Role, Value, Variable};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Property {
    WD,
    SD,
    NS,
    SV,
    ZI,
    PI,
    OI,
    ML,
    Local,
}

impl Property {
    pub const ALL: [Property; 9] = [
        Property::WD,
        Property::SD,
        Property::NS,
        Property::SV,
        Property::ZI,
        Property::PI,
        Property::OI,
        Property::ML,
        Property::Local,
    ];
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Property::WD => "WD",
            Property::SD => "SD",
            Property::NS => "NS",
            Property::SV => "SV",
            Property::ZI => "ZI",
            Property::PI => "PI",
            Property::OI => "OI",
            Property::ML => "ML",
            Property::Local => "LOCAL",
        })
    }
}

impl FromStr for Property {
    type Err = PropertyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let p = match s.to_ascii_uppercase().as_str() {
            "WD" => Property::WD,
            "SD" => Property::SD,
            "NS" => Property::NS,
            "SV" => Property::SV,
            "ZI" => Property::ZI,
            "PI" => Property::PI,
            "OI" => Property::OI,
            "ML" => Property::ML,
            "LOCAL" | "LOC" => Property::Local,
            _ => return Err(PropertyError::Unknown(s.to_string())),
        };
        Ok(p)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum PropertyError {
    #[error("unknown property `{0}`")]
    Unknown(String),
    #[error("property needs at least one {0} variable")]
    MissingRole(&'static str),
    #[error("{x} measurement variables but {y} outcome variables")]
    Unpaired { x: usize, y: usize },
    #[error("{0} has no formula; it is checked semantically")]
    SemanticOnly(Property),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Team(#[from] TeamError),
}

/// Measurement, outcome and hidden variables. `x[i]` is paired with `y[i]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoleSplit {
    pub x: Vec<String>,
    pub y: Vec<String>,
    pub z: Vec<String>,
}

impl RoleSplit {
    pub fn new(x: &[&str], y: &[&str], z: &[&str]) -> Result<RoleSplit, PropertyError> {
        let own = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
        RoleSplit::checked(own(x), own(y), own(z))
    }

    fn checked(x: Vec<String>, y: Vec<String>, z: Vec<String>) -> Result<RoleSplit, PropertyError> {
        if x.len() != y.len() {
            return Err(PropertyError::Unpaired {
                x: x.len(),
                y: y.len(),
            });
        }
        Ok(RoleSplit { x, y, z })
    }

    /// Pairs the i-th measurement with the i-th outcome variable; plain
    /// variables are ignored.
    pub fn from_vars(vars: &[Variable]) -> Result<RoleSplit, PropertyError> {
        let by = |r: Role| {
            vars.iter()
                .filter(|v| v.role == r)
                .map(|v| v.name.clone())
                .collect::<Vec<_>>()
        };
        RoleSplit::checked(by(Role::Measurement), by(Role::Outcome), by(Role::Hidden))
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    fn others(v: &[String], i: usize) -> Vec<String> {
        v.iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, s)| s.clone())
            .collect()
    }

    fn plus(a: &[String], b: &[String]) -> Vec<String> {
        a.iter().chain(b).cloned().collect()
    }
}

fn per_site(r: &RoleSplit, atom: impl Fn(usize) -> Formula) -> Result<Formula, PropertyError> {
    if r.n() == 0 {
        return Err(PropertyError::MissingRole("measurement/outcome"));
    }
    Ok(Formula::and((0..r.n()).map(atom).collect()))
}

/// The defining formula of a property.
pub fn build(prop: Property, r: &RoleSplit) -> Result<Formula, PropertyError> {
    let one = |s: &String| vec![s.clone()];
    let xz = RoleSplit::plus(&r.x, &r.z);
    match prop {
        Property::WD => per_site(r, |i| Formula::Dep {
            x: xz.clone(),
            y: one(&r.y[i]),
        }),
        Property::SD => per_site(r, |i| Formula::Dep {
            x: RoleSplit::plus(&one(&r.x[i]), &r.z),
            y: one(&r.y[i]),
        }),
        Property::NS => per_site(r, |i| Formula::Indep {
            y: RoleSplit::others(&r.x, i),
            x: one(&r.x[i]),
            z: one(&r.y[i]),
        }),
        Property::SV => {
            if r.z.is_empty() {
                return Err(PropertyError::MissingRole("hidden"));
            }
            Ok(Formula::Const(r.z.clone()))
        }
        Property::ZI => Ok(Formula::Indep {
            y: r.z.clone(),
            x: vec![],
            z: r.x.clone(),
        }),
        Property::PI => per_site(r, |i| Formula::Indep {
            y: RoleSplit::others(&r.x, i),
            x: RoleSplit::plus(&one(&r.x[i]), &r.z),
            z: one(&r.y[i]),
        }),
        Property::OI => per_site(r, |i| Formula::Indep {
            y: one(&r.y[i]),
            x: xz.clone(),
            z: RoleSplit::others(&r.y, i),
        }),
        Property::ML => per_site(r, |i| Formula::Indep {
            y: one(&r.x[i]),
            x: r.z.clone(),
            z: RoleSplit::others(&r.x, i),
        }),
        Property::Local => Err(PropertyError::SemanticOnly(prop)),
    }
}

/// Possibilistic check of a property on a team whose roles are set.
pub fn check(prop: Property, team: &Team) -> Result<bool, PropertyError> {
    if prop == Property::Local {
        return locality_holds(team);
    }
    let phi = build(prop, &RoleSplit::from_vars(team.vars())?)?;
    let v = eval_possibilistic(team, &phi, &EvalContext::default())?;
    v.holds()
        .ok_or(PropertyError::Eval(EvalError::Inconclusive(v)))
}

/// Probabilistic check of a property.
pub fn check_prob(prop: Property, pt: &ProbTeam) -> Result<bool, PropertyError> {
    if prop == Property::Local {
        return prob_locality_holds(pt);
    }
    let phi = build(prop, &RoleSplit::from_vars(pt.vars())?)?;
    Ok(eval_probabilistic(pt, &phi, &EvalContext::default())?)
}

fn idx(vars: &[Variable], names: &[String]) -> Result<Vec<usize>, TeamError> {
    names
        .iter()
        .map(|n| {
            vars.iter()
                .position(|v| &v.name == n)
                .ok_or_else(|| TeamError::UnknownVariable(n.clone()))
        })
        .collect()
}

fn pick(r: &[Value], ix: &[usize]) -> Row {
    ix.iter().map(|&i| r[i].clone()).collect()
}

/// Locality by enumeration: for each hidden value γ, every choice of per-site
/// pairs (a_i, b_i) seen with γ whose a⃗ occurs with γ must occur as a⃗b⃗ with γ.
pub fn locality_holds(team: &Team) -> Result<bool, PropertyError> {
    let r = RoleSplit::from_vars(team.vars())?;
    let (xi, yi, zi) = (
        idx(team.vars(), &r.x)?,
        idx(team.vars(), &r.y)?,
        idx(team.vars(), &r.z)?,
    );
    let mut by_z: BTreeMap<Row, Vec<&Row>> = BTreeMap::new();
    for row in team.rows() {
        by_z.entry(pick(row, &zi)).or_default().push(row);
    }
    for rows in by_z.values() {
        let xs: BTreeSet<Row> = rows.iter().map(|s| pick(s, &xi)).collect();
        let xys: BTreeSet<(Row, Row)> = rows.iter().map(|s| (pick(s, &xi), pick(s, &yi))).collect();
        let pairs: Vec<Vec<(Value, Value)>> = (0..r.n())
            .map(|i| {
                let set: BTreeSet<(Value, Value)> = rows
                    .iter()
                    .map(|s| (s[xi[i]].clone(), s[yi[i]].clone()))
                    .collect();
                set.into_iter().collect()
            })
            .collect();
        let ok = product(&pairs, &mut Vec::new(), &mut |choice| {
            let a: Row = choice.iter().map(|p| p.0.clone()).collect();
            if !xs.contains(&a) {
                return true;
            }
            let b: Row = choice.iter().map(|p| p.1.clone()).collect();
            xys.contains(&(a, b))
        });
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Calls `f` on every element of the cartesian product, stopping at the first
/// `false`.
pub(crate) fn product<T: Clone>(
    sets: &[Vec<T>],
    acc: &mut Vec<T>,
    f: &mut impl FnMut(&[T]) -> bool,
) -> bool {
    if acc.len() == sets.len() {
        return f(acc);
    }
    for t in &sets[acc.len()] {
        acc.push(t.clone());
        let ok = product(sets, acc, f);
        acc.pop();
        if !ok {
            return false;
        }
    }
    true
}

fn marg(pt: &ProbTeam, names: &[String]) -> Result<BTreeMap<Row, Q>, TeamError> {
    let n: Vec<&str> = names.iter().map(String::as_str).collect();
    pt.marginals(&n)
}

/// |X_xyz|·∏|X_{x_i z}| = |X_xz|·∏|X_{x_i y_i z}| for all a⃗, b⃗, γ⃗.
pub fn prob_locality_holds(pt: &ProbTeam) -> Result<bool, PropertyError> {
    let r = RoleSplit::from_vars(pt.vars())?;
    let zero = Q::default();
    let xz = marg(pt, &RoleSplit::plus(&r.x, &r.z))?;
    let xyz = marg(pt, &[r.x.clone(), r.y.clone(), r.z.clone()].concat())?;
    let site: Vec<BTreeMap<Row, Q>> = (0..r.n())
        .map(|i| marg(pt, &RoleSplit::plus(&[r.x[i].clone()], &r.z)))
        .collect::<Result<_, _>>()?;
    let site_y: Vec<BTreeMap<Row, Q>> = (0..r.n())
        .map(|i| {
            marg(
                pt,
                &[vec![r.x[i].clone(), r.y[i].clone()], r.z.clone()].concat(),
            )
        })
        .collect::<Result<_, _>>()?;
    let n = r.n();
    // Outside these combinations both sides vanish.
    for (key, m_xz) in &xz {
        let (a, g) = key.split_at(n);
        let outcomes: Vec<Vec<Value>> = (0..n)
            .map(|i| {
                site_y[i]
                    .keys()
                    .filter(|k| k[0] == a[i] && k[2..] == *g)
                    .map(|k| k[1].clone())
                    .collect()
            })
            .collect();
        let ok = product(&outcomes, &mut Vec::new(), &mut |b| {
            let full: Row = [a, b, g].concat();
            let mut lhs = xyz.get(&full).unwrap_or(&zero).clone();
            let mut rhs = m_xz.clone();
            for i in 0..n {
                let k: Row = [&a[i..=i], g].concat();
                lhs *= site[i].get(&k).unwrap_or(&zero);
                let ky: Row = [&a[i..=i], &b[i..=i], g].concat();
                rhs *= site_y[i].get(&ky).unwrap_or(&zero);
            }
            lhs == rhs
        });
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

/// |X_{v⃗u}|·|X_u|^{n−1} = ∏|X_{v_i u}| for all values.
pub fn mutual_indep_product_holds(
    pt: &ProbTeam,
    vs: &[&[&str]],
    u: &[&str],
) -> Result<bool, TeamError> {
    let own = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<Vec<String>>();
    let u = own(u);
    let n = vs.len();
    if n == 0 {
        return Ok(true);
    }
    let all: Vec<String> = vs
        .iter()
        .flat_map(|v| own(v))
        .chain(u.iter().cloned())
        .collect();
    let joint = marg(pt, &all)?;
    let mu = marg(pt, &u)?;
    let parts: Vec<BTreeMap<Row, Q>> = vs
        .iter()
        .map(|v| marg(pt, &RoleSplit::plus(&own(v), &u)))
        .collect::<Result<_, _>>()?;
    let zero = Q::default();
    for (c, m_u) in &mu {
        let opts: Vec<Vec<Row>> = (0..n)
            .map(|i| {
                let w = vs[i].len();
                parts[i]
                    .keys()
                    .filter(|k| k[w..] == c[..])
                    .map(|k| k[..w].to_vec())
                    .collect()
            })
            .collect();
        let ok = product(&opts, &mut Vec::new(), &mut |vals| {
            let key: Row = vals
                .iter()
                .flatten()
                .cloned()
                .chain(c.iter().cloned())
                .collect();
            let mut lhs = joint.get(&key).unwrap_or(&zero).clone();
            for _ in 1..n {
                lhs *= m_u;
            }
            let mut rhs = Q::from_integer(1.into());
            for (i, v) in vals.iter().enumerate() {
                let k: Row = v.iter().chain(c.iter()).cloned().collect();
                rhs *= parts[i].get(&k).unwrap_or(&zero);
            }
            lhs == rhs
        });
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;
    use crate::rational::q;
    use crate::value::vars;

    fn split(x: &[&str], y: &[&str], z: &[&str]) -> RoleSplit {
        RoleSplit::new(x, y, z).unwrap()
    }

    #[test]
    fn templates_print_as_expected() {
        let r = split(&["x0", "x1"], &["y0", "y1"], &["z"]);
        assert_eq!(
            build(Property::WD, &r).unwrap().to_string(),
            "=(x0 x1 z ; y0) /\\ =(x0 x1 z ; y1)"
        );
        let r2 = split(&[], &[], &["z0", "z1"]);
        assert_eq!(
            build(Property::SV, &r2).unwrap(),
            parse("=(z0 z1)").unwrap()
        );
        let r1 = split(&["x0"], &["y0"], &[]);
        assert_eq!(
            build(Property::NS, &r1).unwrap(),
            parse("() _||_ y0 | x0").unwrap()
        );
        assert_eq!(
            build(Property::PI, &r).unwrap(),
            parse("x1 _||_ y0 | x0 z /\\ x0 _||_ y1 | x1 z").unwrap()
        );
        assert_eq!(
            build(Property::OI, &r).unwrap(),
            parse("y0 _||_ y1 | x0 x1 z /\\ y1 _||_ y0 | x0 x1 z").unwrap()
        );
        assert_eq!(
            build(Property::ML, &r).unwrap(),
            parse("x0 _||_ x1 | z /\\ x1 _||_ x0 | z").unwrap()
        );
        assert!(matches!(
            build(Property::SV, &r1),
            Err(PropertyError::MissingRole(_))
        ));
        assert!(matches!(
            build(Property::Local, &r),
            Err(PropertyError::SemanticOnly(_))
        ));
    }

    fn epr_z() -> Team {
        Team::ints(
            &["x0", "x1", "y0", "y1", "z"],
            &[[0, 1, 0, 1, 0], [0, 1, 1, 0, 0]],
        )
        .unwrap()
    }

    #[test]
    fn epr_with_constant_hidden_value() {
        let t = epr_z();
        assert!(check(Property::NS, &t).unwrap());
        assert!(check(Property::SV, &t).unwrap());
        assert!(check(Property::PI, &t).unwrap());
        assert!(!check(Property::OI, &t).unwrap());
        assert!(!locality_holds(&t).unwrap());
    }

    #[test]
    fn single_row_is_local() {
        let t = Team::ints(&["x0", "y0", "z"], &[[0, 1, 2]]).unwrap();
        assert!(locality_holds(&t).unwrap());
    }

    #[test]
    fn prob_locality_examples() {
        let v = |n| Value::Int(n);
        let epr = ProbTeam::from_pairs(
            vars(&["x0", "x1", "y0", "y1", "z"]),
            [
                (vec![v(0), v(1), v(0), v(1), v(0)], q(1, 2)),
                (vec![v(0), v(1), v(1), v(0), v(0)], q(1, 2)),
            ],
        )
        .unwrap();
        assert!(!prob_locality_holds(&epr).unwrap());
        // Independent uniform coins at each site.
        let mut rows = Vec::new();
        for y0 in 0..2 {
            for y1 in 0..2 {
                rows.push((vec![v(0), v(0), v(y0), v(y1), v(0)], q(1, 4)));
            }
        }
        let prod = ProbTeam::from_pairs(vars(&["x0", "x1", "y0", "y1", "z"]), rows).unwrap();
        assert!(prob_locality_holds(&prod).unwrap());
    }

    #[test]
    fn mutual_independence_product() {
        let v = |n| Value::Int(n);
        let mut coins = Vec::new();
        let mut parity = Vec::new();
        for a in 0..2 {
            for b in 0..2 {
                for c in 0..2 {
                    coins.push((vec![v(a), v(b), v(c)], q(1, 8)));
                    if (a + b + c) % 2 == 0 {
                        parity.push((vec![v(a), v(b), v(c)], q(1, 4)));
                    }
                }
            }
        }
        let names = vars(&["v0", "v1", "v2"]);
        let coins = ProbTeam::from_pairs(names.clone(), coins).unwrap();
        let parity = ProbTeam::from_pairs(names, parity).unwrap();
        let vs: [&[&str]; 3] = [&["v0"], &["v1"], &["v2"]];
        assert!(mutual_indep_product_holds(&coins, &vs, &[]).unwrap());
        assert!(!mutual_indep_product_holds(&parity, &vs, &[]).unwrap());
        // Pairwise independent all the same.
        let pair: [&[&str]; 2] = [&["v0"], &["v1"]];
        assert!(mutual_indep_product_holds(&parity, &pair, &[]).unwrap());
    }

    #[test]
    fn property_names_parse() {
        for p in Property::ALL {
            assert_eq!(p.to_string().parse::<Property>().unwrap(), p);
        }
        assert_eq!("zI".parse::<Property>().unwrap(), Property::ZI);
        assert!("XX".parse::<Property>().is_err());
    }
}
