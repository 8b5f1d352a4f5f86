use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Signed, Zero};

use crate::rational::{qi, Q};
use crate::team::{check_unique, empirical_names, indices_of, pick, set_at, Row, Team, TeamError};
use crate::value::{Role, Value, Variable};

/// A probability distribution over assignments with exact rational weights.
/// Rows with weight zero may be kept (they are outside the support).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ProbTeam {
    vars: Vec<Variable>,
    weights: BTreeMap<Row, Q>,
}

/// Per-row distribution over the new value.
pub type ProbKernel = BTreeMap<Row, Vec<(Value, Q)>>;

impl ProbTeam {
    pub fn new(vars: Vec<Variable>, weights: BTreeMap<Row, Q>) -> Result<ProbTeam, TeamError> {
        check_unique(&vars)?;
        let mut total = Q::zero();
        for (r, w) in &weights {
            if r.len() != vars.len() {
                return Err(TeamError::Arity {
                    got: r.len(),
                    want: vars.len(),
                });
            }
            if w.is_negative() {
                return Err(TeamError::Weights(format!("negative weight for {r:?}")));
            }
            total += w;
        }
        if !total.is_one() {
            return Err(TeamError::Weights(format!("weights sum to {total}, not 1")));
        }
        Ok(ProbTeam { vars, weights })
    }

    pub fn from_pairs<I>(vars: Vec<Variable>, pairs: I) -> Result<ProbTeam, TeamError>
    where
        I: IntoIterator<Item = (Row, Q)>,
    {
        let mut weights: BTreeMap<Row, Q> = BTreeMap::new();
        for (r, w) in pairs {
            *weights.entry(r).or_insert_with(Q::zero) += w;
        }
        ProbTeam::new(vars, weights)
    }

    /// Rescales nonnegative weights to sum to one.
    pub fn normalized<I>(vars: Vec<Variable>, pairs: I) -> Result<ProbTeam, TeamError>
    where
        I: IntoIterator<Item = (Row, Q)>,
    {
        let mut weights: BTreeMap<Row, Q> = BTreeMap::new();
        for (r, w) in pairs {
            *weights.entry(r).or_insert_with(Q::zero) += w;
        }
        let total: Q = weights.values().sum();
        if !total.is_positive() {
            return Err(TeamError::Weights("total mass is not positive".into()));
        }
        for w in weights.values_mut() {
            *w = &*w / &total;
        }
        ProbTeam::new(vars, weights)
    }

    pub fn dirac(vars: Vec<Variable>, row: Row) -> Result<ProbTeam, TeamError> {
        ProbTeam::from_pairs(vars, [(row, Q::one())])
    }

    /// Each row of a nonempty team gets 1/|X|.
    pub fn uniform_lift(team: &Team) -> Result<ProbTeam, TeamError> {
        if team.is_empty() {
            return Err(TeamError::Empty);
        }
        let w = Q::new(1.into(), (team.len() as i64).into());
        ProbTeam::new(
            team.vars().to_vec(),
            team.rows().map(|r| (r.clone(), w.clone())).collect(),
        )
    }

    pub fn vars(&self) -> &[Variable] {
        &self.vars
    }

    pub fn names(&self) -> Vec<&str> {
        self.vars.iter().map(|v| v.name.as_str()).collect()
    }

    pub fn names_with_role(&self, role: Role) -> Vec<&str> {
        self.vars
            .iter()
            .filter(|v| v.role == role)
            .map(|v| v.name.as_str())
            .collect()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v.name == name)
    }

    /// All stored rows, zero weights included.
    pub fn entries(&self) -> impl Iterator<Item = (&Row, &Q)> + '_ {
        self.weights.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = (&Row, &Q)> + '_ {
        self.weights.iter().filter(|(_, w)| w.is_positive())
    }

    pub fn weight(&self, row: &[Value]) -> Q {
        self.weights.get(row).cloned().unwrap_or_else(Q::zero)
    }

    pub fn with_roles(&self, roles: &[Role]) -> Result<ProbTeam, TeamError> {
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
        Ok(ProbTeam {
            vars,
            weights: self.weights.clone(),
        })
    }

    /// Drops zero-weight rows.
    pub fn trimmed(&self) -> ProbTeam {
        ProbTeam {
            vars: self.vars.clone(),
            weights: self
                .support()
                .map(|(r, w)| (r.clone(), w.clone()))
                .collect(),
        }
    }

    pub fn collapse(&self) -> Team {
        Team::from_rows(self.vars.clone(), self.support().map(|(r, _)| r.clone()))
            .expect("rows were validated on construction")
    }

    /// |X_{u=a}|.
    pub fn marginal(&self, names: &[&str], values: &[Value]) -> Result<Q, TeamError> {
        if names.len() != values.len() {
            return Err(TeamError::Arity {
                got: values.len(),
                want: names.len(),
            });
        }
        let idx = indices_of(&self.vars, names)?;
        Ok(self
            .support()
            .filter(|(r, _)| idx.iter().zip(values).all(|(&i, v)| r[i] == *v))
            .map(|(_, w)| w.clone())
            .sum())
    }

    /// All nonzero marginals of a tuple at once.
    pub fn marginals(&self, names: &[&str]) -> Result<BTreeMap<Row, Q>, TeamError> {
        let idx = indices_of(&self.vars, names)?;
        Ok(marginals_by_index(self, &idx))
    }

    /// The marginal distribution as a probabilistic team over `names`.
    pub fn project(&self, names: &[&str]) -> Result<ProbTeam, TeamError> {
        let idx = indices_of(&self.vars, names)?;
        let vars: Vec<Variable> = idx.iter().map(|&i| self.vars[i].clone()).collect();
        check_unique(&vars)?;
        Ok(ProbTeam {
            vars,
            weights: marginals_by_index(self, &idx),
        })
    }

    /// r·a + (1−r)·b.
    pub fn scaled_union(a: &ProbTeam, b: &ProbTeam, r: &Q) -> Result<ProbTeam, TeamError> {
        if a.vars != b.vars {
            return Err(TeamError::DomainMismatch(
                "scaled union of different domains".into(),
            ));
        }
        if r.is_negative() || *r > Q::one() {
            return Err(TeamError::Weights(format!("scale {r} outside [0,1]")));
        }
        let s = Q::one() - r;
        let mut w: BTreeMap<Row, Q> = BTreeMap::new();
        for (row, x) in a.support() {
            *w.entry(row.clone()).or_insert_with(Q::zero) += r * x;
        }
        for (row, x) in b.support() {
            *w.entry(row.clone()).or_insert_with(Q::zero) += &s * x;
        }
        w.retain(|_, x| x.is_positive());
        ProbTeam::new(a.vars.clone(), w)
    }

    fn extended(&self, v: &Variable) -> (Vec<Variable>, usize) {
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

    /// Mass of each support row split evenly over `dom`.
    pub fn duplicate(&self, v: Variable, dom: &[Value]) -> Result<ProbTeam, TeamError> {
        if dom.is_empty() {
            return Err(TeamError::EmptyDomain(v.name));
        }
        let share = Q::new(1.into(), (dom.len() as i64).into());
        let (vars, at) = self.extended(&v);
        let mut w: BTreeMap<Row, Q> = BTreeMap::new();
        for (r, x) in self.support() {
            for a in dom {
                *w.entry(set_at(r, at, a.clone())).or_insert_with(Q::zero) += x * &share;
            }
        }
        ProbTeam::new(vars, w)
    }

    pub fn supplement(&self, v: Variable, kernel: &ProbKernel) -> Result<ProbTeam, TeamError> {
        self.supplement_with(v, |r| {
            kernel
                .get(r)
                .cloned()
                .ok_or_else(|| TeamError::KernelMissing(r.to_vec()))
        })
    }

    /// weight(s(a/v)) = Σ X(t)·F(t)(a).
    pub fn supplement_with<F>(&self, v: Variable, mut kernel: F) -> Result<ProbTeam, TeamError>
    where
        F: FnMut(&[Value]) -> Result<Vec<(Value, Q)>, TeamError>,
    {
        let (vars, at) = self.extended(&v);
        let mut w: BTreeMap<Row, Q> = BTreeMap::new();
        for (r, x) in self.support() {
            let img = kernel(r)?;
            let total: Q = img.iter().map(|(_, p)| p.clone()).sum();
            if !total.is_one() || img.iter().any(|(_, p)| p.is_negative()) {
                return Err(TeamError::Weights(format!(
                    "kernel image for {r:?} is not a distribution"
                )));
            }
            for (a, p) in img {
                if p.is_positive() {
                    *w.entry(set_at(r, at, a)).or_insert_with(Q::zero) += x * p;
                }
            }
        }
        ProbTeam::new(vars, w)
    }
}

pub(crate) fn marginals_by_index(pt: &ProbTeam, idx: &[usize]) -> BTreeMap<Row, Q> {
    let mut m: BTreeMap<Row, Q> = BTreeMap::new();
    for (r, w) in pt.support() {
        *m.entry(pick(r, idx)).or_insert_with(Q::zero) += w;
    }
    m
}

fn realization_parts(
    hidden: &ProbTeam,
    empirical: &ProbTeam,
) -> Result<(Vec<String>, Vec<String>), TeamError> {
    let emp: BTreeSet<&str> = empirical.vars().iter().map(|v| v.name.as_str()).collect();
    let hid: BTreeSet<&str> = empirical_names(hidden.vars()).into_iter().collect();
    if emp != hid {
        return Err(TeamError::DomainMismatch(format!(
            "empirical variables {emp:?} differ from measurement/outcome variables {hid:?}"
        )));
    }
    let xs = empirical
        .names_with_role(Role::Measurement)
        .iter()
        .map(|s| s.to_string())
        .collect();
    let all = empirical.names().iter().map(|s| s.to_string()).collect();
    Ok((xs, all))
}

fn sections(hidden: &ProbTeam, empirical: &ProbTeam) -> Result<Option<Sections>, TeamError> {
    let (xs, all) = realization_parts(hidden, empirical)?;
    let xs: Vec<&str> = xs.iter().map(|s| s.as_str()).collect();
    let mut xy: Vec<&str> = xs.clone();
    xy.extend(all.iter().map(|s| s.as_str()).filter(|n| !xs.contains(n)));
    let ex = empirical.marginals(&xs)?;
    let hx = hidden.marginals(&xs)?;
    let exy = empirical.marginals(&xy)?;
    let hxy = hidden.marginals(&xy)?;
    let keys_x: BTreeSet<&Row> = ex.keys().chain(hx.keys()).collect();
    for a in &keys_x {
        if ex.contains_key(*a) != hx.contains_key(*a) {
            return Ok(None);
        }
    }
    Ok(Some(Sections {
        n_x: xs.len(),
        ex,
        hx,
        exy,
        hxy,
    }))
}

struct Sections {
    n_x: usize,
    ex: BTreeMap<Row, Q>,
    hx: BTreeMap<Row, Q>,
    exy: BTreeMap<Row, Q>,
    hxy: BTreeMap<Row, Q>,
}

/// Conditions (i) and (ii): same x-sections with positive mass, and the
/// same conditional outcome distribution on each.
pub fn prob_realizes(hidden: &ProbTeam, empirical: &ProbTeam) -> Result<bool, TeamError> {
    let Some(s) = sections(hidden, empirical)? else {
        return Ok(false);
    };
    let zero = Q::zero();
    let keys: BTreeSet<&Row> = s.exy.keys().chain(s.hxy.keys()).collect();
    for ab in keys {
        let a = &ab[..s.n_x];
        let lhs = s.exy.get(ab).unwrap_or(&zero) * s.hx.get(a).unwrap_or(&zero);
        let rhs = s.hxy.get(ab).unwrap_or(&zero) * s.ex.get(a).unwrap_or(&zero);
        if lhs != rhs {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Realization with identical measurement marginals.
pub fn prob_realizes_uniformly(hidden: &ProbTeam, empirical: &ProbTeam) -> Result<bool, TeamError> {
    if !prob_realizes(hidden, empirical)? {
        return Ok(false);
    }
    let s = sections(hidden, empirical)?.expect("realization already checked");
    Ok(s.ex == s.hx)
}

/// The team seen as a distribution giving mass m/k to a row occurring m times.
pub fn multiteam<I>(vars: Vec<Variable>, rows: I) -> Result<ProbTeam, TeamError>
where
    I: IntoIterator<Item = Row>,
{
    ProbTeam::normalized(vars, rows.into_iter().map(|r| (r, qi(1))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;
    use crate::value::vars;

    fn v(n: i64) -> Value {
        Value::Int(n)
    }

    fn epr_q() -> ProbTeam {
        ProbTeam::from_pairs(
            vars(&["x0", "x1", "y0", "y1"]),
            [
                (vec![v(0), v(1), v(0), v(0)], Q::zero()),
                (vec![v(0), v(1), v(0), v(1)], q(1, 2)),
                (vec![v(0), v(1), v(1), v(0)], q(1, 2)),
                (vec![v(0), v(1), v(1), v(1)], Q::zero()),
            ],
        )
        .unwrap()
    }

    #[test]
    fn collapse_drops_zero_rows() {
        let c = epr_q().collapse();
        assert_eq!(
            c,
            Team::ints(&["x0", "x1", "y0", "y1"], &[[0, 1, 0, 1], [0, 1, 1, 0]]).unwrap()
        );
    }

    #[test]
    fn marginals() {
        let t = epr_q();
        assert_eq!(t.marginal(&["y0"], &[v(0)]).unwrap(), q(1, 2));
        assert_eq!(t.marginal(&[], &[]).unwrap(), qi(1));
        assert!(t.marginal(&["y0"], &[]).is_err());
        let sec12 = Team::ints(
            &["x0", "y0", "x1", "y1"],
            &[
                [0, 1, 0, 1],
                [0, 1, 1, 2],
                [0, 1, 1, 7],
                [0, 5, 1, 2],
                [0, 5, 1, 7],
                [1, 5, 1, 1],
            ],
        )
        .unwrap();
        let u = ProbTeam::uniform_lift(&sec12).unwrap();
        assert_eq!(u.marginal(&["x0", "x1"], &[v(0), v(1)]).unwrap(), q(4, 6));
        assert_eq!(u.collapse(), sec12);
    }

    #[test]
    fn uniform_lift_of_empty_team_fails() {
        assert_eq!(
            ProbTeam::uniform_lift(&Team::new(vars(&["x0"])).unwrap()),
            Err(TeamError::Empty)
        );
    }

    #[test]
    fn weights_must_sum_to_one() {
        let bad = ProbTeam::from_pairs(vars(&["a"]), [(vec![v(0)], q(1, 3))]);
        assert!(matches!(bad, Err(TeamError::Weights(_))));
    }

    #[test]
    fn scaled_union_cases() {
        let a = ProbTeam::dirac(vars(&["a"]), vec![v(0)]).unwrap();
        let b = ProbTeam::dirac(vars(&["a"]), vec![v(1)]).unwrap();
        assert_eq!(ProbTeam::scaled_union(&a, &b, &qi(1)).unwrap(), a);
        assert_eq!(ProbTeam::scaled_union(&a, &b, &Q::zero()).unwrap(), b);
        let h = ProbTeam::scaled_union(&a, &b, &q(1, 2)).unwrap();
        assert_eq!(h.weight(&[v(0)]), q(1, 2));
        assert_eq!(h.weight(&[v(1)]), q(1, 2));
    }

    #[test]
    fn duplicate_and_supplement_weights() {
        let d = ProbTeam::dirac(vars(&["a"]), vec![v(0)]).unwrap();
        let t = d
            .duplicate(Variable::inferred("w"), &[v(0), v(1), v(2)])
            .unwrap();
        assert_eq!(t.support().count(), 3);
        assert!(t.support().all(|(_, w)| *w == q(1, 3)));
        let mut k = ProbKernel::new();
        k.insert(vec![v(0)], vec![(v(0), q(1, 3)), (v(1), q(2, 3))]);
        let s = d.supplement(Variable::inferred("w"), &k).unwrap();
        assert_eq!(s.weight(&[v(0), v(1)]), q(2, 3));
    }

    #[test]
    fn realization_by_independent_coin() {
        let x = epr_q().trimmed();
        let y = x
            .supplement_with(Variable::inferred("z"), |_| {
                Ok(vec![(v(0), q(1, 2)), (v(1), q(1, 2))])
            })
            .unwrap();
        assert!(prob_realizes(&y, &x).unwrap());
        assert!(prob_realizes_uniformly(&y, &x).unwrap());
    }

    #[test]
    fn zeroed_section_breaks_realization() {
        let x = ProbTeam::from_pairs(
            vars(&["x0", "y0"]),
            [(vec![v(0), v(0)], q(1, 2)), (vec![v(1), v(0)], q(1, 2))],
        )
        .unwrap();
        let y = ProbTeam::from_pairs(vars(&["x0", "y0", "z"]), [(vec![v(0), v(0), v(0)], qi(1))])
            .unwrap();
        assert!(!prob_realizes(&y, &x).unwrap());
    }
}
