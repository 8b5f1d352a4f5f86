use std::collections::BTreeMap;

use super::ast::Formula;
use super::eval::{eval_possibilistic, EvalContext, Verdict};
use super::EvalError;
use crate::prob::{ProbKernel, ProbTeam};
use crate::rational::Q;
use crate::team::{Row, TeamError};
use crate::value::{Role, Value, Variable};

/// Witness kernels for the existential quantifiers, keyed by the bound
/// variable's name (after parsing renamed it apart).
pub type Witnesses = BTreeMap<String, ProbKernel>;

fn pick(r: &[Value], ix: &[usize]) -> Row {
    ix.iter().map(|&i| r[i].clone()).collect()
}

/// `y ⫫_x z`: |X_xy|·|X_xz| = |X_xyz|·|X_x| for every value combination.
pub fn prob_indep_atom_holds(
    pt: &ProbTeam,
    y: &[&str],
    x: &[&str],
    z: &[&str],
) -> Result<bool, TeamError> {
    let idx = |names: &[&str]| -> Result<Vec<usize>, TeamError> {
        names
            .iter()
            .map(|n| {
                pt.index_of(n)
                    .ok_or_else(|| TeamError::UnknownVariable(n.to_string()))
            })
            .collect()
    };
    let (yi, xi, zi) = (idx(y)?, idx(x)?, idx(z)?);
    #[derive(Default)]
    struct Sec {
        m: Q,
        y: BTreeMap<Row, Q>,
        z: BTreeMap<Row, Q>,
        yz: BTreeMap<(Row, Row), Q>,
    }
    let mut secs: BTreeMap<Row, Sec> = BTreeMap::new();
    for (r, w) in pt.support() {
        let s = secs.entry(pick(r, &xi)).or_default();
        let (b, c) = (pick(r, &yi), pick(r, &zi));
        s.m += w;
        *s.y.entry(b.clone()).or_default() += w;
        *s.z.entry(c.clone()).or_default() += w;
        *s.yz.entry((b, c)).or_default() += w;
    }
    let zero = Q::default();
    Ok(secs.values().all(|s| {
        s.y.iter().all(|(b, mb)| {
            s.z.iter().all(|(c, mc)| {
                let joint = s.yz.get(&(b.clone(), c.clone())).unwrap_or(&zero);
                mb * mc == joint * &s.m
            })
        })
    }))
}

fn strs(v: &[String]) -> Vec<&str> {
    v.iter().map(String::as_str).collect()
}

fn weakly_flat(f: &Formula) -> bool {
    f.is_quantifier_free() && f.is_dependence_formula()
}

struct ProbEval<'a> {
    ctx: &'a EvalContext,
    witnesses: &'a Witnesses,
    /// Values per role in the input team, for ∀ without a context domain.
    active: BTreeMap<Role, Vec<Value>>,
}

impl ProbEval<'_> {
    fn flat(&self, pt: &ProbTeam, f: &Formula) -> Result<bool, EvalError> {
        match eval_possibilistic(&pt.collapse(), f, self.ctx)? {
            Verdict::True => Ok(true),
            Verdict::False => Ok(false),
            // Quantifier-free flat formulas never leave the definite verdicts
            // except by running out of budget.
            v => Err(EvalError::Inconclusive(v)),
        }
    }

    fn eval(&self, pt: &ProbTeam, f: &Formula) -> Result<bool, EvalError> {
        if weakly_flat(f) {
            return self.flat(pt, f);
        }
        match f {
            Formula::Indep { y, x, z } => {
                Ok(prob_indep_atom_holds(pt, &strs(y), &strs(x), &strs(z))?)
            }
            Formula::And(ps) => {
                for p in ps {
                    if !self.eval(pt, p)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            Formula::Or(_) => Err(EvalError::Unsupported(
                "disjunction with a disjunct that is not weakly flat".into(),
            )),
            Formula::Forall(v, b) => {
                let role = Role::infer(v);
                let dom = match self.ctx.domains.get(&role) {
                    Some(d) => d.clone(),
                    None => self.active.get(&role).cloned().unwrap_or_default(),
                };
                let next = pt.duplicate(Variable::new(v.clone(), role), &dom)?;
                self.eval(&next, b)
            }
            Formula::Exists(v, b) | Formula::ExistsNew(v, b) => {
                let kernel = self
                    .witnesses
                    .get(v)
                    .ok_or_else(|| EvalError::MissingWitness(v.clone()))?;
                let next = pt.supplement(Variable::inferred(v.clone()), kernel)?;
                self.eval(&next, b)
            }
            Formula::ForallNew(..) => Err(EvalError::Unsupported(
                "universal new-sort quantifier".into(),
            )),
            // Atoms other than Indep are weakly flat and handled above.
            _ => unreachable!("weakly flat atom reached the general case"),
        }
    }
}

fn free_check(pt: &ProbTeam, phi: &Formula) -> Result<(), EvalError> {
    match phi
        .free_vars()
        .into_iter()
        .find(|v| pt.index_of(v).is_none())
    {
        Some(v) => Err(EvalError::Unbound(v)),
        None => Ok(()),
    }
}

/// `pt ⊨ phi` in probabilistic team semantics, for formulas without
/// existential quantifiers.
pub fn eval_probabilistic(
    pt: &ProbTeam,
    phi: &Formula,
    ctx: &EvalContext,
) -> Result<bool, EvalError> {
    eval_probabilistic_with(pt, phi, ctx, &Witnesses::new())
}

/// As [`eval_probabilistic`], resolving each existential quantifier with the
/// supplied kernel instead of searching.
pub fn eval_probabilistic_with(
    pt: &ProbTeam,
    phi: &Formula,
    ctx: &EvalContext,
    witnesses: &Witnesses,
) -> Result<bool, EvalError> {
    if ctx.k_max == 0 || ctx.budget == 0 {
        return Err(EvalError::BadContext);
    }
    free_check(pt, phi)?;
    let mut active: BTreeMap<Role, Vec<Value>> = BTreeMap::new();
    for (c, var) in pt.vars().iter().enumerate() {
        let col = active.entry(var.role).or_default();
        col.extend(pt.support().map(|(r, _)| r[c].clone()));
    }
    for d in active.values_mut() {
        d.sort();
        d.dedup();
    }
    ProbEval {
        ctx,
        witnesses,
        active,
    }
    .eval(pt, phi)
}
