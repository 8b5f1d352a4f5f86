use std::cell::{Cell, RefCell};
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use super::ast::Formula;
use super::EvalError;
use crate::team::{Team, TeamError};
use crate::value::{Role, Value};

/// Outcome of a possibilistic check, ordered from worst to best.
///
/// `BoundedFalse` means no witness was found for a new-sort quantifier with
/// domains up to `k_max`; `BoundedTrue` means a universal new-sort quantifier
/// held for every size up to `k_max`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Verdict {
    False,
    BoundedFalse,
    Inconclusive,
    BoundedTrue,
    True,
}

impl Verdict {
    pub fn from_bool(b: bool) -> Verdict {
        if b {
            Verdict::True
        } else {
            Verdict::False
        }
    }

    /// `Some` only for definite answers.
    pub fn holds(self) -> Option<bool> {
        match self {
            Verdict::True => Some(true),
            Verdict::False => Some(false),
            _ => None,
        }
    }

    pub fn is_true(self) -> bool {
        self == Verdict::True
    }

    pub fn is_false(self) -> bool {
        self == Verdict::False
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::False => "false",
            Verdict::BoundedFalse => "false up to k_max",
            Verdict::Inconclusive => "inconclusive: budget",
            Verdict::BoundedTrue => "true up to k_max",
            Verdict::True => "true",
        })
    }
}

#[derive(Clone, Debug)]
pub struct EvalContext {
    /// Quantifier domains per role. A role without an entry ranges over the
    /// values found in the input team's columns of that role (or the whole
    /// team if it has none).
    pub domains: BTreeMap<Role, Vec<Value>>,
    /// Largest fresh domain tried for the new-sort quantifiers.
    pub k_max: usize,
    /// Node limit for the search.
    pub budget: u64,
}

impl Default for EvalContext {
    fn default() -> Self {
        EvalContext {
            domains: BTreeMap::new(),
            k_max: 4,
            budget: 10_000_000,
        }
    }
}

impl EvalContext {
    pub fn with_k_max(mut self, k: usize) -> Self {
        self.k_max = k;
        self
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    pub fn with_domain(mut self, role: Role, values: Vec<Value>) -> Self {
        self.domains.insert(role, values);
        self
    }
}

// Rows beyond this make the split search for ∨ hopeless anyway.
const MAX_SPLIT_ROWS: usize = 20;
const MAX_SET_DOMAIN: usize = 16;

#[derive(Clone, Debug)]
struct ETeam {
    names: Vec<String>,
    rows: Vec<Vec<u32>>,
}

impl ETeam {
    fn col(&self, name: &str) -> usize {
        self.names
            .iter()
            .position(|n| n == name)
            .expect("variable checked before evaluation")
    }

    fn cols(&self, names: &[String]) -> Vec<usize> {
        names.iter().map(|n| self.col(n)).collect()
    }

    fn normalize(mut rows: Vec<Vec<u32>>) -> Vec<Vec<u32>> {
        rows.sort_unstable();
        rows.dedup();
        rows
    }

    fn sub(&self, mask: u64) -> ETeam {
        let rows = self
            .rows
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, r)| r.clone())
            .collect();
        ETeam {
            names: self.names.clone(),
            rows,
        }
    }

    /// Binds `name` on the first `upto` rows; each row gets every value
    /// returned by `vals`. An existing column of that name is overwritten.
    fn extend<F, I>(&self, name: &str, upto: usize, mut vals: F) -> ETeam
    where
        F: FnMut(usize) -> I,
        I: IntoIterator<Item = u32>,
    {
        let mut names = self.names.clone();
        let at = match names.iter().position(|n| n == name) {
            Some(c) => Some(c),
            None => {
                names.push(name.to_string());
                None
            }
        };
        let mut rows = Vec::new();
        for (i, r) in self.rows.iter().take(upto).enumerate() {
            for v in vals(i) {
                let mut row = r.clone();
                match at {
                    Some(c) => row[c] = v,
                    None => row.push(v),
                }
                rows.push(row);
            }
        }
        ETeam {
            names,
            rows: ETeam::normalize(rows),
        }
    }
}

fn indep_rows(t: &ETeam, y: &[String], x: &[String], z: &[String]) -> bool {
    let (yi, xi, zi) = (t.cols(y), t.cols(x), t.cols(z));
    let pick = |r: &[u32], ix: &[usize]| ix.iter().map(|&i| r[i]).collect::<Vec<u32>>();
    type Sec = (
        HashSet<Vec<u32>>,
        HashSet<Vec<u32>>,
        HashSet<(Vec<u32>, Vec<u32>)>,
    );
    let mut groups: HashMap<Vec<u32>, Sec> = HashMap::new();
    for r in &t.rows {
        let g = groups.entry(pick(r, &xi)).or_default();
        let (a, b) = (pick(r, &yi), pick(r, &zi));
        g.0.insert(a.clone());
        g.1.insert(b.clone());
        g.2.insert((a, b));
    }
    // Pairs inside a section are a subset of ys × zs, so counting suffices.
    groups
        .values()
        .all(|(ys, zs, yz)| yz.len() == ys.len() * zs.len())
}

fn conjuncts(f: &Formula) -> Vec<&Formula> {
    match f {
        Formula::And(ps) => ps.iter().flat_map(conjuncts).collect(),
        _ => vec![f],
    }
}

/// Does `body` force `v` to be constant through a top-level conjunct?
fn forces_constant(body: &Formula, v: &str) -> bool {
    conjuncts(body).into_iter().any(|c| match c {
        Formula::Const(zs) => zs.iter().any(|z| z == v),
        Formula::Dep { x, y } => x.is_empty() && y.iter().any(|z| z == v),
        Formula::Indep { y, x, z } => x.is_empty() && y == z && y.iter().any(|w| w == v),
        _ => false,
    })
}

fn binds_role(f: &Formula, role: Role) -> bool {
    match f {
        Formula::And(ps) | Formula::Or(ps) => ps.iter().any(|p| binds_role(p, role)),
        Formula::Exists(v, b)
        | Formula::Forall(v, b)
        | Formula::ExistsNew(v, b)
        | Formula::ForallNew(v, b) => Role::infer(v) == role || binds_role(b, role),
        _ => false,
    }
}

struct Scope {
    role: Role,
    dom: Vec<u32>,
    fresh: bool,
}

struct Evaluator<'c> {
    ctx: &'c EvalContext,
    interner: RefCell<HashMap<Value, u32>>,
    nodes: Cell<u64>,
    scopes: RefCell<Vec<Scope>>,
    depth: Cell<usize>,
    active: BTreeMap<Role, Vec<u32>>,
    all_values: Vec<u32>,
}

impl<'c> Evaluator<'c> {
    fn intern(&self, v: &Value) -> u32 {
        let mut m = self.interner.borrow_mut();
        let n = m.len() as u32;
        *m.entry(v.clone()).or_insert(n)
    }

    fn tick(&self) -> bool {
        let n = self.nodes.get() + 1;
        self.nodes.set(n);
        n <= self.ctx.budget
    }

    fn exhausted(&self) -> bool {
        self.nodes.get() > self.ctx.budget
    }

    fn domain(&self, role: Role) -> (Vec<u32>, bool) {
        if let Some(s) = self.scopes.borrow().iter().rev().find(|s| s.role == role) {
            return (s.dom.clone(), s.fresh);
        }
        if let Some(vs) = self.ctx.domains.get(&role) {
            let mut d: Vec<u32> = vs.iter().map(|v| self.intern(v)).collect();
            d.sort_unstable();
            d.dedup();
            return (d, false);
        }
        match self.active.get(&role) {
            Some(d) => (d.clone(), false),
            None => (self.all_values.clone(), false),
        }
    }

    fn eval(&self, t: &ETeam, f: &Formula) -> Verdict {
        if t.rows.is_empty() {
            return Verdict::True;
        }
        if !self.tick() {
            return Verdict::Inconclusive;
        }
        match f {
            Formula::Eq(a, b) => {
                let (i, j) = (t.col(a), t.col(b));
                Verdict::from_bool(t.rows.iter().all(|r| r[i] == r[j]))
            }
            Formula::Neq(a, b) => {
                let (i, j) = (t.col(a), t.col(b));
                Verdict::from_bool(t.rows.iter().all(|r| r[i] != r[j]))
            }
            Formula::Indep { .. } | Formula::Dep { .. } | Formula::Const(_) => {
                let (y, x, z) = f.as_indep().unwrap();
                Verdict::from_bool(indep_rows(t, &y, &x, &z))
            }
            Formula::And(ps) => {
                let mut acc = Verdict::True;
                for p in ps {
                    acc = acc.min(self.eval(t, p));
                    if acc == Verdict::False {
                        break;
                    }
                }
                acc
            }
            Formula::Or(ps) => match ps.len() {
                0 => Verdict::False,
                1 => self.eval(t, &ps[0]),
                _ => {
                    let rest = Formula::or(ps[1..].to_vec());
                    self.or2(t, &ps[0], &rest)
                }
            },
            Formula::Exists(v, b) => self.exists(t, v, b),
            Formula::Forall(v, b) => {
                let (dom, _) = self.domain(Role::infer(v));
                let t2 = t.extend(v, t.rows.len(), |_| dom.clone());
                self.eval(&t2, b)
            }
            Formula::ExistsNew(v, b) => self.exists_new(t, v, b),
            Formula::ForallNew(v, b) => self.forall_new(t, v, b),
        }
    }

    fn or2(&self, t: &ETeam, a: &Formula, b: &Formula) -> Verdict {
        let va = self.eval(t, a);
        if va == Verdict::True {
            return va;
        }
        let vb = self.eval(t, b);
        if vb == Verdict::True {
            return vb;
        }
        let mut best = va.max(vb);
        let n = t.rows.len();
        if n > MAX_SPLIT_ROWS {
            return best.max(Verdict::Inconclusive);
        }
        let full = (1u64 << n) - 1;
        let (a, b) = if !b.is_dependence_formula() && a.is_dependence_formula() {
            (b, a)
        } else {
            (a, b)
        };
        if b.is_dependence_formula() {
            // b is downward closed, so its part may as well be the complement.
            for y in 1..full {
                let vy = self.eval(&t.sub(y), a);
                if vy <= best {
                    continue;
                }
                best = best.max(vy.min(self.eval(&t.sub(full ^ y), b)));
                if best == Verdict::True || self.exhausted() {
                    break;
                }
            }
            return best;
        }
        // General case: b may cover more than the complement.
        let mut sup: Vec<Verdict> = (0..=full).map(|m| self.eval(&t.sub(m), b)).collect();
        for bit in 0..n {
            for m in 0..=full {
                if m >> bit & 1 == 0 {
                    sup[m as usize] = sup[m as usize].max(sup[(m | 1 << bit) as usize]);
                }
            }
        }
        for y in 1..full {
            let s = sup[(full ^ y) as usize];
            if s <= best {
                continue;
            }
            best = best.max(s.min(self.eval(&t.sub(y), a)));
            if best == Verdict::True || self.exhausted() {
                break;
            }
        }
        best
    }

    fn exists(&self, t: &ETeam, v: &str, body: &Formula) -> Verdict {
        let (dom, fresh) = self.domain(Role::infer(v));
        let d = dom.len();
        if d == 0 {
            return Verdict::False;
        }
        let downward = body.is_dependence_formula();
        let masks: Vec<u64> = if downward {
            (0..d).map(|i| 1u64 << i).collect()
        } else {
            if d > MAX_SET_DOMAIN {
                return Verdict::Inconclusive;
            }
            let mut ms: Vec<u64> = (1..1u64 << d).collect();
            ms.sort_by_key(|m| (m.count_ones(), *m));
            ms
        };
        let symmetric = fresh && {
            let ds: HashSet<u32> = dom.iter().copied().collect();
            !t.rows.iter().flatten().any(|x| ds.contains(x))
        };
        let prunes: Vec<&Formula> = if downward {
            vec![body]
        } else {
            conjuncts(body)
                .into_iter()
                .filter(|c| c.is_dependence_formula())
                .collect()
        };
        let mut search = Search {
            ev: self,
            t,
            v,
            body,
            dom: &dom,
            masks: &masks,
            symmetric,
            prunes: &prunes,
        };
        let mut assign = vec![0u64; t.rows.len()];
        search.dfs(0, 0, &mut assign)
    }

    fn fresh_domain(&self, k: usize) -> Vec<u32> {
        let depth = self.depth.get();
        (0..k)
            .map(|i| self.intern(&Value::sym(format!("_new{depth}:{i}"))))
            .collect()
    }

    fn exists_new(&self, t: &ETeam, v: &str, body: &Formula) -> Verdict {
        let role = Role::infer(v);
        // A constant witness over a sort nothing else ranges over: one value is
        // as good as any other, so size 1 decides.
        let complete = forces_constant(body, v) && !binds_role(body, role);
        self.depth.set(self.depth.get() + 1);
        let mut best = Verdict::False;
        for k in 1..=self.ctx.k_max {
            let dom = self.fresh_domain(k);
            self.scopes.borrow_mut().push(Scope {
                role,
                dom,
                fresh: true,
            });
            let r = self.exists(t, v, body);
            self.scopes.borrow_mut().pop();
            best = best.max(r);
            if complete || r == Verdict::True || self.exhausted() {
                break;
            }
        }
        self.depth.set(self.depth.get() - 1);
        if best == Verdict::False && !complete {
            Verdict::BoundedFalse
        } else {
            best
        }
    }

    fn forall_new(&self, t: &ETeam, v: &str, body: &Formula) -> Verdict {
        let role = Role::infer(v);
        self.depth.set(self.depth.get() + 1);
        let mut worst = Verdict::True;
        for k in 1..=self.ctx.k_max {
            let dom = self.fresh_domain(k);
            let t2 = t.extend(v, t.rows.len(), |_| dom.clone());
            self.scopes.borrow_mut().push(Scope {
                role,
                dom,
                fresh: true,
            });
            let r = self.eval(&t2, body);
            self.scopes.borrow_mut().pop();
            worst = worst.min(r);
            if worst == Verdict::False {
                break;
            }
        }
        self.depth.set(self.depth.get() - 1);
        if worst == Verdict::True {
            Verdict::BoundedTrue
        } else {
            worst
        }
    }
}

struct Search<'a, 'c> {
    ev: &'a Evaluator<'c>,
    t: &'a ETeam,
    v: &'a str,
    body: &'a Formula,
    dom: &'a [u32],
    masks: &'a [u64],
    symmetric: bool,
    prunes: &'a [&'a Formula],
}

impl Search<'_, '_> {
    fn team(&self, assign: &[u64], upto: usize) -> ETeam {
        self.t.extend(self.v, upto, |i| {
            let m = assign[i];
            self.dom
                .iter()
                .enumerate()
                .filter(move |(j, _)| m >> j & 1 == 1)
                .map(|(_, &x)| x)
        })
    }

    /// `used` counts how many fresh values appeared so far; under symmetry new
    /// values must be introduced in order.
    fn dfs(&mut self, i: usize, used: u32, assign: &mut Vec<u64>) -> Verdict {
        let n = self.t.rows.len();
        if i == n {
            return self.ev.eval(&self.team(assign, n), self.body);
        }
        let mut best = Verdict::False;
        for &m in self.masks {
            let mut next = used;
            if self.symmetric {
                let hi = m >> used;
                if hi & (hi + 1) != 0 {
                    continue;
                }
                next += hi.count_ones();
            }
            assign[i] = m;
            if i + 1 < n && !self.prunes.is_empty() {
                let part = self.team(assign, i + 1);
                if self
                    .prunes
                    .iter()
                    .any(|p| self.ev.eval(&part, p) == Verdict::False)
                {
                    continue;
                }
            }
            best = best.max(self.dfs(i + 1, next, assign));
            if best == Verdict::True {
                return best;
            }
            if self.ev.exhausted() {
                return best.max(Verdict::Inconclusive);
            }
        }
        best
    }
}

fn check_free(team: &Team, phi: &Formula) -> Result<(), EvalError> {
    let names: BTreeSet<&str> = team.names().into_iter().collect();
    match phi
        .free_vars()
        .into_iter()
        .find(|v| !names.contains(v.as_str()))
    {
        Some(v) => Err(EvalError::Unbound(v)),
        None => Ok(()),
    }
}

/// Checks `team ⊨ phi` under team semantics.
pub fn eval_possibilistic(
    team: &Team,
    phi: &Formula,
    ctx: &EvalContext,
) -> Result<Verdict, EvalError> {
    if ctx.k_max == 0 || ctx.budget == 0 {
        return Err(EvalError::BadContext);
    }
    check_free(team, phi)?;
    let mut ev = Evaluator {
        ctx,
        interner: RefCell::new(HashMap::new()),
        nodes: Cell::new(0),
        scopes: RefCell::new(Vec::new()),
        depth: Cell::new(0),
        active: BTreeMap::new(),
        all_values: Vec::new(),
    };
    let rows: Vec<Vec<u32>> = team
        .rows()
        .map(|r| r.iter().map(|v| ev.intern(v)).collect())
        .collect();
    let mut all = BTreeSet::new();
    for (c, var) in team.vars().iter().enumerate() {
        let col = ev.active.entry(var.role).or_default();
        for r in &rows {
            col.push(r[c]);
            all.insert(r[c]);
        }
    }
    for d in ev.active.values_mut() {
        d.sort_unstable();
        d.dedup();
    }
    ev.all_values = all.into_iter().collect();
    let names = team.names().into_iter().map(String::from).collect();
    Ok(ev.eval(
        &ETeam {
            names,
            rows: ETeam::normalize(rows),
        },
        phi,
    ))
}

/// `y ⊥_x z` on a team, directly.
pub fn indep_atom_holds(
    team: &Team,
    y: &[&str],
    x: &[&str],
    z: &[&str],
) -> Result<bool, TeamError> {
    let (yi, xi, zi) = (team.indices(y)?, team.indices(x)?, team.indices(z)?);
    let pick = |r: &[Value], ix: &[usize]| ix.iter().map(|&i| r[i].clone()).collect::<Vec<_>>();
    let mut sections: BTreeMap<Vec<Value>, Vec<&[Value]>> = BTreeMap::new();
    for r in team.rows() {
        sections.entry(pick(r, &xi)).or_default().push(r);
    }
    // For all s, s' agreeing on x there is s'' with s''(xy) = s(xy), s''(z) = s'(z).
    Ok(sections.values().all(|rows| {
        let present: BTreeSet<(Vec<Value>, Vec<Value>)> =
            rows.iter().map(|r| (pick(r, &yi), pick(r, &zi))).collect();
        rows.iter().all(|s| {
            rows.iter()
                .all(|s2| present.contains(&(pick(s, &yi), pick(s2, &zi))))
        })
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;

    fn sec12() -> Team {
        Team::ints(
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
        .unwrap()
    }

    fn epr() -> Team {
        Team::ints(&["x0", "x1", "y0", "y1"], &[[0, 1, 0, 1], [0, 1, 1, 0]]).unwrap()
    }

    fn ev(t: &Team, src: &str) -> Verdict {
        eval_possibilistic(t, &parse(src).unwrap(), &EvalContext::default()).unwrap()
    }

    #[test]
    fn conditional_independence_example() {
        assert_eq!(ev(&sec12(), "y0 _||_ y1 | x0 x1"), Verdict::True);
        assert!(indep_atom_holds(&sec12(), &["y0"], &["x0", "x1"], &["y1"]).unwrap());
        assert_eq!(ev(&epr(), "y0 _||_ y1 | x0 x1"), Verdict::False);
        assert!(!indep_atom_holds(&epr(), &["y0"], &["x0", "x1"], &["y1"]).unwrap());
        assert!(indep_atom_holds(&epr(), &["x0", "x1"], &["x0", "x1"], &["y0", "y1"]).unwrap());
    }

    #[test]
    fn epr_has_no_single_valued_outcome_independent_hidden_variable() {
        let f = parse("Eh z . ( =(z) /\\ y0 _||_ y1 | x0 x1 z )").unwrap();
        let ctx = EvalContext::default().with_k_max(1);
        assert_eq!(
            eval_possibilistic(&epr(), &f, &ctx).unwrap(),
            Verdict::False
        );
        // Without =(z) a two-valued z separates the rows.
        let g = parse("Eh z . y0 _||_ y1 | x0 x1 z").unwrap();
        assert_eq!(
            eval_possibilistic(&epr(), &g, &EvalContext::default()).unwrap(),
            Verdict::True
        );
        let h = parse("Eh z . ( =(z) /\\ y0 = y1 )").unwrap();
        assert_eq!(
            eval_possibilistic(&epr(), &h, &EvalContext::default()).unwrap(),
            Verdict::False
        );
        let u = parse("Eh z . ( z = z /\\ y0 = y1 )").unwrap();
        assert_eq!(
            eval_possibilistic(&epr(), &u, &EvalContext::default()).unwrap(),
            Verdict::BoundedFalse
        );
    }

    #[test]
    fn empty_and_singleton_teams() {
        let empty = Team::new(crate::value::vars(&["x0", "y0"])).unwrap();
        assert_eq!(ev(&empty, "x0 != x0 /\\ y0 _||_ x0"), Verdict::True);
        let one = Team::ints(&["x0", "y0", "x1"], &[[4, 2, 9]]).unwrap();
        assert_eq!(
            ev(&one, "y0 _||_ x1 | x0 /\\ x0 x1 _||_ y0 /\\ =(x0 ; y0)"),
            Verdict::True
        );
    }

    #[test]
    fn disjunction_splits_the_team() {
        let t = Team::ints(&["x", "y"], &[[0, 0], [0, 1], [1, 1]]).unwrap();
        assert_eq!(ev(&t, "x = y \\/ x != y"), Verdict::True);
        assert_eq!(ev(&t, "x = y"), Verdict::False);
        assert_eq!(ev(&t, "=(x ; y) \\/ =(x ; y)"), Verdict::True);
        assert_eq!(ev(&t, "=(x ; y) \\/ =(y)"), Verdict::True);
        assert_eq!(ev(&t, "=(x) \\/ =(y)"), Verdict::True);
        let t4 = Team::ints(&["x", "y"], &[[0, 0], [0, 1], [1, 0], [1, 1]]).unwrap();
        assert_eq!(ev(&t4, "=(x) \\/ =(x)"), Verdict::True);
        assert_eq!(ev(&t4, "=(y) \\/ =(y)"), Verdict::True);
        assert_eq!(ev(&t4, "=(x ; y) \\/ =(x)"), Verdict::False);
        let t3 = Team::ints(&["x"], &[[0], [1], [2]]).unwrap();
        assert_eq!(ev(&t3, "=(x) \\/ =(x)"), Verdict::False);
        let t5 = Team::ints(&["x", "y"], &[[0, 0], [0, 1], [1, 0], [1, 1], [2, 2]]).unwrap();
        assert_eq!(ev(&t5, "x _||_ y \\/ x = y"), Verdict::True);
        assert_eq!(ev(&t5, "x _||_ y \\/ =(x ; y)"), Verdict::True);
        assert_eq!(ev(&t5, "x _||_ y \\/ x != y"), Verdict::False);
        // Two overlapping squares: only a cover sharing (1, 1) works.
        let sq = Team::ints(
            &["x", "y"],
            &[[0, 0], [0, 1], [1, 0], [1, 1], [1, 2], [2, 1], [2, 2]],
        )
        .unwrap();
        assert_eq!(ev(&sq, "x _||_ y"), Verdict::False);
        assert_eq!(ev(&sq, "x _||_ y \\/ x _||_ y"), Verdict::True);
    }

    #[test]
    fn quantifiers() {
        let t = Team::ints(&["x", "y"], &[[0, 0], [1, 1], [2, 0]]).unwrap();
        // Active domain for z (no hidden column) is the set of all values.
        assert_eq!(ev(&t, "E z . ( =(x ; z) /\\ z != x )"), Verdict::True);
        assert_eq!(ev(&t, "E z . ( =(z) /\\ z != x )"), Verdict::False);
        assert_eq!(ev(&t, "A z . E w . ( =(z ; w) /\\ w = z )"), Verdict::True);
        assert_eq!(ev(&t, "A z . =(x ; z)"), Verdict::False);
        // A set-valued witness: z ⊥ x needs every z value with every x.
        assert_eq!(ev(&t, "E z . ( z _||_ x /\\ =(x ; y) )"), Verdict::True);
        let ctx = EvalContext::default().with_domain(Role::Hidden, vec![Value::Int(7)]);
        let f = parse("E z . z = x").unwrap();
        assert_eq!(eval_possibilistic(&t, &f, &ctx).unwrap(), Verdict::False);
    }

    #[test]
    fn new_sort_universal_is_bounded() {
        let f = parse("Ah z . x0 _||_ z").unwrap();
        assert_eq!(
            eval_possibilistic(&epr(), &f, &EvalContext::default()).unwrap(),
            Verdict::BoundedTrue
        );
        let g = parse("Ah z . =(z)").unwrap();
        assert_eq!(
            eval_possibilistic(&epr(), &g, &EvalContext::default()).unwrap(),
            Verdict::False
        );
    }

    #[test]
    fn budget_runs_out() {
        let t = Team::ints(&["x"], &(0..12).map(|i| [i]).collect::<Vec<_>>()).unwrap();
        let f = parse("=(x) \\/ (=(x) \\/ =(x))").unwrap();
        let ctx = EvalContext::default().with_budget(50);
        assert_eq!(
            eval_possibilistic(&t, &f, &ctx).unwrap(),
            Verdict::Inconclusive
        );
    }

    #[test]
    fn unbound_variables_are_rejected() {
        let f = parse("w = x0").unwrap();
        assert!(matches!(
            eval_possibilistic(&epr(), &f, &EvalContext::default()),
            Err(EvalError::Unbound(_))
        ));
    }
}
