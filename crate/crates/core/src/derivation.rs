//! Forward chaining over independence atoms with the nine axioms.
//!
//! Facts are kept as sets of variables: duplicates and order inside a tuple
//! never matter, so the Permutation rule is applied implicitly by keeping
//! every fact in canonical (sorted, deduplicated) form.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::formula::{indep_atom_holds, prob_indep_atom_holds, Formula};
use crate::random::{random_prob_team, random_team};

/// `y ⊥_x z` over sorted, duplicate-free tuples.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AtomFact {
    pub y: Vec<String>,
    pub x: Vec<String>,
    pub z: Vec<String>,
}

fn canon(v: &[String]) -> Vec<String> {
    let s: BTreeSet<String> = v.iter().cloned().collect();
    s.into_iter().collect()
}

impl AtomFact {
    pub fn new(y: &[&str], x: &[&str], z: &[&str]) -> AtomFact {
        let own = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
        AtomFact::from_parts(own(y), own(x), own(z))
    }

    pub fn from_parts(y: Vec<String>, x: Vec<String>, z: Vec<String>) -> AtomFact {
        AtomFact {
            y: canon(&y),
            x: canon(&x),
            z: canon(&z),
        }
    }

    /// Independence, dependence and constancy atoms; anything else is `None`.
    pub fn from_formula(f: &Formula) -> Option<AtomFact> {
        let (y, x, z) = f.as_indep()?;
        Some(AtomFact::from_parts(y, x, z))
    }

    /// The conjuncts of a conjunction of atoms.
    pub fn from_conjunction(f: &Formula) -> Option<Vec<AtomFact>> {
        match f {
            Formula::And(ps) => {
                let mut out = Vec::new();
                for p in ps {
                    out.extend(AtomFact::from_conjunction(p)?);
                }
                Some(out)
            }
            _ => Some(vec![AtomFact::from_formula(f)?]),
        }
    }

    pub fn to_formula(&self) -> Formula {
        Formula::Indep {
            y: self.y.clone(),
            x: self.x.clone(),
            z: self.z.clone(),
        }
    }

    fn vars(&self) -> impl Iterator<Item = &String> {
        self.y.iter().chain(&self.x).chain(&self.z)
    }
}

impl fmt::Display for AtomFact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_formula())
    }
}

/// The axioms, numbered as usual (Permutation, rule 5, is implicit).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rule {
    Premise,
    Constancy,
    Reflexivity,
    Symmetry,
    Weakening,
    Permutation,
    FixedParameter,
    FirstTransitivity,
    SecondTransitivity,
    Exchange,
}

impl Rule {
    pub const AXIOMS: [Rule; 9] = [
        Rule::Constancy,
        Rule::Reflexivity,
        Rule::Symmetry,
        Rule::Weakening,
        Rule::Permutation,
        Rule::FixedParameter,
        Rule::FirstTransitivity,
        Rule::SecondTransitivity,
        Rule::Exchange,
    ];

    /// 1–9, or 0 for a premise.
    pub fn number(self) -> u8 {
        match self {
            Rule::Premise => 0,
            Rule::Constancy => 1,
            Rule::Reflexivity => 2,
            Rule::Symmetry => 3,
            Rule::Weakening => 4,
            Rule::Permutation => 5,
            Rule::FixedParameter => 6,
            Rule::FirstTransitivity => 7,
            Rule::SecondTransitivity => 8,
            Rule::Exchange => 9,
        }
    }

    pub fn from_number(n: u8) -> Option<Rule> {
        Rule::AXIOMS.iter().copied().find(|r| r.number() == n)
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rule::Premise => "premise",
            Rule::Constancy => "constancy",
            Rule::Reflexivity => "reflexivity",
            Rule::Symmetry => "symmetry",
            Rule::Weakening => "weakening",
            Rule::Permutation => "permutation",
            Rule::FixedParameter => "fixed parameter",
            Rule::FirstTransitivity => "first transitivity",
            Rule::SecondTransitivity => "second transitivity",
            Rule::Exchange => "exchange",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub rule: Rule,
    /// Indices of earlier steps.
    pub inputs: Vec<usize>,
    pub fact: AtomFact,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    pub steps: Vec<Step>,
}

impl Derivation {
    pub fn conclusion(&self) -> &AtomFact {
        &self.steps.last().expect("derivations are nonempty").fact
    }

    /// Rule applications, not counting premises.
    pub fn len(&self) -> usize {
        self.steps
            .iter()
            .filter(|s| s.rule != Rule::Premise)
            .count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Re-checks every step against its rule schema.
    pub fn replay(&self, premises: &[AtomFact]) -> Result<(), String> {
        let prem: BTreeSet<AtomFact> = premises
            .iter()
            .map(|p| AtomFact::from_parts(p.y.clone(), p.x.clone(), p.z.clone()))
            .collect();
        for (k, s) in self.steps.iter().enumerate() {
            if s.inputs.iter().any(|&i| i >= k) {
                return Err(format!("step {}: uses a later step", k + 1));
            }
            let ins: Vec<&AtomFact> = s.inputs.iter().map(|&i| &self.steps[i].fact).collect();
            if !schema_ok(s.rule, &ins, &s.fact, &prem) {
                return Err(format!(
                    "step {}: {} does not yield {}",
                    k + 1,
                    s.rule,
                    s.fact
                ));
            }
        }
        Ok(())
    }
}

impl fmt::Display for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, s) in self.steps.iter().enumerate() {
            write!(f, "{:>3}. {}", k + 1, s.fact)?;
            if s.rule == Rule::Premise {
                writeln!(f, "    [premise]")?;
            } else {
                let from: Vec<String> = s.inputs.iter().map(|i| (i + 1).to_string()).collect();
                if from.is_empty() {
                    writeln!(f, "    [{} ({})]", s.rule, s.rule.number())?;
                } else {
                    writeln!(
                        f,
                        "    [{} ({}) from {}]",
                        s.rule,
                        s.rule.number(),
                        from.join(", ")
                    )?;
                }
            }
        }
        Ok(())
    }
}

fn set(v: &[String]) -> BTreeSet<&String> {
    v.iter().collect()
}

fn union(a: &[String], b: &[String]) -> Vec<String> {
    canon(&[a, b].concat())
}

fn subset(a: &[String], b: &[String]) -> bool {
    set(a).is_subset(&set(b))
}

fn schema_ok(rule: Rule, ins: &[&AtomFact], out: &AtomFact, premises: &BTreeSet<AtomFact>) -> bool {
    match (rule, ins) {
        (Rule::Premise, []) => premises.contains(out),
        (Rule::Reflexivity, []) => out.y == out.x,
        (Rule::Constancy, [a]) => a.y == a.z && out.y == a.y && out.x == a.x,
        (Rule::Symmetry, [a]) => out.y == a.z && out.x == a.x && out.z == a.y,
        (Rule::Weakening, [a]) => out.x == a.x && subset(&out.y, &a.y) && subset(&out.z, &a.z),
        (Rule::Permutation, [a]) => *a == out,
        (Rule::FixedParameter, [a]) => {
            out.x == a.x && out.y == union(&a.z, &a.x) && out.z == union(&a.y, &a.x)
        }
        // x ⊥_z y, u ⊥_{zx} y ⟹ u ⊥_z y
        (Rule::FirstTransitivity, [a, b]) => {
            b.x == union(&a.x, &a.y) && b.z == a.z && out.y == b.y && out.x == a.x && out.z == a.z
        }
        // y ⊥_z y, zx ⊥_y u ⟹ x ⊥_z u
        (Rule::SecondTransitivity, [a, b]) => {
            a.y == a.z && b.x == a.y && out.x == a.x && out.z == b.z && union(&a.x, &out.y) == b.y
        }
        // x ⊥_z y, xy ⊥_z u ⟹ x ⊥_z yu
        (Rule::Exchange, [a, b]) => {
            b.x == a.x
                && b.y == union(&a.y, &a.z)
                && out.y == a.y
                && out.x == a.x
                && out.z == union(&a.z, &b.z)
        }
        _ => false,
    }
}

#[derive(Clone, Debug)]
pub struct EntailConfig {
    /// Maximum number of rule-application levels.
    pub depth: usize,
    /// Longest side tuple tried for Constancy and Reflexivity.
    pub side_len: usize,
    /// Stop once this many facts are known.
    pub max_facts: usize,
}

impl Default for EntailConfig {
    fn default() -> Self {
        EntailConfig {
            depth: 6,
            side_len: 3,
            max_facts: 2_000_000,
        }
    }
}

#[derive(Clone, Debug)]
pub enum Entailment {
    Derived(Derivation),
    /// Bound reached without the goal; says nothing about derivability.
    Exhausted {
        levels: usize,
        facts: usize,
    },
}

impl Entailment {
    pub fn derivation(&self) -> Option<&Derivation> {
        match self {
            Entailment::Derived(d) => Some(d),
            Entailment::Exhausted { .. } => None,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum DerivationError {
    #[error("more than 64 variables")]
    TooManyVariables,
    #[error("depth must be at least 1")]
    ZeroDepth,
    #[error("`{0}` is not an independence, dependence or constancy atom")]
    NotAnAtom(String),
}

type Mask = u64;
type Fact = (Mask, Mask, Mask);

struct Origin {
    rule: Rule,
    parents: Vec<Fact>,
}

fn subsets(m: Mask) -> impl Iterator<Item = Mask> {
    // All submasks, the empty one included.
    let mut s = m;
    let mut done = false;
    std::iter::from_fn(move || {
        if done {
            return None;
        }
        let out = s;
        if s == 0 {
            done = true;
        } else {
            s = (s - 1) & m;
        }
        Some(out)
    })
}

struct Engine {
    known: HashMap<Fact, Origin>,
    // Indexes over every known fact.
    by_cond_third: HashMap<(Mask, Mask), Vec<Mask>>,
    by_first_cond: HashMap<(Mask, Mask), Vec<Mask>>,
    by_third: HashMap<Mask, Vec<Fact>>,
    by_cond: HashMap<Mask, Vec<Fact>>,
    deps_by_first: HashMap<Mask, Vec<Mask>>,
}

impl Engine {
    fn index(&mut self, f: Fact) {
        let (y, x, z) = f;
        self.by_cond_third.entry((x, z)).or_default().push(y);
        self.by_first_cond.entry((y, x)).or_default().push(z);
        self.by_third.entry(z).or_default().push(f);
        self.by_cond.entry(x).or_default().push(f);
        if y == z {
            self.deps_by_first.entry(y).or_default().push(x);
        }
    }
}

/// Searches for a derivation of `goal` from `premises`, level by level, so
/// the derivation found has the fewest levels possible within the bound.
pub fn entail(
    premises: &[AtomFact],
    goal: &AtomFact,
    cfg: &EntailConfig,
) -> Result<Entailment, DerivationError> {
    if cfg.depth == 0 {
        return Err(DerivationError::ZeroDepth);
    }
    let universe: Vec<String> = {
        let s: BTreeSet<&String> = premises
            .iter()
            .flat_map(|p| p.vars())
            .chain(goal.vars())
            .collect();
        s.into_iter().cloned().collect()
    };
    if universe.len() > 64 {
        return Err(DerivationError::TooManyVariables);
    }
    let mask = |v: &[String]| -> Mask {
        v.iter()
            .map(|n| 1u64 << universe.binary_search(n).expect("in universe"))
            .fold(0, |a, b| a | b)
    };
    let to_fact = |a: &AtomFact| -> Fact { (mask(&a.y), mask(&a.x), mask(&a.z)) };
    let unmask = |m: Mask| -> Vec<String> {
        (0..universe.len())
            .filter(|i| m >> i & 1 == 1)
            .map(|i| universe[i].clone())
            .collect()
    };
    let goal_f = to_fact(goal);

    let mut pool: BTreeSet<Mask> = (0..1u64 << universe.len().min(20))
        .filter(|m| m.count_ones() as usize <= cfg.side_len)
        .collect();
    if universe.len() > 20 {
        pool = (0..universe.len()).map(|i| 1u64 << i).collect();
        pool.insert(0);
    }
    pool.extend([goal_f.0, goal_f.1, goal_f.2]);

    let mut eng = Engine {
        known: HashMap::new(),
        by_cond_third: HashMap::new(),
        by_first_cond: HashMap::new(),
        by_third: HashMap::new(),
        by_cond: HashMap::new(),
        deps_by_first: HashMap::new(),
    };
    let mut frontier = Vec::new();
    for p in premises {
        let f = to_fact(p);
        if let std::collections::hash_map::Entry::Vacant(e) = eng.known.entry(f) {
            e.insert(Origin {
                rule: Rule::Premise,
                parents: vec![],
            });
            eng.index(f);
            frontier.push(f);
        }
    }
    let mut levels = 0;
    while !eng.known.contains_key(&goal_f) && levels < cfg.depth && eng.known.len() < cfg.max_facts
    {
        levels += 1;
        let mut new: Vec<(Fact, Rule, Vec<Fact>)> = Vec::new();
        let mut push = |f: Fact, rule: Rule, parents: Vec<Fact>| new.push((f, rule, parents));
        if levels == 1 {
            for &a in &pool {
                for &b in &pool {
                    push((a, a, b), Rule::Reflexivity, vec![]);
                }
            }
        }
        for &f in &frontier {
            let (y, x, z) = f;
            push((z, x, y), Rule::Symmetry, vec![f]);
            push((z | x, x, y | x), Rule::FixedParameter, vec![f]);
            for y2 in subsets(y) {
                for z2 in subsets(z) {
                    if (y2, z2) != (y, z) {
                        push((y2, x, z2), Rule::Weakening, vec![f]);
                    }
                }
            }
            if y == z {
                for &w in &pool {
                    push((y, x, w), Rule::Constancy, vec![f]);
                }
                // f as the dependence premise of Second Transitivity.
                for &b in eng.by_cond.get(&y).map(Vec::as_slice).unwrap_or(&[]) {
                    if x & !b.0 == 0 {
                        push((b.0 & !x, x, b.2), Rule::SecondTransitivity, vec![f, b]);
                    }
                }
            }
            // f = (w, c, u) as the second premise of Second Transitivity.
            for &zc in eng.deps_by_first.get(&x).map(Vec::as_slice).unwrap_or(&[]) {
                if zc & !y == 0 {
                    push(
                        (y & !zc, zc, z),
                        Rule::SecondTransitivity,
                        vec![(x, zc, x), f],
                    );
                }
            }
            // f = (x', z', y') as the first premise of First Transitivity.
            for &u in eng
                .by_cond_third
                .get(&(x | y, z))
                .map(Vec::as_slice)
                .unwrap_or(&[])
            {
                push((u, x, z), Rule::FirstTransitivity, vec![f, (u, x | y, z)]);
            }
            // f = (u, c, y') as the second one.
            for &a in eng.by_third.get(&z).map(Vec::as_slice).unwrap_or(&[]) {
                if a.0 | a.1 == x {
                    push((y, a.1, z), Rule::FirstTransitivity, vec![a, f]);
                }
            }
            // Exchange, f first.
            for &u in eng
                .by_first_cond
                .get(&(y | z, x))
                .map(Vec::as_slice)
                .unwrap_or(&[])
            {
                push((y, x, z | u), Rule::Exchange, vec![f, (y | z, x, u)]);
            }
            // Exchange, f second.
            for &a in eng.by_cond.get(&x).map(Vec::as_slice).unwrap_or(&[]) {
                if a.0 | a.2 == y {
                    push((a.0, x, a.2 | z), Rule::Exchange, vec![a, f]);
                }
            }
        }
        frontier.clear();
        for (f, rule, parents) in new {
            if let std::collections::hash_map::Entry::Vacant(e) = eng.known.entry(f) {
                e.insert(Origin { rule, parents });
                frontier.push(f);
            }
        }
        for &f in &frontier {
            eng.index(f);
        }
        if frontier.is_empty() {
            break;
        }
    }
    if !eng.known.contains_key(&goal_f) {
        return Ok(Entailment::Exhausted {
            levels,
            facts: eng.known.len(),
        });
    }
    // Unwind the back-pointers into a numbered list.
    let mut steps: Vec<Step> = Vec::new();
    let mut at: HashMap<Fact, usize> = HashMap::new();
    let mut stack: Vec<(Fact, bool)> = vec![(goal_f, false)];
    while let Some((f, expanded)) = stack.pop() {
        if at.contains_key(&f) {
            continue;
        }
        let o = &eng.known[&f];
        if expanded {
            let inputs = o.parents.iter().map(|p| at[p]).collect();
            at.insert(f, steps.len());
            steps.push(Step {
                rule: o.rule,
                inputs,
                fact: AtomFact {
                    y: unmask(f.0),
                    x: unmask(f.1),
                    z: unmask(f.2),
                },
            });
        } else {
            stack.push((f, true));
            for p in o.parents.iter().rev() {
                if !at.contains_key(p) {
                    stack.push((*p, false));
                }
            }
        }
    }
    Ok(Entailment::Derived(Derivation { steps }))
}

/// Which schema to fuzz: an axiom, or a deliberately broken variant.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Schema {
    Axiom(Rule),
    /// Symmetry that forgets the condition: z ⊥_x y ⟹ y ⊥ z.
    SymmetryWithoutCondition,
    /// Separoid axiom P1–P5, with d ≤ b read as =(b; d) and joins as
    /// concatenation.
    Separoid(u8),
    /// x ⊥_z y, x ⊥_u y, z ⊥_{xy} u ⟹ x ⊥_{zu} y; valid for teams only.
    StudenyTeam,
    /// x ⊥_{zu} y, z ⊥_x u, z ⊥_y u, x ⊥ y ⟹ z ⊥ u; valid for probabilistic
    /// teams only.
    StudenyProbabilistic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Semantics {
    Possibilistic,
    Probabilistic,
}

#[derive(Clone, Debug, Default)]
pub struct FuzzReport {
    pub trials: usize,
    /// Trials in which every premise held.
    pub nonvacuous: usize,
    /// Descriptions of violating instances.
    pub counterexamples: Vec<String>,
}

/// Premises and conclusion of a random instance of the schema.
fn instance<R: Rng + ?Sized>(
    schema: Schema,
    names: &[&str],
    rng: &mut R,
) -> (Vec<AtomFact>, AtomFact) {
    let mut pick = |max: usize| -> Vec<String> {
        let k = rng.gen_range(0..=max);
        let mut v: Vec<&str> = names.to_vec();
        v.shuffle(rng);
        v.into_iter().take(k).map(String::from).collect()
    };
    let (y, x, z, u) = (pick(2), pick(2), pick(2), pick(2));
    let (y2, z2) = (pick(2), pick(1));
    let rng_coin = rng.gen_bool(0.7);
    let f = |a: &[String], b: &[String], c: &[String]| {
        AtomFact::from_parts(a.to_vec(), b.to_vec(), c.to_vec())
    };
    let cat = |a: &[String], b: &[String]| [a, b].concat();
    let one = |i: usize| vec![names[i].to_string()];
    match schema {
        Schema::SymmetryWithoutCondition => (vec![f(&z, &x, &y)], f(&y, &[], &z)),
        Schema::StudenyTeam => {
            let (x, y, z, u) = (one(0), one(1), one(2), one(3));
            (
                vec![f(&x, &z, &y), f(&x, &u, &y), f(&z, &cat(&x, &y), &u)],
                f(&x, &cat(&z, &u), &y),
            )
        }
        Schema::StudenyProbabilistic => {
            let (x, y, z, u) = (one(0), one(1), one(2), one(3));
            (
                vec![
                    f(&x, &cat(&z, &u), &y),
                    f(&z, &x, &u),
                    f(&z, &y, &u),
                    f(&x, &[], &y),
                ],
                f(&z, &[], &u),
            )
        }
        // a = y, b = z, c = x, d = u; d is often taken inside b so that d ≤ b.
        Schema::Separoid(k) => {
            let d = if rng_coin {
                y2.iter().filter(|v| z.contains(v)).cloned().collect()
            } else {
                u.clone()
            };
            let below = f(&d, &z, &d);
            match k {
                1 => (vec![f(&y, &x, &z)], f(&z, &x, &y)),
                2 => (vec![], f(&y, &y, &z)),
                3 => (vec![f(&y, &x, &z), below], f(&y, &x, &d)),
                4 => (vec![f(&y, &x, &z), below], f(&y, &cat(&x, &d), &z)),
                _ => (
                    vec![f(&y, &x, &z), f(&y, &cat(&z, &x), &u)],
                    f(&y, &x, &cat(&z, &u)),
                ),
            }
        }
        Schema::Axiom(rule) => match rule {
            Rule::Premise | Rule::Permutation => {
                let mut yp = y.clone();
                yp.reverse();
                (vec![f(&y, &x, &z)], f(&yp, &x, &z))
            }
            Rule::Constancy => (vec![f(&y, &x, &y)], f(&y, &x, &z)),
            Rule::Reflexivity => (vec![], f(&x, &x, &y)),
            Rule::Symmetry => (vec![f(&z, &x, &y)], f(&y, &x, &z)),
            Rule::Weakening => (vec![f(&cat(&y, &y2), &x, &cat(&z, &z2))], f(&y, &x, &z)),
            Rule::FixedParameter => (vec![f(&z, &x, &y)], f(&cat(&y, &x), &x, &cat(&z, &x))),
            Rule::FirstTransitivity => {
                (vec![f(&x, &z, &y), f(&u, &cat(&z, &x), &y)], f(&u, &z, &y))
            }
            Rule::SecondTransitivity => {
                (vec![f(&y, &z, &y), f(&cat(&z, &x), &y, &u)], f(&x, &z, &u))
            }
            Rule::Exchange => (
                vec![f(&x, &z, &y), f(&cat(&x, &y), &z, &u)],
                f(&x, &z, &cat(&y, &u)),
            ),
        },
    }
}

fn strs(v: &[String]) -> Vec<&str> {
    v.iter().map(String::as_str).collect()
}

/// Samples random teams and random instances of a rule; reports every
/// instance whose premises hold but whose conclusion fails.
pub fn soundness_fuzz<R: Rng + ?Sized>(
    schema: Schema,
    trials: usize,
    semantics: Semantics,
    rng: &mut R,
) -> FuzzReport {
    let names = ["a", "b", "c", "d"];
    let mut report = FuzzReport {
        trials,
        ..Default::default()
    };
    for _ in 0..trials {
        let (prem, concl) = instance(schema, &names, rng);
        let (holds, shown): (Box<dyn Fn(&AtomFact) -> bool>, String) = match semantics {
            Semantics::Possibilistic => {
                let t = random_team(rng, &names, 2, 4);
                let s = format!("{t:?}");
                (
                    Box::new(move |a| {
                        indep_atom_holds(&t, &strs(&a.y), &strs(&a.x), &strs(&a.z)).unwrap()
                    }),
                    s,
                )
            }
            Semantics::Probabilistic => {
                let t = random_prob_team(rng, &names, 2, 6, 4);
                let s = format!("{t:?}");
                (
                    Box::new(move |a| {
                        prob_indep_atom_holds(&t, &strs(&a.y), &strs(&a.x), &strs(&a.z)).unwrap()
                    }),
                    s,
                )
            }
        };
        if prem.iter().all(&holds) {
            report.nonvacuous += 1;
            if !holds(&concl) {
                let ps: Vec<String> = prem.iter().map(|p| p.to_string()).collect();
                report.counterexamples.push(format!(
                    "{} ⟹ {} fails on {shown}",
                    ps.join(", "),
                    concl
                ));
            }
        }
    }
    report
}
