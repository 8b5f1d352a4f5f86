//! The EPR, GHZ, Hardy and KS counterexample teams, recognizers for their
//! classes, and brute-force oracles for the corresponding no-go results.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rayon::prelude::*;

use crate::formula::{eval_possibilistic, EvalContext, EvalError, Formula, Verdict};
use crate::properties::{build, check, Property, PropertyError, RoleSplit};
use crate::team::{Row, Team, TeamError};
use crate::value::{Role, Value, Variable};

#[derive(Debug, thiserror::Error)]
pub enum NogoError {
    #[error("expected {want} measurement/outcome pairs, found {got}")]
    Arity { want: usize, got: usize },
    #[error("{size} instructions exceed the cap of {cap}")]
    Cap { size: u128, cap: u128 },
    #[error(transparent)]
    Property(#[from] PropertyError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Team(#[from] TeamError),
}

fn empirical(n: usize) -> Vec<String> {
    (0..n)
        .map(|i| format!("x{i}"))
        .chain((0..n).map(|i| format!("y{i}")))
        .collect()
}

fn team(n: usize, rows: &[&[i64]]) -> Team {
    let names = empirical(n);
    let names: Vec<&str> = names.iter().map(String::as_str).collect();
    Team::ints(&names, rows).expect("fixed table")
}

pub fn epr_team() -> Team {
    team(2, &[&[0, 1, 0, 1], &[0, 1, 1, 0]])
}

pub fn ghz_team_minimal() -> Team {
    team(
        3,
        &[
            &[0, 0, 0, 0, 0, 1],
            &[0, 0, 0, 0, 1, 0],
            &[0, 0, 0, 1, 0, 0],
            &[0, 0, 0, 1, 1, 1],
            &[0, 1, 1, 0, 0, 0],
            &[0, 1, 1, 0, 1, 1],
            &[1, 0, 1, 1, 0, 1],
            &[1, 1, 0, 1, 1, 0],
        ],
    )
}

pub fn hardy_team_minimal() -> Team {
    team(
        2,
        &[&[0, 0, 0, 0], &[0, 1, 1, 1], &[1, 0, 1, 1], &[1, 1, 0, 0]],
    )
}

/// No-signalling, yet not the collapse of any probabilistic team with
/// probabilistic no-signalling.
pub fn ns_counterexample_team() -> Team {
    team(
        2,
        &[
            &[0, 0, 0, 0],
            &[0, 0, 0, 1],
            &[0, 0, 1, 1],
            &[0, 1, 0, 0],
            &[0, 1, 1, 0],
            &[0, 1, 1, 1],
            &[1, 0, 0, 0],
            &[1, 0, 1, 0],
            &[1, 0, 1, 1],
            &[1, 1, 0, 0],
            &[1, 1, 0, 1],
            &[1, 1, 1, 1],
        ],
    )
}

/// Measurement and outcome columns, checked against the expected site count.
fn sites(x: &Team, n: usize) -> Result<(Vec<usize>, Vec<usize>), NogoError> {
    let r = RoleSplit::from_vars(x.vars())?;
    if r.n() != n {
        return Err(NogoError::Arity {
            want: n,
            got: r.n(),
        });
    }
    let ix = |v: &[String]| x.indices(&v.iter().map(String::as_str).collect::<Vec<_>>());
    Ok((ix(&r.x)?, ix(&r.y)?))
}

fn bits(r: &[Value], ix: &[usize]) -> Option<Vec<u8>> {
    ix.iter()
        .map(|&i| match r[i] {
            Value::Int(0) => Some(0),
            Value::Int(1) => Some(1),
            _ => None,
        })
        .collect()
}

fn binary_range(x: &Team) -> bool {
    x.range() == [Value::Int(0), Value::Int(1)].into_iter().collect()
}

/// Binary (x, y) pairs of an empirical team, or `None` if some value is not a bit.
fn bit_rows(x: &Team, xs: &[usize], ys: &[usize]) -> Option<BTreeSet<(Vec<u8>, Vec<u8>)>> {
    x.rows()
        .map(|r| Some((bits(r, xs)?, bits(r, ys)?)))
        .collect()
}

/// The sets P, Q and R of the GHZ construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GhzSpec {
    pub p: BTreeSet<[u8; 3]>,
    pub q: BTreeSet<[u8; 3]>,
    pub r: BTreeSet<[u8; 3]>,
}

impl GhzSpec {
    pub fn standard() -> GhzSpec {
        let p: BTreeSet<[u8; 3]> = [[0, 1, 1], [1, 0, 1], [1, 1, 0]].into_iter().collect();
        let mut q = p.clone();
        q.insert([0, 0, 0]);
        let r = [[0, 0, 1], [0, 1, 0], [1, 0, 0], [1, 1, 1]]
            .into_iter()
            .collect();
        GhzSpec { p, q, r }
    }

    /// Every element of R has odd bit sum, every element of Q even.
    pub fn parity_split(&self) -> bool {
        let sum = |t: &[u8; 3]| t.iter().map(|&b| b as u32).sum::<u32>();
        self.r.iter().all(|t| sum(t) % 2 == 1) && self.q.iter().all(|t| sum(t) % 2 == 0)
    }
}

fn arr3(v: &[u8]) -> [u8; 3] {
    [v[0], v[1], v[2]]
}

pub fn is_ghz_team(x: &Team) -> Result<bool, NogoError> {
    let (xs, ys) = sites(x, 3)?;
    if !binary_range(x) {
        return Ok(false);
    }
    let Some(rows) = bit_rows(x, &xs, &ys) else {
        return Ok(false);
    };
    let spec = GhzSpec::standard();
    let outcomes_on_p: BTreeSet<[u8; 3]> = rows
        .iter()
        .filter(|(a, _)| spec.p.contains(&arr3(a)))
        .map(|(_, b)| arr3(b))
        .collect();
    let settings_with_q: BTreeSet<[u8; 3]> = rows
        .iter()
        .filter(|(_, b)| spec.q.contains(&arr3(b)))
        .map(|(a, _)| arr3(a))
        .collect();
    let outcomes_at_zero: BTreeSet<[u8; 3]> = rows
        .iter()
        .filter(|(a, _)| a.iter().all(|&v| v == 0))
        .map(|(_, b)| arr3(b))
        .collect();
    Ok(outcomes_on_p == spec.q && spec.p.is_subset(&settings_with_q) && outcomes_at_zero == spec.r)
}

pub fn is_hardy_team(x: &Team) -> Result<bool, NogoError> {
    let (xs, ys) = sites(x, 2)?;
    if !binary_range(x) {
        return Ok(false);
    }
    let Some(rows) = bit_rows(x, &xs, &ys) else {
        return Ok(false);
    };
    let has = |a: [u8; 2], b: [u8; 2]| rows.contains(&(a.to_vec(), b.to_vec()));
    let universal = [[0, 0], [0, 1], [1, 0], [1, 1]]
        .iter()
        .all(|a| rows.iter().any(|(s, _)| s == a));
    Ok(has([0, 0], [0, 0])
        && !has([0, 1], [0, 0])
        && !has([1, 0], [0, 0])
        && !has([1, 1], [1, 1])
        && universal)
}

/// Deterministic per-site responses: `table[i][a]` is the outcome of site
/// i under setting a. With binary settings this is the two-row Mermin
/// instruction b⁰ / b¹.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct MerminInstruction {
    pub table: Vec<BTreeMap<Value, Value>>,
}

impl MerminInstruction {
    pub fn respond(&self, settings: &[Value]) -> Option<Row> {
        settings
            .iter()
            .zip(&self.table)
            .map(|(a, t)| t.get(a).cloned())
            .collect()
    }

    /// The binary instruction with rows b⁰ and b¹.
    pub fn binary(b0: &[u8], b1: &[u8]) -> MerminInstruction {
        let v = |b: u8| Value::Int(b as i64);
        MerminInstruction {
            table: b0
                .iter()
                .zip(b1)
                .map(|(&p, &q)| [(v(0), v(p)), (v(1), v(q))].into_iter().collect())
                .collect(),
        }
    }

    /// Outputs under setting `a` at every site, if every site has it.
    pub fn row_for(&self, a: &Value) -> Option<Row> {
        self.table.iter().map(|t| t.get(a).cloned()).collect()
    }
}

impl fmt::Display for MerminInstruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let settings: BTreeSet<&Value> = self.table.iter().flat_map(|t| t.keys()).collect();
        let mut first = true;
        for a in settings {
            if !first {
                f.write_str(" / ")?;
            }
            first = false;
            for t in &self.table {
                match t.get(a) {
                    Some(b) => write!(f, "{b}")?,
                    None => f.write_str("-")?,
                }
            }
        }
        Ok(())
    }
}

/// Result of the local-model search.
#[derive(Clone, Debug)]
pub struct LocalModelReport {
    /// Instructions enumerated.
    pub searched: u128,
    /// Instructions whose every response to an occurring setting tuple is a
    /// row of the team.
    pub consistent: Vec<MerminInstruction>,
    /// Rows no consistent instruction produces. Empty iff a model exists.
    pub uncovered: Vec<Row>,
    /// A covering choice of instructions, one per hidden value, when a model exists.
    pub model: Option<Vec<MerminInstruction>>,
}

impl LocalModelReport {
    pub fn no_model(&self) -> bool {
        self.model.is_none()
    }
}

pub const DEFAULT_INSTRUCTION_CAP: u128 = 1 << 24;

/// Decides whether an empirical team has a z-independent, strongly
/// deterministic realization (equivalently one with z-independence and
/// locality). Such a realization is a set of deterministic instructions,
/// each applied to every occurring setting tuple; it reproduces the team
/// iff every instruction stays inside the team and together they cover it.
/// So the team has a model iff the consistent instructions cover it.
pub fn verify_no_local_model(x: &Team, cap: u128) -> Result<LocalModelReport, NogoError> {
    let r = RoleSplit::from_vars(x.vars())?;
    if r.n() == 0 || !r.z.is_empty() {
        return Err(PropertyError::MissingRole("measurement/outcome (and no hidden)").into());
    }
    let (xs, ys) = sites(x, r.n())?;
    let n = r.n();
    let settings: BTreeSet<Row> = x
        .rows()
        .map(|row| xs.iter().map(|&i| row[i].clone()).collect())
        .collect();
    // Per site: settings used and outcomes seen.
    let per_site: Vec<(Vec<Value>, Vec<Value>)> = (0..n)
        .map(|i| {
            let a: BTreeSet<Value> = x.rows().map(|row| row[xs[i]].clone()).collect();
            let b: BTreeSet<Value> = x.rows().map(|row| row[ys[i]].clone()).collect();
            (a.into_iter().collect(), b.into_iter().collect())
        })
        .collect();
    let mut size: u128 = 1;
    for (a, b) in &per_site {
        size = size.saturating_mul((b.len() as u128).saturating_pow(a.len() as u32));
    }
    if size > cap {
        return Err(NogoError::Cap { size, cap });
    }
    // Digit k of an index picks site/setting k's outcome.
    let slots: Vec<(usize, &Value, &[Value])> = per_site
        .iter()
        .enumerate()
        .flat_map(|(i, (a, b))| a.iter().map(move |v| (i, v, b.as_slice())))
        .collect();
    let decode = |mut k: u128| -> MerminInstruction {
        let mut table = vec![BTreeMap::new(); n];
        for &(i, a, b) in &slots {
            let m = b.len() as u128;
            table[i].insert(a.clone(), b[(k % m) as usize].clone());
            k /= m;
        }
        MerminInstruction { table }
    };
    let produce = |ins: &MerminInstruction| -> Vec<Row> {
        settings
            .iter()
            .map(|a| {
                let b = ins
                    .respond(a)
                    .expect("instruction covers every used setting");
                let mut row = vec![Value::Int(0); x.vars().len()];
                for i in 0..n {
                    row[xs[i]] = a[i].clone();
                    row[ys[i]] = b[i].clone();
                }
                row
            })
            .collect()
    };
    let consistent: Vec<MerminInstruction> = (0..size)
        .into_par_iter()
        .filter_map(|k| {
            let ins = decode(k);
            produce(&ins)
                .iter()
                .all(|row| x.contains(row))
                .then_some(ins)
        })
        .collect();
    let mut uncovered: BTreeSet<Row> = x.row_set().clone();
    let mut model = Vec::new();
    // Greedy cover, for a small certificate.
    let outputs: Vec<BTreeSet<Row>> = consistent
        .iter()
        .map(|c| produce(c).into_iter().collect())
        .collect();
    while !uncovered.is_empty() {
        let best = (0..consistent.len())
            .max_by_key(|&k| (outputs[k].intersection(&uncovered).count(), usize::MAX - k));
        match best {
            Some(k) if outputs[k].intersection(&uncovered).next().is_some() => {
                for row in &outputs[k] {
                    uncovered.remove(row);
                }
                model.push(consistent[k].clone());
            }
            _ => break,
        }
    }
    let model = uncovered.is_empty().then_some(model);
    Ok(LocalModelReport {
        searched: size,
        consistent,
        uncovered: uncovered.into_iter().collect(),
        model,
    })
}

/// The hidden-variable team of a model: hidden value k runs instruction k on
/// every setting tuple of `x`.
pub fn local_model_team(x: &Team, model: &[MerminInstruction]) -> Result<Team, NogoError> {
    let r = RoleSplit::from_vars(x.vars())?;
    let (xs, ys) = sites(x, r.n())?;
    let settings: BTreeSet<Row> = x
        .rows()
        .map(|row| xs.iter().map(|&i| row[i].clone()).collect())
        .collect();
    let mut vars = x.vars().to_vec();
    vars.push(Variable::new("z", Role::Hidden));
    let mut rows = Vec::new();
    for (k, ins) in model.iter().enumerate() {
        for a in &settings {
            let Some(b) = ins.respond(a) else { continue };
            let mut row = vec![Value::Int(0); vars.len()];
            for i in 0..r.n() {
                row[xs[i]] = a[i].clone();
                row[ys[i]] = b[i].clone();
            }
            row[vars.len() - 1] = Value::Int(k as i64);
            rows.push(row);
        }
    }
    Ok(Team::from_rows(vars, rows)?)
}

/// ∃̃z (z ⊥ x ∧ PI ∧ OI) for `n` sites and one hidden variable.
pub fn local_realization_formula(n: usize) -> Result<Formula, NogoError> {
    realization_formula(n, &[Property::ZI, Property::PI, Property::OI])
}

/// ∃̃z (=(z) ∧ OI).
pub fn epr_formula(n: usize) -> Result<Formula, NogoError> {
    realization_formula(n, &[Property::SV, Property::OI])
}

/// ∃̃z (z ⊥ x ∧ PI).
pub fn ks_formula(n: usize) -> Result<Formula, NogoError> {
    realization_formula(n, &[Property::ZI, Property::PI])
}

fn realization_formula(n: usize, props: &[Property]) -> Result<Formula, NogoError> {
    let xs: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
    let ys: Vec<String> = (0..n).map(|i| format!("y{i}")).collect();
    let r = RoleSplit::new(
        &xs.iter().map(String::as_str).collect::<Vec<_>>(),
        &ys.iter().map(String::as_str).collect::<Vec<_>>(),
        &["z"],
    )?;
    let parts = props
        .iter()
        .map(|&p| build(p, &r))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Formula::ExistsNew(
        "z".into(),
        Box::new(Formula::and(parts)),
    ))
}

/// Single-valuedness forces one hidden value, so the only candidate
/// realization is the team with a constant hidden column; EPR fails iff that
/// candidate violates outcome independence.
pub fn verify_epr(x: &Team) -> Result<bool, NogoError> {
    let y = x.duplicate(Variable::new("z", Role::Hidden), &[Value::Int(0)])?;
    Ok(!check(Property::OI, &y)?)
}

/// Same question through the evaluator, with k_max = 1.
pub fn verify_epr_by_formula(x: &Team) -> Result<Verdict, NogoError> {
    let r = RoleSplit::from_vars(x.vars())?;
    Ok(eval_possibilistic(
        x,
        &epr_formula(r.n())?,
        &EvalContext::default().with_k_max(1),
    )?)
}

/// The tuples P and unit vectors Q of the Kochen–Specker construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KsSpec {
    pub p: Vec<Vec<u32>>,
    pub q: Vec<Vec<u8>>,
}

impl KsSpec {
    pub fn new(p: Vec<Vec<u32>>) -> KsSpec {
        let w = p.first().map_or(0, Vec::len);
        let q = (0..w)
            .map(|i| (0..w).map(|j| (i == j) as u8).collect())
            .collect();
        KsSpec { p, q }
    }

    pub fn standard() -> KsSpec {
        let spec = KsSpec::new(vec![
            vec![0, 1, 2, 3],
            vec![0, 4, 5, 6],
            vec![7, 8, 2, 9],
            vec![7, 10, 6, 11],
            vec![1, 4, 12, 13],
            vec![8, 10, 13, 14],
            vec![15, 16, 3, 9],
            vec![15, 17, 5, 11],
            vec![16, 17, 12, 14],
        ]);
        assert!(
            spec.double_cover(),
            "every element lies in exactly two tuples"
        );
        spec
    }

    /// Every element occurs in exactly two tuples.
    pub fn double_cover(&self) -> bool {
        let mut count: BTreeMap<u32, usize> = BTreeMap::new();
        for t in &self.p {
            for &e in t {
                *count.entry(e).or_default() += 1;
            }
        }
        count.values().all(|&c| c == 2)
    }

    /// The counting argument: with a double cover, the number of tuples
    /// holding a 1 under a non-contextual assignment is even, yet each tuple
    /// holds exactly one, so |P| odd rules such assignments out.
    pub fn parity_obstruction(&self) -> bool {
        self.double_cover() && self.p.len() % 2 == 1
    }
}

/// f(a) = q[choice[k]] for the k-th tuple a; non-contextual when each
/// element gets the same value in every tuple it occurs in.
fn non_contextual(spec: &KsSpec, choice: &[usize]) -> bool {
    let mut seen: BTreeMap<u32, u8> = BTreeMap::new();
    for (t, &c) in spec.p.iter().zip(choice) {
        for (&e, &b) in t.iter().zip(&spec.q[c]) {
            if *seen.entry(e).or_insert(b) != b {
                return false;
            }
        }
    }
    true
}

/// Exhausts all |Q|^|P| maps f: P → Q; true iff none is non-contextual.
pub fn verify_no_noncontextual(spec: &KsSpec) -> bool {
    let m = spec.q.len();
    let k = spec.p.len();
    if m == 0 {
        return k > 0;
    }
    let total = (m as u64).pow(k as u32);
    (0..total).into_par_iter().all(|mut code| {
        let choice: Vec<usize> = (0..k)
            .map(|_| {
                let c = (code % m as u64) as usize;
                code /= m as u64;
                c
            })
            .collect();
        !non_contextual(spec, &choice)
    })
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for at in 0..=p.len() {
            let mut q = p.clone();
            q.insert(at, n - 1);
            out.push(q);
        }
    }
    out
}

/// π.a with (π.a)_i = a_{π⁻¹(i)}, i.e. a_j moves to position π(j).
fn act<T: Clone>(pi: &[usize], a: &[T]) -> Vec<T> {
    let mut out = a.to_vec();
    for (j, &pj) in pi.iter().enumerate() {
        out[pj] = a[j].clone();
    }
    out
}

/// The smallest equivariant team with f(a) = (1,0,0,0) for every a ∈ P.
pub fn ks_team_canonical() -> Team {
    let spec = KsSpec::standard();
    let f = vec![0usize; spec.p.len()];
    ks_team_for(&spec, &f)
}

/// The orbit under S_n of the rows (a, q[f[k]]) for the k-th tuple a.
pub fn ks_team_for(spec: &KsSpec, f: &[usize]) -> Team {
    let n = spec.q.len();
    let names = empirical(n);
    let names: Vec<&str> = names.iter().map(String::as_str).collect();
    let perms = permutations(n);
    let mut rows: Vec<Vec<i64>> = Vec::new();
    for (a, &c) in spec.p.iter().zip(f) {
        let b: Vec<i64> = spec.q[c].iter().map(|&v| v as i64).collect();
        let a: Vec<i64> = a.iter().map(|&v| v as i64).collect();
        for pi in &perms {
            rows.push([act(pi, &a), act(pi, &b)].concat());
        }
    }
    Team::ints(&names, &rows).expect("fixed arity")
}

/// Condition (i) for the given spec (the map f is read off the team) and
/// equivariance. Returns the map as indices into Q when both hold.
pub fn is_ks_team(x: &Team, spec: &KsSpec) -> Result<Option<Vec<usize>>, NogoError> {
    let n = spec.q.len();
    let (xs, ys) = sites(x, n)?;
    let mut rows: BTreeSet<(Vec<i64>, Vec<i64>)> = BTreeSet::new();
    for r in x.rows() {
        let ints = |ix: &[usize]| {
            ix.iter()
                .map(|&i| r[i].as_int())
                .collect::<Option<Vec<i64>>>()
        };
        let (Some(a), Some(b)) = (ints(&xs), ints(&ys)) else {
            return Ok(None);
        };
        if a.iter().any(|v| !(0..18).contains(v)) || b.iter().any(|v| !(0..2).contains(v)) {
            return Ok(None);
        }
        rows.insert((a, b));
    }
    let mut f = Vec::new();
    for a in &spec.p {
        let a: Vec<i64> = a.iter().map(|&v| v as i64).collect();
        let outs: Vec<&Vec<i64>> = rows
            .iter()
            .filter(|(s, _)| *s == a)
            .map(|(_, b)| b)
            .collect();
        let [b] = outs.as_slice() else {
            return Ok(None);
        };
        let Some(c) = spec
            .q
            .iter()
            .position(|q| q.iter().map(|&v| v as i64).eq(b.iter().copied()))
        else {
            return Ok(None);
        };
        f.push(c);
    }
    let perms = permutations(n);
    let equivariant = rows.iter().all(|(a, b)| {
        perms
            .iter()
            .all(|pi| rows.contains(&(act(pi, a), act(pi, b))))
    });
    Ok(equivariant.then_some(f))
}

/// Checks the GHZ contradiction directly: every binary instruction whose
/// responses on P stay in Q has a top row outside R.
pub fn ghz_parity_certificate() -> bool {
    let spec = GhzSpec::standard();
    let mut ok = spec.parity_split();
    for code in 0u32..64 {
        let b0: Vec<u8> = (0..3).map(|i| (code >> i & 1) as u8).collect();
        let b1: Vec<u8> = (0..3).map(|i| (code >> (i + 3) & 1) as u8).collect();
        let on_p = spec.p.iter().all(|a| {
            let out: Vec<u8> = (0..3)
                .map(|i| if a[i] == 0 { b0[i] } else { b1[i] })
                .collect();
            spec.q.contains(&arr3(&out))
        });
        if on_p {
            ok &= !spec.r.contains(&arr3(&b0));
        }
    }
    ok
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::team::realizes;

    #[test]
    fn tables() {
        assert_eq!(epr_team().len(), 2);
        assert_eq!(ghz_team_minimal().len(), 8);
        let ns = ns_counterexample_team();
        assert_eq!(ns.len(), 12);
        let ints: Vec<Vec<i64>> = ns
            .rows()
            .map(|r| r.iter().map(|v| v.as_int().unwrap()).collect())
            .collect();
        assert_eq!(ints[3], vec![0, 1, 0, 0]);
        assert!(check(Property::NS, &ns).unwrap());
    }

    #[test]
    fn recognizers() {
        assert!(is_ghz_team(&ghz_team_minimal()).unwrap());
        assert!(is_hardy_team(&hardy_team_minimal()).unwrap());
        let mut h = hardy_team_minimal();
        h.insert([0, 1, 0, 0].iter().map(|&v| Value::Int(v)).collect())
            .unwrap();
        assert!(!is_hardy_team(&h).unwrap());
        assert!(matches!(
            is_ghz_team(&epr_team()),
            Err(NogoError::Arity { want: 3, got: 2 })
        ));
    }

    #[test]
    fn ghz_and_hardy_have_no_local_model() {
        let g = verify_no_local_model(&ghz_team_minimal(), DEFAULT_INSTRUCTION_CAP).unwrap();
        assert_eq!(g.searched, 64);
        assert!(g.no_model());
        let h = verify_no_local_model(&hardy_team_minimal(), DEFAULT_INSTRUCTION_CAP).unwrap();
        assert_eq!(h.searched, 16);
        assert!(h.no_model());
        assert!(ghz_parity_certificate());
    }

    #[test]
    fn full_team_has_a_model_that_checks_out() {
        let rows: Vec<Vec<i64>> = (0..16)
            .map(|k| (0..4).map(|i| (k >> i) & 1).collect())
            .collect();
        let full = Team::ints(&["x0", "x1", "y0", "y1"], &rows).unwrap();
        let rep = verify_no_local_model(&full, DEFAULT_INSTRUCTION_CAP).unwrap();
        let model = rep.model.expect("trivial model");
        let y = local_model_team(&full, &model).unwrap();
        assert!(realizes(&y, &full).unwrap());
        assert!(check(Property::ZI, &y).unwrap());
        assert!(check(Property::SD, &y).unwrap());
    }

    #[test]
    fn epr_two_ways() {
        assert!(verify_epr(&epr_team()).unwrap());
        assert_eq!(verify_epr_by_formula(&epr_team()).unwrap(), Verdict::False);
    }

    #[test]
    fn kochen_specker() {
        let spec = KsSpec::standard();
        assert!(verify_no_noncontextual(&spec));
        assert!(spec.parity_obstruction());
        let disjoint = KsSpec::new(vec![vec![0, 1, 2, 3], vec![4, 5, 6, 7]]);
        assert!(!verify_no_noncontextual(&disjoint));
        assert!(!verify_no_noncontextual(&KsSpec::new(vec![vec![
            0, 1, 2, 3
        ]])));
    }

    #[test]
    fn canonical_ks_team() {
        let x = ks_team_canonical();
        assert_eq!(x.len(), 9 * 24);
        assert_eq!(
            is_ks_team(&x, &KsSpec::standard()).unwrap(),
            Some(vec![0; 9])
        );
        assert!(!check(Property::NS, &x).unwrap());
        let mut broken = x.clone();
        broken
            .insert(
                [1, 0, 2, 3, 1, 0, 0, 0]
                    .iter()
                    .map(|&v| Value::Int(v))
                    .collect(),
            )
            .unwrap();
        assert_eq!(is_ks_team(&broken, &KsSpec::standard()).unwrap(), None);
    }

    #[test]
    fn instruction_display() {
        assert_eq!(
            MerminInstruction::binary(&[0, 0, 0], &[1, 1, 1]).to_string(),
            "000 / 111"
        );
    }
}
