//! Random teams for property tests and fuzzing.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::constructions::hidden_names;
use crate::prob::ProbTeam;
use crate::rational::{q, Q};
use crate::team::{Row, Team};
use crate::value::{vars, Value};

fn names_for(n: usize, l: usize) -> Vec<String> {
    let mut v: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
    v.extend((0..n).map(|i| format!("y{i}")));
    v.extend(hidden_names(l));
    v
}

fn refs(v: &[String]) -> Vec<&str> {
    v.iter().map(String::as_str).collect()
}

fn row<R: Rng + ?Sized>(rng: &mut R, width: usize, dom: i64) -> Row {
    (0..width)
        .map(|_| Value::Int(rng.gen_range(0..dom)))
        .collect()
}

/// Between 1 and `max_rows` rows (fewer after deduplication) over `0..dom`.
pub fn random_team<R: Rng + ?Sized>(
    rng: &mut R,
    names: &[&str],
    dom: i64,
    max_rows: usize,
) -> Team {
    let k = rng.gen_range(1..=max_rows.max(1));
    let rows: Vec<Row> = (0..k).map(|_| row(rng, names.len(), dom)).collect();
    Team::from_rows(vars(names), rows).expect("well-formed")
}

/// Random support with integer weights 1..=max_weight, normalized.
pub fn random_prob_team<R: Rng + ?Sized>(
    rng: &mut R,
    names: &[&str],
    dom: i64,
    max_rows: usize,
    max_weight: i64,
) -> ProbTeam {
    let k = rng.gen_range(1..=max_rows.max(1));
    let pairs: Vec<(Row, Q)> = (0..k)
        .map(|_| {
            (
                row(rng, names.len(), dom),
                Q::from_integer(rng.gen_range(1..=max_weight).into()),
            )
        })
        .collect();
    ProbTeam::normalized(vars(names), pairs).expect("positive mass")
}

/// Team over x0.., y0.. with `n` sites.
pub fn random_empirical_team<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    dom: i64,
    max_rows: usize,
) -> Team {
    random_team(rng, &refs(&names_for(n, 0)), dom, max_rows)
}

/// Team over x0.., y0.. and `l` hidden variables.
pub fn random_hidden_team<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    l: usize,
    dom: i64,
    max_rows: usize,
) -> Team {
    random_team(rng, &refs(&names_for(n, l)), dom, max_rows)
}

fn nonempty_subset<R: Rng + ?Sized, T: Clone>(rng: &mut R, items: &[T]) -> Vec<T> {
    loop {
        let s: Vec<T> = items
            .iter()
            .filter(|_| rng.gen_bool(0.5))
            .cloned()
            .collect();
        if !s.is_empty() {
            return s;
        }
    }
}

fn all_tuples(width: usize, dom: i64) -> Vec<Row> {
    let mut out = vec![vec![]];
    for _ in 0..width {
        out = out
            .into_iter()
            .flat_map(|r: Row| {
                (0..dom).map(move |v| {
                    let mut r = r.clone();
                    r.push(Value::Int(v));
                    r
                })
            })
            .collect();
    }
    out
}

/// A hidden-variable team with z ⊥ x: the (x, z) part is a product, and
/// every (x, z) pair gets one or two random outcome tuples.
pub fn random_zi_team<R: Rng + ?Sized>(rng: &mut R, n: usize, l: usize, dom: i64) -> Team {
    let xs = nonempty_subset(rng, &all_tuples(n, dom));
    let zs = nonempty_subset(rng, &all_tuples(l, dom));
    let mut rows = Vec::new();
    for a in &xs {
        for c in &zs {
            for _ in 0..rng.gen_range(1..=2) {
                let b = row(rng, n, dom);
                rows.push([a.clone(), b, c.clone()].concat());
            }
        }
    }
    Team::from_rows(vars(&refs(&names_for(n, l))), rows).expect("well-formed")
}

/// A team built from instruction sets: per-site measurement ranges, hidden
/// values independent of them, and for every hidden value and site a set of
/// allowed outcomes per setting. Satisfies ML, zI and LOCAL by construction.
pub fn random_local_team<R: Rng + ?Sized>(rng: &mut R, n: usize, l: usize, dom: i64) -> Team {
    let values: Vec<i64> = (0..dom).collect();
    let ranges: Vec<Vec<i64>> = (0..n).map(|_| nonempty_subset(rng, &values)).collect();
    let zs = nonempty_subset(rng, &all_tuples(l, dom));
    let mut rows = Vec::new();
    for c in &zs {
        // instr[i][a] = allowed outcomes of site i under setting a
        let instr: Vec<BTreeMap<i64, Vec<i64>>> = ranges
            .iter()
            .map(|r| {
                r.iter()
                    .map(|&a| (a, nonempty_subset(rng, &values)))
                    .collect()
            })
            .collect();
        let mut partial: Vec<(Row, Row)> = vec![(vec![], vec![])];
        for i in 0..n {
            let mut next = Vec::new();
            for (xa, yb) in &partial {
                for (&a, outs) in &instr[i] {
                    for &b in outs {
                        let mut xa = xa.clone();
                        let mut yb = yb.clone();
                        xa.push(Value::Int(a));
                        yb.push(Value::Int(b));
                        next.push((xa, yb));
                    }
                }
            }
            partial = next;
        }
        rows.extend(
            partial
                .into_iter()
                .map(|(xa, yb)| [xa, yb, c.clone()].concat()),
        );
    }
    Team::from_rows(vars(&refs(&names_for(n, l))), rows).expect("well-formed")
}

/// Positive integer weight; callers normalize.
fn w<R: Rng + ?Sized>(rng: &mut R, max_weight: i64) -> Q {
    Q::from_integer(rng.gen_range(1..=max_weight).into())
}

/// A probabilistic hidden-variable team from a structural model: z drawn
/// first, the settings given z, then each outcome from a kernel that sees
/// its own setting and z only (`local`), or the whole setting tuple.
pub fn random_structural_team<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    dom: i64,
    local: bool,
) -> ProbTeam {
    let max_weight = 4;
    let settings = all_tuples(n, dom);
    let outcomes = all_tuples(1, dom);
    let zs: Vec<i64> = (0..dom).collect();
    let pz: Vec<Q> = zs.iter().map(|_| w(rng, max_weight)).collect();
    let mut pairs = Vec::new();
    // kernels[(site, key)] = weights over outcome values
    let mut kernels: BTreeMap<(usize, Row), Vec<Q>> = BTreeMap::new();
    for (zi, &c) in zs.iter().enumerate() {
        let px: Vec<Q> = settings.iter().map(|_| w(rng, max_weight)).collect();
        for (xi, a) in settings.iter().enumerate() {
            let mut partial: Vec<(Row, Q)> = vec![(vec![], q(1, 1))];
            for i in 0..n {
                let key: Row = if local {
                    vec![a[i].clone(), Value::Int(c)]
                } else {
                    [a.clone(), vec![Value::Int(c)]].concat()
                };
                let k = kernels
                    .entry((i, key))
                    .or_insert_with(|| {
                        outcomes
                            .iter()
                            .map(|_| Q::from_integer(rng.gen_range(0..=2).into()))
                            .collect()
                    })
                    .clone();
                let total: Q = k.iter().sum();
                let k: Vec<Q> = if total == q(0, 1) {
                    vec![q(1, 1); k.len()]
                } else {
                    k
                };
                let total: Q = k.iter().sum();
                let mut next = Vec::new();
                for (b, p) in &partial {
                    for (o, kw) in outcomes.iter().zip(&k) {
                        if *kw != q(0, 1) {
                            let mut b = b.clone();
                            b.push(o[0].clone());
                            next.push((b, p * kw / &total));
                        }
                    }
                }
                partial = next;
            }
            for (b, p) in partial {
                pairs.push((
                    [a.clone(), b, vec![Value::Int(c)]].concat(),
                    p * &pz[zi] * &px[xi],
                ));
            }
        }
    }
    ProbTeam::normalized(vars(&refs(&names_for(n, 1))), pairs).expect("positive mass")
}

/// Shuffled copy of the rows of a team, for order-independence checks.
pub fn shuffled_rows<R: Rng + ?Sized>(rng: &mut R, t: &Team) -> Vec<Row> {
    let mut rows: Vec<Row> = t.rows().cloned().collect();
    rows.shuffle(rng);
    rows
}
