//! A bounded numerical probe for probabilistic realizations with support
//! exactly a given team.
//!
//! Each independence atom y ⫫_x z contributes the identities
//! |X_xy|·|X_xz| = |X_xyz|·|X_x| over the value combinations of the team.
//! Both sides are quadratic in the weights, so a residual can be pushed to
//! zero simply by starving some rows of mass. The probe therefore scores a
//! weight vector by max|L − R| / p_min², which is invariant under scaling
//! and does not reward degenerate distributions.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{lift::probabilistic_lift, ConstructionError};
use crate::formula::{eval_possibilistic, eval_probabilistic, EvalContext, Formula, Verdict};
use crate::prob::ProbTeam;
use crate::properties::{build, check, Property, RoleSplit};
use crate::rational::{best_rational, Q};
use crate::team::{Row, Team};
use crate::value::{Role, Value};

#[derive(Clone, Debug)]
pub struct ProbeConfig {
    pub restarts: usize,
    pub seed: u64,
    /// Gradient steps per restart.
    pub iterations: usize,
    /// Normalized residual below which a point counts as a witness.
    pub tolerance: f64,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig {
            restarts: 200,
            seed: 0,
            iterations: 400,
            tolerance: 1e-9,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ProbeResult {
    pub witness: Option<ProbTeam>,
    /// Smallest normalized residual seen; infinite when a flat atom already
    /// fails on the team itself.
    pub residual: f64,
    /// The witness satisfies every identity exactly over the rationals.
    pub exact: bool,
    pub restarts: usize,
}

/// One identity: w(a)·w(b) − w(c)·w(d), each a set of row indices.
#[derive(Clone, Debug)]
struct Identity {
    a: Vec<usize>,
    b: Vec<usize>,
    c: Vec<usize>,
    d: Vec<usize>,
}

fn mass(w: &[f64], ix: &[usize]) -> f64 {
    ix.iter().map(|&i| w[i]).sum()
}

impl Identity {
    fn residual(&self, w: &[f64]) -> f64 {
        mass(w, &self.a) * mass(w, &self.b) - mass(w, &self.c) * mass(w, &self.d)
    }
}

fn identities(
    x: &Team,
    y: &[String],
    c: &[String],
    z: &[String],
) -> Result<Vec<Identity>, ConstructionError> {
    let rows: Vec<&Row> = x.rows().collect();
    let ix = |names: &[String]| -> Result<Vec<usize>, ConstructionError> {
        let n: Vec<&str> = names.iter().map(String::as_str).collect();
        Ok(x.indices(&n)?)
    };
    let (yi, ci, zi) = (ix(y)?, ix(c)?, ix(z)?);
    let pick = |r: &Row, ix: &[usize]| ix.iter().map(|&i| r[i].clone()).collect::<Vec<Value>>();
    let mut secs: BTreeMap<Row, (BTreeSet<Row>, BTreeSet<Row>)> = BTreeMap::new();
    for r in &rows {
        let e = secs.entry(pick(r, &ci)).or_default();
        e.0.insert(pick(r, &yi));
        e.1.insert(pick(r, &zi));
    }
    let mut out = Vec::new();
    for (cv, (ys, zs)) in &secs {
        let sel = |f: &dyn Fn(&Row) -> bool| -> Vec<usize> {
            (0..rows.len()).filter(|&k| f(rows[k])).collect()
        };
        let d = sel(&|r| pick(r, &ci) == *cv);
        for b in ys {
            for zv in zs {
                out.push(Identity {
                    a: sel(&|r| pick(r, &ci) == *cv && pick(r, &yi) == *b),
                    b: sel(&|r| pick(r, &ci) == *cv && pick(r, &zi) == *zv),
                    c: sel(&|r| pick(r, &ci) == *cv && pick(r, &yi) == *b && pick(r, &zi) == *zv),
                    d: d.clone(),
                });
            }
        }
    }
    Ok(out)
}

fn normalized(ids: &[Identity], w: &[f64]) -> f64 {
    let m = w.iter().cloned().fold(f64::INFINITY, f64::min);
    ids.iter().map(|k| k.residual(w).abs()).fold(0.0, f64::max) / (m * m)
}

/// Σ r² / p_min⁴ and its gradient in log-weights.
fn objective(ids: &[Identity], w: &[f64], grad: &mut [f64]) -> f64 {
    let (argmin, m) =
        w.iter().enumerate().fold(
            (0, f64::INFINITY),
            |acc, (i, &v)| if v < acc.1 { (i, v) } else { acc },
        );
    let m4 = m.powi(4);
    grad.iter_mut().for_each(|g| *g = 0.0);
    let mut sum = 0.0;
    for k in ids {
        let (ma, mb, mc, md) = (mass(w, &k.a), mass(w, &k.b), mass(w, &k.c), mass(w, &k.d));
        let r = ma * mb - mc * md;
        sum += r * r;
        let s = 2.0 * r / m4;
        for &i in &k.a {
            grad[i] += s * mb;
        }
        for &i in &k.b {
            grad[i] += s * ma;
        }
        for &i in &k.c {
            grad[i] -= s * md;
        }
        for &i in &k.d {
            grad[i] -= s * mc;
        }
    }
    grad[argmin] -= 4.0 * sum / (m4 * m);
    for (g, &wi) in grad.iter_mut().zip(w) {
        *g *= wi;
    }
    sum / m4
}

fn descend(ids: &[Identity], n: usize, seed: u64, iterations: usize) -> (f64, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
    let weights = |t: &[f64]| -> Vec<f64> {
        let top = t.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let w: Vec<f64> = t.iter().map(|v| (v - top).exp()).collect();
        let s: f64 = w.iter().sum();
        w.into_iter().map(|v| v / s).collect()
    };
    let mut grad = vec![0.0; n];
    let mut w = weights(&t);
    let mut f = objective(ids, &w, &mut grad);
    let mut best = (normalized(ids, &w), w.clone());
    let mut lr = 0.1;
    for _ in 0..iterations {
        let gn: f64 = grad.iter().map(|g| g * g).sum::<f64>();
        if gn == 0.0 || !f.is_finite() {
            break;
        }
        // Backtracking along the (scale-free) gradient direction.
        let mut accepted = false;
        for _ in 0..30 {
            let step = lr / gn.sqrt();
            let cand: Vec<f64> = t.iter().zip(&grad).map(|(a, g)| a - step * g).collect();
            let cw = weights(&cand);
            let mut cg = vec![0.0; n];
            let cf = objective(ids, &cw, &mut cg);
            if cf < f {
                t = cand;
                w = cw;
                f = cf;
                grad = cg;
                lr *= 1.5;
                accepted = true;
                break;
            }
            lr *= 0.5;
        }
        if !accepted {
            break;
        }
        let nr = normalized(ids, &w);
        if nr < best.0 {
            best = (nr, w.clone());
        }
    }
    best
}

fn conjuncts(f: Formula) -> Vec<Formula> {
    match f {
        Formula::And(ps) => ps.into_iter().flat_map(conjuncts).collect(),
        other => vec![other],
    }
}

/// Looks for a distribution with support exactly `x` satisfying the
/// probabilistic versions of `props`. LOCAL is read as PI ∧ OI. Failing to
/// find one proves nothing.
pub fn search_probabilistic_realization(
    x: &Team,
    props: &[Property],
    cfg: &ProbeConfig,
) -> Result<ProbeResult, ConstructionError> {
    let roles = RoleSplit::from_vars(x.vars())?;
    let mut atoms = Vec::new();
    for &p in props {
        let ps = if p == Property::Local {
            vec![Property::PI, Property::OI]
        } else {
            vec![p]
        };
        for q in ps {
            atoms.push(build(q, &roles)?);
        }
    }
    search_realization_of(x, &Formula::and(atoms), cfg)
}

/// The same probe for any conjunction of atoms.
pub fn search_realization_of(
    x: &Team,
    phi: &Formula,
    cfg: &ProbeConfig,
) -> Result<ProbeResult, ConstructionError> {
    let atoms = conjuncts(phi.clone());
    if let Some(a) = atoms.iter().find(|a| !a.is_atom()) {
        return Err(ConstructionError::Eval(
            crate::formula::EvalError::Unsupported(format!(
                "the probe takes conjunctions of atoms, not `{a}`"
            )),
        ));
    }
    let none = |residual| ProbeResult {
        witness: None,
        residual,
        exact: false,
        restarts: 0,
    };
    if x.is_empty() {
        return Ok(none(f64::INFINITY));
    }
    // Flat atoms only see the support, which is fixed.
    let ctx = EvalContext::default();
    let mut ids = Vec::new();
    for a in &atoms {
        match a {
            Formula::Indep { y, x: c, z } if y != z => ids.extend(identities(x, y, c, z)?),
            _ => {
                if eval_possibilistic(x, a, &ctx)? != Verdict::True {
                    return Ok(none(f64::INFINITY));
                }
            }
        }
    }
    let exact = |pt: &ProbTeam| eval_probabilistic(pt, phi, &ctx);
    let mut candidates = vec![ProbTeam::uniform_lift(x)?];
    let hidden = x.vars().iter().any(|v| v.role == Role::Hidden);
    if hidden && RoleSplit::from_vars(x.vars()).is_ok() && check(Property::ZI, x)? {
        candidates.push(probabilistic_lift(x)?);
    }
    for c in candidates {
        if exact(&c)? {
            return Ok(ProbeResult {
                witness: Some(c),
                residual: 0.0,
                exact: true,
                restarts: 0,
            });
        }
    }
    let n = x.len();
    let (residual, w) = (0..cfg.restarts)
        .into_par_iter()
        .map(|k| {
            descend(
                &ids,
                n,
                cfg.seed
                    .wrapping_mul(0x9E37_79B9_7F4A_7C15)
                    .wrapping_add(k as u64),
                cfg.iterations,
            )
        })
        .reduce(
            || (f64::INFINITY, Vec::new()),
            |a, b| if b.0 < a.0 { b } else { a },
        );
    if residual >= cfg.tolerance || w.is_empty() {
        return Ok(ProbeResult {
            witness: None,
            residual,
            exact: false,
            restarts: cfg.restarts,
        });
    }
    let raw: Vec<Q> = w.iter().map(|&p| best_rational(p, 1_000_000_000)).collect();
    let pt = ProbTeam::normalized(x.vars().to_vec(), x.rows().cloned().zip(raw))?;
    let ok = exact(&pt)?;
    Ok(ProbeResult {
        witness: Some(pt),
        residual,
        exact: ok,
        restarts: cfg.restarts,
    })
}
