use std::collections::{BTreeMap, BTreeSet};

use super::{cols, pick, ConstructionError};
use crate::prob::ProbTeam;
use crate::properties::{check, Property, RoleSplit};
use crate::rational::{to_f64, Q};
use crate::team::{Row, Team};
use crate::value::Value;

/// The counts behind the lift: |Γ|, |M| and |O_{a⃗,γ⃗}|.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftCounts {
    pub m_h: usize,
    pub m_m: usize,
    /// Keyed by a⃗ followed by γ⃗.
    pub m_o: BTreeMap<Row, usize>,
}

pub fn lift_counts(x: &Team) -> Result<LiftCounts, ConstructionError> {
    let r = RoleSplit::from_vars(x.vars())?;
    let (xi, yi, zi) = (cols(x, &r.x)?, cols(x, &r.y)?, cols(x, &r.z)?);
    let gammas: BTreeSet<Row> = x.rows().map(|s| pick(s, &zi)).collect();
    let ms: BTreeSet<Row> = x.rows().map(|s| pick(s, &xi)).collect();
    let mut outs: BTreeMap<Row, BTreeSet<Row>> = BTreeMap::new();
    for s in x.rows() {
        let key: Row = [pick(s, &xi), pick(s, &zi)].concat();
        outs.entry(key).or_default().insert(pick(s, &yi));
    }
    Ok(LiftCounts {
        m_h: gammas.len(),
        m_m: ms.len(),
        m_o: outs.into_iter().map(|(k, v)| (k, v.len())).collect(),
    })
}

/// Weight 1/(m_h·m_m·m_o(a⃗,γ⃗)) on every row of `x`. Needs z-independence,
/// which makes every (a⃗, γ⃗) section nonempty.
pub fn probabilistic_lift(x: &Team) -> Result<ProbTeam, ConstructionError> {
    if !check(Property::ZI, x)? {
        return Err(ConstructionError::Precondition("z-independence"));
    }
    let r = RoleSplit::from_vars(x.vars())?;
    let (xi, zi) = (cols(x, &r.x)?, cols(x, &r.z)?);
    let c = lift_counts(x)?;
    let pairs = x.rows().map(|s| {
        let key: Row = [pick(s, &xi), pick(s, &zi)].concat();
        let d = c.m_h * c.m_m * c.m_o[&key];
        (s.clone(), Q::new(1.into(), (d as i64).into()))
    });
    Ok(ProbTeam::from_pairs(x.vars().to_vec(), pairs)?)
}

/// −Σ p log₂ p over the support.
pub fn entropy<'a>(p: impl IntoIterator<Item = &'a Q>) -> f64 {
    p.into_iter()
        .map(to_f64)
        .filter(|&w| w > 0.0)
        .map(|w| -w * w.log2())
        .sum::<f64>()
        .abs()
}

pub fn team_entropy(pt: &ProbTeam) -> f64 {
    entropy(pt.support().map(|(_, w)| w))
}

/// θ: the marginal on the measurement and hidden variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeasurementPrior {
    pub theta: ProbTeam,
}

impl MeasurementPrior {
    pub fn entropy(&self) -> f64 {
        team_entropy(&self.theta)
    }

    /// θ(a⃗γ⃗).
    pub fn weight(&self, a: &[Value], gamma: &[Value]) -> Q {
        self.theta.weight(&[a, gamma].concat())
    }
}

fn xz_names(pt: &ProbTeam) -> Result<(RoleSplit, Vec<String>), ConstructionError> {
    let r = RoleSplit::from_vars(pt.vars())?;
    let xz = r.x.iter().chain(&r.z).cloned().collect();
    Ok((r, xz))
}

pub fn measurement_prior(pt: &ProbTeam) -> Result<MeasurementPrior, ConstructionError> {
    let (_, xz) = xz_names(pt)?;
    let names: Vec<&str> = xz.iter().map(String::as_str).collect();
    Ok(MeasurementPrior {
        theta: pt.project(&names)?,
    })
}

/// η^{a⃗γ⃗}(b⃗) = 𝕏(a⃗b⃗γ⃗)/θ(a⃗γ⃗), keyed by b⃗.
pub fn outcome_conditional(
    pt: &ProbTeam,
    a: &[Value],
    gamma: &[Value],
) -> Result<BTreeMap<Row, Q>, ConstructionError> {
    let (r, xz) = xz_names(pt)?;
    let idx = |names: &[String]| -> Vec<usize> {
        names
            .iter()
            .map(|n| pt.index_of(n).expect("from roles"))
            .collect()
    };
    let (xzi, yi) = (idx(&xz), idx(&r.y));
    let key: Row = [a, gamma].concat();
    let mut out: BTreeMap<Row, Q> = BTreeMap::new();
    let mut mass = Q::default();
    for (s, w) in pt.support() {
        if pick(s, &xzi) == key {
            mass += w;
            *out.entry(pick(s, &yi)).or_default() += w;
        }
    }
    if mass == Q::default() {
        let shown: Vec<String> = key.iter().map(|v| v.to_string()).collect();
        return Err(ConstructionError::ZeroMass(shown.join(",")));
    }
    for w in out.values_mut() {
        *w /= &mass;
    }
    Ok(out)
}
