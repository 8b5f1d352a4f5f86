use std::collections::BTreeMap;

use num_complex::Complex64;
use num_traits::Zero;
use teamsem_core::rational::{best_rational, Q};
use teamsem_core::{ProbTeam, Row, TeamError, Value, Variable};

use crate::linalg::{hermitian, max_abs, min_eigenvalue, tensor, CMatrix};

pub const TOLERANCE: f64 = 1e-9;
/// Largest total dimension accepted.
pub const MAX_DIMENSION: usize = 64;

#[derive(Debug, thiserror::Error)]
pub enum QuantumError {
    #[error("measurement tuple {0:?} is not in M")]
    UnknownMeasurement(Vec<i64>),
    #[error("invalid system: {}", .0.join("; "))]
    Invalid(Vec<String>),
    #[error(transparent)]
    Team(#[from] TeamError),
}

/// A quantum system of type (M, O): one POVM per site and setting, and a
/// density operator on the tensor product of the site spaces.
#[derive(Clone, Debug)]
pub struct QuantumSystem {
    pub dims: Vec<usize>,
    /// (site, setting) ↦ outcome ↦ POVM element.
    pub povms: BTreeMap<(usize, i64), BTreeMap<i64, CMatrix>>,
    pub rho: CMatrix,
    pub measurements: Vec<Vec<i64>>,
    pub outcomes: Vec<Vec<i64>>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

impl QuantumSystem {
    pub fn sites(&self) -> usize {
        self.dims.len()
    }

    pub fn validate(&self) -> ValidationReport {
        let mut v = Vec::new();
        let total: usize = self.dims.iter().product();
        if total > MAX_DIMENSION {
            v.push(format!("total dimension {total} exceeds {MAX_DIMENSION}"));
        }
        if self.rho.shape() != (total, total) {
            v.push(format!(
                "ρ is {:?}, expected {total}×{total}",
                self.rho.shape()
            ));
        } else {
            let tr = self.rho.trace();
            if (tr - Complex64::new(1.0, 0.0)).norm() > TOLERANCE {
                v.push(format!("trace of ρ is {tr}"));
            }
            if !hermitian(&self.rho, TOLERANCE) {
                v.push("ρ is not Hermitian".into());
            } else if min_eigenvalue(&self.rho) < -TOLERANCE {
                v.push("ρ is not positive".into());
            }
        }
        for m in &self.measurements {
            if m.len() != self.sites() {
                v.push(format!("measurement {m:?} has the wrong arity"));
            }
        }
        for o in &self.outcomes {
            if o.len() != self.sites() {
                v.push(format!("outcome {o:?} has the wrong arity"));
            }
        }
        for i in 0..self.sites() {
            let settings: std::collections::BTreeSet<i64> = self
                .measurements
                .iter()
                .filter_map(|m| m.get(i).copied())
                .collect();
            let outs: std::collections::BTreeSet<i64> = self
                .outcomes
                .iter()
                .filter_map(|o| o.get(i).copied())
                .collect();
            for a in settings {
                let Some(povm) = self.povms.get(&(i, a)) else {
                    v.push(format!("no POVM for site {i}, setting {a}"));
                    continue;
                };
                let d = self.dims[i];
                let mut sum = CMatrix::zeros(d, d);
                for b in &outs {
                    if !povm.contains_key(b) {
                        v.push(format!("site {i}, setting {a}: no element for outcome {b}"));
                    }
                }
                for (b, e) in povm {
                    if e.shape() != (d, d) {
                        v.push(format!("site {i}, setting {a}, outcome {b}: wrong shape"));
                        continue;
                    }
                    if !hermitian(e, TOLERANCE) || min_eigenvalue(e) < -TOLERANCE {
                        v.push(format!("site {i}, setting {a}, outcome {b}: not positive"));
                    }
                    sum += e;
                }
                if max_abs(&(sum - CMatrix::identity(d, d))) > TOLERANCE {
                    v.push(format!(
                        "site {i}, setting {a}: elements do not sum to the identity"
                    ));
                }
            }
        }
        ValidationReport { violations: v }
    }

    /// p_a(b) = tr(A^{a,b} ρ) for every b in O, in the order of `outcomes`.
    pub fn outcome_distribution(&self, a: &[i64]) -> Result<Vec<(Vec<i64>, f64)>, QuantumError> {
        if !self.measurements.iter().any(|m| m == a) {
            return Err(QuantumError::UnknownMeasurement(a.to_vec()));
        }
        let mut out = Vec::new();
        for b in &self.outcomes {
            let parts: Option<Vec<CMatrix>> = (0..self.sites())
                .map(|i| self.povms.get(&(i, a[i]))?.get(&b[i]).cloned())
                .collect();
            let parts = parts.ok_or_else(|| {
                QuantumError::Invalid(vec![format!("no POVM element for {a:?}, {b:?}")])
            })?;
            let p = (tensor(&parts) * &self.rho).trace().re;
            out.push((b.clone(), p));
        }
        Ok(out)
    }
}

/// Exact weight for a float probability: the nearest fraction with
/// denominator ≤ 10^6 when within 1e-9, the float's exact value otherwise;
/// anything not above 1e-9 is zero.
fn snap(p: f64) -> Q {
    if p <= TOLERANCE {
        return Q::zero();
    }
    let r = best_rational(p, 1_000_000);
    if (teamsem_core::rational::to_f64(&r) - p).abs() < TOLERANCE {
        r
    } else {
        Q::from_float(p).unwrap_or_else(Q::zero)
    }
}

/// X(s) = p_{s(x)}(s(y)) / |M| over M × O, rationalized and renormalized
/// so the weights sum to exactly one. Zero-probability rows are kept.
pub fn quantum_team(sys: &QuantumSystem) -> Result<ProbTeam, QuantumError> {
    let report = sys.validate();
    if !report.is_clean() {
        return Err(QuantumError::Invalid(report.violations));
    }
    let n = sys.sites();
    let mut vars: Vec<Variable> = (0..n)
        .map(|i| Variable::inferred(format!("x{i}")))
        .collect();
    vars.extend((0..n).map(|i| Variable::inferred(format!("y{i}"))));
    let mut pairs: Vec<(Row, Q)> = Vec::new();
    for a in &sys.measurements {
        for (b, p) in sys.outcome_distribution(a)? {
            let row: Row = a.iter().chain(&b).map(|&v| Value::Int(v)).collect();
            pairs.push((row, snap(p)));
        }
    }
    Ok(ProbTeam::normalized(vars, pairs)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets::epr_system;
    use teamsem_core::rational::q;

    #[test]
    fn snapping() {
        assert_eq!(snap(0.5 + 1e-13), q(1, 2));
        assert_eq!(snap(1e-12), q(0, 1));
        assert_eq!(snap(27.0 / 200.0), q(27, 200));
    }

    #[test]
    fn mutations_are_flagged() {
        let mut s = epr_system();
        assert!(s.validate().is_clean());
        let e = s.povms.get_mut(&(0, 0)).unwrap().get_mut(&0).unwrap();
        *e = e.scale(2.0);
        assert!(s
            .validate()
            .violations
            .iter()
            .any(|v| v.contains("sum to the identity")));
        let mut s = epr_system();
        s.rho = s.rho.scale(0.5);
        assert!(s.validate().violations.iter().any(|v| v.contains("trace")));
        assert!(matches!(quantum_team(&s), Err(QuantumError::Invalid(_))));
    }

    #[test]
    fn unknown_measurement() {
        assert!(matches!(
            epr_system().outcome_distribution(&[1, 1]),
            Err(QuantumError::UnknownMeasurement(_))
        ));
    }
}
