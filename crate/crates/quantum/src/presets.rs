use std::collections::BTreeMap;
use std::str::FromStr;

use crate::linalg::{c, projector, CMatrix};
use crate::system::QuantumSystem;

fn all_bits(n: usize) -> Vec<Vec<i64>> {
    (0..1i64 << n)
        .map(|k| (0..n).map(|i| (k >> (n - 1 - i)) & 1).collect())
        .collect()
}

/// Pure state over n qubits from amplitudes indexed by the basis word.
fn pure(amps: &[num_complex::Complex64]) -> CMatrix {
    projector(amps)
}

fn computational() -> BTreeMap<i64, CMatrix> {
    [
        (0, projector(&[c(1.0, 0.0), c(0.0, 0.0)])),
        (1, projector(&[c(0.0, 0.0), c(1.0, 0.0)])),
    ]
    .into_iter()
    .collect()
}

/// (|01⟩ + |10⟩)/√2, computational basis on both qubits, M = {(0, 1)}.
pub fn epr_system() -> QuantumSystem {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let rho = pure(&[c(0.0, 0.0), c(h, 0.0), c(h, 0.0), c(0.0, 0.0)]);
    let povms = [((0, 0), computational()), ((1, 1), computational())]
        .into_iter()
        .collect();
    QuantumSystem {
        dims: vec![2, 2],
        povms,
        rho,
        measurements: vec![vec![0, 1]],
        outcomes: all_bits(2),
    }
}

/// (|000⟩ + |111⟩)/√2 with eigenvectors (|0⟩ + (-1)^{1-b} iᵃ |1⟩)/√2 for
/// setting a and outcome b on every qubit.
pub fn ghz_system() -> QuantumSystem {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut amps = vec![c(0.0, 0.0); 8];
    amps[0] = c(h, 0.0);
    amps[7] = c(h, 0.0);
    let i_pow = |a: i64| if a == 0 { c(1.0, 0.0) } else { c(0.0, 1.0) };
    let mut povms = BTreeMap::new();
    for site in 0..3 {
        for a in 0..2 {
            let elems = (0..2)
                .map(|b| {
                    let sign = if b == 1 { 1.0 } else { -1.0 };
                    (b, projector(&[c(h, 0.0), i_pow(a) * sign * h]))
                })
                .collect();
            povms.insert((site, a), elems);
        }
    }
    QuantumSystem {
        dims: vec![2, 2, 2],
        povms,
        rho: pure(&amps),
        measurements: all_bits(3),
        outcomes: all_bits(3),
    }
}

/// −½|00⟩ + √(3/8)|01⟩ + √(3/8)|10⟩; setting 0 measures in the basis
/// √(3/5)|0⟩ + √(2/5)|1⟩, −√(2/5)|0⟩ + √(3/5)|1⟩ and setting 1 in the
/// computational basis.
pub fn hardy_system() -> QuantumSystem {
    let r38 = (3.0f64 / 8.0).sqrt();
    let amps = [c(-0.5, 0.0), c(r38, 0.0), c(r38, 0.0), c(0.0, 0.0)];
    let (a, b) = ((3.0f64 / 5.0).sqrt(), (2.0f64 / 5.0).sqrt());
    let tilted: BTreeMap<i64, CMatrix> = [
        (0, projector(&[c(a, 0.0), c(b, 0.0)])),
        (1, projector(&[c(-b, 0.0), c(a, 0.0)])),
    ]
    .into_iter()
    .collect();
    let mut povms = BTreeMap::new();
    for site in 0..2 {
        povms.insert((site, 0), tilted.clone());
        povms.insert((site, 1), computational());
    }
    QuantumSystem {
        dims: vec![2, 2],
        povms,
        rho: pure(&amps),
        measurements: all_bits(2),
        outcomes: all_bits(2),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Preset {
    Epr,
    Ghz,
    Hardy,
}

impl Preset {
    pub fn system(self) -> QuantumSystem {
        match self {
            Preset::Epr => epr_system(),
            Preset::Ghz => ghz_system(),
            Preset::Hardy => hardy_system(),
        }
    }
}

impl FromStr for Preset {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "epr" => Ok(Preset::Epr),
            "ghz" => Ok(Preset::Ghz),
            "hardy" => Ok(Preset::Hardy),
            _ => Err(format!("unknown preset `{s}` (epr, ghz, hardy)")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_validate_and_normalize() {
        for p in [Preset::Epr, Preset::Ghz, Preset::Hardy] {
            let s = p.system();
            assert!(s.validate().is_clean(), "{p:?}: {:?}", s.validate());
            for a in &s.measurements {
                let total: f64 = s
                    .outcome_distribution(a)
                    .unwrap()
                    .iter()
                    .map(|(_, p)| p)
                    .sum();
                assert!((total - 1.0).abs() < 1e-9);
            }
        }
    }
}
