//! Ising images of QUBO models under `x = (1 - z) / 2` (bit 0 is spin +1).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::qubo::QuboModel;

#[derive(Debug, Clone, PartialEq)]
pub struct IsingModel {
    pub num_spins: usize,
    pub field: Vec<f64>,
    pub coupling: BTreeMap<(usize, usize), f64>,
    pub constant: f64,
}

pub fn bit_to_spin(b: bool) -> i8 {
    if b {
        -1
    } else {
        1
    }
}

pub fn spin_to_bit(z: i8) -> bool {
    z < 0
}

pub fn qubo_to_ising(q: &QuboModel) -> IsingModel {
    let n = q.num_vars;
    let mut field = vec![0.0; n];
    let mut coupling = BTreeMap::new();
    let mut constant = q.offset;
    // a x = a/2 - (a/2) z
    for (i, &a) in q.linear.iter().enumerate() {
        constant += a / 2.0;
        field[i] -= a / 2.0;
    }
    // q x_i x_j = q/4 (1 - z_i - z_j + z_i z_j)
    for (&(i, j), &v) in &q.quadratic {
        let c = v / 4.0;
        constant += c;
        field[i] -= c;
        field[j] -= c;
        *coupling.entry((i, j)).or_insert(0.0) += c;
    }
    IsingModel {
        num_spins: n,
        field,
        coupling,
        constant,
    }
}

impl IsingModel {
    pub fn energy(&self, spins: &[i8]) -> Result<f64> {
        if spins.len() != self.num_spins {
            return param(format!(
                "spin string has {} entries, model has {} spins",
                spins.len(),
                self.num_spins
            ));
        }
        if let Some(z) = spins.iter().find(|&&z| z != 1 && z != -1) {
            return param(format!("spin value {z} is not +1 or -1"));
        }
        let mut e = self.constant;
        for (h, &z) in self.field.iter().zip(spins) {
            e += h * f64::from(z);
        }
        for (&(i, j), &c) in &self.coupling {
            e += c * f64::from(spins[i] * spins[j]);
        }
        Ok(e)
    }

    /// Energy of computational basis state `idx`, constant term excluded.
    pub fn diagonal_energy(&self, idx: u64) -> f64 {
        let z = |i: usize| if idx >> i & 1 == 1 { -1.0 } else { 1.0 };
        let mut e = 0.0;
        for (i, h) in self.field.iter().enumerate() {
            e += h * z(i);
        }
        for (&(i, j), &c) in &self.coupling {
            e += c * z(i) * z(j);
        }
        e
    }

    /// `diagonal_energy` for every basis state.
    pub fn diagonal(&self) -> Vec<f64> {
        (0..1u64 << self.num_spins).map(|idx| self.diagonal_energy(idx)).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&IsingJson::from(self))?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str::<IsingJson>(s)?.try_into()
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct IsingJson {
    num_spins: usize,
    constant: f64,
    field: Vec<f64>,
    coupling: Vec<(usize, usize, f64)>,
}

impl From<&IsingModel> for IsingJson {
    fn from(m: &IsingModel) -> Self {
        Self {
            num_spins: m.num_spins,
            constant: m.constant,
            field: m.field.clone(),
            coupling: m.coupling.iter().map(|(&(i, j), &v)| (i, j, v)).collect(),
        }
    }
}

impl TryFrom<IsingJson> for IsingModel {
    type Error = Error;

    fn try_from(raw: IsingJson) -> Result<Self> {
        let n = raw.num_spins;
        if raw.field.len() != n {
            return Err(Error::Format(format!(
                "num_spins = {n} but field has {} entries",
                raw.field.len()
            )));
        }
        let mut coupling = BTreeMap::new();
        for (i, j, v) in raw.coupling {
            if !(i < j && j < n) {
                return Err(Error::Format(format!("coupling ({i}, {j}) needs i < j < {n}")));
            }
            if coupling.insert((i, j), v).is_some() {
                return Err(Error::Format(format!("duplicate coupling ({i}, {j})")));
            }
        }
        Ok(Self {
            num_spins: n,
            field: raw.field,
            coupling,
            constant: raw.constant,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::BinaryPolynomial;

    fn model(terms: &[(&[usize], f64)], n: usize) -> QuboModel {
        let mut p = BinaryPolynomial::new();
        for (v, c) in terms {
            p.add_term(v, *c);
        }
        QuboModel::from_polynomial(&p, (0..n).map(|i| format!("x{i}")).collect()).unwrap()
    }

    #[test]
    fn linear_term_substitution() {
        let m = qubo_to_ising(&model(&[(&[0], 1.0)], 1));
        assert_eq!(m.field, vec![-0.5]);
        assert_eq!(m.constant, 0.5);
    }

    #[test]
    fn quadratic_term_substitution() {
        let m = qubo_to_ising(&model(&[(&[0, 1], 1.0)], 2));
        assert_eq!(m.coupling[&(0, 1)], 0.25);
        assert_eq!(m.field, vec![-0.25, -0.25]);
        assert_eq!(m.constant, 0.25);
    }

    #[test]
    fn energy_contract() {
        let m = IsingModel {
            num_spins: 1,
            field: vec![1.0],
            coupling: BTreeMap::new(),
            constant: 2.0,
        };
        assert_eq!(m.energy(&[1]).unwrap(), 3.0);
        assert_eq!(m.energy(&[-1]).unwrap(), 1.0);
        assert!(m.energy(&[0]).is_err());
        assert!(m.energy(&[1, 1]).is_err());
        let zero = IsingModel {
            num_spins: 3,
            field: vec![0.0; 3],
            coupling: BTreeMap::new(),
            constant: -4.0,
        };
        assert_eq!(zero.energy(&[1, 1, 1]).unwrap(), -4.0);
    }

    #[test]
    fn spin_map_is_an_involution() {
        for b in [false, true] {
            assert_eq!(spin_to_bit(bit_to_spin(b)), b);
        }
        for z in [-1i8, 1] {
            assert_eq!(bit_to_spin(spin_to_bit(z)), z);
        }
    }

    #[test]
    fn json_round_trip() {
        let m = qubo_to_ising(&model(&[(&[0, 1], 1.5), (&[2], -1.0), (&[], 0.5)], 3));
        assert_eq!(m, IsingModel::from_json(&m.to_json().unwrap()).unwrap());
        let bad = r#"{"num_spins":2,"constant":0,"field":[0,0],"coupling":[[1,1,1.0]]}"#;
        assert!(IsingModel::from_json(bad).is_err());
    }
}
