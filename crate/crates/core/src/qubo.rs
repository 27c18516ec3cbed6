//! Dense-linear / sparse-quadratic QUBO models.
//!
//! Bitstrings are indexed by a `u64` whose bit `i` holds variable `i`. The
//! textual form lists variable 0 first.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::poly::BinaryPolynomial;

/// Largest model [`QuboModel::ground_states`] will enumerate.
pub const GROUND_STATE_CAP: usize = 30;

pub fn index_to_bits(idx: u64, n: usize) -> Vec<bool> {
    (0..n).map(|i| idx >> i & 1 == 1).collect()
}

pub fn bits_to_index(bits: &[bool]) -> u64 {
    bits.iter()
        .enumerate()
        .fold(0, |acc, (i, &b)| acc | (u64::from(b) << i))
}

pub fn index_to_bitstring(idx: u64, n: usize) -> String {
    (0..n).map(|i| if idx >> i & 1 == 1 { '1' } else { '0' }).collect()
}

pub fn bitstring_to_index(s: &str) -> Result<u64> {
    if s.len() > 64 {
        return param(format!("bitstring of length {} does not fit 64 bits", s.len()));
    }
    s.chars().enumerate().try_fold(0u64, |acc, (i, c)| match c {
        '0' => Ok(acc),
        '1' => Ok(acc | 1 << i),
        other => param(format!("invalid bit character {other:?}")),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuboModel {
    pub num_vars: usize,
    pub linear: Vec<f64>,
    /// Upper-triangular couplings keyed by `(i, j)` with `i < j`.
    pub quadratic: BTreeMap<(usize, usize), f64>,
    pub offset: f64,
    pub labels: Vec<String>,
}

/// All minimizers of a model together with their energy.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundStates {
    pub energy: f64,
    pub states: Vec<u64>,
}

impl QuboModel {
    /// Builds a model from a reduced polynomial. The number of variables is
    /// `labels.len()`.
    pub fn from_polynomial(poly: &BinaryPolynomial, labels: Vec<String>) -> Result<Self> {
        let n = labels.len();
        let mut model = Self {
            num_vars: n,
            linear: vec![0.0; n],
            quadratic: BTreeMap::new(),
            offset: 0.0,
            labels,
        };
        for (vars, c) in poly.terms() {
            if vars.iter().any(|&v| v >= n) {
                return param(format!("monomial {vars:?} references a variable >= {n}"));
            }
            match *vars {
                [] => model.offset += c,
                [i] => model.linear[i] += c,
                [i, j] if i == j => model.linear[i] += c,
                [i, j] => *model.quadratic.entry((i, j)).or_insert(0.0) += c,
                _ => {
                    return Err(Error::Degree(format!(
                        "monomial {vars:?} has degree {} > 2",
                        vars.len()
                    )))
                }
            }
        }
        Ok(model)
    }

    pub fn evaluate(&self, bits: &[bool]) -> Result<f64> {
        if bits.len() != self.num_vars {
            return param(format!(
                "bitstring has {} bits, model has {} variables",
                bits.len(),
                self.num_vars
            ));
        }
        Ok(self.energy_of(bits_to_index(bits)))
    }

    /// Energy of the basis state `idx` (no length check).
    pub fn energy_of(&self, idx: u64) -> f64 {
        let bit = |i: usize| idx >> i & 1 == 1;
        let mut e = self.offset;
        for (i, &a) in self.linear.iter().enumerate() {
            if bit(i) {
                e += a;
            }
        }
        for (&(i, j), &q) in &self.quadratic {
            if bit(i) && bit(j) {
                e += q;
            }
        }
        e
    }

    fn coefficient_scale(&self) -> f64 {
        self.offset.abs()
            + self.linear.iter().map(|a| a.abs()).sum::<f64>()
            + self.quadratic.values().map(|q| q.abs()).sum::<f64>()
    }

    /// Energies closer than this are treated as degenerate.
    pub fn degeneracy_tolerance(&self) -> f64 {
        (64.0 * f64::EPSILON * self.coefficient_scale()).max(1e-9)
    }

    /// Exhaustive minimization over all `2^num_vars` states.
    ///
    /// Each chunk of low bits is walked in Gray-code order with incremental
    /// energy updates; candidates near the running minimum are re-evaluated
    /// exactly before the minimizer set is formed.
    pub fn ground_states(&self) -> Result<GroundStates> {
        let n = self.num_vars;
        if n > GROUND_STATE_CAP {
            return Err(Error::Size(format!(
                "{n} > {GROUND_STATE_CAP} variables for exhaustive ground-state search"
            )));
        }
        let mut neighbors: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for (&(i, j), &q) in &self.quadratic {
            neighbors[i].push((j, q));
            neighbors[j].push((i, q));
        }
        let scale = self.coefficient_scale();
        let tol = self.degeneracy_tolerance();
        let low = n.min(14);
        let chunks: u64 = 1 << (n - low);
        // Incremental updates drift by at most a few ulps of `scale` per flip.
        let slack = tol + (1u64 << low) as f64 * 8.0 * f64::EPSILON * scale;

        let per_chunk: Vec<(f64, Vec<u64>)> = (0..chunks)
            .into_par_iter()
            .map(|chunk| {
                let mut state = chunk << low;
                let mut energy = self.energy_of(state);
                // field[i] = a_i + sum_j q_ij b_j
                let mut field = self.linear.clone();
                for (i, f) in field.iter_mut().enumerate() {
                    for &(j, q) in &neighbors[i] {
                        if state >> j & 1 == 1 {
                            *f += q;
                        }
                    }
                }
                let mut best = energy;
                let mut cands = vec![(energy, state)];
                for t in 1u64..(1 << low) {
                    let k = t.trailing_zeros() as usize;
                    let on = state >> k & 1 == 0;
                    let sign = if on { 1.0 } else { -1.0 };
                    energy += sign * field[k];
                    state ^= 1 << k;
                    for &(j, q) in &neighbors[k] {
                        field[j] += sign * q;
                    }
                    if energy < best + slack {
                        if energy < best {
                            best = energy;
                            if cands.len() > 64 {
                                cands.retain(|&(e, _)| e < best + slack);
                            }
                        }
                        cands.push((energy, state));
                    }
                }
                let kept = cands
                    .into_iter()
                    .filter(|&(e, _)| e < best + slack)
                    .map(|(_, s)| s)
                    .collect();
                (best, kept)
            })
            .collect();

        let mut exact: Vec<(f64, u64)> = per_chunk
            .into_iter()
            .flat_map(|(_, s)| s)
            .map(|s| (self.energy_of(s), s))
            .collect();
        let min = exact.iter().map(|&(e, _)| e).fold(f64::INFINITY, f64::min);
        exact.retain(|&(e, _)| e <= min + tol);
        let states: BTreeSet<u64> = exact.into_iter().map(|(_, s)| s).collect();
        Ok(GroundStates {
            energy: min,
            states: states.into_iter().collect(),
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&QuboJson::from(self))?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: QuboJson = serde_json::from_str(s)?;
        raw.try_into()
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct QuboJson {
    num_vars: usize,
    offset: f64,
    linear: Vec<f64>,
    quadratic: Vec<(usize, usize, f64)>,
    labels: Vec<String>,
}

impl From<&QuboModel> for QuboJson {
    fn from(m: &QuboModel) -> Self {
        Self {
            num_vars: m.num_vars,
            offset: m.offset,
            linear: m.linear.clone(),
            quadratic: m.quadratic.iter().map(|(&(i, j), &v)| (i, j, v)).collect(),
            labels: m.labels.clone(),
        }
    }
}

impl TryFrom<QuboJson> for QuboModel {
    type Error = Error;

    fn try_from(raw: QuboJson) -> Result<Self> {
        let n = raw.num_vars;
        if raw.linear.len() != n || raw.labels.len() != n {
            return Err(Error::Format(format!(
                "num_vars = {n} but linear has {} and labels {} entries",
                raw.linear.len(),
                raw.labels.len()
            )));
        }
        let mut quadratic = BTreeMap::new();
        for (i, j, v) in raw.quadratic {
            if !(i < j && j < n) {
                return Err(Error::Format(format!("quadratic entry ({i}, {j}) needs i < j < {n}")));
            }
            if quadratic.insert((i, j), v).is_some() {
                return Err(Error::Format(format!("duplicate quadratic entry ({i}, {j})")));
            }
        }
        Ok(Self {
            num_vars: n,
            linear: raw.linear,
            quadratic,
            offset: raw.offset,
            labels: raw.labels,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{square_affine, AffineExpr};

    fn labels(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("v{i}")).collect()
    }

    #[test]
    fn zero_bits_give_offset() {
        let e = AffineExpr::constant(-1.0).with_term(0, 1.0).with_term(1, 1.0);
        let m = QuboModel::from_polynomial(&square_affine(&e), labels(2)).unwrap();
        assert_eq!(m.evaluate(&[false, false]).unwrap(), m.offset);
        assert_eq!(m.evaluate(&[true, true]).unwrap(), 1.0);
        assert!(m.evaluate(&[true]).is_err());
    }

    #[test]
    fn bitstring_helpers_agree() {
        let s = index_to_bitstring(0b1101, 5);
        assert_eq!(s, "10110");
        assert_eq!(bitstring_to_index(&s).unwrap(), 0b1101);
        assert_eq!(bits_to_index(&index_to_bits(0b1101, 5)), 0b1101);
        assert!(bitstring_to_index("10x").is_err());
    }

    #[test]
    fn ground_states_of_small_model() {
        // (x0 + x1 - 1)^2 has minimizers 01 and 10.
        let e = AffineExpr::constant(-1.0).with_term(0, 1.0).with_term(1, 1.0);
        let m = QuboModel::from_polynomial(&square_affine(&e), labels(2)).unwrap();
        let g = m.ground_states().unwrap();
        assert_eq!(g.energy, 0.0);
        assert_eq!(g.states, vec![0b01, 0b10]);
    }

    #[test]
    fn json_rejects_lower_triangle_and_mismatched_lengths() {
        let good = r#"{"num_vars":2,"offset":1.0,"linear":[-1.0,-1.0],"quadratic":[[0,1,2.0]],"labels":["a","b"]}"#;
        let m = QuboModel::from_json(good).unwrap();
        assert_eq!(m, QuboModel::from_json(&m.to_json().unwrap()).unwrap());
        let lower = good.replace("[0,1,2.0]", "[1,0,2.0]");
        assert!(QuboModel::from_json(&lower).is_err());
        let short = good.replace("[-1.0,-1.0]", "[-1.0]");
        assert!(QuboModel::from_json(&short).is_err());
        let unknown = good.replace("\"offset\"", "\"extra\":0,\"offset\"");
        assert!(QuboModel::from_json(&unknown).is_err());
    }
}
