//! Sparse real polynomials over binary variables.

use std::collections::BTreeMap;
use std::ops::{Add, Mul};

use crate::error::{Error, Result};

/// Coefficients below this magnitude are dropped by [`BinaryPolynomial::reduce`].
pub const PRUNE_EPS: f64 = 1e-12;

/// `constant + sum_i coeff_i * x_i` over binary `x`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AffineExpr {
    coeffs: BTreeMap<usize, f64>,
    constant: f64,
}

impl AffineExpr {
    pub fn constant(c: f64) -> Self {
        Self {
            coeffs: BTreeMap::new(),
            constant: c,
        }
    }

    /// Adds `c * x_var`, merging with an existing coefficient.
    pub fn add_term(&mut self, var: usize, c: f64) -> &mut Self {
        *self.coeffs.entry(var).or_insert(0.0) += c;
        self
    }

    pub fn with_term(mut self, var: usize, c: f64) -> Self {
        self.add_term(var, c);
        self
    }

    pub fn add_constant(&mut self, c: f64) -> &mut Self {
        self.constant += c;
        self
    }

    pub fn coeffs(&self) -> &BTreeMap<usize, f64> {
        &self.coeffs
    }

    pub fn constant_term(&self) -> f64 {
        self.constant
    }

    pub fn evaluate(&self, bits: &[bool]) -> f64 {
        self.constant
            + self
                .coeffs
                .iter()
                .filter(|(&i, _)| bits[i])
                .map(|(_, c)| c)
                .sum::<f64>()
    }
}

/// Monomials are sorted variable lists; repeated indices are allowed until
/// [`reduce`](BinaryPolynomial::reduce) applies `x^2 = x`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BinaryPolynomial {
    terms: BTreeMap<Vec<usize>, f64>,
}

impl BinaryPolynomial {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn constant(c: f64) -> Self {
        let mut p = Self::new();
        p.add_term(&[], c);
        p
    }

    pub fn add_term(&mut self, vars: &[usize], c: f64) -> &mut Self {
        let mut key = vars.to_vec();
        key.sort_unstable();
        *self.terms.entry(key).or_insert(0.0) += c;
        self
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[usize], f64)> {
        self.terms.iter().map(|(k, &v)| (k.as_slice(), v))
    }

    pub fn coefficient(&self, vars: &[usize]) -> f64 {
        let mut key = vars.to_vec();
        key.sort_unstable();
        self.terms.get(&key).copied().unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest monomial length as stored (before or after reduction).
    pub fn degree(&self) -> usize {
        self.terms.keys().map(Vec::len).max().unwrap_or(0)
    }

    pub fn max_var(&self) -> Option<usize> {
        self.terms.keys().filter_map(|k| k.last().copied()).max()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            terms: self.terms.iter().map(|(k, &v)| (k.clone(), v * s)).collect(),
        }
    }

    pub fn add_assign(&mut self, other: &Self) {
        for (k, &v) in &other.terms {
            *self.terms.entry(k.clone()).or_insert(0.0) += v;
        }
    }

    pub fn evaluate(&self, bits: &[bool]) -> f64 {
        self.terms
            .iter()
            .filter(|(k, _)| k.iter().all(|&i| bits[i]))
            .map(|(_, &v)| v)
            .sum()
    }

    /// Collapses `x^m` to `x`, merges like terms, drops tiny coefficients and
    /// fails if any monomial still has more than two distinct variables.
    pub fn reduce(&self) -> Result<Self> {
        let mut out: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
        for (k, &v) in &self.terms {
            let mut key = k.clone();
            key.dedup();
            *out.entry(key).or_insert(0.0) += v;
        }
        out.retain(|_, v| v.abs() >= PRUNE_EPS);
        if let Some((k, _)) = out.iter().find(|(k, _)| k.len() > 2) {
            return Err(Error::Degree(format!(
                "monomial over variables {k:?} has degree {} > 2",
                k.len()
            )));
        }
        Ok(Self { terms: out })
    }
}

impl From<&AffineExpr> for BinaryPolynomial {
    fn from(e: &AffineExpr) -> Self {
        let mut p = BinaryPolynomial::constant(e.constant);
        for (&i, &c) in &e.coeffs {
            p.add_term(&[i], c);
        }
        p
    }
}

impl Add for &BinaryPolynomial {
    type Output = BinaryPolynomial;

    fn add(self, rhs: Self) -> BinaryPolynomial {
        let mut out = self.clone();
        out.add_assign(rhs);
        out
    }
}

impl Mul for &BinaryPolynomial {
    type Output = BinaryPolynomial;

    fn mul(self, rhs: Self) -> BinaryPolynomial {
        let mut out = BinaryPolynomial::new();
        for (ka, &va) in &self.terms {
            for (kb, &vb) in &rhs.terms {
                let mut key = Vec::with_capacity(ka.len() + kb.len());
                key.extend_from_slice(ka);
                key.extend_from_slice(kb);
                out.add_term(&key, va * vb);
            }
        }
        out
    }
}

/// `e(x)^2` expanded with `x_i^2 = x_i`, already reduced.
pub fn square_affine(e: &AffineExpr) -> BinaryPolynomial {
    let c0 = e.constant;
    let mut p = BinaryPolynomial::constant(c0 * c0);
    let items: Vec<(usize, f64)> = e.coeffs.iter().map(|(&i, &c)| (i, c)).collect();
    for (a, &(i, ci)) in items.iter().enumerate() {
        p.add_term(&[i], ci * ci + 2.0 * c0 * ci);
        for &(j, cj) in &items[a + 1..] {
            p.add_term(&[i, j], 2.0 * ci * cj);
        }
    }
    p.terms.retain(|_, v| v.abs() >= PRUNE_EPS);
    p
}
