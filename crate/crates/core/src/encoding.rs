//! QUBO encoders for bin packing and TSP.
//!
//! Equality constraints always become squared penalties. Inequalities are
//! either turned into equalities with binary slack registers, or penalized
//! directly with the second-order expansion of an exponential penalty
//! `(p/s) e^{r h(x)}` (constant dropped), which needs no extra variables.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::instance::{BppAssignment, BppInstance, Problem, TspInstance, TspTour, ENUMERATION_CAP};
use crate::poly::{square_affine, AffineExpr, BinaryPolynomial};
use crate::qubo::QuboModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PenaltyFamily {
    F1,
    F2,
    F3,
}

impl fmt::Display for PenaltyFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PenaltyFamily::F1 => "F1",
            PenaltyFamily::F2 => "F2",
            PenaltyFamily::F3 => "F3",
        })
    }
}

impl FromStr for PenaltyFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "F1" => Ok(PenaltyFamily::F1),
            "F2" => Ok(PenaltyFamily::F2),
            "F3" => Ok(PenaltyFamily::F3),
            _ => param(format!("unknown penalty family {s:?} (expected F1, F2 or F3)")),
        }
    }
}

/// Parameters of one member of the exponential penalty class.
///
/// | family | rate `r` | inverse magnitude `s` |
/// |--------|----------|-----------------------|
/// | F1     | `k`      | `1`                   |
/// | F2     | `a^k`    | `a^k`                 |
/// | F3     | `b^k`    | `a^k`                 |
///
/// `p` scales the whole penalty.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentialPenaltyParams {
    pub family: PenaltyFamily,
    pub k: u32,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub p: f64,
}

impl ExponentialPenaltyParams {
    pub fn f1(k: u32, p: f64) -> Result<Self> {
        Self::new(PenaltyFamily::F1, k, None, None, p)
    }

    pub fn f2(a: f64, k: u32, p: f64) -> Result<Self> {
        Self::new(PenaltyFamily::F2, k, Some(a), None, p)
    }

    pub fn f3(a: f64, b: f64, k: u32, p: f64) -> Result<Self> {
        Self::new(PenaltyFamily::F3, k, Some(a), Some(b), p)
    }

    /// Builds and validates a parameter set; bases a family does not use are
    /// discarded.
    pub fn new(family: PenaltyFamily, k: u32, a: Option<f64>, b: Option<f64>, p: f64) -> Result<Self> {
        let (a, b) = match family {
            PenaltyFamily::F1 => (None, None),
            PenaltyFamily::F2 => (a, None),
            PenaltyFamily::F3 => (a, b),
        };
        let params = Self { family, k, a, b, p };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p.is_finite() && self.p > 0.0) {
            return param(format!("penalty multiplier p must be > 0, got {}", self.p));
        }
        match self.family {
            PenaltyFamily::F1 => {}
            PenaltyFamily::F2 => match self.a {
                Some(a) if a.is_finite() && a > 1.0 => {}
                a => return param(format!("F2 needs a > 1, got {a:?}")),
            },
            PenaltyFamily::F3 => match (self.a, self.b) {
                (Some(a), Some(b)) if a.is_finite() && b.is_finite() && 1.0 < a && a < b => {}
                (a, b) => return param(format!("F3 needs 1 < a < b, got a = {a:?}, b = {b:?}")),
            },
        }
        Ok(())
    }

    /// Exponent rate `r(k)`.
    pub fn rate(&self) -> f64 {
        let k = self.k as i32;
        match self.family {
            PenaltyFamily::F1 => self.k as f64,
            PenaltyFamily::F2 => self.a.unwrap_or(f64::NAN).powi(k),
            PenaltyFamily::F3 => self.b.unwrap_or(f64::NAN).powi(k),
        }
    }

    /// Inverse magnitude `s(k)`.
    pub fn inverse_magnitude(&self) -> f64 {
        let k = self.k as i32;
        match self.family {
            PenaltyFamily::F1 => 1.0,
            PenaltyFamily::F2 | PenaltyFamily::F3 => self.a.unwrap_or(f64::NAN).powi(k),
        }
    }

    /// Coefficient of `h` in the truncated penalty: `p r / s`.
    pub fn linear_coefficient(&self) -> f64 {
        self.p * self.rate() / self.inverse_magnitude()
    }

    /// Coefficient of `h^2` in the truncated penalty: `p r^2 / (2 s)`.
    pub fn quadratic_coefficient(&self) -> f64 {
        let r = self.rate();
        self.p * r * r / (2.0 * self.inverse_magnitude())
    }

    /// Value of the truncated penalty at a scalar constraint value `h`.
    pub fn penalty_value(&self, h: f64) -> f64 {
        self.linear_coefficient() * h + self.quadratic_coefficient() * h * h
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InequalityPenalty {
    Exponential(ExponentialPenaltyParams),
    SlackQuadratic { lambda_ineq: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PenaltyWeights {
    pub lambda_eq: f64,
    pub inequality: InequalityPenalty,
}

impl PenaltyWeights {
    pub fn exponential(lambda_eq: f64, params: ExponentialPenaltyParams) -> Self {
        Self {
            lambda_eq,
            inequality: InequalityPenalty::Exponential(params),
        }
    }

    pub fn slack(lambda_eq: f64, lambda_ineq: f64) -> Self {
        Self {
            lambda_eq,
            inequality: InequalityPenalty::SlackQuadratic { lambda_ineq },
        }
    }

    pub fn encoding_kind(&self) -> EncodingKind {
        match self.inequality {
            InequalityPenalty::Exponential(_) => EncodingKind::Exponential,
            InequalityPenalty::SlackQuadratic { .. } => EncodingKind::Slack,
        }
    }

    pub fn validate(&self) -> Result<()> {
        positive("lambda_eq", self.lambda_eq)?;
        match &self.inequality {
            InequalityPenalty::Exponential(p) => p.validate(),
            InequalityPenalty::SlackQuadratic { lambda_ineq } => positive("lambda_ineq", *lambda_ineq),
        }
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        param(format!("{name} must be > 0, got {v}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EncodingKind {
    #[serde(rename = "slack")]
    Slack,
    #[serde(rename = "exp")]
    Exponential,
}

impl fmt::Display for EncodingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EncodingKind::Slack => "slack",
            EncodingKind::Exponential => "exp",
        })
    }
}

/// Second-order exponential penalty on an inequality `h(x) <= 0`:
/// `p [ (r/s) h + (r^2 / 2s) h^2 ]`, reduced.
pub fn exponential_penalty(h: &AffineExpr, params: &ExponentialPenaltyParams) -> Result<BinaryPolynomial> {
    params.validate()?;
    let mut poly = BinaryPolynomial::from(h).scale(params.linear_coefficient());
    poly.add_assign(&square_affine(h).scale(params.quadratic_coefficient()));
    poly.reduce()
}

/// `1 +` an upper bound on the objective, so that breaking an equality never
/// pays off.
pub fn default_lambda_eq(problem: &Problem) -> f64 {
    match problem {
        Problem::Bpp(b) => 1.0 + b.n_bins as f64,
        Problem::Tsp(t) => 1.0 + t.n as f64 * t.max_weight(),
    }
}

/// Bits needed to represent every integer in `[0, upper]`.
pub fn slack_bits(upper: u64) -> usize {
    (u64::BITS - upper.leading_zeros()) as usize
}

fn slack_register(first_var: usize, bits: usize) -> AffineExpr {
    let mut e = AffineExpr::constant(0.0);
    for t in 0..bits {
        e.add_term(first_var + t, (1u64 << t) as f64);
    }
    e
}

fn add_affine(target: &mut AffineExpr, other: &AffineExpr) {
    for (&i, &c) in other.coeffs() {
        target.add_term(i, c);
    }
    target.add_constant(other.constant_term());
}

// ---------------------------------------------------------------- bin packing

pub fn bpp_x(inst: &BppInstance, item: usize, bin: usize) -> usize {
    item * inst.n_bins + bin
}

pub fn bpp_b(inst: &BppInstance, bin: usize) -> usize {
    inst.n_items * inst.n_bins + bin
}

fn bpp_labels(inst: &BppInstance) -> Vec<String> {
    let mut labels = Vec::with_capacity(inst.n_items * inst.n_bins + inst.n_bins);
    for i in 0..inst.n_items {
        for j in 0..inst.n_bins {
            labels.push(format!("x_{i}_{j}"));
        }
    }
    labels.extend((0..inst.n_bins).map(|j| format!("B_{j}")));
    labels
}

/// `sum_j B_j + lambda_eq sum_i (sum_j x_ij - 1)^2`
fn bpp_base(inst: &BppInstance, lambda_eq: f64) -> BinaryPolynomial {
    let mut poly = BinaryPolynomial::new();
    for j in 0..inst.n_bins {
        poly.add_term(&[bpp_b(inst, j)], 1.0);
    }
    for i in 0..inst.n_items {
        let mut g = AffineExpr::constant(-1.0);
        for j in 0..inst.n_bins {
            g.add_term(bpp_x(inst, i, j), 1.0);
        }
        poly.add_assign(&square_affine(&g).scale(lambda_eq));
    }
    poly
}

/// Capacity constraint of bin `j` as `h_j = sum_i w_i x_ij - C B_j <= 0`.
pub fn bpp_capacity_constraint(inst: &BppInstance, bin: usize) -> AffineExpr {
    let mut h = AffineExpr::constant(0.0);
    for i in 0..inst.n_items {
        h.add_term(bpp_x(inst, i, bin), inst.weights[i] as f64);
    }
    h.add_term(bpp_b(inst, bin), -(inst.capacity as f64));
    h
}

pub fn bpp_to_qubo_exponential(
    inst: &BppInstance,
    lambda_eq: f64,
    params: &ExponentialPenaltyParams,
) -> Result<QuboModel> {
    inst.validate()?;
    PenaltyWeights::exponential(lambda_eq, *params).validate()?;
    let mut poly = bpp_base(inst, lambda_eq);
    for j in 0..inst.n_bins {
        poly.add_assign(&exponential_penalty(&bpp_capacity_constraint(inst, j), params)?);
    }
    QuboModel::from_polynomial(&poly.reduce()?, bpp_labels(inst))
}

pub fn bpp_to_qubo_slack(inst: &BppInstance, lambda_eq: f64, lambda_ineq: f64) -> Result<QuboModel> {
    inst.validate()?;
    PenaltyWeights::slack(lambda_eq, lambda_ineq).validate()?;
    let m = slack_bits(inst.capacity);
    let mut poly = bpp_base(inst, lambda_eq);
    let mut labels = bpp_labels(inst);
    for j in 0..inst.n_bins {
        let first = labels.len();
        labels.extend((0..m).map(|t| format!("slack_{j}_b{t}")));
        let mut h = bpp_capacity_constraint(inst, j);
        add_affine(&mut h, &slack_register(first, m));
        poly.add_assign(&square_affine(&h).scale(lambda_ineq));
    }
    QuboModel::from_polynomial(&poly.reduce()?, labels)
}

// ------------------------------------------------------------------------ TSP

/// Variable index of the directed edge `i -> j` (`i != j`).
pub fn tsp_x(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i != j);
    i * (n - 1) + if j < i { j } else { j - 1 }
}

fn tsp_labels(n: usize) -> Vec<String> {
    let mut labels = Vec::with_capacity(n * (n - 1));
    for i in 0..n {
        for j in (0..n).filter(|&j| j != i) {
            labels.push(format!("x_{i}_{j}"));
        }
    }
    labels
}

/// Vertex subsets `Q` with `2 <= |Q| <= n-1`, in increasing bitmask order.
pub fn subtour_subsets(n: usize) -> Result<Vec<Vec<usize>>> {
    if n >= 64 || (1u64 << n) > ENUMERATION_CAP {
        return Err(Error::Size(format!(
            "2^{n} vertex subsets exceed the enumeration cap of {ENUMERATION_CAP}"
        )));
    }
    Ok((0u64..1 << n)
        .filter(|m| (2..n as u32).contains(&m.count_ones()))
        .map(|m| (0..n).filter(|&v| m >> v & 1 == 1).collect())
        .collect())
}

/// `h_Q = sum_{i != j in Q} x_ij - (|Q| - 1) <= 0`.
pub fn tsp_subtour_constraint(n: usize, q: &[usize]) -> AffineExpr {
    let mut h = AffineExpr::constant(-(q.len() as f64 - 1.0));
    for &i in q {
        for &j in q {
            if i != j {
                h.add_term(tsp_x(n, i, j), 1.0);
            }
        }
    }
    h
}

/// Tour cost plus squared out-degree and in-degree constraints.
fn tsp_base(inst: &TspInstance, lambda_eq: f64) -> BinaryPolynomial {
    let n = inst.n;
    let mut poly = BinaryPolynomial::new();
    for i in 0..n {
        for j in (0..n).filter(|&j| j != i) {
            poly.add_term(&[tsp_x(n, i, j)], inst.w(i, j));
        }
    }
    for v in 0..n {
        let mut out_deg = AffineExpr::constant(-1.0);
        let mut in_deg = AffineExpr::constant(-1.0);
        for u in (0..n).filter(|&u| u != v) {
            out_deg.add_term(tsp_x(n, v, u), 1.0);
            in_deg.add_term(tsp_x(n, u, v), 1.0);
        }
        poly.add_assign(&square_affine(&out_deg).scale(lambda_eq));
        poly.add_assign(&square_affine(&in_deg).scale(lambda_eq));
    }
    poly
}

pub fn tsp_to_qubo_exponential(
    inst: &TspInstance,
    lambda_eq: f64,
    params: &ExponentialPenaltyParams,
) -> Result<QuboModel> {
    inst.validate()?;
    PenaltyWeights::exponential(lambda_eq, *params).validate()?;
    let mut poly = tsp_base(inst, lambda_eq);
    for q in subtour_subsets(inst.n)? {
        poly.add_assign(&exponential_penalty(&tsp_subtour_constraint(inst.n, &q), params)?);
    }
    QuboModel::from_polynomial(&poly.reduce()?, tsp_labels(inst.n))
}

pub fn tsp_to_qubo_slack(inst: &TspInstance, lambda_eq: f64, lambda_ineq: f64) -> Result<QuboModel> {
    inst.validate()?;
    PenaltyWeights::slack(lambda_eq, lambda_ineq).validate()?;
    let mut poly = tsp_base(inst, lambda_eq);
    let mut labels = tsp_labels(inst.n);
    for (qi, q) in subtour_subsets(inst.n)?.iter().enumerate() {
        let m = slack_bits(q.len() as u64 - 1);
        let first = labels.len();
        labels.extend((0..m).map(|t| format!("slack_{qi}_b{t}")));
        let mut h = tsp_subtour_constraint(inst.n, q);
        add_affine(&mut h, &slack_register(first, m));
        poly.add_assign(&square_affine(&h).scale(lambda_ineq));
    }
    QuboModel::from_polynomial(&poly.reduce()?, labels)
}

/// Dispatches to the encoder matching the problem and penalty regime.
pub fn encode(problem: &Problem, weights: &PenaltyWeights) -> Result<QuboModel> {
    match (problem, &weights.inequality) {
        (Problem::Bpp(b), InequalityPenalty::Exponential(p)) => bpp_to_qubo_exponential(b, weights.lambda_eq, p),
        (Problem::Bpp(b), InequalityPenalty::SlackQuadratic { lambda_ineq }) => {
            bpp_to_qubo_slack(b, weights.lambda_eq, *lambda_ineq)
        }
        (Problem::Tsp(t), InequalityPenalty::Exponential(p)) => tsp_to_qubo_exponential(t, weights.lambda_eq, p),
        (Problem::Tsp(t), InequalityPenalty::SlackQuadratic { lambda_ineq }) => {
            tsp_to_qubo_slack(t, weights.lambda_eq, *lambda_ineq)
        }
    }
}

// --------------------------------------------------------------- qubit counts

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Dims {
    Bpp { n_items: usize, n_bins: usize, capacity: u64 },
    Tsp { n: usize },
}

impl From<&Problem> for Dims {
    fn from(p: &Problem) -> Self {
        match p {
            Problem::Bpp(b) => Dims::Bpp {
                n_items: b.n_items,
                n_bins: b.n_bins,
                capacity: b.capacity,
            },
            Problem::Tsp(t) => Dims::Tsp { n: t.n },
        }
    }
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Closed-form variable counts of each encoder.
pub fn qubit_count(encoding: EncodingKind, dims: Dims) -> Result<usize> {
    match dims {
        Dims::Bpp { n_items, n_bins, capacity } => {
            if n_items == 0 || n_bins == 0 {
                return param("bpp dims must be >= 1");
            }
            let base = n_items * n_bins + n_bins;
            Ok(match encoding {
                EncodingKind::Exponential => base,
                EncodingKind::Slack => base + n_bins * slack_bits(capacity),
            })
        }
        Dims::Tsp { n } => {
            if n < 3 {
                return param(format!("tsp needs n >= 3, got {n}"));
            }
            let base = n * (n - 1);
            Ok(match encoding {
                EncodingKind::Exponential => base,
                EncodingKind::Slack => {
                    base + (2..n)
                        .map(|size| binomial(n, size) * slack_bits(size as u64 - 1))
                        .sum::<usize>()
                }
            })
        }
    }
}

// ------------------------------------------------------------------- decoding

/// Number of leading problem variables (excluding slack registers).
pub fn decision_vars(problem: &Problem) -> usize {
    match problem {
        Problem::Bpp(b) => b.n_items * b.n_bins + b.n_bins,
        Problem::Tsp(t) => t.n * (t.n - 1),
    }
}

/// Reads an assignment off the decision bits; `None` unless every item row is
/// one-hot.
pub fn decode_bpp(inst: &BppInstance, bits: &[bool]) -> Option<BppAssignment> {
    let mut item_to_bin = Vec::with_capacity(inst.n_items);
    for i in 0..inst.n_items {
        let mut chosen = (0..inst.n_bins).filter(|&j| bits[bpp_x(inst, i, j)]);
        let j = chosen.next()?;
        if chosen.next().is_some() {
            return None;
        }
        item_to_bin.push(j);
    }
    let bins_used = (0..inst.n_bins).map(|j| bits[bpp_b(inst, j)]).collect();
    Some(BppAssignment { item_to_bin, bins_used })
}

/// Reads a single Hamiltonian cycle off the edge bits, rotated to start at 0.
pub fn decode_tsp(inst: &TspInstance, bits: &[bool]) -> Option<TspTour> {
    let n = inst.n;
    let mut succ = vec![usize::MAX; n];
    let mut indeg = vec![0usize; n];
    for i in 0..n {
        for j in (0..n).filter(|&j| j != i) {
            if bits[tsp_x(n, i, j)] {
                if succ[i] != usize::MAX {
                    return None;
                }
                succ[i] = j;
                indeg[j] += 1;
            }
        }
    }
    if succ.contains(&usize::MAX) || indeg.iter().any(|&d| d != 1) {
        return None;
    }
    let mut order = Vec::with_capacity(n);
    let mut v = 0;
    for _ in 0..n {
        order.push(v);
        v = succ[v];
    }
    if v != 0 || order.iter().skip(1).any(|&u| u == 0) {
        return None;
    }
    let cost = (0..n).map(|t| inst.w(order[t], order[(t + 1) % n])).sum();
    Some(TspTour { order, cost })
}

/// Objective of the decision part when it decodes to a feasible solution.
pub fn feasible_objective(problem: &Problem, bits: &[bool]) -> Option<f64> {
    match problem {
        Problem::Bpp(b) => {
            let a = decode_bpp(b, bits)?;
            crate::instance::bpp_feasible(b, &a)
                .ok()
                .filter(|&f| f)
                .map(|_| a.bin_count() as f64)
        }
        Problem::Tsp(t) => decode_tsp(t, bits).map(|tour| tour.cost),
    }
}

/// Slack register values that turn every inequality into an equality for the
/// given decision bits, or `None` if some constraint is violated.
pub fn slack_completion(problem: &Problem, decision: &[bool]) -> Option<Vec<bool>> {
    let mut out = Vec::new();
    let mut push = |value: f64, bits: usize| -> Option<()> {
        if value < 0.0 || value >= (1u64 << bits) as f64 {
            return None;
        }
        let v = value.round() as u64;
        out.extend((0..bits).map(|t| v >> t & 1 == 1));
        Some(())
    };
    match problem {
        Problem::Bpp(b) => {
            let m = slack_bits(b.capacity);
            for j in 0..b.n_bins {
                push(-bpp_capacity_constraint(b, j).evaluate(decision), m)?;
            }
        }
        Problem::Tsp(t) => {
            for q in subtour_subsets(t.n).ok()? {
                let m = slack_bits(q.len() as u64 - 1);
                push(-tsp_subtour_constraint(t.n, &q).evaluate(decision), m)?;
            }
        }
    }
    Some(out)
}
