//! Grid search over exponential-penalty parameters.
//!
//! Each grid point is encoded, its exhaustive ground states are checked
//! against the classical oracle, and feasible points are solved with seeded
//! QAOA. The best point maximizes the approximation probability of the
//! oracle-optimal bitstrings.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::encoding::{encode, ExponentialPenaltyParams, PenaltyFamily, PenaltyWeights};
use crate::error::{param, Error, Result};
use crate::ising::qubo_to_ising;
use crate::instance::{ClassicalSolution, Problem};
use crate::metrics::{approximation_probability, check_ground_states, optimal_bitstrings};
use crate::qaoa::{optimize, QaoaConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub family: PenaltyFamily,
    pub ks: Vec<u32>,
    pub a_values: Vec<f64>,
    pub b_values: Vec<f64>,
    pub ps: Vec<f64>,
    pub lambda_eqs: Vec<f64>,
}

impl SweepGrid {
    /// `k` in `0..=10`, bases in `{2, 3, 4}`, `p` in `1..=10`.
    pub fn full(family: PenaltyFamily, lambda_eqs: Vec<f64>) -> Self {
        Self {
            family,
            ks: (0..=10).collect(),
            a_values: vec![2.0, 3.0, 4.0],
            b_values: vec![2.0, 3.0, 4.0],
            ps: (1..=10).map(f64::from).collect(),
            lambda_eqs,
        }
    }

    /// Valid parameter combinations in grid order; F3 keeps only `a < b`.
    pub fn points(&self) -> Result<Vec<(ExponentialPenaltyParams, f64)>> {
        let none = [None];
        let a_opts: Vec<Option<f64>> = self.a_values.iter().copied().map(Some).collect();
        let b_opts: Vec<Option<f64>> = self.b_values.iter().copied().map(Some).collect();
        let (a_list, b_list): (&[Option<f64>], &[Option<f64>]) = match self.family {
            PenaltyFamily::F1 => (&none, &none),
            PenaltyFamily::F2 => (&a_opts, &none),
            PenaltyFamily::F3 => (&a_opts, &b_opts),
        };
        let mut out = Vec::new();
        for &k in &self.ks {
            for &a in a_list {
                for &b in b_list {
                    if let (Some(a), Some(b)) = (a, b) {
                        if a >= b {
                            continue;
                        }
                    }
                    for &p in &self.ps {
                        let params = ExponentialPenaltyParams::new(self.family, k, a, b, p)?;
                        for &lambda in &self.lambda_eqs {
                            if !(lambda.is_finite() && lambda > 0.0) {
                                return param(format!("lambda_eq grid value {lambda} must be > 0"));
                            }
                            out.push((params, lambda));
                        }
                    }
                }
            }
        }
        if out.is_empty() {
            return param("sweep grid has no valid points");
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub params: ExponentialPenaltyParams,
    pub lambda_eq: f64,
    pub feasible_ground_state: bool,
    pub approx_prob: f64,
    /// QAOA energy; absent when the ground-state check failed and QAOA was skipped.
    pub expectation: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub evaluated: Vec<SweepPoint>,
    pub best: Option<SweepPoint>,
}

fn tie_key(p: &SweepPoint) -> [f64; 5] {
    let opt = |v: Option<f64>| v.unwrap_or(f64::NEG_INFINITY);
    [
        f64::from(p.params.k),
        opt(p.params.a),
        opt(p.params.b),
        p.params.p,
        p.lambda_eq,
    ]
}

/// Total order used for selection: higher approximation probability first,
/// then lexicographically smaller `(k, a, b, p, lambda_eq)`.
pub fn compare_points(x: &SweepPoint, y: &SweepPoint) -> Ordering {
    y.approx_prob.total_cmp(&x.approx_prob).then_with(|| {
        tie_key(x)
            .iter()
            .zip(tie_key(y).iter())
            .map(|(a, b)| a.total_cmp(b))
            .find(|o| o.is_ne())
            .unwrap_or(Ordering::Equal)
    })
}

pub fn select_best(points: &[SweepPoint]) -> Option<SweepPoint> {
    points
        .iter()
        .filter(|p| p.feasible_ground_state)
        .min_by(|a, b| compare_points(a, b))
        .cloned()
}

pub fn evaluate_point(
    problem: &Problem,
    oracle: &ClassicalSolution,
    params: ExponentialPenaltyParams,
    lambda_eq: f64,
    qaoa: &QaoaConfig,
) -> Result<SweepPoint> {
    let model = encode(problem, &PenaltyWeights::exponential(lambda_eq, params))?;
    let check = check_ground_states(problem, &model, oracle)?;
    if !check.feasible_and_optimal {
        return Ok(SweepPoint {
            params,
            lambda_eq,
            feasible_ground_state: false,
            approx_prob: 0.0,
            expectation: None,
        });
    }
    let optimal = optimal_bitstrings(problem, &model, oracle)?;
    let run = optimize(&qubo_to_ising(&model), qaoa, None)?;
    Ok(SweepPoint {
        params,
        lambda_eq,
        feasible_ground_state: true,
        approx_prob: approximation_probability(&run.histogram, &optimal)?,
        expectation: Some(run.expectation),
    })
}

/// Evaluates every grid point (in parallel) and selects the best feasible one.
pub fn sweep(problem: &Problem, grid: &SweepGrid, qaoa: &QaoaConfig) -> Result<SweepResult> {
    let oracle = problem.solve_bruteforce()?;
    let evaluated = grid
        .points()?
        .into_par_iter()
        .map(|(params, lambda)| evaluate_point(problem, &oracle, params, lambda, qaoa))
        .collect::<Result<Vec<_>>>()?;
    let best = select_best(&evaluated);
    Ok(SweepResult { evaluated, best })
}

pub const SWEEP_CSV_HEADER: &str = "family,k,a,b,p,lambda_eq,feasible,approx_prob,expectation";

fn opt_field(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn sweep_csv(result: &SweepResult) -> String {
    let mut out = format!("{SWEEP_CSV_HEADER}\n");
    for p in &result.evaluated {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            p.params.family,
            p.params.k,
            opt_field(p.params.a),
            opt_field(p.params.b),
            p.params.p,
            p.lambda_eq,
            p.feasible_ground_state,
            p.approx_prob,
            opt_field(p.expectation),
        ));
    }
    out
}

/// Reads rows written by [`sweep_csv`]; the best point is re-selected.
pub fn parse_sweep_csv(s: &str) -> Result<SweepResult> {
    let mut lines = s.lines();
    if lines.next() != Some(SWEEP_CSV_HEADER) {
        return Err(Error::Format(format!("sweep CSV must start with {SWEEP_CSV_HEADER}")));
    }
    let bad = |l: &str, what: &str| Error::Format(format!("bad sweep row {l:?}: {what}"));
    let mut evaluated = Vec::new();
    for l in lines.filter(|l| !l.is_empty()) {
        let f: Vec<&str> = l.split(',').collect();
        if f.len() != 9 {
            return Err(bad(l, "expected 9 fields"));
        }
        let num = |v: &str| v.parse::<f64>().map_err(|_| bad(l, v));
        let opt = |v: &str| if v.is_empty() { Ok(None) } else { num(v).map(Some) };
        let params = ExponentialPenaltyParams::new(
            f[0].parse()?,
            f[1].parse().map_err(|_| bad(l, f[1]))?,
            opt(f[2])?,
            opt(f[3])?,
            num(f[4])?,
        )?;
        evaluated.push(SweepPoint {
            params,
            lambda_eq: num(f[5])?,
            feasible_ground_state: f[6].parse().map_err(|_| bad(l, f[6]))?,
            approx_prob: num(f[7])?,
            expectation: opt(f[8])?,
        });
    }
    let best = select_best(&evaluated);
    Ok(SweepResult { evaluated, best })
}
