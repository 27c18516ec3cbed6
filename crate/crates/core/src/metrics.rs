//! Evaluation metrics: qubit reduction, objective MSE, time ratio and
//! approximation probability.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::encoding::{decision_vars, feasible_objective, slack_completion};
use crate::error::{param, Error, Result};
use crate::instance::{ClassicalSolution, Problem};
use crate::qaoa::SampleHistogram;
use crate::qubo::{index_to_bits, index_to_bitstring, QuboModel};

/// Largest decision-variable count [`optimal_bitstrings`] enumerates.
pub const OPTIMAL_SET_CAP: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub instance_id: String,
    pub q_exp: Option<usize>,
    pub q_slack: Option<usize>,
    pub q_re: Option<f64>,
    pub mse: Option<f64>,
    pub t_slack: Option<f64>,
    pub t_exp: Option<f64>,
    pub q_t: Option<f64>,
    pub approx_prob: Option<f64>,
}

/// `1 - q_exp / q_slack`
pub fn qubit_reduction(q_exp: usize, q_slack: usize) -> Result<f64> {
    if q_slack == 0 {
        return param("q_slack must be >= 1");
    }
    Ok(1.0 - q_exp as f64 / q_slack as f64)
}

pub fn mse(classical: &[f64], quantum: &[f64]) -> Result<f64> {
    if classical.is_empty() || classical.len() != quantum.len() {
        return param(format!(
            "mse needs equal non-empty lists, got {} and {}",
            classical.len(),
            quantum.len()
        ));
    }
    let sum: f64 = classical.iter().zip(quantum).map(|(c, q)| (c - q).powi(2)).sum();
    Ok(sum / classical.len() as f64)
}

/// `t_slack / t_exp`
pub fn time_ratio(t_slack: f64, t_exp: f64) -> Result<f64> {
    if t_exp.is_nan() || t_exp <= 0.0 {
        return param(format!("t_exp must be > 0, got {t_exp}"));
    }
    Ok(t_slack / t_exp)
}

/// Fraction of shots that landed on one of `optimal`.
pub fn approximation_probability(hist: &SampleHistogram, optimal: &BTreeSet<String>) -> Result<f64> {
    if optimal.is_empty() {
        return param("optimal bitstring set is empty");
    }
    if hist.shots == 0 {
        return param("histogram has no shots");
    }
    Ok(hist.count_in(optimal) as f64 / hist.shots as f64)
}

/// Probability of hitting `n_optimal` specific states under uniform sampling.
pub fn uniform_baseline(n_optimal: usize, num_vars: usize) -> f64 {
    n_optimal as f64 / (num_vars as f64).exp2()
}

fn objective_matches(value: f64, target: f64) -> bool {
    (value - target).abs() <= 1e-9 * target.abs().max(1.0)
}

/// Every full bitstring of `model` whose decision part is a feasible solution
/// attaining the oracle objective. Slack registers, when present, hold the
/// values that make each inequality tight.
pub fn optimal_bitstrings(
    problem: &Problem,
    model: &QuboModel,
    oracle: &ClassicalSolution,
) -> Result<BTreeSet<String>> {
    let d = decision_vars(problem);
    if d > OPTIMAL_SET_CAP {
        return Err(Error::Size(format!(
            "{d} > {OPTIMAL_SET_CAP} decision variables for exhaustive optimal-set search"
        )));
    }
    if model.num_vars < d {
        return param(format!(
            "model has {} variables but the problem needs {d} decision variables",
            model.num_vars
        ));
    }
    let mut out = BTreeSet::new();
    for idx in 0..1u64 << d {
        let bits = index_to_bits(idx, d);
        if !feasible_objective(problem, &bits).is_some_and(|v| objective_matches(v, oracle.objective)) {
            continue;
        }
        let mut s = index_to_bitstring(idx, d);
        if model.num_vars > d {
            let slack = slack_completion(problem, &bits).unwrap_or_default();
            if slack.len() != model.num_vars - d {
                return param(format!(
                    "model has {} non-decision variables, slack layout needs {}",
                    model.num_vars - d,
                    slack.len()
                ));
            }
            s.extend(slack.iter().map(|&b| if b { '1' } else { '0' }));
        }
        out.insert(s);
    }
    if out.is_empty() {
        return param(format!(
            "no feasible bitstring attains the oracle objective {}",
            oracle.objective
        ));
    }
    Ok(out)
}

/// Outcome of checking a model's exhaustive ground states against the oracle.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundStateCheck {
    pub energy: f64,
    pub states: Vec<u64>,
    /// Every minimizer decodes to a feasible solution with the oracle objective.
    pub feasible_and_optimal: bool,
}

pub fn check_ground_states(problem: &Problem, model: &QuboModel, oracle: &ClassicalSolution) -> Result<GroundStateCheck> {
    let gs = model.ground_states()?;
    let n = model.num_vars;
    let ok = gs.states.iter().all(|&s| {
        feasible_objective(problem, &index_to_bits(s, n)).is_some_and(|v| objective_matches(v, oracle.objective))
    });
    Ok(GroundStateCheck {
        energy: gs.energy,
        states: gs.states,
        feasible_and_optimal: ok,
    })
}
