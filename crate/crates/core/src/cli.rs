//! Command-line pipeline: generate, encode, solve, sweep, scan and report.
//!
//! Every subcommand is described by a serializable [`RunConfig`]; all
//! randomness derives from its top-level seed (`seed + stage`).

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::encoding::{
    decision_vars, default_lambda_eq, encode, feasible_objective, EncodingKind, ExponentialPenaltyParams,
    PenaltyFamily, PenaltyWeights,
};
use crate::error::{param, Error, Result};
use crate::instance::{generate_bpp, generate_tsp, ClassicalSolution, Problem, ProblemKind};
use crate::ising::qubo_to_ising;
use crate::metrics::{
    approximation_probability, check_ground_states, mse, optimal_bitstrings, qubit_reduction, time_ratio,
    MetricReport, OPTIMAL_SET_CAP,
};
use crate::qaoa::{landscape, landscape_csv, optimize, QaoaConfig, QaoaRun, DEFAULT_MAX_ITERS, DEFAULT_SHOTS};
use crate::qubo::{bitstring_to_index, index_to_bits, QuboModel};
use crate::sweep::{sweep, sweep_csv, SweepGrid};

/// Seed offsets of the pipeline stages.
pub const STAGE_GENERATE: u64 = 0;
pub const STAGE_QAOA: u64 = 1;

#[derive(Debug, Clone, PartialEq, Parser, Serialize, Deserialize)]
#[command(name = "qpenal", version, about = "Penalty-encoded QUBO workbench with a QAOA simulator")]
pub struct RunConfig {
    /// Top-level seed; each stage uses `seed + stage`.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Generate a random instance.
    Generate(GenerateArgs),
    /// Encode an instance as a QUBO (and optionally Ising) model.
    Encode(EncodeArgs),
    /// Solve an instance exhaustively.
    SolveClassical(SolveClassicalArgs),
    /// Encode an instance and solve it with QAOA.
    SolveQaoa(SolveQaoaArgs),
    /// Grid search over exponential-penalty parameters.
    Sweep(SweepArgs),
    /// Single-layer energy landscape over a beta/gamma grid.
    Landscape(LandscapeArgs),
    /// Aggregate metrics over run and solution files.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemArg {
    Bpp,
    Tsp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EncodingArg {
    Slack,
    Exp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
pub enum FamilyArg {
    #[value(name = "F1", alias = "f1")]
    F1,
    #[value(name = "F2", alias = "f2")]
    F2,
    #[value(name = "F3", alias = "f3")]
    F3,
}

impl From<FamilyArg> for PenaltyFamily {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::F1 => PenaltyFamily::F1,
            FamilyArg::F2 => PenaltyFamily::F2,
            FamilyArg::F3 => PenaltyFamily::F3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct GenerateArgs {
    #[arg(long, value_enum)]
    pub problem: ProblemArg,
    #[arg(long, default_value_t = 3)]
    pub n_items: usize,
    #[arg(long, default_value_t = 2)]
    pub n_bins: usize,
    #[arg(long, default_value_t = 100)]
    pub capacity: u64,
    /// Number of TSP vertices.
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    #[arg(long, default_value_t = 1.0)]
    pub weight_lo: f64,
    #[arg(long, default_value_t = 10.0)]
    pub weight_hi: f64,
    /// Draw w_ij and w_ji independently.
    #[arg(long)]
    pub asymmetric: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct PenaltyArgs {
    #[arg(long, value_enum, default_value_t = EncodingArg::Exp)]
    pub encoding: EncodingArg,
    #[arg(long, value_enum, default_value_t = FamilyArg::F1)]
    pub family: FamilyArg,
    #[arg(long, default_value_t = 1)]
    pub k: u32,
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long)]
    pub b: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub p: f64,
    /// Equality penalty; defaults to 1 + an objective upper bound.
    #[arg(long)]
    pub lambda_eq: Option<f64>,
    /// Slack penalty; defaults to the equality penalty.
    #[arg(long)]
    pub lambda_ineq: Option<f64>,
}

impl PenaltyArgs {
    pub fn weights(&self, problem: &Problem) -> Result<PenaltyWeights> {
        let lambda_eq = self.lambda_eq.unwrap_or_else(|| default_lambda_eq(problem));
        let w = match self.encoding {
            EncodingArg::Exp => PenaltyWeights::exponential(
                lambda_eq,
                ExponentialPenaltyParams::new(self.family.into(), self.k, self.a, self.b, self.p)?,
            ),
            EncodingArg::Slack => PenaltyWeights::slack(lambda_eq, self.lambda_ineq.unwrap_or(lambda_eq)),
        };
        w.validate()?;
        Ok(w)
    }
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct QaoaArgs {
    #[arg(long, default_value_t = 1)]
    pub layers: usize,
    #[arg(long, default_value_t = DEFAULT_SHOTS)]
    pub shots: u64,
    #[arg(long, default_value_t = DEFAULT_MAX_ITERS)]
    pub max_iters: usize,
}

impl QaoaArgs {
    fn config(&self, seed: u64) -> QaoaConfig {
        QaoaConfig {
            layers: self.layers,
            max_iters: self.max_iters,
            shots: self.shots,
            seed: seed.wrapping_add(STAGE_QAOA),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct EncodeArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[command(flatten)]
    pub penalty: PenaltyArgs,
    #[arg(long)]
    pub out: PathBuf,
    /// Also write the Ising image here.
    #[arg(long)]
    pub ising_out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct SolveClassicalArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct SolveQaoaArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[command(flatten)]
    pub penalty: PenaltyArgs,
    #[command(flatten)]
    pub qaoa: QaoaArgs,
    /// Check that the exhaustive QUBO ground state is feasible and optimal first.
    #[arg(long)]
    pub verify_ground_state: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct SweepArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long, value_enum)]
    pub family: FamilyArg,
    /// Comma-separated k values (default 0..=10).
    #[arg(long)]
    pub k_grid: Option<String>,
    #[arg(long)]
    pub a_grid: Option<String>,
    #[arg(long)]
    pub b_grid: Option<String>,
    #[arg(long)]
    pub p_grid: Option<String>,
    /// Comma-separated equality penalties (default: 1 + objective bound).
    #[arg(long)]
    pub lambda_eq_grid: Option<String>,
    #[command(flatten)]
    pub qaoa: QaoaArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct LandscapeArgs {
    /// Instance to encode; ignored when --qubo is given.
    #[arg(long)]
    pub instance: Option<PathBuf>,
    /// Previously exported QUBO model.
    #[arg(long)]
    pub qubo: Option<PathBuf>,
    #[command(flatten)]
    pub penalty: PenaltyArgs,
    #[arg(long)]
    pub beta_grid: Option<String>,
    #[arg(long)]
    pub gamma_grid: Option<String>,
    /// Points per axis when a grid is not given (beta in [0, pi), gamma in [0, 2 pi)).
    #[arg(long, default_value_t = 32)]
    pub grid_size: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct ReportArgs {
    /// Run records and classical solution files.
    #[arg(required = true)]
    pub files: Vec<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn parse_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(str::trim)
        .filter(|v| !v.is_empty())
        .map(|v| v.parse::<T>().map_err(|_| Error::Parameter(format!("cannot parse {v:?} in list {s:?}"))))
        .collect()
}

/// `count` evenly spaced points in `[0, end)`.
pub fn linspace_open(end: f64, count: usize) -> Vec<f64> {
    (0..count).map(|i| end * i as f64 / count as f64).collect()
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path)
        .map_err(|e| Error::Parameter(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, contents)?;
    Ok(())
}

pub fn load_problem(path: &Path) -> Result<Problem> {
    Problem::from_json(&read(path)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionRecord {
    pub record: String,
    pub instance_id: String,
    pub problem: ProblemKind,
    pub solution: ClassicalSolution,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunRecord {
    pub record: String,
    pub instance_id: String,
    pub problem: ProblemKind,
    pub encoding: EncodingKind,
    pub weights: PenaltyWeights,
    pub num_qubits: usize,
    pub config: RunConfig,
    /// Oracle optimum, when the instance is small enough to enumerate.
    pub classical_objective: Option<f64>,
    /// Objective of the most frequent feasible sample.
    pub quantum_objective: Option<f64>,
    pub approx_prob: Option<f64>,
    pub run: QaoaRun,
}

pub const RUN_RECORD: &str = "qaoa_run";
pub const SOLUTION_RECORD: &str = "classical_solution";

/// Objective of the most frequent sampled bitstring that decodes feasibly.
pub fn quantum_objective(problem: &Problem, run: &QaoaRun) -> Option<f64> {
    let d = decision_vars(problem);
    run.histogram.ranked().into_iter().find_map(|(s, _)| {
        let idx = bitstring_to_index(s).ok()?;
        feasible_objective(problem, &index_to_bits(idx, d))
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub instances: Vec<MetricReport>,
    pub mse: Option<f64>,
    pub pairs: usize,
    pub unmatched: Vec<String>,
}

#[derive(Default)]
struct InstanceAcc {
    classical: Option<f64>,
    runs: Vec<RunRecord>,
}

fn mean(v: &[f64]) -> Option<f64> {
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

/// Aggregates run records and classical solutions by instance id.
pub fn build_report(run_files: &[String]) -> Result<ReportFile> {
    let mut by_id: BTreeMap<String, InstanceAcc> = BTreeMap::new();
    for text in run_files {
        let v: serde_json::Value = serde_json::from_str(text)?;
        match v.get("record").and_then(|r| r.as_str()) {
            Some(RUN_RECORD) => {
                let r: RunRecord = serde_json::from_value(v)?;
                let acc = by_id.entry(r.instance_id.clone()).or_default();
                if acc.classical.is_none() {
                    acc.classical = r.classical_objective;
                }
                acc.runs.push(r);
            }
            Some(SOLUTION_RECORD) => {
                let s: SolutionRecord = serde_json::from_value(v)?;
                by_id.entry(s.instance_id).or_default().classical = Some(s.solution.objective);
            }
            other => return Err(Error::Format(format!("unknown record type {other:?}"))),
        }
    }

    let mut instances = Vec::new();
    let mut unmatched = Vec::new();
    let (mut all_c, mut all_q) = (Vec::new(), Vec::new());
    for (id, acc) in &by_id {
        let of = |kind: EncodingKind| acc.runs.iter().filter(move |r| r.encoding == kind);
        let q_exp = of(EncodingKind::Exponential).map(|r| r.num_qubits).next();
        let q_slack = of(EncodingKind::Slack).map(|r| r.num_qubits).next();
        let t_exp = mean(&of(EncodingKind::Exponential).map(|r| r.run.wall_time).collect::<Vec<_>>());
        let t_slack = mean(&of(EncodingKind::Slack).map(|r| r.run.wall_time).collect::<Vec<_>>());
        let probs: Vec<f64> = of(EncodingKind::Exponential).filter_map(|r| r.approx_prob).collect();

        let quantum: Vec<f64> = acc.runs.iter().filter_map(|r| r.quantum_objective).collect();
        let inst_mse = match acc.classical {
            Some(c) if !quantum.is_empty() => {
                all_c.extend(std::iter::repeat_n(c, quantum.len()));
                all_q.extend(&quantum);
                Some(mse(&vec![c; quantum.len()], &quantum)?)
            }
            Some(_) if acc.runs.is_empty() => {
                unmatched.push(format!("{id}: classical solution without quantum runs"));
                None
            }
            Some(_) => {
                unmatched.push(format!("{id}: no run produced a feasible sample"));
                None
            }
            None => {
                unmatched.push(format!("{id}: quantum runs without a classical objective"));
                None
            }
        };
        instances.push(MetricReport {
            instance_id: id.clone(),
            q_exp,
            q_slack,
            q_re: match (q_exp, q_slack) {
                (Some(e), Some(s)) => Some(qubit_reduction(e, s)?),
                _ => None,
            },
            mse: inst_mse,
            t_slack,
            t_exp,
            q_t: match (t_slack, t_exp) {
                (Some(s), Some(e)) if e > 0.0 => Some(time_ratio(s, e)?),
                _ => None,
            },
            approx_prob: mean(&probs),
        });
    }
    Ok(ReportFile {
        instances,
        mse: if all_c.is_empty() { None } else { Some(mse(&all_c, &all_q)?) },
        pairs: all_c.len(),
        unmatched,
    })
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.4}")).unwrap_or_else(|| "-".into())
}

pub fn report_table(r: &ReportFile) -> String {
    let mut out = format!(
        "{:<22} {:>5} {:>7} {:>7} {:>9} {:>9} {:>9}\n",
        "instance", "q_exp", "q_slack", "q_re", "mse", "q_t", "approx_p"
    );
    for m in &r.instances {
        let qi = |v: Option<usize>| v.map(|x| x.to_string()).unwrap_or_else(|| "-".into());
        out.push_str(&format!(
            "{:<22} {:>5} {:>7} {:>7} {:>9} {:>9} {:>9}\n",
            m.instance_id,
            qi(m.q_exp),
            qi(m.q_slack),
            fmt_opt(m.q_re),
            fmt_opt(m.mse),
            fmt_opt(m.q_t),
            fmt_opt(m.approx_prob)
        ));
    }
    out.push_str(&format!("overall mse = {} over {} pairs\n", fmt_opt(r.mse), r.pairs));
    for u in &r.unmatched {
        out.push_str(&format!("unmatched: {u}\n"));
    }
    out
}

fn solve_qaoa(config: &RunConfig, args: &SolveQaoaArgs) -> Result<(RunRecord, String)> {
    let problem = load_problem(&args.instance)?;
    let weights = args.penalty.weights(&problem)?;
    let model = encode(&problem, &weights)?;
    let oracle = problem.solve_bruteforce().ok();
    if args.verify_ground_state {
        if model.num_vars > OPTIMAL_SET_CAP {
            return Err(Error::Size(format!(
                "{} > {OPTIMAL_SET_CAP} exhaustive cap: skip ground-state verification or reduce instance",
                model.num_vars
            )));
        }
        let oracle = oracle
            .as_ref()
            .ok_or_else(|| Error::Size("instance too large for the classical oracle".into()))?;
        if !check_ground_states(&problem, &model, oracle)?.feasible_and_optimal {
            return param("QUBO ground state is not feasible and optimal; increase the penalty weights");
        }
    }
    let run = optimize(&qubo_to_ising(&model), &args.qaoa.config(config.seed), None)?;
    let approx_prob = match &oracle {
        Some(o) if decision_vars(&problem) <= OPTIMAL_SET_CAP => {
            Some(approximation_probability(&run.histogram, &optimal_bitstrings(&problem, &model, o)?)?)
        }
        _ => None,
    };
    let record = RunRecord {
        record: RUN_RECORD.into(),
        instance_id: problem.fingerprint(),
        problem: problem.kind(),
        encoding: weights.encoding_kind(),
        weights,
        num_qubits: model.num_vars,
        config: config.clone(),
        classical_objective: oracle.as_ref().map(|o| o.objective),
        quantum_objective: quantum_objective(&problem, &run),
        approx_prob,
        run,
    };
    let summary = format!(
        "qaoa: {} qubits, energy {:.6}, approx_prob {}, {} evaluations -> {}",
        record.num_qubits,
        record.run.expectation,
        fmt_opt(record.approx_prob),
        record.run.trace.iterations.len(),
        args.out.display()
    );
    Ok((record, summary))
}

/// Executes one subcommand, writing its artifacts; returns a one-line summary.
pub fn run(config: &RunConfig) -> Result<String> {
    match &config.command {
        Command::Generate(a) => {
            let seed = config.seed.wrapping_add(STAGE_GENERATE);
            let problem = match a.problem {
                ProblemArg::Bpp => {
                    let lo = a.weight_lo.round() as u64;
                    let hi = a.weight_hi.round() as u64;
                    Problem::Bpp(generate_bpp(seed, a.n_items, a.n_bins, lo, hi, a.capacity)?)
                }
                ProblemArg::Tsp => Problem::Tsp(generate_tsp(seed, a.n, a.weight_lo, a.weight_hi, !a.asymmetric)?),
            };
            write(&a.out, &problem.to_json()?)?;
            Ok(format!("generated {} -> {}", problem.fingerprint(), a.out.display()))
        }
        Command::Encode(a) => {
            let problem = load_problem(&a.instance)?;
            let model = encode(&problem, &a.penalty.weights(&problem)?)?;
            write(&a.out, &model.to_json()?)?;
            if let Some(path) = &a.ising_out {
                write(path, &qubo_to_ising(&model).to_json()?)?;
            }
            Ok(format!(
                "encoded {} variables ({} encoding) -> {}",
                model.num_vars,
                a.penalty.weights(&problem)?.encoding_kind(),
                a.out.display()
            ))
        }
        Command::SolveClassical(a) => {
            let problem = load_problem(&a.instance)?;
            let solution = problem.solve_bruteforce()?;
            let record = SolutionRecord {
                record: SOLUTION_RECORD.into(),
                instance_id: problem.fingerprint(),
                problem: problem.kind(),
                solution,
            };
            write(&a.out, &serde_json::to_string_pretty(&record)?)?;
            Ok(format!(
                "optimum {} after {} candidates -> {}",
                record.solution.objective,
                record.solution.enumerated_count,
                a.out.display()
            ))
        }
        Command::SolveQaoa(a) => {
            let (record, summary) = solve_qaoa(config, a)?;
            write(&a.out, &serde_json::to_string_pretty(&record)?)?;
            Ok(summary)
        }
        Command::Sweep(a) => {
            let problem = load_problem(&a.instance)?;
            let mut grid = SweepGrid::full(a.family.into(), vec![default_lambda_eq(&problem)]);
            if let Some(s) = &a.k_grid {
                grid.ks = parse_list(s)?;
            }
            if let Some(s) = &a.a_grid {
                grid.a_values = parse_list(s)?;
            }
            if let Some(s) = &a.b_grid {
                grid.b_values = parse_list(s)?;
            }
            if let Some(s) = &a.p_grid {
                grid.ps = parse_list(s)?;
            }
            if let Some(s) = &a.lambda_eq_grid {
                grid.lambda_eqs = parse_list(s)?;
            }
            let result = sweep(&problem, &grid, &a.qaoa.config(config.seed))?;
            write(&a.out, &sweep_csv(&result))?;
            Ok(match &result.best {
                Some(b) => format!(
                    "sweep: {} points, best {} k={} a={} b={} p={} lambda_eq={} approx_prob={:.4} -> {}",
                    result.evaluated.len(),
                    b.params.family,
                    b.params.k,
                    fmt_opt(b.params.a),
                    fmt_opt(b.params.b),
                    b.params.p,
                    b.lambda_eq,
                    b.approx_prob,
                    a.out.display()
                ),
                None => format!(
                    "sweep: {} points, none with a feasible ground state -> {}",
                    result.evaluated.len(),
                    a.out.display()
                ),
            })
        }
        Command::Landscape(a) => {
            let model = match (&a.qubo, &a.instance) {
                (Some(q), _) => QuboModel::from_json(&read(q)?)?,
                (None, Some(i)) => {
                    let problem = load_problem(i)?;
                    encode(&problem, &a.penalty.weights(&problem)?)?
                }
                (None, None) => return param("landscape needs --instance or --qubo"),
            };
            let betas = match &a.beta_grid {
                Some(s) => parse_list(s)?,
                None => linspace_open(PI, a.grid_size),
            };
            let gammas = match &a.gamma_grid {
                Some(s) => parse_list(s)?,
                None => linspace_open(2.0 * PI, a.grid_size),
            };
            let values = landscape(&qubo_to_ising(&model), &betas, &gammas)?;
            write(&a.out, &landscape_csv(&betas, &gammas, &values))?;
            let min = values.iter().flatten().copied().fold(f64::INFINITY, f64::min);
            Ok(format!(
                "landscape {}x{} over {} qubits, min energy {min:.6} -> {}",
                betas.len(),
                gammas.len(),
                model.num_vars,
                a.out.display()
            ))
        }
        Command::Report(a) => {
            let texts = a.files.iter().map(|p| read(p)).collect::<Result<Vec<_>>>()?;
            let report = build_report(&texts)?;
            if let Some(out) = &a.out {
                write(out, &serde_json::to_string_pretty(&report)?)?;
            }
            Ok(report_table(&report))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn list_parsing() {
        assert_eq!(parse_list::<f64>("0.1, 0.2,0.3").unwrap(), vec![0.1, 0.2, 0.3]);
        assert!(parse_list::<u32>("1,x").is_err());
        assert_eq!(linspace_open(4.0, 4), vec![0.0, 1.0, 2.0, 3.0]);
    }

    #[test]
    fn config_round_trips_through_json() {
        let cfg = RunConfig::try_parse_from([
            "qpenal", "--seed", "9", "solve-qaoa", "--instance", "i.json", "--encoding", "exp", "--family", "F3",
            "--a", "2", "--b", "3", "--k", "1", "--p", "2", "--out", "r.json",
        ])
        .unwrap();
        assert_eq!(cfg.seed, 9);
        let json = serde_json::to_string(&cfg).unwrap();
        assert_eq!(serde_json::from_str::<RunConfig>(&json).unwrap(), cfg);
    }
}
