//! Exact statevector simulation of QAOA on an [`IsingModel`].
//!
//! Basis state `idx` has qubit `i` in `|1>` iff bit `i` of `idx` is set, the
//! same layout the QUBO bitstrings use; `|0>` carries spin `+1`.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::ising::IsingModel;
use crate::qubo::index_to_bitstring;

pub const MAX_QUBITS: usize = 24;
pub const DEFAULT_SHOTS: u64 = 10_000;
pub const DEFAULT_MAX_ITERS: usize = 200;
pub const INITIAL_TRUST_RADIUS: f64 = 0.5;
pub const FINAL_TRUST_RADIUS: f64 = 1e-4;

/// States at least this large are updated in parallel blocks.
const PAR_BLOCK: usize = 1 << 14;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

/// Uniform superposition over `n` qubits.
pub fn initial_state(n: usize) -> Result<StateVector> {
    if !(1..=MAX_QUBITS).contains(&n) {
        return Err(Error::Size(format!("{n} qubits outside the simulator range 1..={MAX_QUBITS}")));
    }
    let dim = 1usize << n;
    let a = Complex64::new((dim as f64).sqrt().recip(), 0.0);
    Ok(StateVector {
        n_qubits: n,
        amplitudes: vec![a; dim],
    })
}

impl StateVector {
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let dim = amplitudes.len();
        if !dim.is_power_of_two() || !(2..=1 << MAX_QUBITS).contains(&dim) {
            return param(format!("{dim} amplitudes is not 2^n for 1 <= n <= {MAX_QUBITS}"));
        }
        Ok(Self {
            n_qubits: dim.trailing_zeros() as usize,
            amplitudes,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `amp[b] *= exp(-i gamma E(b))` with the constant energy term omitted.
    pub fn apply_cost_layer(&mut self, m: &IsingModel, gamma: f64) -> Result<()> {
        if m.num_spins != self.n_qubits {
            return param(format!(
                "model has {} spins, state has {} qubits",
                m.num_spins, self.n_qubits
            ));
        }
        self.apply_phases(&m.diagonal(), gamma)
    }

    /// Cost layer from a precomputed diagonal.
    pub fn apply_phases(&mut self, diagonal: &[f64], gamma: f64) -> Result<()> {
        if diagonal.len() != self.amplitudes.len() {
            return param(format!(
                "diagonal has {} entries, state has {}",
                diagonal.len(),
                self.amplitudes.len()
            ));
        }
        let rotate = |(a, &e): (&mut Complex64, &f64)| *a *= Complex64::from_polar(1.0, -gamma * e);
        if self.amplitudes.len() >= PAR_BLOCK {
            self.amplitudes.par_iter_mut().zip(diagonal.par_iter()).for_each(rotate);
        } else {
            self.amplitudes.iter_mut().zip(diagonal.iter()).for_each(rotate);
        }
        Ok(())
    }

    /// `exp(-i beta X)` on every qubit.
    pub fn apply_mixer_layer(&mut self, beta: f64) {
        let (s, c) = beta.sin_cos();
        let mix = |block: &mut [Complex64], stride: usize| {
            for pair in block.chunks_mut(2 * stride) {
                let (lo, hi) = pair.split_at_mut(stride);
                for (a0, a1) in lo.iter_mut().zip(hi.iter_mut()) {
                    let (x0, x1) = (*a0, *a1);
                    *a0 = x0 * c + Complex64::new(x1.im * s, -x1.re * s);
                    *a1 = x1 * c + Complex64::new(x0.im * s, -x0.re * s);
                }
            }
        };
        for q in 0..self.n_qubits {
            let stride = 1usize << q;
            if self.amplitudes.len() >= PAR_BLOCK {
                let block = (2 * stride).max(PAR_BLOCK);
                self.amplitudes.par_chunks_mut(block).for_each(|b| mix(b, stride));
            } else {
                mix(&mut self.amplitudes, stride);
            }
        }
    }

    /// `sum_b |amp_b|^2 diagonal[b]`, reduced in a fixed block order.
    pub fn expectation_diagonal(&self, diagonal: &[f64]) -> f64 {
        let term = |(a, e): (&Complex64, &f64)| a.norm_sqr() * e;
        if self.amplitudes.len() >= PAR_BLOCK {
            let partial: Vec<f64> = self
                .amplitudes
                .par_chunks(PAR_BLOCK)
                .zip(diagonal.par_chunks(PAR_BLOCK))
                .map(|(a, d)| a.iter().zip(d).map(term).sum())
                .collect();
            partial.iter().sum()
        } else {
            self.amplitudes.iter().zip(diagonal).map(term).sum()
        }
    }

    /// Draws `shots` measurements in the computational basis.
    pub fn sample(&self, shots: u64, seed: u64) -> Result<SampleHistogram> {
        if shots == 0 {
            return param("shots must be >= 1");
        }
        let dist = WeightedIndex::new(self.probabilities())
            .map_err(|e| Error::Parameter(format!("cannot sample from state: {e}")))?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut by_index: BTreeMap<usize, u64> = BTreeMap::new();
        for _ in 0..shots {
            *by_index.entry(dist.sample(&mut rng)).or_insert(0) += 1;
        }
        Ok(SampleHistogram {
            shots,
            counts: by_index
                .into_iter()
                .map(|(idx, c)| (index_to_bitstring(idx as u64, self.n_qubits), c))
                .collect(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QaoaParams {
    pub layers: usize,
    pub betas: Vec<f64>,
    pub gammas: Vec<f64>,
}

impl QaoaParams {
    pub fn new(betas: Vec<f64>, gammas: Vec<f64>) -> Result<Self> {
        if betas.is_empty() || betas.len() != gammas.len() {
            return param(format!(
                "need matching non-empty beta/gamma lists, got {} and {}",
                betas.len(),
                gammas.len()
            ));
        }
        Ok(Self {
            layers: betas.len(),
            betas,
            gammas,
        })
    }

    pub fn single(beta: f64, gamma: f64) -> Self {
        Self {
            layers: 1,
            betas: vec![beta],
            gammas: vec![gamma],
        }
    }

    pub fn zeros(layers: usize) -> Self {
        Self {
            layers,
            betas: vec![0.0; layers],
            gammas: vec![0.0; layers],
        }
    }

    /// Uniform draw of `beta` in `[0, pi)` and `gamma` in `[0, 2 pi)`.
    pub fn random(layers: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut betas = Vec::with_capacity(layers);
        let mut gammas = Vec::with_capacity(layers);
        for _ in 0..layers {
            betas.push(rng.random_range(0.0..PI));
            gammas.push(rng.random_range(0.0..2.0 * PI));
        }
        Self { layers, betas, gammas }
    }

    fn validate(&self) -> Result<()> {
        if self.layers == 0 || self.betas.len() != self.layers || self.gammas.len() != self.layers {
            return param(format!(
                "layers = {} with {} betas and {} gammas",
                self.layers,
                self.betas.len(),
                self.gammas.len()
            ));
        }
        Ok(())
    }

    /// `[beta_1..beta_p, gamma_1..gamma_p]`
    pub fn to_vector(&self) -> Vec<f64> {
        self.betas.iter().chain(&self.gammas).copied().collect()
    }

    pub fn from_vector(x: &[f64]) -> Self {
        let p = x.len() / 2;
        Self {
            layers: p,
            betas: x[..p].to_vec(),
            gammas: x[p..].to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleHistogram {
    pub shots: u64,
    pub counts: BTreeMap<String, u64>,
}

impl SampleHistogram {
    pub fn count_in(&self, bitstrings: &BTreeSet<String>) -> u64 {
        bitstrings.iter().filter_map(|b| self.counts.get(b)).sum()
    }

    /// Bitstrings ordered by decreasing count, ties broken lexicographically.
    pub fn ranked(&self) -> Vec<(&str, u64)> {
        let mut v: Vec<(&str, u64)> = self.counts.iter().map(|(k, &c)| (k.as_str(), c)).collect();
        v.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
        v
    }
}

/// Precomputed cost diagonal for repeated circuit evaluation.
#[derive(Debug, Clone)]
pub struct QaoaSimulator<'a> {
    model: &'a IsingModel,
    diagonal: Vec<f64>,
}

impl<'a> QaoaSimulator<'a> {
    pub fn new(model: &'a IsingModel) -> Result<Self> {
        if !(1..=MAX_QUBITS).contains(&model.num_spins) {
            return Err(Error::Size(format!(
                "{} spins outside the simulator range 1..={MAX_QUBITS}",
                model.num_spins
            )));
        }
        Ok(Self {
            model,
            diagonal: model.diagonal(),
        })
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }

    pub fn state(&self, params: &QaoaParams) -> Result<StateVector> {
        params.validate()?;
        let mut psi = initial_state(self.model.num_spins)?;
        for (&beta, &gamma) in params.betas.iter().zip(&params.gammas) {
            psi.apply_phases(&self.diagonal, gamma)?;
            psi.apply_mixer_layer(beta);
        }
        Ok(psi)
    }

    /// `<psi|H|psi>` including the constant term.
    pub fn expectation(&self, params: &QaoaParams) -> Result<f64> {
        Ok(self.model.constant + self.state(params)?.expectation_diagonal(&self.diagonal))
    }

    /// Exact minimum energy over all basis states.
    pub fn ground_energy(&self) -> f64 {
        self.model.constant + self.diagonal.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

pub fn qaoa_expectation(m: &IsingModel, params: &QaoaParams) -> Result<f64> {
    QaoaSimulator::new(m)?.expectation(params)
}

pub fn sample(m: &IsingModel, params: &QaoaParams, shots: u64, seed: u64) -> Result<SampleHistogram> {
    QaoaSimulator::new(m)?.state(params)?.sample(shots, seed)
}

/// Single-layer expectation over a `beta x gamma` grid; row `i` is `beta_grid[i]`.
pub fn landscape(m: &IsingModel, beta_grid: &[f64], gamma_grid: &[f64]) -> Result<Vec<Vec<f64>>> {
    if beta_grid.is_empty() || gamma_grid.is_empty() {
        return param("landscape grids must be non-empty");
    }
    let sim = QaoaSimulator::new(m)?;
    beta_grid
        .par_iter()
        .map(|&b| {
            gamma_grid
                .iter()
                .map(|&g| sim.expectation(&QaoaParams::single(b, g)))
                .collect()
        })
        .collect()
}

pub fn landscape_csv(beta_grid: &[f64], gamma_grid: &[f64], values: &[Vec<f64>]) -> String {
    let mut out = String::from("beta,gamma,energy\n");
    for (b, row) in beta_grid.iter().zip(values) {
        for (g, e) in gamma_grid.iter().zip(row) {
            out.push_str(&format!("{b},{g},{e}\n"));
        }
    }
    out
}

/// Parses the CSV written by [`landscape_csv`] back into `(beta, gamma, energy)` rows.
pub fn parse_landscape_csv(s: &str) -> Result<Vec<(f64, f64, f64)>> {
    let mut lines = s.lines();
    if lines.next() != Some("beta,gamma,energy") {
        return Err(Error::Format("landscape CSV must start with beta,gamma,energy".into()));
    }
    lines
        .filter(|l| !l.is_empty())
        .map(|l| {
            let f: Vec<f64> = l
                .split(',')
                .map(|v| v.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Format(format!("bad landscape row {l:?}: {e}")))?;
            match f[..] {
                [b, g, e] => Ok((b, g, e)),
                _ => Err(Error::Format(format!("landscape row {l:?} needs 3 fields"))),
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub params: Vec<f64>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerTrace {
    pub iterations: Vec<TraceEntry>,
    pub best_params: QaoaParams,
    pub best_value: f64,
}

impl OptimizerTrace {
    pub fn best_so_far(&self) -> Vec<f64> {
        let mut best = f64::INFINITY;
        self.iterations
            .iter()
            .map(|e| {
                best = best.min(e.value);
                best
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QaoaRun {
    pub params: QaoaParams,
    pub expectation: f64,
    pub histogram: SampleHistogram,
    pub trace: OptimizerTrace,
    pub wall_time: f64,
    /// False when the evaluation budget ran out before the trust radius
    /// shrank to its terminal value.
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QaoaConfig {
    pub layers: usize,
    pub max_iters: usize,
    pub shots: u64,
    pub seed: u64,
}

impl Default for QaoaConfig {
    fn default() -> Self {
        Self {
            layers: 1,
            max_iters: DEFAULT_MAX_ITERS,
            shots: DEFAULT_SHOTS,
            seed: 0,
        }
    }
}

/// Minimizes the QAOA energy with COBYLA, then samples the best circuit.
///
/// The starting point comes from `init` or from `config.seed`; sampling uses
/// `config.seed + 1`.
pub fn optimize(m: &IsingModel, config: &QaoaConfig, init: Option<QaoaParams>) -> Result<QaoaRun> {
    if config.layers == 0 {
        return param("layers must be >= 1");
    }
    if config.max_iters == 0 {
        return param("max_iters must be >= 1");
    }
    let start = match init {
        Some(p) => {
            p.validate()?;
            if p.layers != config.layers {
                return param(format!("init has {} layers, config asks for {}", p.layers, config.layers));
            }
            p
        }
        None => QaoaParams::random(config.layers, config.seed),
    };
    let sim = QaoaSimulator::new(m)?;
    let clock = Instant::now();

    let trace = RefCell::new(Vec::<TraceEntry>::new());
    let objective = |x: &[f64], _: &mut ()| -> f64 {
        let value = sim
            .expectation(&QaoaParams::from_vector(x))
            .unwrap_or(f64::INFINITY);
        trace.borrow_mut().push(TraceEntry {
            params: x.to_vec(),
            value,
        });
        value
    };
    let x0 = start.to_vector();
    let bounds: Vec<(f64, f64)> = (0..config.layers)
        .map(|_| (-PI, 2.0 * PI))
        .chain((0..config.layers).map(|_| (-2.0 * PI, 4.0 * PI)))
        .collect();
    let no_constraints: Vec<&dyn cobyla::Func<()>> = Vec::new();
    let outcome = cobyla::minimize(
        objective,
        &x0,
        &bounds,
        &no_constraints,
        (),
        config.max_iters,
        cobyla::RhoBeg::All(INITIAL_TRUST_RADIUS),
        Some(cobyla::StopTols {
            xtol_abs: vec![FINAL_TRUST_RADIUS; x0.len()],
            ..cobyla::StopTols::default()
        }),
    );
    let converged = !matches!(outcome, Ok((cobyla::SuccessStatus::MaxEvalReached, _, _)));

    let iterations = trace.into_inner();
    let best = iterations
        .iter()
        .enumerate()
        .min_by(|(ia, a), (ib, b)| a.value.total_cmp(&b.value).then(ia.cmp(ib)))
        .map(|(_, e)| e.clone())
        .ok_or_else(|| Error::Parameter("optimizer made no evaluations".into()))?;
    let best_params = QaoaParams::from_vector(&best.params);
    let psi = sim.state(&best_params)?;
    let expectation = m.constant + psi.expectation_diagonal(sim.diagonal());
    let histogram = psi.sample(config.shots, config.seed.wrapping_add(1))?;
    let wall_time = clock.elapsed().as_secs_f64();

    Ok(QaoaRun {
        params: best_params.clone(),
        expectation,
        histogram,
        trace: OptimizerTrace {
            iterations,
            best_params,
            best_value: best.value,
        },
        wall_time,
        converged,
    })
}
