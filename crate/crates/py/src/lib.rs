//! Python bindings for `qpenal_core`.

use std::collections::{BTreeMap, BTreeSet};

use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;

use qpenal_core::encoding::{self, Dims, EncodingKind, PenaltyFamily, PenaltyWeights};
use qpenal_core::instance::{self, BppInstance, TspInstance};
use qpenal_core::qaoa::{self as core_qaoa, QaoaConfig, SampleHistogram};
use qpenal_core::qubo::index_to_bitstring;
use qpenal_core::{ising, metrics, qubo, Error};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Io(e) => PyOSError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

trait IntoPy<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> IntoPy<T> for qpenal_core::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(py_err)
    }
}

#[pyclass(module = "qpenal", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct ClassicalSolution {
    #[pyo3(get)]
    objective: f64,
    #[pyo3(get)]
    enumerated_count: u64,
    /// Bin index per item (bin packing) or the tour starting at 0 (TSP).
    #[pyo3(get)]
    witness: Vec<usize>,
}

#[pyclass(module = "qpenal", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct Problem {
    inner: instance::Problem,
}

#[pymethods]
impl Problem {
    #[staticmethod]
    fn bpp(weights: Vec<u64>, n_bins: usize, capacity: u64) -> PyResult<Self> {
        Ok(Self {
            inner: instance::Problem::Bpp(BppInstance::new(weights, n_bins, capacity).py()?),
        })
    }

    /// Weights `[25, 25, 30]`, two bins of capacity 100.
    #[staticmethod]
    fn bpp_reference() -> Self {
        Self {
            inner: instance::Problem::Bpp(BppInstance::reference()),
        }
    }

    #[staticmethod]
    fn tsp(weights: Vec<Vec<f64>>) -> PyResult<Self> {
        Ok(Self {
            inner: instance::Problem::Tsp(TspInstance::new(weights).py()?),
        })
    }

    #[staticmethod]
    #[pyo3(signature = (seed, n_items, n_bins, weight_lo, weight_hi, capacity))]
    fn generate_bpp(
        seed: u64,
        n_items: usize,
        n_bins: usize,
        weight_lo: u64,
        weight_hi: u64,
        capacity: u64,
    ) -> PyResult<Self> {
        let inst = instance::generate_bpp(seed, n_items, n_bins, weight_lo, weight_hi, capacity).py()?;
        Ok(Self {
            inner: instance::Problem::Bpp(inst),
        })
    }

    #[staticmethod]
    #[pyo3(signature = (seed, n, weight_lo=1.0, weight_hi=10.0, symmetric=true))]
    fn generate_tsp(seed: u64, n: usize, weight_lo: f64, weight_hi: f64, symmetric: bool) -> PyResult<Self> {
        let inst = instance::generate_tsp(seed, n, weight_lo, weight_hi, symmetric).py()?;
        Ok(Self {
            inner: instance::Problem::Tsp(inst),
        })
    }

    #[staticmethod]
    fn from_json(s: &str) -> PyResult<Self> {
        Ok(Self {
            inner: instance::Problem::from_json(s).py()?,
        })
    }

    fn to_json(&self) -> PyResult<String> {
        self.inner.to_json().py()
    }

    #[getter]
    fn kind(&self) -> &'static str {
        match self.inner {
            instance::Problem::Bpp(_) => "bpp",
            instance::Problem::Tsp(_) => "tsp",
        }
    }

    fn fingerprint(&self) -> String {
        self.inner.fingerprint()
    }

    fn solve_bruteforce(&self) -> PyResult<ClassicalSolution> {
        let s = self.inner.solve_bruteforce().py()?;
        let witness = match s.witness {
            instance::Witness::Bpp(a) => a.item_to_bin,
            instance::Witness::Tsp(t) => t.order,
        };
        Ok(ClassicalSolution {
            objective: s.objective,
            enumerated_count: s.enumerated_count,
            witness,
        })
    }

    /// Objective of a decision-variable assignment, or `None` if infeasible.
    fn feasible_objective(&self, bits: Vec<bool>) -> Option<f64> {
        encoding::feasible_objective(&self.inner, &bits)
    }

    fn default_lambda_eq(&self) -> f64 {
        encoding::default_lambda_eq(&self.inner)
    }

    fn __repr__(&self) -> String {
        format!("Problem({})", self.inner.fingerprint())
    }
}

#[pyclass(module = "qpenal", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PenaltyParams {
    inner: encoding::ExponentialPenaltyParams,
}

#[pymethods]
impl PenaltyParams {
    #[new]
    #[pyo3(signature = (family, k, a=None, b=None, p=1.0))]
    fn new(family: &str, k: u32, a: Option<f64>, b: Option<f64>, p: f64) -> PyResult<Self> {
        let family: PenaltyFamily = family.parse().py()?;
        Ok(Self {
            inner: encoding::ExponentialPenaltyParams::new(family, k, a, b, p).py()?,
        })
    }

    #[getter]
    fn family(&self) -> String {
        self.inner.family.to_string()
    }

    #[getter]
    fn rate(&self) -> f64 {
        self.inner.rate()
    }

    #[getter]
    fn inverse_magnitude(&self) -> f64 {
        self.inner.inverse_magnitude()
    }

    fn penalty_value(&self, h: f64) -> f64 {
        self.inner.penalty_value(h)
    }

    fn __repr__(&self) -> String {
        let p = &self.inner;
        format!("PenaltyParams({}, k={}, a={:?}, b={:?}, p={})", p.family, p.k, p.a, p.b, p.p)
    }
}

#[pyclass(module = "qpenal", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct QuboModel {
    inner: qubo::QuboModel,
}

#[pymethods]
impl QuboModel {
    #[getter]
    fn num_vars(&self) -> usize {
        self.inner.num_vars
    }

    #[getter]
    fn offset(&self) -> f64 {
        self.inner.offset
    }

    #[getter]
    fn linear(&self) -> Vec<f64> {
        self.inner.linear.clone()
    }

    #[getter]
    fn quadratic(&self) -> BTreeMap<(usize, usize), f64> {
        self.inner.quadratic.clone()
    }

    #[getter]
    fn labels(&self) -> Vec<String> {
        self.inner.labels.clone()
    }

    fn evaluate(&self, bits: Vec<bool>) -> PyResult<f64> {
        self.inner.evaluate(&bits).py()
    }

    /// `(energy, bitstrings)` of every exhaustive minimizer.
    fn ground_states(&self) -> PyResult<(f64, Vec<String>)> {
        let gs = self.inner.ground_states().py()?;
        let n = self.inner.num_vars;
        Ok((gs.energy, gs.states.iter().map(|&s| index_to_bitstring(s, n)).collect()))
    }

    fn to_ising(&self) -> IsingModel {
        IsingModel {
            inner: ising::qubo_to_ising(&self.inner),
        }
    }

    #[staticmethod]
    fn from_json(s: &str) -> PyResult<Self> {
        Ok(Self {
            inner: qubo::QuboModel::from_json(s).py()?,
        })
    }

    fn to_json(&self) -> PyResult<String> {
        self.inner.to_json().py()
    }

    fn __repr__(&self) -> String {
        format!("QuboModel(num_vars={})", self.inner.num_vars)
    }
}

#[pyclass(module = "qpenal", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct IsingModel {
    inner: ising::IsingModel,
}

#[pymethods]
impl IsingModel {
    #[getter]
    fn num_spins(&self) -> usize {
        self.inner.num_spins
    }

    #[getter]
    fn field(&self) -> Vec<f64> {
        self.inner.field.clone()
    }

    #[getter]
    fn coupling(&self) -> BTreeMap<(usize, usize), f64> {
        self.inner.coupling.clone()
    }

    #[getter]
    fn constant(&self) -> f64 {
        self.inner.constant
    }

    fn energy(&self, spins: Vec<i8>) -> PyResult<f64> {
        self.inner.energy(&spins).py()
    }

    /// Basis-state energies without the constant term.
    fn diagonal(&self) -> Vec<f64> {
        self.inner.diagonal()
    }

    fn to_json(&self) -> PyResult<String> {
        self.inner.to_json().py()
    }

    fn __repr__(&self) -> String {
        format!("IsingModel(num_spins={})", self.inner.num_spins)
    }
}

#[pyclass(module = "qpenal", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct QaoaRun {
    #[pyo3(get)]
    betas: Vec<f64>,
    #[pyo3(get)]
    gammas: Vec<f64>,
    #[pyo3(get)]
    expectation: f64,
    #[pyo3(get)]
    counts: BTreeMap<String, u64>,
    #[pyo3(get)]
    shots: u64,
    /// Objective value at each optimizer evaluation.
    #[pyo3(get)]
    trace: Vec<f64>,
    #[pyo3(get)]
    wall_time: f64,
    #[pyo3(get)]
    converged: bool,
}

fn params(betas: Vec<f64>, gammas: Vec<f64>) -> PyResult<core_qaoa::QaoaParams> {
    core_qaoa::QaoaParams::new(betas, gammas).py()
}

#[pyfunction]
fn encode_exponential(problem: &Problem, lambda_eq: f64, params: &PenaltyParams) -> PyResult<QuboModel> {
    let w = PenaltyWeights::exponential(lambda_eq, params.inner);
    Ok(QuboModel {
        inner: encoding::encode(&problem.inner, &w).py()?,
    })
}

#[pyfunction]
#[pyo3(signature = (problem, lambda_eq, lambda_ineq=None))]
fn encode_slack(problem: &Problem, lambda_eq: f64, lambda_ineq: Option<f64>) -> PyResult<QuboModel> {
    let w = PenaltyWeights::slack(lambda_eq, lambda_ineq.unwrap_or(lambda_eq));
    Ok(QuboModel {
        inner: encoding::encode(&problem.inner, &w).py()?,
    })
}

/// Qubits needed by `encoding` (`"slack"` or `"exp"`) for `problem`.
#[pyfunction]
fn qubit_count(encoding_kind: &str, problem: &Problem) -> PyResult<usize> {
    let kind = match encoding_kind {
        "slack" => EncodingKind::Slack,
        "exp" => EncodingKind::Exponential,
        other => return Err(PyValueError::new_err(format!("unknown encoding {other:?}"))),
    };
    encoding::qubit_count(kind, Dims::from(&problem.inner)).py()
}

#[pyfunction]
fn qubo_to_ising(model: &QuboModel) -> IsingModel {
    model.to_ising()
}

#[pyfunction]
fn qaoa_expectation(model: &IsingModel, betas: Vec<f64>, gammas: Vec<f64>) -> PyResult<f64> {
    core_qaoa::qaoa_expectation(&model.inner, &params(betas, gammas)?).py()
}

#[pyfunction]
#[pyo3(signature = (model, betas, gammas, shots=core_qaoa::DEFAULT_SHOTS, seed=0))]
fn sample(model: &IsingModel, betas: Vec<f64>, gammas: Vec<f64>, shots: u64, seed: u64) -> PyResult<BTreeMap<String, u64>> {
    Ok(core_qaoa::sample(&model.inner, &params(betas, gammas)?, shots, seed).py()?.counts)
}

/// Energy table indexed `[beta][gamma]` for a single layer.
#[pyfunction]
fn landscape(model: &IsingModel, betas: Vec<f64>, gammas: Vec<f64>) -> PyResult<Vec<Vec<f64>>> {
    core_qaoa::landscape(&model.inner, &betas, &gammas).py()
}

#[pyfunction]
#[pyo3(signature = (model, layers=1, max_iters=core_qaoa::DEFAULT_MAX_ITERS, shots=core_qaoa::DEFAULT_SHOTS, seed=0))]
fn optimize(py: Python<'_>, model: &IsingModel, layers: usize, max_iters: usize, shots: u64, seed: u64) -> PyResult<QaoaRun> {
    let config = QaoaConfig {
        layers,
        max_iters,
        shots,
        seed,
    };
    let run = py.detach(|| core_qaoa::optimize(&model.inner, &config, None)).py()?;
    Ok(QaoaRun {
        betas: run.params.betas,
        gammas: run.params.gammas,
        expectation: run.expectation,
        counts: run.histogram.counts,
        shots: run.histogram.shots,
        trace: run.trace.iterations.iter().map(|t| t.value).collect(),
        wall_time: run.wall_time,
        converged: run.converged,
    })
}

#[pyfunction]
fn qubit_reduction(q_exp: usize, q_slack: usize) -> PyResult<f64> {
    metrics::qubit_reduction(q_exp, q_slack).py()
}

#[pyfunction]
fn mse(classical: Vec<f64>, quantum: Vec<f64>) -> PyResult<f64> {
    metrics::mse(&classical, &quantum).py()
}

#[pyfunction]
fn time_ratio(t_slack: f64, t_exp: f64) -> PyResult<f64> {
    metrics::time_ratio(t_slack, t_exp).py()
}

#[pyfunction]
fn uniform_baseline(n_optimal: usize, num_vars: usize) -> f64 {
    metrics::uniform_baseline(n_optimal, num_vars)
}

#[pyfunction]
fn approximation_probability(counts: BTreeMap<String, u64>, optimal: BTreeSet<String>) -> PyResult<f64> {
    let hist = SampleHistogram {
        shots: counts.values().sum(),
        counts,
    };
    metrics::approximation_probability(&hist, &optimal).py()
}

/// Full bitstrings of `model` that decode to a classically optimal solution.
#[pyfunction]
fn optimal_bitstrings(problem: &Problem, model: &QuboModel) -> PyResult<BTreeSet<String>> {
    let oracle = problem.inner.solve_bruteforce().py()?;
    metrics::optimal_bitstrings(&problem.inner, &model.inner, &oracle).py()
}

#[pymodule]
fn qpenal(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Problem>()?;
    m.add_class::<ClassicalSolution>()?;
    m.add_class::<PenaltyParams>()?;
    m.add_class::<QuboModel>()?;
    m.add_class::<IsingModel>()?;
    m.add_class::<QaoaRun>()?;
    m.add_function(wrap_pyfunction!(encode_exponential, m)?)?;
    m.add_function(wrap_pyfunction!(encode_slack, m)?)?;
    m.add_function(wrap_pyfunction!(qubit_count, m)?)?;
    m.add_function(wrap_pyfunction!(qubo_to_ising, m)?)?;
    m.add_function(wrap_pyfunction!(qaoa_expectation, m)?)?;
    m.add_function(wrap_pyfunction!(sample, m)?)?;
    m.add_function(wrap_pyfunction!(landscape, m)?)?;
    m.add_function(wrap_pyfunction!(optimize, m)?)?;
    m.add_function(wrap_pyfunction!(qubit_reduction, m)?)?;
    m.add_function(wrap_pyfunction!(mse, m)?)?;
    m.add_function(wrap_pyfunction!(time_ratio, m)?)?;
    m.add_function(wrap_pyfunction!(uniform_baseline, m)?)?;
    m.add_function(wrap_pyfunction!(approximation_probability, m)?)?;
    m.add_function(wrap_pyfunction!(optimal_bitstrings, m)?)?;
    Ok(())
}
