//! Python bindings: field arithmetic, exhaustive character sums, the shift
//! reduction, the VV baseline and the DIMACS front end.

use pyo3::exceptions::{PyArithmeticError, PyOSError, PyOverflowError, PyValueError};
use pyo3::prelude::*;

use legendre_parity::charsum::{self, WitnessSet};
use legendre_parity::modarith::{self, FieldPrime};
use legendre_parity::sat_frontend;
use legendre_parity::{reduction, vv_baseline, Error};

fn to_py(err: Error) -> PyErr {
    let msg = err.to_string();
    match err {
        Error::Usage(_) | Error::Parse { .. } => PyValueError::new_err(msg),
        Error::Capacity(_) => PyOverflowError::new_err(msg),
        Error::Integrity(_) => PyArithmeticError::new_err(msg),
        Error::Io(_) => PyOSError::new_err(msg),
    }
}

fn prime(p: u128) -> PyResult<FieldPrime> {
    FieldPrime::new(p).map_err(to_py)
}

fn witness_set(p: u128, elements: Vec<u128>) -> PyResult<WitnessSet> {
    WitnessSet::new(prime(p)?, elements).map_err(to_py)
}

#[pyfunction]
fn legendre(a: u128, p: u128) -> PyResult<i8> {
    let p = prime(p)?;
    modarith::legendre(&p.element(a))
        .map(|t| t.as_i8())
        .map_err(to_py)
}

#[pyfunction]
fn legendre_table(p: u128) -> PyResult<Vec<i8>> {
    let table = modarith::legendre_table(prime(p)?).map_err(to_py)?;
    Ok(table.into_iter().map(|t| t.as_i8()).collect())
}

#[pyfunction]
fn mulmod(a: u128, b: u128, p: u128) -> PyResult<u128> {
    let p = prime(p)?;
    modarith::mulmod(&p.element(a), &p.element(b))
        .map(|x| x.value())
        .map_err(to_py)
}

#[pyfunction]
fn powmod(a: u128, e: u128, p: u128) -> PyResult<u128> {
    let p = prime(p)?;
    Ok(modarith::powmod(&p.element(a), e).value())
}

#[pyfunction]
fn is_prime(n: u128) -> bool {
    modarith::is_prime(n)
}

#[pyfunction]
fn next_prime_above(threshold: u128) -> PyResult<u128> {
    modarith::next_prime_above(threshold)
        .map(|p| p.value())
        .map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (n, c = reduction::DEFAULT_C))]
fn choose_prime_for_n(n: u32, c: f64) -> PyResult<u128> {
    reduction::choose_prime_for_n(n, c)
        .map(|r| r.p.value())
        .map_err(to_py)
}

#[pyclass(name = "CharSumReport", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyCharSumReport {
    #[pyo3(get)]
    p: u128,
    #[pyo3(get)]
    sum: i64,
    #[pyo3(get)]
    degree: usize,
    #[pyo3(get)]
    weil_bound: f64,
    #[pyo3(get)]
    holds: bool,
    #[pyo3(get)]
    zero_shift_count: u64,
}

#[pymethods]
impl PyCharSumReport {
    fn __repr__(&self) -> String {
        format!(
            "CharSumReport(p={}, sum={}, degree={}, weil_bound={:.6}, holds={}, zero_shift_count={})",
            self.p, self.sum, self.degree, self.weil_bound, self.holds, self.zero_shift_count
        )
    }
}

#[pyfunction]
fn exact_character_sum(p: u128, elements: Vec<u128>) -> PyResult<PyCharSumReport> {
    let r = charsum::exact_character_sum(&witness_set(p, elements)?).map_err(to_py)?;
    Ok(PyCharSumReport {
        p: r.modulus,
        sum: r.sum,
        degree: r.degree,
        weil_bound: r.weil_bound,
        holds: r.holds,
        zero_shift_count: r.zero_shift_count,
    })
}

#[pyclass(name = "ExactParityReport", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyExactParityReport {
    #[pyo3(get)]
    odd_count: u64,
    #[pyo3(get)]
    total: u64,
    #[pyo3(get)]
    sum: i64,
    set_size: usize,
}

#[pymethods]
impl PyExactParityReport {
    /// Reduced (numerator, denominator) of Pr[|S'| odd].
    #[getter]
    fn probability(&self) -> (u64, u64) {
        let r = self.inner().probability();
        (*r.numer(), *r.denom())
    }

    /// Reduced (numerator, denominator) of T = W / p.
    #[getter]
    fn t_value(&self) -> (i64, i64) {
        let r = self.inner().t_value();
        (*r.numer(), *r.denom())
    }

    #[getter]
    fn p_hat(&self) -> f64 {
        self.inner().probability_f64()
    }

    fn within_parity_band(&self) -> bool {
        self.inner().within_parity_band(self.set_size)
    }

    fn __repr__(&self) -> String {
        format!(
            "ExactParityReport(odd_count={}, total={}, sum={})",
            self.odd_count, self.total, self.sum
        )
    }
}

impl PyExactParityReport {
    fn inner(&self) -> charsum::ExactParityReport {
        charsum::ExactParityReport {
            odd_count: self.odd_count,
            total: self.total,
            sum: self.sum,
        }
    }
}

#[pyfunction]
fn exact_odd_probability(p: u128, elements: Vec<u128>) -> PyResult<PyExactParityReport> {
    let set = witness_set(p, elements)?;
    let r = charsum::exact_odd_probability(&set).map_err(to_py)?;
    Ok(PyExactParityReport {
        odd_count: r.odd_count,
        total: r.total,
        sum: r.sum,
        set_size: set.len(),
    })
}

#[pyclass(name = "MonteCarloEstimate", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyEstimate {
    #[pyo3(get)]
    trials: u64,
    #[pyo3(get)]
    odd_count: u64,
    #[pyo3(get)]
    p_hat: f64,
    #[pyo3(get)]
    std_err: f64,
    #[pyo3(get)]
    seed: u64,
}

#[pymethods]
impl PyEstimate {
    fn __repr__(&self) -> String {
        format!(
            "MonteCarloEstimate(trials={}, odd_count={}, p_hat={}, std_err={}, seed={})",
            self.trials, self.odd_count, self.p_hat, self.std_err, self.seed
        )
    }
}

impl From<reduction::MonteCarloEstimate> for PyEstimate {
    fn from(e: reduction::MonteCarloEstimate) -> Self {
        PyEstimate {
            trials: e.trials,
            odd_count: e.odd_count,
            p_hat: e.p_hat,
            std_err: e.std_err,
            seed: e.seed,
        }
    }
}

#[pyfunction]
fn filter_by_character(p: u128, elements: Vec<u128>, b: u128) -> PyResult<Vec<u128>> {
    let set = witness_set(p, elements)?;
    let kept = reduction::filter_by_character(&set, &set.modulus().element(b)).map_err(to_py)?;
    Ok(kept.elements().to_vec())
}

#[pyfunction]
#[pyo3(signature = (p, elements, trials, seed = 0, workers = 1))]
fn estimate_odd_probability(
    py: Python<'_>,
    p: u128,
    elements: Vec<u128>,
    trials: u64,
    seed: u64,
    workers: usize,
) -> PyResult<PyEstimate> {
    let set = witness_set(p, elements)?;
    py.detach(|| reduction::estimate_odd_probability_with_workers(&set, trials, seed, workers))
        .map(PyEstimate::from)
        .map_err(to_py)
}

#[pyfunction]
fn amplified_parity(sub_counts: Vec<u64>) -> PyResult<bool> {
    vv_baseline::amplified_parity(&sub_counts).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (n, points, trials, seed = 0, workers = 1))]
fn vv_isolation_rate(
    py: Python<'_>,
    n: u32,
    points: Vec<u64>,
    trials: u64,
    seed: u64,
    workers: usize,
) -> PyResult<PyEstimate> {
    let set = vv_baseline::BitWitnesses::new(n, points).map_err(to_py)?;
    py.detach(|| vv_baseline::isolation_experiment(&set, trials, seed, workers))
        .map(PyEstimate::from)
        .map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (n, points, m, trials, seed = 0, workers = 1))]
fn vv_amplified_rate(
    py: Python<'_>,
    n: u32,
    points: Vec<u64>,
    m: usize,
    trials: u64,
    seed: u64,
    workers: usize,
) -> PyResult<PyEstimate> {
    let set = vv_baseline::BitWitnesses::new(n, points).map_err(to_py)?;
    py.detach(|| vv_baseline::vv_amplified_experiment(&set, m, trials, seed, workers))
        .map(PyEstimate::from)
        .map_err(to_py)
}

#[pyclass(name = "CnfFormula", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyCnfFormula {
    inner: sat_frontend::CnfFormula,
}

#[pymethods]
impl PyCnfFormula {
    #[new]
    fn new(num_vars: u32, clauses: Vec<Vec<i32>>) -> PyResult<Self> {
        let inner = sat_frontend::CnfFormula::new(num_vars, clauses).map_err(to_py)?;
        Ok(PyCnfFormula { inner })
    }

    #[staticmethod]
    fn parse_dimacs(text: &str) -> PyResult<Self> {
        let inner = sat_frontend::parse_dimacs(text).map_err(to_py)?;
        Ok(PyCnfFormula { inner })
    }

    #[getter]
    fn num_vars(&self) -> u32 {
        self.inner.num_vars
    }

    #[getter]
    fn clauses(&self) -> Vec<Vec<i32>> {
        self.inner.clauses.clone()
    }

    fn to_dimacs(&self) -> String {
        self.inner.to_dimacs()
    }

    /// Encoded models, variable 1 in the least significant bit.
    fn solutions(&self, py: Python<'_>) -> PyResult<Vec<u64>> {
        py.detach(|| sat_frontend::enumerate_solution_codes(&self.inner))
            .map_err(to_py)
    }

    /// Returns (p, num_solutions, estimate).
    #[pyo3(signature = (trials, seed = 0, c = reduction::DEFAULT_C, workers = 1))]
    fn experiment(
        &self,
        py: Python<'_>,
        trials: u64,
        seed: u64,
        c: f64,
        workers: usize,
    ) -> PyResult<(u128, usize, PyEstimate)> {
        let r = py
            .detach(|| sat_frontend::sat_experiment(&self.inner, c, trials, seed, workers))
            .map_err(to_py)?;
        Ok((r.params.p.value(), r.num_solutions, r.estimate.into()))
    }

    fn __repr__(&self) -> String {
        format!(
            "CnfFormula(num_vars={}, clauses={})",
            self.inner.num_vars,
            self.inner.clauses.len()
        )
    }
}

#[pyfunction]
fn encode_assignment(assignment: Vec<bool>) -> PyResult<u64> {
    if assignment.len() > 64 {
        return Err(PyValueError::new_err("assignments wider than 64 bits"));
    }
    Ok(sat_frontend::encode_assignment(&assignment))
}

#[pymodule]
fn legendre_parity_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyCharSumReport>()?;
    m.add_class::<PyExactParityReport>()?;
    m.add_class::<PyEstimate>()?;
    m.add_class::<PyCnfFormula>()?;
    m.add_function(wrap_pyfunction!(legendre, m)?)?;
    m.add_function(wrap_pyfunction!(legendre_table, m)?)?;
    m.add_function(wrap_pyfunction!(mulmod, m)?)?;
    m.add_function(wrap_pyfunction!(powmod, m)?)?;
    m.add_function(wrap_pyfunction!(is_prime, m)?)?;
    m.add_function(wrap_pyfunction!(next_prime_above, m)?)?;
    m.add_function(wrap_pyfunction!(choose_prime_for_n, m)?)?;
    m.add_function(wrap_pyfunction!(exact_character_sum, m)?)?;
    m.add_function(wrap_pyfunction!(exact_odd_probability, m)?)?;
    m.add_function(wrap_pyfunction!(filter_by_character, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_odd_probability, m)?)?;
    m.add_function(wrap_pyfunction!(amplified_parity, m)?)?;
    m.add_function(wrap_pyfunction!(vv_isolation_rate, m)?)?;
    m.add_function(wrap_pyfunction!(vv_amplified_rate, m)?)?;
    m.add_function(wrap_pyfunction!(encode_assignment, m)?)?;
    Ok(())
}
