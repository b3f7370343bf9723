//! Python bindings: schedule construction, table evaluation, the checker
//! suite, witness extraction, and the monomial-algebra oracle. Values cross
//! the boundary as arbitrary-precision ints.

use num_bigint::BigUint;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;
use std::collections::BTreeMap;

use growthlab::exact::RationalPow2;
use growthlab::omega::Omega;
use growthlab::schedule::{build_schedule, BuildParams, Mode, Verdict, DEFAULT_SCAN_CAP};
use growthlab::verify::{
    check_derivative_condition, check_dominance, check_increasing, check_submultiplicative,
    find_witness, Strategy,
};
use growthlab::{algebra, growthfn, io};

fn value_err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn runtime_err<E: std::fmt::Display>(e: E) -> PyErr {
    PyRuntimeError::new_err(e.to_string())
}

fn parse_mode(mode: &str) -> PyResult<Mode> {
    match mode {
        "certified" => Ok(Mode::Certified),
        "demo" => Ok(Mode::Demo),
        other => Err(PyValueError::new_err(format!(
            "mode must be \"certified\" or \"demo\", got {other:?}"
        ))),
    }
}

/// Staged parameter schedule with its per-stage constraint ledger.
#[pyclass(name = "Schedule", module = "growthlab_py")]
struct PySchedule {
    inner: growthlab::Schedule,
}

#[pymethods]
impl PySchedule {
    /// Derive (or, in demo mode, force) schedule parameters.
    #[staticmethod]
    #[pyo3(signature = (depth, mode="certified", omega=None, d=None, n=None, scan_cap=None))]
    fn build(
        depth: u32,
        mode: &str,
        omega: Option<&str>,
        d: Option<BTreeMap<u32, u64>>,
        n: Option<BTreeMap<u32, u64>>,
        scan_cap: Option<u64>,
    ) -> PyResult<Self> {
        let params = BuildParams {
            depth,
            mode: parse_mode(mode)?,
            d_overrides: d.unwrap_or_default(),
            n_overrides: n.unwrap_or_default(),
            omega: omega.map(Omega::parse).transpose().map_err(value_err)?,
            scan_cap: scan_cap.unwrap_or(DEFAULT_SCAN_CAP),
        };
        Ok(Self {
            inner: build_schedule(&params).map_err(runtime_err)?,
        })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: growthlab::Schedule::from_json(text).map_err(value_err)?,
        })
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    fn depth(&self) -> u32 {
        self.inner.depth()
    }

    fn is_certified(&self) -> bool {
        self.inner.is_certified()
    }

    /// [(k, d, n), ...] in stage order.
    fn entries(&self) -> Vec<(u32, u64, u64)> {
        self.inner.entries.iter().map(|e| (e.k, e.d, e.n)).collect()
    }

    /// [(constraint id, verdict), ...] for stage k.
    fn ledger(&self, k: u32) -> PyResult<Vec<(String, String)>> {
        let entry = self
            .inner
            .entry(k)
            .ok_or_else(|| PyValueError::new_err(format!("no stage k = {k}")))?;
        Ok(entry
            .ledger
            .verdicts
            .iter()
            .map(|v| {
                let verdict = match v.verdict {
                    Verdict::Pass => "pass",
                    Verdict::Fail => "fail",
                    Verdict::NotApplicable => "not-applicable",
                };
                (v.id.clone(), verdict.to_string())
            })
            .collect())
    }

    fn __repr__(&self) -> String {
        format!(
            "Schedule(mode={:?}, stages={:?})",
            self.inner.mode,
            self.entries()
        )
    }
}

/// Tabulated values of the staged function up to a horizon.
#[pyclass(name = "GrowthTable", module = "growthlab_py")]
struct PyGrowthTable {
    inner: growthfn::GrowthTable,
}

#[pymethods]
impl PyGrowthTable {
    #[staticmethod]
    fn build(schedule: &PySchedule, horizon: u64) -> PyResult<Self> {
        Ok(Self {
            inner: growthfn::GrowthTable::build(
                schedule.inner.clone(),
                horizon,
                growthfn::GrowthTable::default_mem_budget(),
            )
            .map_err(runtime_err)?,
        })
    }

    fn horizon(&self) -> u64 {
        self.inner.horizon()
    }

    fn value_at(&self, x: u64) -> PyResult<BigUint> {
        self.inner.value_at(x).map_err(value_err)
    }

    fn values(&self, lo: u64, hi: u64) -> PyResult<Vec<BigUint>> {
        self.inner.values_in(lo, hi).map_err(value_err)
    }

    fn segment_at(&self, x: u64) -> Option<String> {
        self.inner.segment_label_at(x)
    }

    fn schedule(&self) -> PySchedule {
        PySchedule {
            inner: self.inner.schedule().clone(),
        }
    }

    fn __repr__(&self) -> String {
        format!("GrowthTable(horizon={})", self.inner.horizon())
    }
}

/// floor(n^(1/m)).
#[pyfunction]
fn iroot(n: BigUint, m: u32) -> PyResult<BigUint> {
    if m == 0 {
        return Err(PyValueError::new_err("root degree must be positive"));
    }
    Ok(growthlab::iroot(&n, m))
}

/// floor(a * 2^(num/den)), certified exactly.
#[pyfunction]
fn floor_mul_pow2(a: BigUint, num: i64, den: u64) -> PyResult<BigUint> {
    if den == 0 {
        return Err(PyValueError::new_err("denominator must be positive"));
    }
    Ok(growthlab::floor_mul_pow2(&a, &RationalPow2::new(num, den)))
}

/// Sign of n - 2^(num/den): -1, 0, or 1.
#[pyfunction]
fn cmp_nat_pow2(n: BigUint, num: i64, den: u64) -> PyResult<i8> {
    if den == 0 {
        return Err(PyValueError::new_err("denominator must be positive"));
    }
    Ok(match growthlab::cmp_nat_pow2(&n, &RationalPow2::new(num, den)) {
        std::cmp::Ordering::Less => -1,
        std::cmp::Ordering::Equal => 0,
        std::cmp::Ordering::Greater => 1,
    })
}

/// (pass, first violating (p, q) or None) for f(p+q) <= f(p) f(q).
#[pyfunction]
#[pyo3(signature = (table, n_max, strategy="exhaustive", samples=20_000, seed=0, width=64))]
fn submultiplicative(
    table: &PyGrowthTable,
    n_max: u64,
    strategy: &str,
    samples: u64,
    seed: u64,
    width: u64,
) -> PyResult<(bool, Option<(u64, u64)>)> {
    let strategy = match strategy {
        "exhaustive" => Strategy::Exhaustive,
        "sampled" => Strategy::Sampled {
            count: samples,
            seed,
        },
        "boundary" => Strategy::Boundary { width },
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown strategy {other:?}"
            )))
        }
    };
    let report = check_submultiplicative(&table.inner, n_max, strategy).map_err(runtime_err)?;
    Ok((report.pass, report.violation.map(|v| (v.p, v.q))))
}

/// (pass, first non-increasing index or None).
#[pyfunction]
fn increasing(table: &PyGrowthTable, lo: u64, hi: u64) -> (bool, Option<u64>) {
    let report = check_increasing(&table.inner, lo, hi);
    (report.pass, report.first_violation)
}

/// First (n, m) with f'(m) > f'(n)^d and n <= m <= d n, or None.
#[pyfunction]
fn derivative_violation(table: &PyGrowthTable, d: u64, n_max: u64) -> Option<(u64, u64)> {
    check_derivative_condition(&table.inner, d, n_max)
        .violation
        .map(|v| (v.n, v.m))
}

/// Per-stage lower bound f(x) >= 2^(x/(2 P_k) + 1 + 2^-(k+1)).
#[pyfunction]
fn lower_bound_ok(table: &PyGrowthTable) -> PyResult<bool> {
    let hi = table.inner.horizon();
    Ok(growthfn::verify_lower_bound(&table.inner, 1, hi)
        .map_err(runtime_err)?
        .pass)
}

/// Geometric-segment growth-rate condition at stage k.
#[pyfunction]
fn condition_i_ok(table: &PyGrowthTable, k: u32) -> PyResult<bool> {
    Ok(growthfn::verify_condition_i(&table.inner, k)
        .map_err(runtime_err)?
        .pass)
}

/// f(x) >= 2^(x w(x)) for the given decay profile.
#[pyfunction]
fn dominance_ok(table: &PyGrowthTable, omega: &str) -> PyResult<bool> {
    let omega = Omega::parse(omega).map_err(value_err)?;
    Ok(check_dominance(&table.inner, &omega)
        .map_err(runtime_err)?
        .pass)
}

/// Extract the scheduled collapsing-inequality violation at stage C.
#[pyfunction]
fn witness<'py>(py: Python<'py>, table: &PyGrowthTable, c: u64) -> PyResult<Bound<'py, PyDict>> {
    let w = find_witness(&table.inner, c).map_err(runtime_err)?;
    let out = PyDict::new(py);
    out.set_item("C", w.c)?;
    out.set_item("D", w.d_cap)?;
    out.set_item("n", w.n)?;
    out.set_item("lhs", io::nat_from_hex(&w.lhs_hex).map_err(runtime_err)?)?;
    out.set_item("rhs", io::nat_from_hex(&w.rhs_hex).map_err(runtime_err)?)?;
    out.set_item("lhs_bits", w.lhs_bits)?;
    out.set_item("rhs_bits", w.rhs_bits)?;
    out.set_item("holds", false)?;
    Ok(out)
}

/// gamma(0..=n) for the monomial algebra avoiding the forbidden factors.
#[pyfunction]
fn algebra_growth(alphabet: u32, forbidden: Vec<String>, n: u64) -> PyResult<Vec<BigUint>> {
    let spec = algebra::MonomialAlgebraSpec::new(alphabet, forbidden).map_err(value_err)?;
    Ok(algebra::growth_table(&spec, n).gamma)
}

/// Per-degree word counts c(0..=n) for the same algebra.
#[pyfunction]
fn algebra_word_counts(alphabet: u32, forbidden: Vec<String>, n: u64) -> PyResult<Vec<BigUint>> {
    let spec = algebra::MonomialAlgebraSpec::new(alphabet, forbidden).map_err(value_err)?;
    Ok(algebra::growth_table(&spec, n).counts)
}

#[pymodule]
fn growthlab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySchedule>()?;
    m.add_class::<PyGrowthTable>()?;
    m.add_function(wrap_pyfunction!(iroot, m)?)?;
    m.add_function(wrap_pyfunction!(floor_mul_pow2, m)?)?;
    m.add_function(wrap_pyfunction!(cmp_nat_pow2, m)?)?;
    m.add_function(wrap_pyfunction!(submultiplicative, m)?)?;
    m.add_function(wrap_pyfunction!(increasing, m)?)?;
    m.add_function(wrap_pyfunction!(derivative_violation, m)?)?;
    m.add_function(wrap_pyfunction!(lower_bound_ok, m)?)?;
    m.add_function(wrap_pyfunction!(condition_i_ok, m)?)?;
    m.add_function(wrap_pyfunction!(dominance_ok, m)?)?;
    m.add_function(wrap_pyfunction!(witness, m)?)?;
    m.add_function(wrap_pyfunction!(algebra_growth, m)?)?;
    m.add_function(wrap_pyfunction!(algebra_word_counts, m)?)?;
    Ok(())
}
