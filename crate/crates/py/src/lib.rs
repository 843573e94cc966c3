//! Python bindings for the branch-data realizability toolkit.
//!
//! Exposes datum parsing, the certificate cascade, the exhaustive search,
//! the generator families, combinatorial maps, and covering-data
//! verification. Verdicts and certificates cross the boundary as plain
//! Python dicts (mirroring the CLI's JSON schema).

use hurwitz::criteria::{self, certify, CertifyOptions, Verdict};
use hurwitz::dessins;
use hurwitz::generators;
use hurwitz::halphen;
use hurwitz::oracle::{find_constellation, SearchLimits, SearchOutcome};
use hurwitz::{BranchDatum, Partition};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use pyo3::IntoPyObjectExt;
use std::time::Duration;

fn value_error<E: std::fmt::Display>(err: E) -> PyErr {
    PyValueError::new_err(err.to_string())
}

fn json_to_py(py: Python<'_>, value: &serde_json::Value) -> PyResult<Py<PyAny>> {
    use serde_json::Value;
    match value {
        Value::Null => Ok(py.None()),
        Value::Bool(b) => b.into_py_any(py),
        Value::Number(num) => {
            if let Some(v) = num.as_i64() {
                v.into_py_any(py)
            } else if let Some(v) = num.as_u64() {
                v.into_py_any(py)
            } else {
                num.as_f64().unwrap_or(f64::NAN).into_py_any(py)
            }
        }
        Value::String(s) => s.into_py_any(py),
        Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(json_to_py(py, item)?)?;
            }
            list.into_py_any(py)
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (key, item) in map {
                dict.set_item(key, json_to_py(py, item)?)?;
            }
            dict.into_py_any(py)
        }
    }
}

fn limits(timeout: Option<f64>, max_n: Option<u64>) -> SearchLimits {
    let mut limits = SearchLimits::default();
    if let Some(seconds) = timeout {
        limits.timeout = Some(Duration::from_secs_f64(seconds));
    }
    if let Some(max_n) = max_n {
        limits.max_n = max_n;
    }
    limits
}

/// A branch datum `(Π₁, …, Π_q, n, g)`.
#[pyclass(name = "Datum")]
struct PyDatum {
    inner: BranchDatum,
}

#[pymethods]
impl PyDatum {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        Ok(PyDatum {
            inner: text.parse().map_err(value_error)?,
        })
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Datum(\"{}\")", self.inner)
    }

    #[getter]
    fn n(&self) -> u64 {
        self.inner.n()
    }

    #[getter]
    fn genus(&self) -> u64 {
        self.inner.genus()
    }

    #[getter]
    fn q(&self) -> usize {
        self.inner.q()
    }

    /// Partitions as lists of parts, canonical (descending) order.
    fn partitions(&self) -> Vec<Vec<u64>> {
        self.inner
            .partitions()
            .iter()
            .map(|p| p.parts().to_vec())
            .collect()
    }

    /// Classify this datum; same schema as the module-level `check`.
    #[pyo3(signature = (use_oracle = true, timeout = None))]
    fn check(&self, py: Python<'_>, use_oracle: bool, timeout: Option<f64>) -> PyResult<Py<PyAny>> {
        verdict_to_py(py, &self.inner, use_oracle, timeout)
    }
}

fn verdict_to_py(
    py: Python<'_>,
    datum: &BranchDatum,
    use_oracle: bool,
    timeout: Option<f64>,
) -> PyResult<Py<PyAny>> {
    let opts = CertifyOptions {
        use_oracle,
        oracle_limits: limits(timeout, None),
        ..CertifyOptions::default()
    };
    let verdict = certify(datum, &opts);
    let dict = PyDict::new(py);
    dict.set_item("datum", datum.to_string())?;
    match verdict {
        Verdict::Realizable(c) => {
            dict.set_item("verdict", "realizable")?;
            dict.set_item("witness", c.witness_string())?;
        }
        Verdict::NonRealizable(cert) => {
            dict.set_item("verdict", "non-realizable")?;
            let cert_json = serde_json::to_value(&cert).map_err(value_error)?;
            dict.set_item("certificate", json_to_py(py, &cert_json)?)?;
        }
        Verdict::Unknown(notes) => {
            dict.set_item("verdict", "unknown")?;
            dict.set_item("notes", notes)?;
        }
    }
    dict.into_py_any(py)
}

/// Classify a datum string via the certificate cascade (optionally with the
/// exhaustive-search fallback). Returns a dict:
/// `{datum, verdict, certificate? | witness? | notes?}`.
#[pyfunction]
#[pyo3(signature = (datum, use_oracle = true, timeout = None))]
fn check(py: Python<'_>, datum: &str, use_oracle: bool, timeout: Option<f64>) -> PyResult<Py<PyAny>> {
    let datum: BranchDatum = datum.parse().map_err(value_error)?;
    verdict_to_py(py, &datum, use_oracle, timeout)
}

/// Run only the exhaustive constellation search. Returns a dict with
/// `verdict` in {"realizable", "non-realizable", "unknown"}.
#[pyfunction]
#[pyo3(signature = (datum, max_n = None, timeout = None))]
fn oracle(
    py: Python<'_>,
    datum: &str,
    max_n: Option<u64>,
    timeout: Option<f64>,
) -> PyResult<Py<PyAny>> {
    let datum: BranchDatum = datum.parse().map_err(value_error)?;
    let dict = PyDict::new(py);
    dict.set_item("datum", datum.to_string())?;
    match find_constellation(&datum, &limits(timeout, max_n)) {
        SearchOutcome::Found(c) => {
            dict.set_item("verdict", "realizable")?;
            dict.set_item("witness", c.witness_string())?;
        }
        SearchOutcome::Exhausted => dict.set_item("verdict", "non-realizable")?,
        SearchOutcome::Aborted(reason) => {
            dict.set_item("verdict", "unknown")?;
            dict.set_item("notes", vec![reason])?;
        }
    }
    dict.into_py_any(py)
}

/// Independently re-check a certificate (as returned by `check`) against a
/// datum string.
#[pyfunction]
fn verify_certificate(py: Python<'_>, datum: &str, certificate: Py<PyAny>) -> PyResult<bool> {
    let datum: BranchDatum = datum.parse().map_err(value_error)?;
    let json_mod = py.import("json")?;
    let text: String = json_mod
        .call_method1("dumps", (certificate,))?
        .extract()?;
    let cert: criteria::Certificate = serde_json::from_str(&text).map_err(value_error)?;
    Ok(criteria::verify_certificate(&datum, &cert))
}

/// All data of degree `n` and genus `g` (canonical strings).
#[pyfunction]
#[pyo3(signature = (n, g = 0, q_max = None))]
fn enumerate_data(n: u64, g: u64, q_max: Option<usize>) -> Vec<PyDatum> {
    generators::enumerate_data(n, g, q_max.unwrap_or(usize::MAX))
        .into_iter()
        .map(|inner| PyDatum { inner })
        .collect()
}

/// A datum from a named series: iz0 | such | thd | wbd | koro.
#[pyfunction]
fn gen_series(name: &str, params: Vec<u64>) -> PyResult<PyDatum> {
    Ok(PyDatum {
        inner: generators::gen_series(name, &params).map_err(value_error)?,
    })
}

/// A datum from the positive-characteristic triple family.
#[pyfunction]
#[pyo3(signature = (a, b, c, k, extras = vec![]))]
fn gen_prop(a: u64, b: u64, c: u64, k: u64, extras: Vec<Vec<u64>>) -> PyResult<PyDatum> {
    let extras: Result<Vec<Partition>, _> = extras.into_iter().map(Partition::new).collect();
    Ok(PyDatum {
        inner: generators::gen_prop_family(a, b, c, k, &extras.map_err(value_error)?)
            .map_err(value_error)?,
    })
}

/// Parse map text ("v:"/"e:" lines) and return its branch datum.
#[pyfunction]
fn map_datum(text: &str) -> PyResult<PyDatum> {
    let map = dessins::parse_map(text).map_err(value_error)?;
    Ok(PyDatum {
        inner: map.to_datum().map_err(value_error)?,
    })
}

/// Divisibility-pattern report for map text and moduli (k, l), as a dict.
#[pyfunction]
fn graph_hypotheses(py: Python<'_>, text: &str, k: u64, l: u64) -> PyResult<Py<PyAny>> {
    let map = dessins::parse_map(text).map_err(value_error)?;
    let report = dessins::check_graph_hypotheses(&map, k, l).map_err(value_error)?;
    let json = serde_json::to_value(&report).map_err(value_error)?;
    json_to_py(py, &json)
}

/// Verify covering-data text (.cov format) by exact expansion.
#[pyfunction]
fn verify_covering(text: &str) -> PyResult<bool> {
    let data = halphen::parse_covering(text).map_err(value_error)?;
    data.verify().map_err(value_error)
}

/// Dihedral covering data for the triple (2,2,d), in .cov format.
#[pyfunction]
fn dihedral_covering(d: u64) -> PyResult<String> {
    if d < 2 {
        return Err(value_error("d must be at least 2"));
    }
    Ok(halphen::format_covering(&halphen::dihedral_covering(d)))
}

/// Tetrahedral covering data over Q(√−3), in .cov format.
#[pyfunction]
fn tetrahedral_covering() -> String {
    halphen::format_covering(&halphen::tetrahedral_covering())
}

#[pymodule]
fn hurwitz_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDatum>()?;
    m.add_function(wrap_pyfunction!(check, m)?)?;
    m.add_function(wrap_pyfunction!(oracle, m)?)?;
    m.add_function(wrap_pyfunction!(verify_certificate, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_data, m)?)?;
    m.add_function(wrap_pyfunction!(gen_series, m)?)?;
    m.add_function(wrap_pyfunction!(gen_prop, m)?)?;
    m.add_function(wrap_pyfunction!(map_datum, m)?)?;
    m.add_function(wrap_pyfunction!(graph_hypotheses, m)?)?;
    m.add_function(wrap_pyfunction!(verify_covering, m)?)?;
    m.add_function(wrap_pyfunction!(dihedral_covering, m)?)?;
    m.add_function(wrap_pyfunction!(tetrahedral_covering, m)?)?;
    Ok(())
}
