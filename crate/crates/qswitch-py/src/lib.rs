use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;
use qswitch::circuits::build_grover;
use qswitch::codes::{code, Version};
use qswitch::noise::{self, NoiseModel};
use qswitch::protocol::{self, certification_suite, NamedCircuit, Reference};
use qswitch::{Gate, GateKind};

fn err(e: qswitch::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn named(name: &str) -> qswitch::Result<NamedCircuit> {
    if let Some(tag) = name.strip_prefix("grover-") {
        return Ok(NamedCircuit { name: name.into(), circuit: build_grover(tag == "encoded")?, reference: Reference::grover() });
    }
    certification_suite()?
        .into_iter()
        .find(|nc| nc.name == name)
        .ok_or_else(|| qswitch::Error::Config(format!("unknown circuit {name:?}")))
}

fn parse_gate(name: &str, qubits: &[usize]) -> qswitch::Result<Gate> {
    let kind = GateKind::from_name(name).ok_or_else(|| qswitch::Error::UnsupportedGate(name.into()))?;
    if qubits.len() != kind.arity() {
        return Err(qswitch::Error::InvalidTarget(format!("{name} takes {} qubits", kind.arity())));
    }
    Ok(match kind.arity() {
        1 => Gate::one(kind, qubits[0]),
        2 => Gate::two(kind, qubits[0], qubits[1]),
        _ => Gate::ccz(qubits[0], qubits[1], qubits[2]),
    })
}

/// Signed Pauli operator on `n` qubits.
#[pyclass(name = "Pauli", frozen, eq)]
#[derive(Clone, PartialEq)]
struct PyPauli(qswitch::Pauli);

#[pymethods]
impl PyPauli {
    #[new]
    fn new(text: &str, n: usize) -> PyResult<Self> {
        qswitch::Pauli::parse(text, n).map(PyPauli).map_err(err)
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n
    }

    #[getter]
    fn weight(&self) -> u32 {
        self.0.weight()
    }

    fn dense(&self) -> String {
        self.0.dense()
    }

    fn commutes(&self, other: &PyPauli) -> PyResult<bool> {
        self.0.try_commutes(&other.0).map_err(err)
    }

    fn __mul__(&self, other: &PyPauli) -> PyResult<PyPauli> {
        self.0.try_mul(&other.0).map(PyPauli).map_err(err)
    }

    /// `g · self · g†` for a Clifford gate given by name, e.g. `conjugate("XX", [0, 1])`.
    fn conjugate(&self, gate: &str, qubits: Vec<usize>) -> PyResult<PyPauli> {
        let g = parse_gate(gate, &qubits).map_err(err)?;
        qswitch::conjugate(&g, &self.0).map(PyPauli).map_err(err)
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Pauli('{}', {})", self.0, self.0.n)
    }
}

fn version(v: u8) -> PyResult<Version> {
    Version::from_number(v).map_err(err)
}

/// Stabilizers, logical X and logical Z of a code version.
#[pyfunction]
fn code_operators(v: u8) -> PyResult<(Vec<PyPauli>, Vec<PyPauli>, Vec<PyPauli>)> {
    let c = code(version(v)?);
    let wrap = |xs: Vec<qswitch::Pauli>| xs.into_iter().map(PyPauli).collect();
    Ok((wrap(c.stabilizers), wrap(c.logical_x), wrap(c.logical_z)))
}

#[pyfunction]
fn catalog(v: u8) -> PyResult<String> {
    Ok(code(version(v)?).catalog())
}

/// Names accepted by `circuit_text`, `enumerate_faults` and `run_experiment`.
#[pyfunction]
fn circuit_names() -> PyResult<Vec<String>> {
    let mut v: Vec<String> = certification_suite().map_err(err)?.into_iter().map(|nc| nc.name).collect();
    v.extend(["grover-unencoded".into(), "grover-encoded".into()]);
    Ok(v)
}

#[pyfunction]
fn circuit_text(name: &str) -> PyResult<String> {
    Ok(named(name).map_err(err)?.circuit.to_text())
}

/// Single-fault enumeration; returns counts of sites by classification.
#[pyfunction]
#[pyo3(signature = (name, threads = 1))]
fn enumerate_faults<'py>(py: Python<'py>, name: &str, threads: usize) -> PyResult<Bound<'py, PyDict>> {
    let nc = named(name).map_err(err)?;
    let rep = py.allow_threads(|| protocol::enumerate_faults(&nc.circuit, &nc.reference, 2, threads)).map_err(err)?;
    let d = PyDict::new_bound(py);
    d.set_item("sites", rep.total_sites)?;
    d.set_item("detected", rep.detected)?;
    d.set_item("benign", rep.benign)?;
    d.set_item("logical_failures", rep.logical_failures.len())?;
    Ok(d)
}

/// Monte Carlo run of a named circuit at two-qubit error rate `p` (single-qubit rate p/10).
#[pyfunction]
#[pyo3(signature = (name, p, shots, seed = 0, threads = 1))]
fn run_experiment<'py>(py: Python<'py>, name: &str, p: f64, shots: u64, seed: u64, threads: usize) -> PyResult<Bound<'py, PyDict>> {
    let nc = named(name).map_err(err)?;
    let r = py.allow_threads(|| noise::run_experiment(&nc.circuit, &NoiseModel::new(p), shots, &nc.reference, seed, threads)).map_err(err)?;
    let d = PyDict::new_bound(py);
    d.set_item("p", r.p)?;
    d.set_item("q", r.q)?;
    d.set_item("shots", r.shots)?;
    d.set_item("n_postselected", r.n_postselected)?;
    d.set_item("n_failure", r.n_failure)?;
    d.set_item("p_L", r.p_l)?;
    d.set_item("p_L_ci", (r.p_l_ci_lo, r.p_l_ci_hi))?;
    d.set_item("R", r.r)?;
    d.set_item("R_ci", (r.r_ci_lo, r.r_ci_hi))?;
    Ok(d)
}

/// Least-squares fit of log p_L = a log p + b; returns (a, e^b, r²).
#[pyfunction]
fn fit_scaling(points: Vec<(f64, f64)>) -> PyResult<(f64, f64, f64)> {
    let f = noise::fit_scaling(&points).map_err(err)?;
    Ok((f.exponent, f.prefactor, f.r2))
}

#[pymodule]
fn qswitch_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPauli>()?;
    m.add_function(wrap_pyfunction!(code_operators, m)?)?;
    m.add_function(wrap_pyfunction!(catalog, m)?)?;
    m.add_function(wrap_pyfunction!(circuit_names, m)?)?;
    m.add_function(wrap_pyfunction!(circuit_text, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_faults, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    m.add_function(wrap_pyfunction!(fit_scaling, m)?)?;
    Ok(())
}
