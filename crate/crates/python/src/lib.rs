//! Python bindings. Matrices cross the boundary as nested lists of complex
//! numbers (NumPy arrays are accepted on input).

use cartan_synth::circuits::{
    circuit_unitary, emit_circuit, gen_bv, gen_qaoa, gen_qft, parse_circuit, transpile_circuit, Circuit,
    CircuitFormat,
};
use cartan_synth::hwmodel::{Coupling, HardwareModel};
use cartan_synth::kak::{self, TemplateClass};
use cartan_synth::matcore::{C2x2, C4x4};
use cartan_synth::synth::{self, BasisGate, Objective, SynthesisPlan};
use cartan_synth::{oracle, C64};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_c4(rows: Vec<Vec<C64>>) -> PyResult<C4x4> {
    if rows.len() != 4 || rows.iter().any(|r| r.len() != 4) {
        return Err(PyValueError::new_err("expected a 4x4 matrix"));
    }
    let mut m = C4x4::zeros();
    for (i, r) in rows.iter().enumerate() {
        m.0[i].copy_from_slice(r);
    }
    Ok(m)
}

fn from_c4(m: &C4x4) -> Vec<Vec<C64>> {
    m.0.iter().map(|r| r.to_vec()).collect()
}

fn from_c2(m: &C2x2) -> Vec<Vec<C64>> {
    m.0.iter().map(|r| r.to_vec()).collect()
}

fn template_angles(t: &TemplateClass) -> Vec<f64> {
    match *t {
        TemplateClass::Da(x) => vec![x],
        TemplateClass::Db(x, y) => vec![x, y],
        TemplateClass::Dc(x, y, z) => vec![x, y, z],
    }
}

fn objective(name: &str) -> PyResult<Objective> {
    match name {
        "min_count" => Ok(Objective::MinCount),
        "min_latency" => Ok(Objective::MinLatency),
        "max_fidelity" => Ok(Objective::MaxFidelity),
        _ => Err(PyValueError::new_err(format!("unknown objective `{name}`"))),
    }
}

/// Cartan coordinate `(x, y, z)` of a 4x4 unitary.
#[pyfunction]
fn cartan_coordinate(u: Vec<Vec<C64>>) -> PyResult<(f64, f64, f64)> {
    let c = kak::cartan_coordinate(&to_c4(u)?).map_err(err)?;
    Ok((c.x, c.y, c.z))
}

/// Full factorization `U = phase · (a⊗b) · exp(i(x XX + y YY + z ZZ)) · (c⊗d)`.
#[pyfunction]
fn kak_decompose<'py>(py: Python<'py>, u: Vec<Vec<C64>>) -> PyResult<Bound<'py, PyDict>> {
    let f = kak::kak_decompose(&to_c4(u)?).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("coord", (f.coord.x, f.coord.y, f.coord.z))?;
    d.set_item("global_phase", f.global_phase)?;
    d.set_item("a", from_c2(&f.a))?;
    d.set_item("b", from_c2(&f.b))?;
    d.set_item("c", from_c2(&f.c))?;
    d.set_item("d", from_c2(&f.d))?;
    Ok(d)
}

/// `min_φ ‖A − e^{iφ}B‖_F` for 4x4 matrices.
#[pyfunction]
fn distance_up_to_phase(a: Vec<Vec<C64>>, b: Vec<Vec<C64>>) -> PyResult<f64> {
    Ok(to_c4(a)?.distance_up_to_phase(&to_c4(b)?))
}

#[pyclass(name = "BasisGate", module = "cartan_py")]
struct PyBasisGate {
    inner: BasisGate,
}

#[pymethods]
impl PyBasisGate {
    /// Arbitrary two-qubit gate given as a matrix.
    #[new]
    fn new(label: String, matrix: Vec<Vec<C64>>) -> PyResult<Self> {
        Ok(PyBasisGate { inner: BasisGate::new(label, to_c4(matrix)?).map_err(err)? })
    }

    #[staticmethod]
    fn cx() -> Self {
        PyBasisGate { inner: BasisGate::cx() }
    }

    #[staticmethod]
    #[pyo3(signature = (theta, label=None))]
    fn da(theta: f64, label: Option<String>) -> PyResult<Self> {
        Self::from_template(TemplateClass::Da(theta), label)
    }

    #[staticmethod]
    #[pyo3(signature = (theta_x, theta_y, label=None))]
    fn db(theta_x: f64, theta_y: f64, label: Option<String>) -> PyResult<Self> {
        Self::from_template(TemplateClass::Db(theta_x, theta_y), label)
    }

    #[staticmethod]
    #[pyo3(signature = (theta_x, theta_y, theta_z, label=None))]
    fn dc(theta_x: f64, theta_y: f64, theta_z: f64, label: Option<String>) -> PyResult<Self> {
        Self::from_template(TemplateClass::Dc(theta_x, theta_y, theta_z), label)
    }

    #[getter]
    fn label(&self) -> String {
        self.inner.label.clone()
    }

    /// Template name: `Da`, `Db` or `Dc`.
    #[getter]
    fn template(&self) -> &'static str {
        self.inner.template.name()
    }

    #[getter]
    fn angles(&self) -> Vec<f64> {
        template_angles(&self.inner.template)
    }

    #[getter]
    fn matrix(&self) -> Vec<Vec<C64>> {
        from_c4(&self.inner.matrix)
    }

    fn __repr__(&self) -> String {
        format!("BasisGate({:?}, {}{:?})", self.inner.label, self.inner.template.name(), template_angles(&self.inner.template))
    }
}

impl PyBasisGate {
    fn from_template(t: TemplateClass, label: Option<String>) -> PyResult<Self> {
        let label = label.unwrap_or_else(|| format!("{}{:?}", t.name().to_lowercase(), template_angles(&t)));
        Ok(PyBasisGate { inner: BasisGate::from_template(label, t).map_err(err)? })
    }
}

#[pyclass(name = "SynthesisPlan", module = "cartan_py")]
struct PySynthesisPlan {
    inner: SynthesisPlan,
}

#[pymethods]
impl PySynthesisPlan {
    #[getter]
    fn basis_count(&self) -> usize {
        self.inner.basis_count
    }

    #[getter]
    fn residual(&self) -> f64 {
        self.inner.residual_achieved
    }

    #[getter]
    fn target_coord(&self) -> (f64, f64, f64) {
        let c = self.inner.target_coord;
        (c.x, c.y, c.z)
    }

    /// Invocation count per basis gate.
    fn invocations(&self) -> Vec<usize> {
        self.inner.invocations()
    }

    /// Product of all steps.
    fn assemble(&self) -> Vec<Vec<C64>> {
        from_c4(&self.inner.assemble())
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string_pretty(&self.inner).map_err(err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PySynthesisPlan { inner: serde_json::from_str(text).map_err(err)? })
    }

    fn __len__(&self) -> usize {
        self.inner.steps.len()
    }

    fn __repr__(&self) -> String {
        format!("SynthesisPlan(basis_count={}, residual={:e})", self.inner.basis_count, self.inner.residual_achieved)
    }
}

#[pyclass(name = "HardwareModel", module = "cartan_py")]
struct PyHardwareModel {
    inner: HardwareModel,
}

#[pymethods]
impl PyHardwareModel {
    /// `coupling` is `"xx"` or `"xx+yy"`.
    #[new]
    #[pyo3(signature = (coupling="xx", error_slope=None, error_offset=None))]
    fn new(coupling: &str, error_slope: Option<f64>, error_offset: Option<f64>) -> PyResult<Self> {
        let coupling = match coupling {
            "xx" => Coupling::XxOnly,
            "xx+yy" | "xxyy" => Coupling::XxPlusYy,
            _ => return Err(PyValueError::new_err(format!("unknown coupling `{coupling}`"))),
        };
        let mut inner = HardwareModel::default().with_coupling(coupling);
        if let Some(m) = error_slope {
            inner.error_slope = m;
        }
        if let Some(b) = error_offset {
            inner.error_offset = b;
        }
        Ok(PyHardwareModel { inner })
    }

    /// Latency of one invocation in units of a CX.
    fn gate_latency(&self, basis: PyRef<'_, PyBasisGate>) -> PyResult<f64> {
        self.inner.gate_latency(&basis.inner.template).map_err(err)
    }

    fn plan_fidelity(&self, plan: PyRef<'_, PySynthesisPlan>) -> PyResult<f64> {
        self.inner.plan_fidelity(&plan.inner).map_err(err)
    }

    fn plan_latency(&self, plan: PyRef<'_, PySynthesisPlan>) -> PyResult<f64> {
        self.inner.plan_latency(&plan.inner).map_err(err)
    }
}

#[pyclass(name = "Circuit", module = "cartan_py")]
struct PyCircuit {
    inner: Circuit,
}

#[pymethods]
impl PyCircuit {
    /// Parses OpenQASM (subset) or JSON text.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Ok(PyCircuit { inner: parse_circuit(text).map_err(err)? })
    }

    #[staticmethod]
    fn qft(n: usize) -> PyResult<Self> {
        Ok(PyCircuit { inner: gen_qft(n).map_err(err)? })
    }

    /// Bernstein-Vazirani on `n` data qubits plus one ancilla.
    #[staticmethod]
    #[pyo3(signature = (n, secret=None))]
    fn bv(n: usize, secret: Option<Vec<bool>>) -> PyResult<Self> {
        Ok(PyCircuit { inner: gen_bv(n, secret.as_deref()).map_err(err)? })
    }

    #[staticmethod]
    #[pyo3(signature = (n, edge_prob=0.3, seed=0))]
    fn qaoa(n: usize, edge_prob: f64, seed: u64) -> PyResult<Self> {
        Ok(PyCircuit { inner: gen_qaoa(n, edge_prob, seed).map_err(err)? })
    }

    #[getter]
    fn n_qubits(&self) -> usize {
        self.inner.n_qubits
    }

    #[getter]
    fn two_qubit_count(&self) -> usize {
        self.inner.two_qubit_ops().count()
    }

    fn __len__(&self) -> usize {
        self.inner.ops.len()
    }

    fn to_qasm(&self) -> PyResult<String> {
        emit_circuit(&self.inner, CircuitFormat::QasmSubset).map_err(err)
    }

    fn to_json(&self) -> PyResult<String> {
        emit_circuit(&self.inner, CircuitFormat::Json).map_err(err)
    }

    /// Dense unitary; qubit 0 is the most significant index bit.
    fn unitary(&self) -> PyResult<Vec<Vec<C64>>> {
        let u = circuit_unitary(&self.inner).map_err(err)?;
        Ok(u.data.chunks(u.dim()).map(|r| r.to_vec()).collect())
    }
}

fn refs(bases: &[PyRef<'_, PyBasisGate>]) -> Vec<BasisGate> {
    bases.iter().map(|b| b.inner.clone()).collect()
}

#[pyfunction]
fn compile_2q(target: Vec<Vec<C64>>, basis: PyRef<'_, PyBasisGate>) -> PyResult<PySynthesisPlan> {
    Ok(PySynthesisPlan { inner: synth::compile_2q(&to_c4(target)?, &basis.inner).map_err(err)? })
}

/// Best plan over several basis gates; `objective` is `min_count`,
/// `min_latency` or `max_fidelity`.
#[pyfunction]
#[pyo3(signature = (target, bases, objective="max_fidelity", model=None))]
fn compile_2q_mixed(
    target: Vec<Vec<C64>>,
    bases: Vec<PyRef<'_, PyBasisGate>>,
    objective: &str,
    model: Option<PyRef<'_, PyHardwareModel>>,
) -> PyResult<PySynthesisPlan> {
    let model = model.map(|m| m.inner).unwrap_or_default();
    let plan = synth::compile_2q_mixed(&to_c4(target)?, &refs(&bases), self::objective(objective)?, &model);
    Ok(PySynthesisPlan { inner: plan.map_err(err)? })
}

/// `(n_lower, applicable)`: invocations no plan can go below.
#[pyfunction]
fn lower_bound(target: Vec<Vec<C64>>, basis: PyRef<'_, PyBasisGate>) -> PyResult<(usize, bool)> {
    let coord = kak::cartan_coordinate(&to_c4(target)?).map_err(err)?;
    let b = synth::lower_bound(&coord, &basis.inner);
    Ok((b.n_lower, b.applicable))
}

/// Returns the transpiled circuit and a report dict.
#[pyfunction]
#[pyo3(signature = (circuit, bases, objective="max_fidelity", model=None))]
fn transpile<'py>(
    py: Python<'py>,
    circuit: PyRef<'_, PyCircuit>,
    bases: Vec<PyRef<'_, PyBasisGate>>,
    objective: &str,
    model: Option<PyRef<'_, PyHardwareModel>>,
) -> PyResult<(PyCircuit, Bound<'py, PyDict>)> {
    let model = model.map(|m| m.inner).unwrap_or_default();
    let (out, r) = transpile_circuit(&circuit.inner, &refs(&bases), self::objective(objective)?, &model).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("invocations", r.invocations)?;
    d.set_item("basis_count", r.basis_count)?;
    d.set_item("lower_bound", r.lower_bound)?;
    d.set_item("latency", r.latency)?;
    d.set_item("fidelity", r.fidelity)?;
    d.set_item("max_residual", r.max_residual)?;
    Ok((PyCircuit { inner: out }, d))
}

/// Smallest invocation count found by numerical search, or `None`.
#[pyfunction]
#[pyo3(signature = (target, basis, n_max=6, restarts=8))]
fn brute_force_min_count(
    target: Vec<Vec<C64>>,
    basis: PyRef<'_, PyBasisGate>,
    n_max: usize,
    restarts: usize,
) -> PyResult<Option<usize>> {
    oracle::brute_force_min_count(&to_c4(target)?, &basis.inner.matrix, n_max, restarts).map_err(err)
}

#[pymodule]
fn cartan_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyBasisGate>()?;
    m.add_class::<PySynthesisPlan>()?;
    m.add_class::<PyHardwareModel>()?;
    m.add_class::<PyCircuit>()?;
    m.add_function(wrap_pyfunction!(cartan_coordinate, m)?)?;
    m.add_function(wrap_pyfunction!(kak_decompose, m)?)?;
    m.add_function(wrap_pyfunction!(distance_up_to_phase, m)?)?;
    m.add_function(wrap_pyfunction!(compile_2q, m)?)?;
    m.add_function(wrap_pyfunction!(compile_2q_mixed, m)?)?;
    m.add_function(wrap_pyfunction!(lower_bound, m)?)?;
    m.add_function(wrap_pyfunction!(transpile, m)?)?;
    m.add_function(wrap_pyfunction!(brute_force_min_count, m)?)?;
    Ok(())
}
