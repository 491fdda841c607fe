//! Circuit IR, text formats, benchmark generators and whole-circuit
//! transpilation.
//!
//! Rotation parameters are stored in the `exp(iβP)` convention used
//! throughout the crate. Text formats use the usual `exp(−iλP/2)` angles;
//! [`GateOp::named`] and [`GateOp::external_params`] convert at the boundary.

mod generators;
mod json;
mod qasm;
mod sim;
mod transpile;

pub use generators::{gen_bv, gen_pauli_evo, gen_qaoa, gen_qft, PauliString};
pub use sim::{circuit_unitary, DenseUnitary, MAX_DENSE_QUBITS};
pub use transpile::{transpile_circuit, TranspileReport};

use crate::error::{Error, Result};
use crate::matcore::{gates, rotation_1q, rotation_2q, Axis, C2x2, C4x4, INPUT_UNITARY_TOL};

/// Gate vocabulary.
#[derive(Clone, Debug, PartialEq)]
pub enum GateKind {
    H,
    X,
    Y,
    Z,
    S,
    Sdg,
    Rx,
    Ry,
    Rz,
    U3,
    Cx,
    Swap,
    Crz,
    Rzz,
    /// Arbitrary two-qubit unitary, optionally labelled (e.g. a basis gate).
    Opaque { label: Option<String>, matrix: C4x4 },
}

impl GateKind {
    pub fn from_name(name: &str) -> Result<Self> {
        Ok(match name {
            "h" => GateKind::H,
            "x" => GateKind::X,
            "y" => GateKind::Y,
            "z" => GateKind::Z,
            "s" => GateKind::S,
            "sdg" => GateKind::Sdg,
            "rx" => GateKind::Rx,
            "ry" => GateKind::Ry,
            "rz" => GateKind::Rz,
            "u3" => GateKind::U3,
            "cx" => GateKind::Cx,
            "swap" => GateKind::Swap,
            "crz" => GateKind::Crz,
            "rzz" => GateKind::Rzz,
            _ => return Err(Error::UnknownGate(name.to_string())),
        })
    }

    pub fn name(&self) -> &str {
        match self {
            GateKind::H => "h",
            GateKind::X => "x",
            GateKind::Y => "y",
            GateKind::Z => "z",
            GateKind::S => "s",
            GateKind::Sdg => "sdg",
            GateKind::Rx => "rx",
            GateKind::Ry => "ry",
            GateKind::Rz => "rz",
            GateKind::U3 => "u3",
            GateKind::Cx => "cx",
            GateKind::Swap => "swap",
            GateKind::Crz => "crz",
            GateKind::Rzz => "rzz",
            GateKind::Opaque { label, .. } => label.as_deref().unwrap_or("unitary"),
        }
    }

    pub fn arity(&self) -> usize {
        match self {
            GateKind::Cx | GateKind::Swap | GateKind::Crz | GateKind::Rzz | GateKind::Opaque { .. } => 2,
            _ => 1,
        }
    }

    pub fn n_params(&self) -> usize {
        match self {
            GateKind::Rx | GateKind::Ry | GateKind::Rz | GateKind::Crz | GateKind::Rzz => 1,
            GateKind::U3 => 3,
            _ => 0,
        }
    }
}

/// One gate application.
#[derive(Clone, Debug, PartialEq)]
pub struct GateOp {
    pub kind: GateKind,
    pub qubits: Vec<usize>,
    /// Internal-convention angles.
    pub params: Vec<f64>,
}

impl GateOp {
    /// Builds a named gate from external (`exp(−iλP/2)`) angles.
    pub fn named(name: &str, qubits: &[usize], external: &[f64]) -> Result<Self> {
        let kind = GateKind::from_name(name)?;
        if qubits.len() != kind.arity() {
            return Err(Error::InvalidArgument(format!("{name} acts on {} qubit(s)", kind.arity())));
        }
        if external.len() != kind.n_params() {
            return Err(Error::InvalidArgument(format!("{name} takes {} parameter(s)", kind.n_params())));
        }
        let params = match kind {
            // u3(θ, φ, λ) = Rz(φ)·Ry(θ)·Rz(λ)
            GateKind::U3 => vec![-external[1] / 2.0, -external[0] / 2.0, -external[2] / 2.0],
            _ => external.iter().map(|l| -l / 2.0).collect(),
        };
        Ok(GateOp { kind, qubits: qubits.to_vec(), params })
    }

    pub fn opaque(label: Option<String>, qubits: [usize; 2], matrix: C4x4) -> Result<Self> {
        matrix.ensure_unitary(INPUT_UNITARY_TOL)?;
        Ok(GateOp { kind: GateKind::Opaque { label, matrix }, qubits: qubits.to_vec(), params: Vec::new() })
    }

    /// Single-qubit gate `Z(α)·Y(β)·Z(γ)` in internal angles.
    pub fn zyz(qubit: usize, angles: [f64; 3]) -> Self {
        GateOp { kind: GateKind::U3, qubits: vec![qubit], params: angles.to_vec() }
    }

    /// Parameters in the external convention.
    pub fn external_params(&self) -> Vec<f64> {
        match self.kind {
            GateKind::U3 => vec![-2.0 * self.params[1], -2.0 * self.params[0], -2.0 * self.params[2]],
            _ => self.params.iter().map(|b| -2.0 * b).collect(),
        }
    }

    pub fn matrix_1q(&self) -> Option<C2x2> {
        let p = &self.params;
        Some(match self.kind {
            GateKind::H => gates::h(),
            GateKind::X => gates::x(),
            GateKind::Y => gates::y(),
            GateKind::Z => gates::z(),
            GateKind::S => gates::s(),
            GateKind::Sdg => gates::sdg(),
            GateKind::Rx => rotation_1q(Axis::X, p[0]),
            GateKind::Ry => rotation_1q(Axis::Y, p[0]),
            GateKind::Rz => rotation_1q(Axis::Z, p[0]),
            GateKind::U3 => rotation_1q(Axis::Z, p[0]) * rotation_1q(Axis::Y, p[1]) * rotation_1q(Axis::Z, p[2]),
            _ => return None,
        })
    }

    /// Matrix on `(qubits[0], qubits[1])`, the first qubit being the left
    /// tensor factor.
    pub fn matrix_2q(&self) -> Option<C4x4> {
        Some(match &self.kind {
            GateKind::Cx => gates::cx(),
            GateKind::Swap => gates::swap(),
            GateKind::Crz => {
                let mut m = gates::i4();
                let r = rotation_1q(Axis::Z, self.params[0]);
                for i in 0..2 {
                    for j in 0..2 {
                        m.0[2 + i][2 + j] = r.0[i][j];
                    }
                }
                m
            }
            GateKind::Rzz => rotation_2q(Axis::Z, self.params[0]),
            GateKind::Opaque { matrix, .. } => *matrix,
            _ => return None,
        })
    }
}

/// A quantum program on `n_qubits` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    pub n_qubits: usize,
    pub ops: Vec<GateOp>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::InvalidArgument("a circuit needs at least one qubit".into()));
        }
        Ok(Circuit { n_qubits, ops: Vec::new() })
    }

    pub fn push(&mut self, op: GateOp) -> Result<()> {
        for &q in &op.qubits {
            if q >= self.n_qubits {
                return Err(Error::QubitOutOfRange { index: q, n_qubits: self.n_qubits });
            }
        }
        if op.qubits.len() == 2 && op.qubits[0] == op.qubits[1] {
            return Err(Error::InvalidArgument(format!("{} needs two distinct qubits", op.kind.name())));
        }
        self.ops.push(op);
        Ok(())
    }

    /// Appends a named gate given external angles.
    pub fn add(&mut self, name: &str, qubits: &[usize], external: &[f64]) -> Result<()> {
        self.push(GateOp::named(name, qubits, external)?)
    }

    pub fn two_qubit_ops(&self) -> impl Iterator<Item = &GateOp> {
        self.ops.iter().filter(|o| o.qubits.len() == 2)
    }
}

/// Supported text formats.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CircuitFormat {
    QasmSubset,
    Json,
}

/// Parses a circuit; the format is sniffed from the first character.
pub fn parse_circuit(text: &str) -> Result<Circuit> {
    if text.trim_start().starts_with('{') {
        json::parse(text)
    } else {
        qasm::parse(text)
    }
}

pub fn emit_circuit(c: &Circuit, format: CircuitFormat) -> Result<String> {
    match format {
        CircuitFormat::QasmSubset => qasm::emit(c),
        CircuitFormat::Json => json::emit(c),
    }
}

/// Merges runs of single-qubit gates into one `u3` per run, dropping runs
/// that multiply to the identity.
pub fn merge_single_qubit_runs(c: &Circuit) -> Circuit {
    let mut out = Circuit { n_qubits: c.n_qubits, ops: Vec::with_capacity(c.ops.len()) };
    let mut pending: Vec<Option<C2x2>> = vec![None; c.n_qubits];
    let flush = |q: usize, pending: &mut Vec<Option<C2x2>>, out: &mut Circuit| {
        if let Some(m) = pending[q].take() {
            if m.distance_up_to_phase(&gates::i2()) > 1e-13 {
                out.ops.push(GateOp::zyz(q, crate::matcore::zyz_angles(&m)));
            }
        }
    };
    for op in &c.ops {
        match op.matrix_1q() {
            Some(m) => {
                let q = op.qubits[0];
                pending[q] = Some(m * pending[q].unwrap_or_else(gates::i2));
            }
            None => {
                for &q in &op.qubits {
                    flush(q, &mut pending, &mut out);
                }
                out.ops.push(op.clone());
            }
        }
    }
    for q in 0..c.n_qubits {
        flush(q, &mut pending, &mut out);
    }
    out
}
