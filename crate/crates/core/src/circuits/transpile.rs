//! Whole-circuit compilation onto an instruction set.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::hwmodel::HardwareModel;
use crate::matcore::gates;
use crate::synth::{compile_2q_mixed, lower_bound, BasisGate, Objective, PlanStep, SynthesisPlan};

use super::{merge_single_qubit_runs, Circuit, GateKind, GateOp};

/// Totals for one transpiled circuit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TranspileReport {
    /// Invocations per basis gate, in instruction-set order.
    pub invocations: Vec<usize>,
    pub basis_count: usize,
    /// Sum of per-op lower bounds (best basis per op).
    pub lower_bound: usize,
    pub latency: f64,
    pub fidelity: f64,
    /// Largest per-op reconstruction distance.
    pub max_residual: f64,
}

fn basis_op(basis: &BasisGate, qubits: [usize; 2]) -> GateOp {
    if basis.matrix.max_abs_diff(&gates::cx()) < 1e-15 {
        GateOp { kind: GateKind::Cx, qubits: qubits.to_vec(), params: Vec::new() }
    } else {
        GateOp {
            kind: GateKind::Opaque { label: Some(basis.label.clone()), matrix: basis.matrix },
            qubits: qubits.to_vec(),
            params: Vec::new(),
        }
    }
}

/// Replaces every two-qubit op by a compiled plan, then merges
/// single-qubit runs. Ops are compiled in parallel; the output order is
/// the input order.
pub fn transpile_circuit(
    c: &Circuit,
    bases: &[BasisGate],
    objective: Objective,
    model: &HardwareModel,
) -> Result<(Circuit, TranspileReport)> {
    let plans: Vec<Option<SynthesisPlan>> = c
        .ops
        .par_iter()
        .map(|op| op.matrix_2q().map(|m| compile_2q_mixed(&m, bases, objective, model)).transpose())
        .collect::<Result<_>>()?;

    let mut out = Circuit { n_qubits: c.n_qubits, ops: Vec::with_capacity(c.ops.len() * 4) };
    let mut report = TranspileReport {
        invocations: vec![0; bases.len()],
        basis_count: 0,
        lower_bound: 0,
        latency: 0.0,
        fidelity: 1.0,
        max_residual: 0.0,
    };
    for (op, plan) in c.ops.iter().zip(&plans) {
        let Some(plan) = plan else {
            out.ops.push(op.clone());
            continue;
        };
        let q = [op.qubits[0], op.qubits[1]];
        for step in &plan.steps {
            match step {
                PlanStep::OneQubit { qubit, matrix } => {
                    out.ops.push(GateOp::zyz(q[*qubit], crate::matcore::zyz_angles(matrix)));
                }
                PlanStep::Basis { index, .. } => out.ops.push(basis_op(&bases[*index], q)),
            }
        }
        for (total, n) in report.invocations.iter_mut().zip(plan.invocations()) {
            *total += n;
        }
        report.basis_count += plan.basis_count;
        report.lower_bound += bases.iter().map(|b| lower_bound(&plan.target_coord, b).n_lower).min().unwrap_or(0);
        report.latency += model.plan_latency(plan)?;
        report.fidelity *= model.plan_fidelity(plan)?;
        report.max_residual = report.max_residual.max(plan.residual_achieved);
    }
    Ok((merge_single_qubit_runs(&out), report))
}
