//! JSON circuit format.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::C4x4;

use super::{Circuit, GateKind, GateOp};

#[derive(Serialize, Deserialize)]
struct JsonCircuit {
    n_qubits: usize,
    ops: Vec<JsonOp>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum JsonOp {
    Matrix {
        matrix: C4x4,
        qubits: Vec<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
    },
    Named {
        name: String,
        qubits: Vec<usize>,
        #[serde(default)]
        params: Vec<f64>,
    },
}

pub(super) fn parse(text: &str) -> Result<Circuit> {
    let jc: JsonCircuit = serde_json::from_str(text)?;
    let mut c = Circuit::new(jc.n_qubits)?;
    for op in jc.ops {
        let op = match op {
            JsonOp::Named { name, qubits, params } => GateOp::named(&name, &qubits, &params)?,
            JsonOp::Matrix { matrix, qubits, label } => {
                let q: [usize; 2] = qubits
                    .try_into()
                    .map_err(|_| Error::InvalidArgument("matrix ops act on exactly two qubits".into()))?;
                GateOp::opaque(label, q, matrix)?
            }
        };
        c.push(op)?;
    }
    Ok(c)
}

pub(super) fn emit(c: &Circuit) -> Result<String> {
    let ops = c
        .ops
        .iter()
        .map(|op| match &op.kind {
            GateKind::Opaque { label, matrix } => {
                JsonOp::Matrix { matrix: *matrix, qubits: op.qubits.clone(), label: label.clone() }
            }
            k => JsonOp::Named { name: k.name().to_string(), qubits: op.qubits.clone(), params: op.external_params() },
        })
        .collect();
    Ok(serde_json::to_string_pretty(&JsonCircuit { n_qubits: c.n_qubits, ops })?)
}
