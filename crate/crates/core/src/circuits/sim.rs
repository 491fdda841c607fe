//! Dense unitary simulation for small circuits.

use crate::error::{Error, Result};
use crate::matcore::{c, C64};

use super::Circuit;

/// Largest register the dense simulator accepts.
pub const MAX_DENSE_QUBITS: usize = 10;

/// Row-major `2^n × 2^n` matrix; qubit 0 is the most significant bit.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseUnitary {
    pub n_qubits: usize,
    pub data: Vec<C64>,
}

impl DenseUnitary {
    pub fn identity(n_qubits: usize) -> Self {
        let dim = 1 << n_qubits;
        let mut data = vec![c(0.0, 0.0); dim * dim];
        for i in 0..dim {
            data[i * dim + i] = c(1.0, 0.0);
        }
        DenseUnitary { n_qubits, data }
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    /// `min_φ ‖A − e^{iφ}B‖_F`.
    pub fn distance_up_to_phase(&self, other: &Self) -> f64 {
        let tr: C64 = other.data.iter().zip(&self.data).map(|(b, a)| b.conj() * a).sum();
        let p = if tr.norm() < 1e-300 { c(1.0, 0.0) } else { tr / tr.norm() };
        self.data.iter().zip(&other.data).map(|(a, b)| (a - p * b).norm_sqr()).sum::<f64>().sqrt()
    }

    /// Left-multiplies by a gate acting on `qubits` (first qubit = most
    /// significant index of `m`).
    fn apply(&mut self, qubits: &[usize], m: &[C64], k: usize) {
        let dim = self.dim();
        let masks: Vec<usize> = qubits.iter().map(|q| 1 << (self.n_qubits - 1 - q)).collect();
        let all: usize = masks.iter().sum();
        let sub = 1 << k;
        let mut idx = vec![0usize; sub];
        let mut buf = vec![c(0.0, 0.0); sub];
        for base in (0..dim).filter(|i| i & all == 0) {
            for (s, slot) in idx.iter_mut().enumerate() {
                *slot = base
                    + masks.iter().enumerate().filter(|(j, _)| s >> (k - 1 - j) & 1 == 1).map(|(_, m)| m).sum::<usize>();
            }
            for col in 0..dim {
                for r in 0..sub {
                    buf[r] = (0..sub).map(|s| m[r * sub + s] * self.data[idx[s] * dim + col]).sum();
                }
                for r in 0..sub {
                    self.data[idx[r] * dim + col] = buf[r];
                }
            }
        }
    }
}

/// Unitary of a whole circuit.
pub fn circuit_unitary(circ: &Circuit) -> Result<DenseUnitary> {
    if circ.n_qubits > MAX_DENSE_QUBITS {
        return Err(Error::InvalidArgument(format!(
            "dense simulation is limited to {MAX_DENSE_QUBITS} qubits, got {}",
            circ.n_qubits
        )));
    }
    let mut u = DenseUnitary::identity(circ.n_qubits);
    for op in &circ.ops {
        if let Some(m) = op.matrix_1q() {
            let flat: Vec<C64> = m.0.iter().flatten().copied().collect();
            u.apply(&op.qubits, &flat, 1);
        } else if let Some(m) = op.matrix_2q() {
            let flat: Vec<C64> = m.0.iter().flatten().copied().collect();
            u.apply(&op.qubits, &flat, 2);
        }
    }
    Ok(u)
}
