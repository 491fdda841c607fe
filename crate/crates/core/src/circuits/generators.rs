//! Benchmark circuit generators.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::matcore::Axis;

use super::Circuit;

fn at_least(n: usize, min: usize, what: &str) -> Result<()> {
    if n < min {
        return Err(Error::InvalidArgument(format!("{what} needs at least {min} qubits")));
    }
    Ok(())
}

/// One MAXCUT layer on a random graph with independent edges.
pub fn gen_qaoa(n: usize, edge_prob: f64, seed: u64) -> Result<Circuit> {
    at_least(n, 2, "QAOA")?;
    if !(0.0..=1.0).contains(&edge_prob) {
        return Err(Error::InvalidArgument(format!("edge probability {edge_prob} is outside [0, 1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = Circuit::new(n)?;
    for q in 0..n {
        c.add("h", &[q], &[])?;
    }
    for i in 0..n {
        for j in i + 1..n {
            if rng.random::<f64>() < edge_prob {
                let gamma = rng.random_range(0.0..FRAC_PI_2);
                c.add("rzz", &[i, j], &[gamma])?;
            }
        }
    }
    let beta = rng.random_range(0.0..PI);
    for q in 0..n {
        c.add("rx", &[q], &[beta])?;
    }
    Ok(c)
}

/// Quantum Fourier transform without the final qubit reversal. Each
/// controlled phase is a `crz` plus an `rz` on the control.
pub fn gen_qft(n: usize) -> Result<Circuit> {
    at_least(n, 1, "QFT")?;
    let mut c = Circuit::new(n)?;
    for j in 0..n {
        c.add("h", &[j], &[])?;
        for k in j + 1..n {
            let lambda = 2.0 * PI / f64::powi(2.0, (k - j + 1) as i32);
            c.add("crz", &[k, j], &[lambda])?;
            c.add("rz", &[k], &[lambda / 2.0])?;
        }
    }
    Ok(c)
}

/// Bernstein-Vazirani on `n` data qubits plus one ancilla (the last qubit).
/// The secret defaults to all ones.
pub fn gen_bv(n: usize, secret: Option<&[bool]>) -> Result<Circuit> {
    at_least(n, 1, "Bernstein-Vazirani")?;
    let ones = vec![true; n];
    let secret = secret.unwrap_or(&ones);
    if secret.len() != n {
        return Err(Error::InvalidArgument(format!("secret has {} bits, expected {n}", secret.len())));
    }
    let anc = n;
    let mut c = Circuit::new(n + 1)?;
    c.add("x", &[anc], &[])?;
    for q in 0..=n {
        c.add("h", &[q], &[])?;
    }
    for (q, &bit) in secret.iter().enumerate() {
        if bit {
            c.add("cx", &[q, anc], &[])?;
        }
    }
    for q in 0..n {
        c.add("h", &[q], &[])?;
    }
    Ok(c)
}

/// `exp(−i·angle/2·P)` for a Pauli product `P`.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliString {
    /// Sorted by qubit.
    pub terms: Vec<(usize, Axis)>,
    pub angle: f64,
}

impl PauliString {
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let weight = rng.random_range(2..=n);
        let mut qubits = sample(rng, n, weight).into_vec();
        qubits.sort_unstable();
        let terms = qubits.into_iter().map(|q| (q, Axis::from_index(rng.random_range(0..3)))).collect();
        PauliString { terms, angle: rng.random_range(0.0..2.0 * PI) }
    }

    /// Appends the basis change, CX ladder and `rz` realising the string.
    pub fn append_to(&self, c: &mut Circuit) -> Result<()> {
        let change = |c: &mut Circuit, undo: bool| -> Result<()> {
            for &(q, axis) in &self.terms {
                match (axis, undo) {
                    (Axis::X, _) => c.add("h", &[q], &[])?,
                    (Axis::Y, false) => {
                        c.add("sdg", &[q], &[])?;
                        c.add("h", &[q], &[])?;
                    }
                    (Axis::Y, true) => {
                        c.add("h", &[q], &[])?;
                        c.add("s", &[q], &[])?;
                    }
                    (Axis::Z, _) => {}
                }
            }
            Ok(())
        };
        change(c, false)?;
        let qs: Vec<usize> = self.terms.iter().map(|t| t.0).collect();
        for w in qs.windows(2) {
            c.add("cx", &[w[0], w[1]], &[])?;
        }
        c.add("rz", &[*qs.last().expect("nonempty string")], &[self.angle])?;
        for w in qs.windows(2).rev() {
            c.add("cx", &[w[0], w[1]], &[])?;
        }
        change(c, true)
    }
}

/// Evolution under `n_strings` random Pauli strings of weight `2..=n`.
pub fn gen_pauli_evo(n: usize, n_strings: usize, seed: u64) -> Result<Circuit> {
    at_least(n, 2, "Pauli evolution")?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = Circuit::new(n)?;
    for _ in 0..n_strings {
        PauliString::random(n, &mut rng).append_to(&mut c)?;
    }
    Ok(c)
}
