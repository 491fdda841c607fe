//! Numeric completion with a fixed number of invocations.
//!
//! Searches the single-qubit layers between `n` invocations of one basis
//! gate so that the product is locally equivalent to the target, then
//! attaches the outer layers from the two KAK factorizations.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::kak::{kak_decompose, makhlin_invariants, KakFactorization, ANGLE_TOL};
use crate::matcore::{kron, rotation_1q, Axis, C2x2, C4x4, C64};

use crate::optim::least_squares;

use super::emit::Item;
use super::{build_plan, BasisGate, SynthesisPlan};

/// Largest invocation count the numeric route attempts.
pub(super) const MAX_COUNT: usize = 6;
const RESTARTS: usize = 12;
const ITERATIONS: usize = 200;
const SEED: u64 = 0x6e75_6d65;

fn zyz(p: &[f64]) -> C2x2 {
    rotation_1q(Axis::Z, p[0]) * rotation_1q(Axis::Y, p[1]) * rotation_1q(Axis::Z, p[2])
}

fn layer(p: &[f64]) -> (C2x2, C2x2) {
    (zyz(&p[..3]), zyz(&p[3..6]))
}

fn product(basis: &C4x4, params: &[f64]) -> C4x4 {
    params.chunks(6).fold(*basis, |m, p| {
        let (a, b) = layer(p);
        m * kron(&a, &b) * *basis
    })
}

fn invariant_gap(target: (C64, f64), u: &C4x4) -> Vec<f64> {
    let (g1, g2) = makhlin_invariants(u);
    vec![g1.re - target.0.re, g1.im - target.0.im, g2 - target.1]
}

fn coord_gap(t: [f64; 3], u: &C4x4) -> Vec<f64> {
    match kak_decompose(u) {
        Ok(k) => k.coord.as_array().iter().zip(&t).map(|(a, b)| a - b).collect(),
        Err(_) => vec![1.0; 3],
    }
}

/// Plan with exactly `n ≥ 2` invocations of `basis`, if one is found.
pub(super) fn complete(target: &C4x4, kak: &KakFactorization, basis: &BasisGate, n: usize) -> Result<SynthesisPlan> {
    if !(2..=MAX_COUNT).contains(&n) {
        return Err(Error::InvalidArgument(format!("numeric completion needs 2..={MAX_COUNT} invocations")));
    }
    let inv = makhlin_invariants(&kak.coord.to_matrix());
    let t = kak.coord.as_array();
    let dim = 6 * (n - 1);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ n as u64);
    for _ in 0..RESTARTS {
        let x0: Vec<f64> = (0..dim).map(|_| rng.random_range(-std::f64::consts::PI..std::f64::consts::PI)).collect();
        let (x, cost) = least_squares(&|p| invariant_gap(inv, &product(&basis.matrix, p)), x0, ITERATIONS * (2 * dim + 4), 1e-28);
        if cost > 1e-12 {
            continue;
        }
        let (x, _) = least_squares(&|p| coord_gap(t, &product(&basis.matrix, p)), x, 20 * (2 * dim + 4), 1e-30);
        let p = product(&basis.matrix, &x);
        let Ok(pk) = kak_decompose(&p) else { continue };
        if !pk.coord.approx_eq(&kak.coord, ANGLE_TOL) {
            continue;
        }
        let mut items = vec![Item::Local(kak.a * pk.a.adjoint(), kak.b * pk.b.adjoint()), Item::Invoke(0)];
        for chunk in x.chunks(6) {
            let (a, b) = layer(chunk);
            items.push(Item::Local(a, b));
            items.push(Item::Invoke(0));
        }
        items.push(Item::Local(pk.c.adjoint() * kak.c, pk.d.adjoint() * kak.d));
        if let Ok(plan) = build_plan(target, kak, &[basis], items) {
            return Ok(plan);
        }
    }
    Err(Error::Unreachable(format!("no {n}-invocation solution found for {:?} with {}", kak.coord, basis.label)))
}
