//! Local Cliffords acting on the Cartan torus.
//!
//! Conjugating `exp(i g·P)` by `c⊗c` permutes the three axes; an extra
//! Pauli on qubit 0 negates two of them. Together they realise every
//! signed permutation whose sign product is `+1`.

use std::sync::OnceLock;

use crate::matcore::{c, gates, Axis, C2x2};

/// One local conjugation and its effect on coefficient vectors:
/// `g'[perm[k]] = sign[k]·g[k]`.
#[derive(Clone, Copy, Debug)]
pub struct TorusAction {
    pub q0: C2x2,
    pub q1: C2x2,
    pub perm: [usize; 3],
    pub sign: [f64; 3],
}

impl TorusAction {
    pub fn apply(&self, g: [f64; 3]) -> [f64; 3] {
        let mut out = [0.0; 3];
        for k in 0..3 {
            out[self.perm[k]] = self.sign[k] * g[k];
        }
        out
    }
}

fn same_up_to_phase(a: &C2x2, b: &C2x2) -> bool {
    a.distance_up_to_phase(b) < 1e-9
}

/// The 24 single-qubit Cliffords modulo phase.
pub fn clifford_group() -> &'static [C2x2] {
    static GROUP: OnceLock<Vec<C2x2>> = OnceLock::new();
    GROUP.get_or_init(|| {
        let gens = [gates::h(), gates::s()];
        let mut group = vec![gates::i2()];
        let mut frontier = vec![gates::i2()];
        while let Some(g) = frontier.pop() {
            for h in &gens {
                let n = *h * g;
                if !group.iter().any(|m| same_up_to_phase(m, &n)) {
                    group.push(n);
                    frontier.push(n);
                }
            }
        }
        group
    })
}

/// Image of Pauli axis `k` under conjugation by `u`: `(axis, sign)`.
fn axis_image(u: &C2x2, k: usize) -> (usize, f64) {
    let img = *u * Axis::from_index(k).pauli() * u.adjoint();
    for j in 0..3 {
        let p = Axis::from_index(j).pauli();
        if img.max_abs_diff(&p) < 1e-9 {
            return (j, 1.0);
        }
        if img.max_abs_diff(&p.scale(c(-1.0, 0.0))) < 1e-9 {
            return (j, -1.0);
        }
    }
    unreachable!("Clifford conjugation must map Paulis to Paulis")
}

/// All distinct torus actions of `(p·c)⊗c`.
pub fn torus_actions() -> &'static [TorusAction] {
    static ACTIONS: OnceLock<Vec<TorusAction>> = OnceLock::new();
    ACTIONS.get_or_init(|| {
        let paulis = [gates::i2(), gates::x(), gates::y(), gates::z()];
        let mut out: Vec<TorusAction> = Vec::new();
        for cl in clifford_group() {
            let perm = [0, 1, 2].map(|k| axis_image(cl, k).0);
            for p in &paulis {
                let q0 = *p * *cl;
                let mut sign = [1.0; 3];
                for k in 0..3 {
                    // (p c P c† p†) ⊗ (c P c†): the Clifford signs square away
                    sign[k] = axis_image(&q0, k).1 * axis_image(cl, k).1;
                }
                if !out.iter().any(|a| a.perm == perm && a.sign == sign) {
                    out.push(TorusAction { q0, q1: *cl, perm, sign });
                }
            }
        }
        out
    })
}

/// Local `O = o0⊗o1` with `O·exp(i g·P)·O† = exp(i target·P)`.
pub fn orient(g: [f64; 3], target: [f64; 3]) -> Option<&'static TorusAction> {
    torus_actions().iter().find(|a| {
        let img = a.apply(g);
        (0..3).all(|k| (img[k] - target[k]).abs() < 1e-12)
    })
}

/// Distinct signed permutations of `g` reachable by local conjugation.
pub fn variants(g: [f64; 3]) -> Vec<[f64; 3]> {
    let mut out: Vec<[f64; 3]> = Vec::new();
    for a in torus_actions() {
        let v = a.apply(g).map(|x| if x == 0.0 { 0.0 } else { x });
        if !out.iter().any(|w| (0..3).all(|k| (w[k] - v[k]).abs() < 1e-14)) {
            out.push(v);
        }
    }
    out
}

/// Clifford `f` with `f X f† = ±P`, `f Y f† = ±Q` (and so `f Z f† = ±R`).
pub fn frame(p: usize, q: usize) -> C2x2 {
    *clifford_group()
        .iter()
        .find(|cl| axis_image(cl, 0).0 == p && axis_image(cl, 1).0 == q)
        .expect("every axis pair has a Clifford frame")
}
