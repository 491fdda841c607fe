//! Turning planned moves into concrete gate lists.

use crate::calib::db_invert;
use crate::error::{Error, Result};
use crate::kak::KakFactorization;
use crate::matcore::{gates, kron, rotation_1q, Axis, C2x2, C4x4};

use super::orient::{frame, orient};
use super::planner::{Move, MoveKind};

/// Matrix-order item: a local layer or a basis invocation.
#[derive(Clone, Copy, Debug)]
pub enum Item {
    Local(C2x2, C2x2),
    Invoke(usize),
}

/// A realisable two-qubit building block: one or more basis invocations
/// whose product has canonical coordinate `coord`.
#[derive(Clone, Debug)]
pub struct Primitive {
    pub coord: [f64; 3],
    pub variants: Vec<[f64; 3]>,
    pub kak: KakFactorization,
    pub items: Vec<Item>,
    pub cost: usize,
}

impl Primitive {
    /// Emits `exp(i g·P)` (up to phase) where `g` is a variant of `coord`.
    fn emit(&self, g: [f64; 3], out: &mut Builder) -> Result<()> {
        let act = orient(self.coord, g)
            .ok_or_else(|| Error::Internal(format!("{g:?} is not a variant of {:?}", self.coord)))?;
        let k = &self.kak;
        out.push_local(act.q0 * k.a.adjoint(), act.q1 * k.b.adjoint());
        for it in &self.items {
            match *it {
                Item::Local(a, b) => out.push_local(a, b),
                Item::Invoke(i) => out.body.push(Item::Invoke(i)),
            }
        }
        out.push_local(k.c.adjoint() * act.q0.adjoint(), k.d.adjoint() * act.q1.adjoint());
        Ok(())
    }
}

/// Accumulates `left·body ∝ exp(i u·P)`.
#[derive(Clone, Debug)]
pub struct Builder {
    pub left: (C2x2, C2x2),
    pub body: Vec<Item>,
    pub u: [f64; 3],
}

impl Builder {
    pub fn new() -> Self {
        Builder { left: (gates::i2(), gates::i2()), body: Vec::new(), u: [0.0; 3] }
    }

    pub fn push_local(&mut self, a: C2x2, b: C2x2) {
        if let Some(Item::Local(pa, pb)) = self.body.last_mut() {
            *pa = *pa * a;
            *pb = *pb * b;
        } else {
            self.body.push(Item::Local(a, b));
        }
    }

    pub fn apply(&mut self, prims: &[Primitive], mv: &Move) -> Result<()> {
        let prim = &prims[mv.prim];
        match mv.kind {
            MoveKind::Pad => prim.emit(mv.g, self)?,
            MoveKind::Pair { p, q, vp, vq } => {
                let r = 3 - p - q;
                let sol = db_invert(self.u[p], self.u[q], mv.g[p], mv.g[q], vp, vq)?;
                let f = frame(p, q);
                let conj = |t: f64| f * rotation_1q(Axis::Z, t) * f.adjoint();
                self.left = (conj(sol.tau[0]) * self.left.0, conj(sol.tau[1]) * self.left.1);
                self.push_local(conj(sol.beta0), conj(sol.beta1));
                prim.emit(mv.g, self)?;
                self.push_local(conj(sol.tau[2]), conj(sol.tau[3]));
                self.u[r] += mv.g[r];
                self.u[p] = vp;
                self.u[q] = vq;
                return Ok(());
            }
        }
        self.u = mv.apply(self.u);
        Ok(())
    }
}

impl Default for Builder {
    fn default() -> Self {
        Self::new()
    }
}

pub fn items_matrix(items: &[Item], bases: &[C4x4]) -> C4x4 {
    items.iter().fold(gates::i4(), |acc, it| match *it {
        Item::Local(a, b) => acc * kron(&a, &b),
        Item::Invoke(i) => acc * bases[i],
    })
}
