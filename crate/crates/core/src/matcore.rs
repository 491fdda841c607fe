//! Fixed-size complex matrices for one- and two-qubit work.
//!
//! Everything here is specialised to 2×2 and 4×4 (plus the small dense
//! matrices used by the circuit simulator). Rotations follow the
//! `exp(+iβP)` convention: `Z(β) = cos β·I + i sin β·Z`, and likewise for
//! the two-qubit `XX(β) = exp(iβ X⊗X)`.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Unitarity tolerance for matrices arriving from outside the library.
pub const INPUT_UNITARY_TOL: f64 = 1e-8;
/// Unitarity tolerance for matrices built internally.
pub const INTERNAL_UNITARY_TOL: f64 = 1e-12;

#[inline]
pub const fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

const ZERO: C64 = c(0.0, 0.0);
const ONE: C64 = c(1.0, 0.0);
const IM: C64 = c(0.0, 1.0);

/// Dense row-major `N×N` complex matrix.
#[derive(Clone, Copy, PartialEq)]
pub struct Mat<const N: usize>(pub [[C64; N]; N]);

pub type C2x2 = Mat<2>;
pub type C4x4 = Mat<4>;

impl<const N: usize> fmt::Debug for Mat<N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Mat<{N}>[")?;
        for row in &self.0 {
            write!(f, "  ")?;
            for z in row {
                write!(f, "{:+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

// Serialised as a flat row-major list of `[re, im]` pairs.
impl<const N: usize> serde::Serialize for Mat<N> {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_pairs().serialize(ser)
    }
}

impl<'de, const N: usize> serde::Deserialize<'de> for Mat<N> {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let pairs = Vec::<[f64; 2]>::deserialize(de)?;
        Mat::from_pairs(&pairs).map_err(serde::de::Error::custom)
    }
}

impl<const N: usize> Default for Mat<N> {
    fn default() -> Self {
        Self::identity()
    }
}

impl<const N: usize> Mat<N> {
    pub fn zeros() -> Self {
        Mat([[ZERO; N]; N])
    }

    pub fn identity() -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            m.0[i][i] = ONE;
        }
        m
    }

    pub fn from_diag(d: [C64; N]) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            m.0[i][i] = d[i];
        }
        m
    }

    /// Builds a matrix from row-major `(re, im)` pairs.
    pub fn from_pairs(entries: &[[f64; 2]]) -> Result<Self> {
        if entries.len() != N * N {
            return Err(Error::InvalidArgument(format!(
                "expected {} matrix entries, got {}",
                N * N,
                entries.len()
            )));
        }
        let mut m = Self::zeros();
        for (k, e) in entries.iter().enumerate() {
            m.0[k / N][k % N] = c(e[0], e[1]);
        }
        Ok(m)
    }

    pub fn to_pairs(&self) -> Vec<[f64; 2]> {
        self.0.iter().flatten().map(|z| [z.re, z.im]).collect()
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                m.0[i][j] = self.0[j][i].conj();
            }
        }
        m
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                m.0[i][j] = self.0[j][i];
            }
        }
        m
    }

    pub fn trace(&self) -> C64 {
        (0..N).map(|i| self.0[i][i]).sum()
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut m = *self;
        for row in m.0.iter_mut() {
            for z in row.iter_mut() {
                *z *= s;
            }
        }
        m
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..N {
            for j in 0..N {
                worst = worst.max((self.0[i][j] - other.0[i][j]).norm());
            }
        }
        worst
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `‖A·A† − I‖∞` (entrywise max).
    pub fn unitarity_defect(&self) -> f64 {
        (*self * self.adjoint()).max_abs_diff(&Self::identity())
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_defect() <= tol
    }

    pub fn ensure_unitary(&self, tol: f64) -> Result<()> {
        let defect = self.unitarity_defect();
        if defect.is_finite() && defect <= tol {
            Ok(())
        } else {
            Err(Error::NotUnitary(defect))
        }
    }

    /// Determinant by Gaussian elimination with partial pivoting.
    pub fn determinant(&self) -> C64 {
        let mut a = self.0;
        let mut det = ONE;
        for col in 0..N {
            let pivot = (col..N)
                .max_by(|&p, &q| a[p][col].norm().total_cmp(&a[q][col].norm()))
                .unwrap_or(col);
            if a[pivot][col].norm() == 0.0 {
                return ZERO;
            }
            if pivot != col {
                a.swap(pivot, col);
                det = -det;
            }
            let p = a[col][col];
            det *= p;
            for row in col + 1..N {
                let f = a[row][col] / p;
                if f != ZERO {
                    for k in col..N {
                        let v = a[col][k];
                        a[row][k] -= f * v;
                    }
                }
            }
        }
        det
    }

    /// Scales a unitary into determinant one. Returns `(A', phase)` with
    /// `A = phase·A'`; the phase is the principal `N`-th root of `det A`.
    pub fn su_normalize(&self) -> Result<(Self, C64)> {
        self.ensure_unitary(INPUT_UNITARY_TOL)?;
        let det = self.determinant();
        let phase = C64::from_polar(1.0, det.arg() / N as f64);
        Ok((self.scale(phase.conj()), phase))
    }

    /// `min_φ ‖A − e^{iφ}B‖_F`. For unitaries this equals
    /// `sqrt(2N − 2|tr(A†B)|)`; the residual is formed explicitly because the
    /// closed form loses half the digits near zero.
    pub fn distance_up_to_phase(&self, other: &Self) -> f64 {
        let p = self.best_phase(other);
        (*self - other.scale(p)).frobenius_norm()
    }

    /// Phase `p` (unit modulus) minimising `‖A − p·B‖_F`.
    pub fn best_phase(&self, other: &Self) -> C64 {
        let tr = (other.adjoint() * *self).trace();
        if tr.norm() < 1e-300 {
            ONE
        } else {
            tr / tr.norm()
        }
    }
}

impl<const N: usize> Mul for Mat<N> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for k in 0..N {
                let a = self.0[i][k];
                if a == ZERO {
                    continue;
                }
                for j in 0..N {
                    m.0[i][j] += a * rhs.0[k][j];
                }
            }
        }
        m
    }
}

impl<const N: usize> Add for Mat<N> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let mut m = self;
        for i in 0..N {
            for j in 0..N {
                m.0[i][j] += rhs.0[i][j];
            }
        }
        m
    }
}

impl<const N: usize> Sub for Mat<N> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let mut m = self;
        for i in 0..N {
            for j in 0..N {
                m.0[i][j] -= rhs.0[i][j];
            }
        }
        m
    }
}

/// Product `A·B` of two 4×4 matrices.
pub fn multiply(a: &C4x4, b: &C4x4) -> C4x4 {
    *a * *b
}

/// Kronecker product; `a` acts on qubit 0, the more significant index.
pub fn kron(a: &C2x2, b: &C2x2) -> C4x4 {
    let mut m = C4x4::zeros();
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    m.0[2 * i + k][2 * j + l] = a.0[i][j] * b.0[k][l];
                }
            }
        }
    }
    m
}

/// Splits `K ≈ phase·(a⊗b)` with `a, b ∈ SU(2)`. Returns `None` when `K` is
/// not (numerically) a tensor product of unitaries.
pub fn kron_factor(k: &C4x4) -> Option<(C64, C2x2, C2x2)> {
    // Pick the 2×2 block with the largest weight as the template for `b`.
    let block = |bi: usize, bj: usize| {
        let mut m = C2x2::zeros();
        for r in 0..2 {
            for s in 0..2 {
                m.0[r][s] = k.0[2 * bi + r][2 * bj + s];
            }
        }
        m
    };
    let (bi, bj) = [(0, 0), (0, 1), (1, 0), (1, 1)]
        .into_iter()
        .max_by(|&(a, b), &(c, d)| block(a, b).frobenius_norm().total_cmp(&block(c, d).frobenius_norm()))?;
    let raw_b = block(bi, bj);
    let det_b = raw_b.determinant();
    if det_b.norm() < 1e-12 {
        return None;
    }
    let b = raw_b.scale(det_b.sqrt().inv());
    let b_adj = b.adjoint();
    let mut a = C2x2::zeros();
    for i in 0..2 {
        for j in 0..2 {
            a.0[i][j] = (block(i, j) * b_adj).trace() / 2.0;
        }
    }
    let det_a = a.determinant();
    if det_a.norm() < 1e-12 {
        return None;
    }
    let phase = det_a.sqrt();
    let a = a.scale(phase.inv());
    let phase = phase / phase.norm();
    if kron(&a, &b).scale(phase).max_abs_diff(k) > 1e-7 {
        return None;
    }
    Some((phase, a, b))
}

/// Rescales a 2×2 unitary into SU(2); returns `(u', phase)` with `u = phase·u'`.
pub fn su2_normalize(u: &C2x2) -> (C2x2, C64) {
    let det = u.determinant();
    let phase = C64::from_polar(1.0, det.arg() / 2.0);
    (u.scale(phase.conj()), phase)
}

/// Angles `(α, β, γ)` with `u ∝ Z(α)·Y(β)·Z(γ)` in the `exp(iθP)` convention.
pub fn zyz_angles(u: &C2x2) -> [f64; 3] {
    let (v, _) = su2_normalize(u);
    let (a, b) = (v.0[0][0], v.0[0][1]);
    let beta = b.norm().atan2(a.norm());
    // α + γ = arg a, α − γ = arg b; either may be undefined at the poles.
    let sum = if a.norm() > 1e-14 { a.arg() } else { 0.0 };
    let diff = if b.norm() > 1e-14 { b.arg() } else { 0.0 };
    [(sum + diff) / 2.0, beta, (sum - diff) / 2.0]
}

/// Single-qubit Pauli axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }

    pub fn from_index(i: usize) -> Axis {
        Axis::ALL[i % 3]
    }

    pub fn pauli(self) -> C2x2 {
        match self {
            Axis::X => gates::x(),
            Axis::Y => gates::y(),
            Axis::Z => gates::z(),
        }
    }
}

/// `exp(iβP)` for a Pauli axis `P`.
pub fn rotation_1q(axis: Axis, beta: f64) -> C2x2 {
    let (s, co) = beta.sin_cos();
    C2x2::identity().scale(c(co, 0.0)) + axis.pauli().scale(c(0.0, s))
}

/// `exp(iβ P⊗P)` for a Pauli axis `P`.
pub fn rotation_2q(axis: Axis, beta: f64) -> C4x4 {
    let (s, co) = beta.sin_cos();
    let p = axis.pauli();
    C4x4::identity().scale(c(co, 0.0)) + kron(&p, &p).scale(c(0.0, s))
}

/// `exp(i(a·XX + b·YY + c·ZZ))`.
pub fn cartan_exp(coords: [f64; 3]) -> C4x4 {
    rotation_2q(Axis::X, coords[0]) * rotation_2q(Axis::Y, coords[1]) * rotation_2q(Axis::Z, coords[2])
}

/// Named constant gates.
pub mod gates {
    use super::*;

    pub fn i2() -> C2x2 {
        C2x2::identity()
    }
    pub fn x() -> C2x2 {
        Mat([[ZERO, ONE], [ONE, ZERO]])
    }
    pub fn y() -> C2x2 {
        Mat([[ZERO, -IM], [IM, ZERO]])
    }
    pub fn z() -> C2x2 {
        Mat([[ONE, ZERO], [ZERO, -ONE]])
    }
    pub fn s() -> C2x2 {
        Mat([[ONE, ZERO], [ZERO, IM]])
    }
    pub fn sdg() -> C2x2 {
        Mat([[ONE, ZERO], [ZERO, -IM]])
    }
    pub fn h() -> C2x2 {
        let r = c(FRAC_1_SQRT_2, 0.0);
        Mat([[r, r], [r, -r]])
    }
    pub fn i4() -> C4x4 {
        C4x4::identity()
    }
    /// Controlled-X with qubit 0 as control.
    pub fn cx() -> C4x4 {
        Mat([
            [ONE, ZERO, ZERO, ZERO],
            [ZERO, ONE, ZERO, ZERO],
            [ZERO, ZERO, ZERO, ONE],
            [ZERO, ZERO, ONE, ZERO],
        ])
    }
    pub fn swap() -> C4x4 {
        Mat([
            [ONE, ZERO, ZERO, ZERO],
            [ZERO, ZERO, ONE, ZERO],
            [ZERO, ONE, ZERO, ZERO],
            [ZERO, ZERO, ZERO, ONE],
        ])
    }
    /// Magic basis; conjugation by it maps SU(2)⊗SU(2) onto SO(4).
    pub fn magic() -> C4x4 {
        let r = FRAC_1_SQRT_2;
        Mat([
            [c(r, 0.0), ZERO, ZERO, c(0.0, r)],
            [ZERO, c(0.0, r), c(r, 0.0), ZERO],
            [ZERO, c(0.0, r), c(-r, 0.0), ZERO],
            [c(r, 0.0), ZERO, ZERO, c(0.0, -r)],
        ])
    }
}

/// Real symmetric 4×4 eigen-decomposition by cyclic Jacobi rotations.
///
/// Returns eigenvalues in ascending order and the orthogonal matrix whose
/// columns are the matching eigenvectors, so that `A = Q·diag(λ)·Qᵀ`.
pub fn eig_sym4(a: &[[f64; 4]; 4]) -> Result<([f64; 4], [[f64; 4]; 4])> {
    const MAX_SWEEPS: usize = 64;
    for i in 0..4 {
        for j in 0..i {
            if (a[i][j] - a[j][i]).abs() > 1e-10 * (1.0 + a[i][j].abs()) {
                return Err(Error::InvalidArgument("eig_sym4 input is not symmetric".into()));
            }
        }
    }
    let mut m = *a;
    let mut q = [[0.0f64; 4]; 4];
    for (i, row) in q.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    let scale = m.iter().flatten().map(|v| v * v).sum::<f64>().sqrt().max(1e-300);
    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..4)
            .flat_map(|i| (0..4).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i][j] * m[i][j])
            .sum::<f64>()
            .sqrt();
        if off <= 1e-12 * scale {
            converged = true;
            break;
        }
        for p in 0..3 {
            for r in p + 1..4 {
                let apr = m[p][r];
                if apr.abs() <= 1e-300 {
                    continue;
                }
                let theta = (m[r][r] - m[p][p]) / (2.0 * apr);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let cs = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * cs;
                for k in 0..4 {
                    let mkp = m[k][p];
                    let mkr = m[k][r];
                    m[k][p] = cs * mkp - sn * mkr;
                    m[k][r] = sn * mkp + cs * mkr;
                }
                for k in 0..4 {
                    let mpk = m[p][k];
                    let mrk = m[r][k];
                    m[p][k] = cs * mpk - sn * mrk;
                    m[r][k] = sn * mpk + cs * mrk;
                }
                for row in q.iter_mut() {
                    let qp = row[p];
                    let qr = row[r];
                    row[p] = cs * qp - sn * qr;
                    row[r] = sn * qp + cs * qr;
                }
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence(MAX_SWEEPS));
    }
    let mut order = [0usize, 1, 2, 3];
    order.sort_by(|&i, &j| m[i][i].total_cmp(&m[j][j]));
    let mut vals = [0.0; 4];
    let mut vecs = [[0.0; 4]; 4];
    for (new, &old) in order.iter().enumerate() {
        vals[new] = m[old][old];
        for k in 0..4 {
            vecs[k][new] = q[k][old];
        }
    }
    Ok((vals, vecs))
}

/// Haar-random unitaries for tests, oracles and benchmarks.
pub mod random {
    use super::*;
    use rand::Rng;
    use rand_distr::StandardNormal;

    fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
        c(rng.sample(StandardNormal), rng.sample(StandardNormal))
    }

    /// Gram-Schmidt on Gaussian columns gives a Haar-distributed unitary.
    pub fn unitary<const N: usize, R: Rng + ?Sized>(rng: &mut R) -> Mat<N> {
        let mut cols = [[ZERO; N]; N];
        for col in cols.iter_mut() {
            for z in col.iter_mut() {
                *z = gaussian(rng);
            }
        }
        for j in 0..N {
            for k in 0..j {
                let proj: C64 = (0..N).map(|i| cols[k][i].conj() * cols[j][i]).sum();
                for i in 0..N {
                    let v = cols[k][i];
                    cols[j][i] -= proj * v;
                }
            }
            let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            for z in cols[j].iter_mut() {
                *z /= norm;
            }
        }
        let mut m = Mat::<N>::zeros();
        for i in 0..N {
            for j in 0..N {
                m.0[i][j] = cols[j][i];
            }
        }
        m
    }

    pub fn su2<R: Rng + ?Sized>(rng: &mut R) -> C2x2 {
        su2_normalize(&unitary::<2, R>(rng)).0
    }

    pub fn u4<R: Rng + ?Sized>(rng: &mut R) -> C4x4 {
        unitary::<4, R>(rng)
    }

    pub fn local<R: Rng + ?Sized>(rng: &mut R) -> C4x4 {
        kron(&su2(rng), &su2(rng))
    }
}
