//! Cartan (KAK) decomposition of two-qubit unitaries.
//!
//! Every `U ∈ U(4)` factors as `phase·(a⊗b)·exp(i(x·XX + y·YY + z·ZZ))·(c⊗d)`
//! with `a..d ∈ SU(2)`. The triple `(x, y, z)` is brought into the Weyl
//! chamber `π/4 ≥ x ≥ y ≥ |z|`, with `z ≥ 0` whenever `x = π/4`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{
    c, cartan_exp, eig_sym4, gates, kron, kron_factor, rotation_1q, su2_normalize, Axis, C2x2, C4x4, C64,
};

/// Chamber boundary tolerance for `x = π/4`.
pub const BOUNDARY_TOL: f64 = 1e-10;
/// Absolute tolerance for comparing coordinates.
pub const ANGLE_TOL: f64 = 1e-9;

const DIAG_RETRIES: usize = 32;
const DIAG_SEED: u64 = 0x5eed_ca27;

/// Weyl-chamber coordinate of a two-qubit gate, in radians.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CartanCoordinate {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl CartanCoordinate {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        CartanCoordinate { x, y, z }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    /// Canonical form of an arbitrary triple (drops the corrections).
    pub fn canonical(raw: [f64; 3]) -> Self {
        canonicalize(raw).coord
    }

    /// Checks the chamber inequalities with slack `tol`.
    pub fn in_chamber(&self, tol: f64) -> bool {
        let ok = self.x <= FRAC_PI_4 + tol
            && self.y <= self.x + tol
            && self.z.abs() <= self.y + tol
            && self.y >= -tol;
        ok && !((self.x - FRAC_PI_4).abs() < BOUNDARY_TOL && self.z < -tol)
    }

    /// `exp(i(x·XX + y·YY + z·ZZ))`.
    pub fn to_matrix(&self) -> C4x4 {
        cartan_exp(self.as_array())
    }

    /// Componentwise closeness, accounting for the `x = π/4` mirror.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        let close = |a: &Self, b: &Self| {
            (a.x - b.x).abs() <= tol && (a.y - b.y).abs() <= tol && (a.z - b.z).abs() <= tol
        };
        if close(self, other) {
            return true;
        }
        let near_edge = (self.x - FRAC_PI_4).abs() <= tol && (other.x - FRAC_PI_4).abs() <= tol;
        near_edge && close(self, &CartanCoordinate::new(other.x, other.y, -other.z))
    }

    /// L1 norm `x + y + |z|`.
    pub fn l1(&self) -> f64 {
        self.x + self.y + self.z.abs()
    }
}

/// Full KAK factorization.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KakFactorization {
    /// Overall phase: the principal fourth root of `det U` times `k_g`.
    pub global_phase: C64,
    /// `true` when `k_g = i`, `false` when `k_g = 1`.
    pub g_branch_i: bool,
    pub a: C2x2,
    pub b: C2x2,
    pub c: C2x2,
    pub d: C2x2,
    pub coord: CartanCoordinate,
}

impl KakFactorization {
    pub fn left(&self) -> C4x4 {
        kron(&self.a, &self.b)
    }

    pub fn right(&self) -> C4x4 {
        kron(&self.c, &self.d)
    }
}

/// Template shape of a canonical coordinate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "tag", content = "angles")]
pub enum TemplateClass {
    Da(f64),
    Db(f64, f64),
    Dc(f64, f64, f64),
}

impl TemplateClass {
    pub fn coord(&self) -> CartanCoordinate {
        match *self {
            TemplateClass::Da(x) => CartanCoordinate::new(x, 0.0, 0.0),
            TemplateClass::Db(x, y) => CartanCoordinate::new(x, y, 0.0),
            TemplateClass::Dc(x, y, z) => CartanCoordinate::new(x, y, z),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            TemplateClass::Da(_) => "Da",
            TemplateClass::Db(..) => "Db",
            TemplateClass::Dc(..) => "Dc",
        }
    }
}

fn magic_in(u: &C4x4) -> C4x4 {
    let m = gates::magic();
    m.adjoint() * *u * m
}

fn magic_out(u: &C4x4) -> C4x4 {
    let m = gates::magic();
    m * *u * m.adjoint()
}

fn real4(u: &C4x4) -> [[f64; 4]; 4] {
    let mut r = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            r[i][j] = u.0[i][j].re;
        }
    }
    r
}

fn from_real4(r: &[[f64; 4]; 4]) -> C4x4 {
    let mut m = C4x4::zeros();
    for i in 0..4 {
        for j in 0..4 {
            m.0[i][j] = c(r[i][j], 0.0);
        }
    }
    m
}

fn det_real4(r: &[[f64; 4]; 4]) -> f64 {
    from_real4(r).determinant().re
}

/// Finds a real orthogonal `Q` (det +1) diagonalising the complex symmetric
/// unitary `m2`, by eigen-decomposing random real combinations of its real
/// and imaginary parts.
fn simultaneous_diagonalize(m2: &C4x4) -> Result<[[f64; 4]; 4]> {
    let re = real4(m2);
    let mut im = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            im[i][j] = m2.0[i][j].im;
        }
    }
    let symmetrize = |a: &mut [[f64; 4]; 4]| {
        for i in 0..4 {
            for j in 0..i {
                let v = 0.5 * (a[i][j] + a[j][i]);
                a[i][j] = v;
                a[j][i] = v;
            }
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(DIAG_SEED);
    for attempt in 0..DIAG_RETRIES {
        let (wr, wi) = if attempt == 0 {
            (1.0, std::f64::consts::E.recip())
        } else {
            (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        };
        let mut mix = [[0.0; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                mix[i][j] = wr * re[i][j] + wi * im[i][j];
            }
        }
        symmetrize(&mut mix);
        let Ok((_, mut q)) = eig_sym4(&mix) else { continue };
        if det_real4(&q) < 0.0 {
            for row in q.iter_mut() {
                row[0] = -row[0];
            }
        }
        let qm = from_real4(&q);
        let d = qm.transpose() * *m2 * qm;
        let mut off = 0.0f64;
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    off = off.max(d.0[i][j].norm());
                }
            }
        }
        if off < 1e-9 {
            return Ok(q);
        }
    }
    Err(Error::Decomposition(format!(
        "simultaneous diagonalization did not converge after {DIAG_RETRIES} attempts"
    )))
}

/// KAK decomposition of a unitary `U`.
pub fn kak_decompose(u: &C4x4) -> Result<KakFactorization> {
    let (us, det_root) = u.su_normalize()?;
    let ub = magic_in(&us);
    let m2 = ub * ub.transpose();
    let q = simultaneous_diagonalize(&m2)?;
    let qm = from_real4(&q);
    let d2 = qm.transpose() * m2 * qm;

    let mut phi = [0.0f64; 4];
    for (i, p) in phi.iter_mut().enumerate() {
        *p = d2.0[i][i].arg() / 2.0;
    }
    let dinv = C4x4::from_diag(phi.map(|p| C64::from_polar(1.0, -p)));
    let o2c = dinv * qm.transpose() * ub;
    let mut o2 = real4(&o2c);
    if det_real4(&o2) < 0.0 {
        phi[0] += std::f64::consts::PI;
        for v in o2[0].iter_mut() {
            *v = -*v;
        }
    }

    let k1 = magic_out(&qm);
    let k2 = magic_out(&from_real4(&o2));
    let (p1, a1, b1) =
        kron_factor(&k1).ok_or_else(|| Error::Decomposition("left factor is not a local gate".into()))?;
    let (p2, c1, d1) =
        kron_factor(&k2).ok_or_else(|| Error::Decomposition("right factor is not a local gate".into()))?;

    let raw = [
        (phi[0] + phi[1] - phi[2] - phi[3]) / 4.0,
        (-phi[0] + phi[1] - phi[2] + phi[3]) / 4.0,
        (phi[0] - phi[1] - phi[2] + phi[3]) / 4.0,
    ];
    let g = phi.iter().sum::<f64>() / 4.0;

    // U = det_root·p1·p2·e^{ig}·(a1⊗b1)·exp(i raw·P)·(c1⊗d1), and
    // exp(i raw·P) = q·L†·exp(i canon·P)·R† from the canonicalizer.
    let canon = canonicalize(raw);
    let (a, pa) = su2_normalize(&(a1 * canon.left.0.adjoint()));
    let (b, pb) = su2_normalize(&(b1 * canon.left.1.adjoint()));
    let (cc, pc) = su2_normalize(&(canon.right.0.adjoint() * c1));
    let (d, pd) = su2_normalize(&(canon.right.1.adjoint() * d1));
    let rel = p1 * p2 * C64::from_polar(1.0, g) * canon.phase * pa * pb * pc * pd;

    let mut f = KakFactorization {
        global_phase: det_root,
        g_branch_i: false,
        a,
        b,
        c: cc,
        d,
        coord: canon.coord,
    };
    // rel is a fourth root of unity; snap to {1, i} and fold −1 into `a`.
    let quarter = (rel.arg() / FRAC_PI_2).round() as i64;
    if (rel - C64::from_polar(1.0, quarter as f64 * FRAC_PI_2)).norm() > 1e-6 {
        return Err(Error::Internal(format!("unexpected KAK phase {rel}")));
    }
    let q4 = quarter.rem_euclid(4);
    if q4 >= 2 {
        f.a = f.a.scale(c(-1.0, 0.0));
    }
    if q4 % 2 == 1 {
        f.g_branch_i = true;
        f.global_phase *= c(0.0, 1.0);
    }
    let err = kak_recompose(&f).distance_up_to_phase(u);
    if err > 1e-8 {
        return Err(Error::Decomposition(format!("reconstruction error {err:.3e}")));
    }
    Ok(f)
}

/// Multiplies the five factors back together.
pub fn kak_recompose(f: &KakFactorization) -> C4x4 {
    (f.left() * f.coord.to_matrix() * f.right()).scale(f.global_phase)
}

/// Result of [`canonicalize`]: `left·exp(i raw·P)·right = phase·exp(i coord·P)`.
#[derive(Clone, Copy, Debug)]
pub struct Canonicalized {
    pub coord: CartanCoordinate,
    pub left: (C2x2, C2x2),
    pub right: (C2x2, C2x2),
    pub phase: C64,
}

impl Canonicalized {
    pub fn left_matrix(&self) -> C4x4 {
        kron(&self.left.0, &self.left.1)
    }

    pub fn right_matrix(&self) -> C4x4 {
        kron(&self.right.0, &self.right.1)
    }
}

struct Tracker {
    cur: [f64; 3],
    l: (C2x2, C2x2),
    r: (C2x2, C2x2),
    phase: C64,
}

impl Tracker {
    /// Conjugation by `g⊗h`, which permutes/negates the torus axes.
    fn conjugate(&mut self, g: C2x2, h: C2x2, cur: [f64; 3]) {
        self.l = (g * self.l.0, h * self.l.1);
        self.r = (self.r.0 * g.adjoint(), self.r.1 * h.adjoint());
        self.cur = cur;
    }

    /// Moves component `j` into `(−π/4, π/4]` by multiples of π/2.
    fn reduce(&mut self, j: usize) {
        let k = ((self.cur[j] - FRAC_PI_4) / FRAC_PI_2).ceil();
        if k == 0.0 {
            return;
        }
        self.cur[j] -= k * FRAC_PI_2;
        let ki = k as i64;
        // exp(iθPP)·PP = i·exp(i(θ − π/2)PP)
        self.phase *= C64::from_polar(1.0, ki.rem_euclid(4) as f64 * FRAC_PI_2);
        if ki.rem_euclid(2) == 1 {
            let p = Axis::from_index(j).pauli();
            self.r = (self.r.0 * p, self.r.1 * p);
        }
    }

    fn swap(&mut self, i: usize, j: usize) {
        let mut cur = self.cur;
        cur.swap(i, j);
        let g = match (i.min(j), i.max(j)) {
            (0, 1) => gates::s(),
            (0, 2) => gates::h(),
            _ => rotation_1q(Axis::X, FRAC_PI_4),
        };
        self.conjugate(g, g, cur);
    }

    /// Negates the two components other than `keep`.
    fn flip_pair(&mut self, keep: usize) {
        let mut cur = self.cur;
        for (j, v) in cur.iter_mut().enumerate() {
            if j != keep {
                *v = -*v;
            }
        }
        self.conjugate(Axis::from_index(keep).pauli(), gates::i2(), cur);
    }
}

/// Maps an arbitrary triple into the Weyl chamber and returns the local
/// corrections and phase relating the two exponentials.
pub fn canonicalize(raw: [f64; 3]) -> Canonicalized {
    let id = gates::i2();
    let mut t = Tracker {
        cur: raw,
        l: (id, id),
        r: (id, id),
        phase: c(1.0, 0.0),
    };
    for j in 0..3 {
        t.reduce(j);
    }
    // order by magnitude: x ≥ y ≥ z
    if t.cur[1].abs() > t.cur[0].abs() {
        t.swap(0, 1);
    }
    if t.cur[2].abs() > t.cur[0].abs() {
        t.swap(0, 2);
    }
    if t.cur[2].abs() > t.cur[1].abs() {
        t.swap(1, 2);
    }
    match (t.cur[0] < 0.0, t.cur[1] < 0.0) {
        (true, true) => t.flip_pair(2),
        (true, false) => t.flip_pair(1),
        (false, true) => t.flip_pair(0),
        _ => {}
    }
    if (t.cur[0] - FRAC_PI_4).abs() < BOUNDARY_TOL && t.cur[2] < 0.0 {
        // x − π/2 = −π/4, then negate x and z back into the chamber
        t.cur[0] -= FRAC_PI_2;
        t.phase *= c(0.0, 1.0);
        let p = gates::x();
        t.r = (t.r.0 * p, t.r.1 * p);
        t.flip_pair(1);
    }
    for v in t.cur.iter_mut() {
        if v.abs() < 1e-15 {
            *v = 0.0;
        }
    }
    t.cur[0] = t.cur[0].min(FRAC_PI_4);
    t.cur[1] = t.cur[1].clamp(0.0, t.cur[0]);
    t.cur[2] = t.cur[2].clamp(-t.cur[1], t.cur[1]);
    Canonicalized {
        coord: CartanCoordinate::new(t.cur[0], t.cur[1], t.cur[2]),
        left: t.l,
        right: t.r,
        phase: t.phase,
    }
}

/// Cartan coordinate of a unitary.
pub fn cartan_coordinate(u: &C4x4) -> Result<CartanCoordinate> {
    Ok(kak_decompose(u)?.coord)
}

/// True when the two unitaries have matching Cartan coordinates.
pub fn locally_equivalent(u: &C4x4, v: &C4x4, tol: f64) -> Result<bool> {
    let cu = cartan_coordinate(u)?;
    let cv = cartan_coordinate(v)?;
    Ok(cu.approx_eq(&cv, tol))
}

/// L1 norm of the Cartan coordinate of `u`.
pub fn k_t(u: &C4x4) -> Result<f64> {
    Ok(cartan_coordinate(u)?.l1())
}

/// Makhlin local invariants `(G1, G2)` of a unitary; `G2` is real.
pub fn makhlin_invariants(u: &C4x4) -> (C64, f64) {
    let ub = magic_in(u);
    let m = ub.transpose() * ub;
    let det = u.determinant();
    let tr = m.trace();
    let g1 = tr * tr / (det * 16.0);
    let g2 = (tr * tr - (m * m).trace()) / (det * 4.0);
    (g1, g2.re)
}

/// Template class of a canonical coordinate.
pub fn classify_template(coord: &CartanCoordinate) -> TemplateClass {
    if coord.y.abs() <= ANGLE_TOL && coord.z.abs() <= ANGLE_TOL {
        TemplateClass::Da(coord.x)
    } else if coord.z.abs() <= ANGLE_TOL {
        TemplateClass::Db(coord.x, coord.y)
    } else {
        TemplateClass::Dc(coord.x, coord.y, coord.z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::{random, rotation_2q};
    use std::f64::consts::PI;

    fn check_canon(raw: [f64; 3]) -> Canonicalized {
        let cz = canonicalize(raw);
        let lhs = cz.left_matrix() * cartan_exp(raw) * cz.right_matrix();
        let rhs = cz.coord.to_matrix().scale(cz.phase);
        assert!(lhs.max_abs_diff(&rhs) < 1e-12, "raw {raw:?} -> {:?}", cz.coord);
        assert!(cz.coord.in_chamber(0.0), "{:?}", cz.coord);
        cz
    }

    #[test]
    fn canonicalize_examples() {
        let cz = check_canon([PI / 3.0, 0.0, 0.0]);
        assert!(cz.coord.approx_eq(&CartanCoordinate::new(PI / 6.0, 0.0, 0.0), 1e-12));
        let raw = [PI / 8.0, PI / 16.0, PI / 32.0];
        let cz = check_canon(raw);
        assert_eq!(cz.coord.as_array(), raw);
        assert!(cz.left_matrix().max_abs_diff(&gates::i4()) < 1e-15);
        assert!(cz.right_matrix().max_abs_diff(&gates::i4()) < 1e-15);
        let cz = check_canon([0.0, 0.0, PI / 8.0]);
        assert!(cz.coord.approx_eq(&CartanCoordinate::new(PI / 8.0, 0.0, 0.0), 1e-12));
    }

    #[test]
    fn canonicalize_boundary_and_ties() {
        let cz = check_canon([FRAC_PI_4, 0.2, -0.1]);
        assert_eq!(cz.coord.z, 0.1);
        let cz = check_canon([0.5, 0.2, -0.2]);
        assert!(cz.coord.z < 0.0);
        for raw in [[-FRAC_PI_4, 0.0, 0.0], [3.0 * FRAC_PI_4, FRAC_PI_4, -FRAC_PI_4], [-7.0, 5.0, 0.3]] {
            check_canon(raw);
        }
    }

    #[test]
    fn named_gate_coordinates() {
        let f = kak_decompose(&gates::i4()).unwrap();
        assert!(f.coord.approx_eq(&CartanCoordinate::new(0.0, 0.0, 0.0), 1e-12));
        let f = kak_decompose(&gates::cx()).unwrap();
        assert!(f.coord.approx_eq(&CartanCoordinate::new(FRAC_PI_4, 0.0, 0.0), 1e-9));
        assert!(kak_recompose(&f).distance_up_to_phase(&gates::cx()) < 1e-8);
        let f = kak_decompose(&gates::swap()).unwrap();
        assert!(f.coord.approx_eq(&CartanCoordinate::new(FRAC_PI_4, FRAC_PI_4, FRAC_PI_4), 1e-9));
    }

    #[test]
    fn locals_are_special_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let u = random::u4(&mut rng);
            let f = kak_decompose(&u).unwrap();
            for m in [f.a, f.b, f.c, f.d] {
                assert!((m.determinant() - c(1.0, 0.0)).norm() < 1e-10);
            }
            assert!(kak_recompose(&f).max_abs_diff(&u) < 1e-8);
        }
    }

    #[test]
    fn trivial_recompose() {
        let id = gates::i2();
        let f = KakFactorization {
            global_phase: c(1.0, 0.0),
            g_branch_i: false,
            a: id,
            b: id,
            c: id,
            d: id,
            coord: CartanCoordinate::new(0.0, 0.0, 0.0),
        };
        assert!(kak_recompose(&f).max_abs_diff(&gates::i4()) < 1e-15);
    }

    #[test]
    fn local_equivalence_examples() {
        assert!(locally_equivalent(&gates::cx(), &rotation_2q(Axis::X, FRAC_PI_4), 1e-9).unwrap());
        assert!(!locally_equivalent(&gates::cx(), &gates::swap(), 1e-9).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let u = random::u4(&mut rng);
        let v = random::local(&mut rng) * u * random::local(&mut rng);
        assert!(locally_equivalent(&u, &v, 1e-9).unwrap());
    }

    #[test]
    fn k_t_examples() {
        assert!((k_t(&gates::swap()).unwrap() - 3.0 * FRAC_PI_4).abs() < 1e-9);
        assert!(k_t(&gates::i4()).unwrap().abs() < 1e-12);
        assert!((k_t(&gates::cx()).unwrap() - FRAC_PI_4).abs() < 1e-9);
    }

    #[test]
    fn classify_examples() {
        let p = PI;
        assert_eq!(classify_template(&CartanCoordinate::new(p / 4.0, 0.0, 0.0)), TemplateClass::Da(p / 4.0));
        assert_eq!(
            classify_template(&CartanCoordinate::new(p / 4.0, p / 8.0, 0.0)),
            TemplateClass::Db(p / 4.0, p / 8.0)
        );
        assert_eq!(
            classify_template(&CartanCoordinate::new(p / 4.0, p / 8.0, p / 16.0)),
            TemplateClass::Dc(p / 4.0, p / 8.0, p / 16.0)
        );
    }

    #[test]
    fn non_unitary_rejected() {
        let mut m = gates::cx();
        m.0[1][1] = c(0.5, 0.0);
        assert!(matches!(kak_decompose(&m), Err(Error::NotUnitary(_))));
    }
}
