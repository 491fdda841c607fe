//! Independent numerical checks: parameterised candidate circuits refined by
//! simplex descent, brute-force minimal counts, and executable forms of the
//! singular-value and triangle-inequality properties of Cartan coordinates.

use std::f64::consts::{FRAC_PI_4, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kak::{kak_decompose, makhlin_invariants};
use crate::matcore::{gates, kron, random, rotation_1q, rotation_2q, Axis, C2x2, C4x4};
use crate::optim::{least_squares, nelder_mead};

/// Distance below which a candidate counts as an exact realisation.
pub const FEASIBLE_TOL: f64 = 1e-6;
pub const DEFAULT_RESTARTS: usize = 8;
pub const DEFAULT_BUDGET: usize = 5000;

fn zyz(p: &[f64]) -> C2x2 {
    rotation_1q(Axis::Z, p[0]) * rotation_1q(Axis::Y, p[1]) * rotation_1q(Axis::Z, p[2])
}

fn layer(p: &[f64]) -> C4x4 {
    kron(&zyz(&p[..3]), &zyz(&p[3..6]))
}

/// Fixed two-qubit slots interleaved with free ZYZ layers on both qubits:
/// `L_0 · S_1 · L_1 ⋯ S_n · L_n` in matrix order.
#[derive(Clone, Debug)]
pub struct CandidateTemplate {
    pub slots: Vec<C4x4>,
}

impl CandidateTemplate {
    pub fn new(slots: Vec<C4x4>) -> Self {
        CandidateTemplate { slots }
    }

    /// `n` copies of one basis gate.
    pub fn repeated(basis: &C4x4, n: usize) -> Self {
        Self::new(vec![*basis; n])
    }

    pub fn n_params(&self) -> usize {
        6 * (self.slots.len() + 1)
    }

    pub fn assemble(&self, params: &[f64]) -> C4x4 {
        assert_eq!(params.len(), self.n_params(), "parameter vector length");
        let mut m = layer(&params[..6]);
        for (k, s) in self.slots.iter().enumerate() {
            m = m * *s * layer(&params[6 * (k + 1)..6 * (k + 2)]);
        }
        m
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Refined {
    pub params: Vec<f64>,
    pub distance: f64,
}

fn phase_free_residual(m: &C4x4, target: &C4x4) -> Vec<f64> {
    let ph = m.best_phase(target);
    let d = m.scale(ph);
    let mut r = Vec::with_capacity(32);
    for i in 0..4 {
        for j in 0..4 {
            let e = d.0[i][j] - target.0[i][j];
            r.push(e.re);
            r.push(e.im);
        }
    }
    r
}

fn refine_one(template: &CandidateTemplate, target: &C4x4, budget: usize, seed: u64) -> Refined {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x0: Vec<f64> = (0..template.n_params()).map(|_| rng.random_range(-PI..PI)).collect();
    let dist = |x: &[f64]| template.assemble(x).distance_up_to_phase(target);
    // Simplex on the squared distance keeps the objective smooth at the optimum.
    let nm_budget = budget / 2;
    let (x, _, used) = nelder_mead(&|x| dist(x).powi(2), x0, 0.5, nm_budget, 1e-24);
    let (x, _) = least_squares(
        &|p| phase_free_residual(&template.assemble(p), target),
        x,
        budget.saturating_sub(used),
        1e-28,
    );
    let distance = dist(&x);
    Refined { params: x, distance }
}

/// Multi-start refinement of `template` toward `target`. Each restart runs a
/// simplex descent followed by a least-squares polish within `budget`
/// evaluations; restarts run concurrently and the lowest distance wins, ties
/// going to the lower restart index.
pub fn numeric_refine(template: &CandidateTemplate, target: &C4x4, budget: usize, restarts: usize, seed: u64) -> Refined {
    let restarts = restarts.max(1);
    let runs: Vec<Refined> = (0..restarts)
        .into_par_iter()
        .map(|k| refine_one(template, target, budget.max(1), seed ^ (k as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15)))
        .collect();
    runs.into_iter()
        .reduce(|best, r| if r.distance < best.distance { r } else { best })
        .expect("at least one restart")
}

fn invariant_gap(target: (crate::C64, f64), m: &C4x4) -> Vec<f64> {
    let (g1, g2) = makhlin_invariants(m);
    vec![g1.re - target.0.re, g1.im - target.0.im, (g2 - target.1) / 2.0]
}

/// Searches for inner layers that make `n ≥ 2` copies of `basis` locally
/// equivalent to `target`, then attaches outer layers and reports the full
/// distance.
fn depth_distance(target: &C4x4, basis: &C4x4, n: usize, restarts: usize, seed: u64) -> Result<f64> {
    let inv = makhlin_invariants(target);
    let template = CandidateTemplate::repeated(basis, n);
    let inner = |p: &[f64]| -> C4x4 {
        let mut full = vec![0.0; 6];
        full.extend_from_slice(p);
        full.extend_from_slice(&[0.0; 6]);
        template.assemble(&full)
    };
    let dim = 6 * (n - 1);
    let runs: Vec<(Vec<f64>, f64)> = (0..restarts.max(1))
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((n as u64) << 32) ^ k as u64);
            let x0: Vec<f64> = (0..dim).map(|_| rng.random_range(-PI..PI)).collect();
            least_squares(&|p| invariant_gap(inv, &inner(p)), x0, 400 * (2 * dim + 4), 1e-26)
        })
        .collect();
    let mut best = f64::INFINITY;
    for (x, cost) in runs {
        if cost > 1e-16 {
            continue;
        }
        best = best.min(align_distance(&inner(&x), target)?);
        if best < FEASIBLE_TOL {
            break;
        }
    }
    Ok(best)
}

/// Distance after the best outer local layers: `min ‖(a⊗b) m (c⊗d) − U‖`
/// computed through the two KAK factorizations.
fn align_distance(m: &C4x4, target: &C4x4) -> Result<f64> {
    let km = kak_decompose(m)?;
    let kt = kak_decompose(target)?;
    let aligned = kt.left() * km.left().adjoint() * *m * km.right().adjoint() * kt.right();
    Ok(aligned.distance_up_to_phase(target))
}

/// Smallest number of `basis` invocations (with free local layers) that
/// reproduces `target` within [`FEASIBLE_TOL`], or `None` up to `n_max`.
pub fn brute_force_min_count(target: &C4x4, basis: &C4x4, n_max: usize, restarts: usize) -> Result<Option<usize>> {
    target.ensure_unitary(1e-8)?;
    basis.ensure_unitary(1e-8)?;
    for n in 0..=n_max {
        let d = match n {
            0 => align_distance(&gates::i4(), target)?,
            1 => align_distance(basis, target)?,
            _ => depth_distance(target, basis, n, restarts, 0x6f72_6163)?,
        };
        if d < FEASIBLE_TOL {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

/// Compares two time-ordered gate sequences up to global phase.
pub fn verify_identity(lhs: &[C4x4], rhs: &[C4x4], tol: f64) -> (bool, f64) {
    let product = |seq: &[C4x4]| seq.iter().fold(gates::i4(), |acc, g| *g * acc);
    let d = product(lhs).distance_up_to_phase(&product(rhs));
    (d < tol, d)
}

/// Lifts a single-qubit gate to the two-qubit space.
pub fn on_qubit(q: usize, u: &C2x2) -> C4x4 {
    if q == 0 {
        kron(u, &gates::i2())
    } else {
        kron(&gates::i2(), u)
    }
}

fn singular_values(m: &[[f64; 4]; 4]) -> Result<[f64; 4]> {
    let mut mtm = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            mtm[i][j] = (0..4).map(|k| m[k][i] * m[k][j]).sum();
        }
    }
    let (ev, _) = crate::matcore::eig_sym4(&mtm)?;
    let mut s = ev.map(|v| v.max(0.0).sqrt());
    s.sort_by(|a, b| b.total_cmp(a));
    Ok(s)
}

/// Sine expressions of the Cartan coordinate, in descending order.
pub fn predicted_singular_values(coord: [f64; 3]) -> [f64; 4] {
    let [x, y, z] = coord;
    let z = z.abs();
    let mut s = [(x + y + z).sin(), (x + y - z).sin(), (x - y + z).sin(), (-x + y + z).abs().sin()];
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Singular values of the real or imaginary part of `M† U M`, whichever
/// carries the sine factors for the branch of `U`.
pub fn measured_singular_values(u: &C4x4) -> Result<[f64; 4]> {
    let (us, _) = u.su_normalize()?;
    let k = kak_decompose(&us)?;
    let m = gates::magic();
    let ub = m.adjoint() * us * m;
    let mut part = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            part[i][j] = if k.g_branch_i { ub.0[i][j].re } else { ub.0[i][j].im };
        }
    }
    singular_values(&part)
}

/// Checks that the singular values of `U` in the magic basis match the sine
/// expressions of its Cartan coordinate within `1e-8`.
pub fn check_singular_values(u: &C4x4) -> Result<bool> {
    let coord = kak_decompose(u)?.coord.as_array();
    let want = predicted_singular_values(coord);
    let got = measured_singular_values(u)?;
    Ok(want.iter().zip(&got).all(|(a, b)| (a - b).abs() < 1e-8))
}

/// `min(β, π − β)`.
pub fn reflect(beta: f64) -> f64 {
    beta.min(PI - beta)
}

fn k_t(u: &C4x4) -> Result<f64> {
    let c = kak_decompose(u)?.coord;
    Ok(c.x + c.y + c.z.abs())
}

/// Largest value of `|cos k_t(U (a⊗b) Da(θ) (c⊗d))| − cos(R(k_t U) − θ)`
/// over random local dressings; the property holds when this is `≤ slack`.
pub fn triangle_excess(u: &C4x4, theta: f64, trials: usize, seed: u64) -> Result<f64> {
    let base = reflect(k_t(u)?);
    if base > FRAC_PI_4 + 1e-12 {
        return Err(Error::InvalidArgument(format!("reflected L1 norm {base} exceeds π/4")));
    }
    if !(theta > 0.0 && theta < FRAC_PI_4) {
        return Err(Error::InvalidArgument(format!("angle {theta} outside (0, π/4)")));
    }
    let bound = (base - theta).cos();
    let da = rotation_2q(Axis::X, theta);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..trials.max(1) {
        let v = *u * random::local(&mut rng) * da * random::local(&mut rng);
        worst = worst.max(k_t(&v)?.cos().abs() - bound);
    }
    Ok(worst)
}

/// `|cos k_t(U·Da(θ))| ≤ cos(R(k_t U) − θ)` under random dressings, with
/// `1e-9` slack.
pub fn check_triangle_inequality(u: &C4x4, theta: f64, trials: usize, seed: u64) -> Result<bool> {
    Ok(triangle_excess(u, theta, trials, seed)? <= 1e-9)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::FRAC_PI_8;

    use super::*;

    #[test]
    fn refine_finds_zz_sandwich() {
        let cx = rotation_2q(Axis::X, FRAC_PI_4);
        let t = CandidateTemplate::repeated(&cx, 2);
        let target = rotation_2q(Axis::Z, FRAC_PI_8);
        let r = numeric_refine(&t, &target, DEFAULT_BUDGET, DEFAULT_RESTARTS, 1);
        assert!(r.distance < 1e-6, "{}", r.distance);
    }

    #[test]
    fn refine_recovers_planted() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let t = CandidateTemplate::repeated(&rotation_2q(Axis::X, 0.4), 2);
        let p: Vec<f64> = (0..t.n_params()).map(|_| rng.random_range(-PI..PI)).collect();
        let r = numeric_refine(&t, &t.assemble(&p), DEFAULT_BUDGET, DEFAULT_RESTARTS, 2);
        assert!(r.distance < 1e-8, "{}", r.distance);
    }

    #[test]
    fn refine_swap_with_one_cx_fails() {
        let t = CandidateTemplate::repeated(&gates::cx(), 1);
        let r = numeric_refine(&t, &gates::swap(), DEFAULT_BUDGET, DEFAULT_RESTARTS, 3);
        assert!(r.distance > 0.1, "{}", r.distance);
    }

    #[test]
    fn brute_force_named() {
        let cx = rotation_2q(Axis::X, FRAC_PI_4);
        assert_eq!(brute_force_min_count(&gates::swap(), &cx, 4, 8).unwrap(), Some(3));
        assert_eq!(brute_force_min_count(&gates::cx(), &cx, 2, 8).unwrap(), Some(1));
        assert_eq!(brute_force_min_count(&gates::i4(), &cx, 1, 8).unwrap(), Some(0));
        assert_eq!(brute_force_min_count(&gates::swap(), &cx, 2, 8).unwrap(), None);
    }

    #[test]
    fn identities() {
        let half = rotation_2q(Axis::X, FRAC_PI_8);
        let z0 = on_qubit(1, &rotation_1q(Axis::Z, 0.0));
        let (ok, d) = verify_identity(&[half, z0, half], &[rotation_2q(Axis::X, FRAC_PI_4)], 1e-12);
        assert!(ok && d < 1e-12);
        let (ok, d) = verify_identity(&[half, z0, rotation_2q(Axis::X, 0.4)], &[rotation_2q(Axis::X, FRAC_PI_4)], 1e-9);
        assert!(!ok && d > 1e-9);
    }

    #[test]
    fn singular_values_named() {
        assert!(check_singular_values(&gates::swap()).unwrap());
        assert!(measured_singular_values(&gates::i4()).unwrap().iter().all(|s| s.abs() < 1e-12));
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            assert!(check_singular_values(&random::u4(&mut rng)).unwrap());
        }
    }

    #[test]
    fn triangle_identity_is_tight() {
        let e = triangle_excess(&gates::i4(), 0.3, 20, 4).unwrap();
        assert!(e.abs() < 1e-9, "{e}");
    }
}
