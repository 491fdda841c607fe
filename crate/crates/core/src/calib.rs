//! Closed-form calibration solvers.
//!
//! A basis gate, a tunable single-qubit layer and a second basis gate,
//! dressed by Z calibrations on either side, realise a tunable two-qubit
//! rotation. Everything reduces to the same 2×2 problem: in the even
//! (`|00>, |11>`) and odd (`|01>, |10>`) subspaces the XX/YY terms act as
//! σx rotations and Z layers act as σz rotations. [`solve_block`] finds the
//! middle and outer σz angles for one such subspace.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kak::TemplateClass;
use crate::matcore::{c, cartan_exp, gates, kron, rotation_1q, Axis, C2x2, C4x4};

/// Slack allowed when checking that a target lies in the reachable range.
pub const REACH_TOL: f64 = 1e-12;

/// Wraps an angle into `(−π, π]`.
pub fn wrap_angle(a: f64) -> f64 {
    let mut r = a.rem_euclid(2.0 * PI);
    if r > PI {
        r -= 2.0 * PI;
    }
    r
}

/// `e^{i tl σz}·e^{i a σx}·e^{i b σz}·e^{i c σx}·e^{i tr σz}`.
pub fn block_matrix(tl: f64, a: f64, b: f64, cc: f64, tr: f64) -> C2x2 {
    rotation_1q(Axis::Z, tl)
        * rotation_1q(Axis::X, a)
        * rotation_1q(Axis::Z, b)
        * rotation_1q(Axis::X, cc)
        * rotation_1q(Axis::Z, tr)
}

/// `cos²η` reached by the block with middle angle `b`.
pub fn block_cos2(a: f64, b: f64, cc: f64) -> f64 {
    let (sb, cb) = b.sin_cos();
    cb * cb * (a + cc).cos().powi(2) + sb * sb * (a - cc).cos().powi(2)
}

/// Range of `cos²η` reachable from outer angles `a`, `c`: `(lo, hi)`.
pub fn block_cos2_range(a: f64, cc: f64) -> (f64, f64) {
    let p = (a + cc).cos().powi(2);
    let m = (a - cc).cos().powi(2);
    (p.min(m), p.max(m))
}

/// True when `η` is reachable by a block with outer angles `a`, `c`.
pub fn block_reachable(a: f64, cc: f64, eta: f64) -> bool {
    let (lo, hi) = block_cos2_range(a, cc);
    let t = eta.cos().powi(2);
    t >= lo - REACH_TOL && t <= hi + REACH_TOL
}

/// Angles solving one subspace.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlockSolution {
    pub b: f64,
    pub tl: f64,
    pub tr: f64,
}

fn outer_phases(a: f64, b: f64, cc: f64, eta: f64) -> (f64, f64) {
    let w = block_matrix(0.0, a, b, cc, 0.0);
    let (se, ce) = eta.sin_cos();
    let sum = if w.0[0][0].norm() < 1e-12 || ce.abs() < 1e-12 {
        0.0
    } else {
        c(ce, 0.0).arg() - w.0[0][0].arg()
    };
    let diff = if w.0[0][1].norm() < 1e-12 || se.abs() < 1e-12 {
        0.0
    } else {
        c(0.0, se).arg() - w.0[0][1].arg()
    };
    let tl = (sum + diff) / 2.0;
    let tr = (sum - diff) / 2.0;
    // halving leaves a sign ambiguity; pick the branch equal to +e^{iησx}
    let target = rotation_1q(Axis::X, eta);
    let got = block_matrix(tl, a, b, cc, tr);
    let tl = if got.max_abs_diff(&target) <= got.scale(c(-1.0, 0.0)).max_abs_diff(&target) {
        tl
    } else {
        tl + PI
    };
    (wrap_angle(tl), wrap_angle(tr))
}

/// Finds `b, tl, tr` with `block_matrix(tl, a, b, c, tr) = e^{iησx}`.
/// The middle angle is taken in `[−π/2, 0]`.
pub fn solve_block(a: f64, cc: f64, eta: f64) -> Result<BlockSolution> {
    let p = (a + cc).cos().powi(2);
    let m = (a - cc).cos().powi(2);
    let t = eta.cos().powi(2);
    let denom = p - m;
    let b = if denom.abs() < 1e-14 {
        if (t - p).abs() > 1e-10 {
            return Err(Error::Unreachable(format!(
                "block with outer angles ({a}, {cc}) only reaches cos²={p}, target cos²={t}"
            )));
        }
        0.0
    } else {
        let s2 = (p - t) / denom;
        if !(-REACH_TOL..=1.0 + REACH_TOL).contains(&s2) {
            return Err(Error::Unreachable(format!(
                "target {eta} outside the range of a block with outer angles ({a}, {cc})"
            )));
        }
        -s2.clamp(0.0, 1.0).sqrt().asin()
    };
    let (tl, tr) = outer_phases(a, b, cc, eta);
    Ok(BlockSolution { b, tl, tr })
}

/// Achieved `|η| ∈ [0, π/2]` for middle angle `b`.
pub fn block_forward(a: f64, b: f64, cc: f64) -> f64 {
    block_cos2(a, b, cc).clamp(0.0, 1.0).sqrt().acos()
}

fn da(theta: f64) -> C4x4 {
    cartan_exp([theta, 0.0, 0.0])
}

fn db(tx: f64, ty: f64) -> C4x4 {
    cartan_exp([tx, ty, 0.0])
}

fn on_q1(u: C2x2) -> C4x4 {
    kron(&gates::i2(), &u)
}

fn on_q0(u: C2x2) -> C4x4 {
    kron(&u, &gates::i2())
}

fn z1(beta: f64) -> C4x4 {
    on_q1(rotation_1q(Axis::Z, beta))
}

/// Two basis gates `Da(θ)`, `Da(θ')` around a Z layer on qubit 1.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DaSandwich {
    pub theta: f64,
    pub theta_p: f64,
    pub beta: f64,
    pub eta: f64,
    pub tau_left: f64,
    pub tau_right: f64,
    /// Second basis gate written as `Da(θ')†` with the middle shifted by π/2.
    pub dagger_form: bool,
}

impl DaSandwich {
    /// The common calibration angle when both sides agree.
    pub fn tau(&self) -> f64 {
        self.tau_left
    }

    /// `Z1(τl)·Da(θ)·Z1(β−π/2)·Da(θ')·Z1(τr)`, or the equivalent dagger form
    /// `Z1(τl)·Da(θ)·Z1(β)·Da(θ')†·Z1(τr−π/2)`.
    pub fn assemble(&self) -> C4x4 {
        if self.dagger_form {
            z1(self.tau_left)
                * da(self.theta)
                * z1(self.beta)
                * da(self.theta_p).adjoint()
                * z1(self.tau_right - FRAC_PI_2)
        } else {
            z1(self.tau_left) * da(self.theta) * z1(self.beta - FRAC_PI_2) * da(self.theta_p) * z1(self.tau_right)
        }
    }

    pub fn target(&self) -> C4x4 {
        da(self.eta)
    }

    pub fn with_dagger_form(mut self, on: bool) -> Self {
        self.dagger_form = on;
        self
    }
}

/// Achieved XX angle and calibrations for a given middle angle.
pub fn da_forward(theta: f64, theta_p: f64, beta: f64) -> DaSandwich {
    let b = beta - FRAC_PI_2;
    let eta = block_forward(theta, b, theta_p);
    let (tl, tr) = outer_phases(theta, b, theta_p, eta);
    DaSandwich {
        theta,
        theta_p,
        beta: wrap_angle(beta),
        eta,
        tau_left: tl,
        tau_right: tr,
        dagger_form: false,
    }
}

/// Middle angle and calibrations reaching `eta`; `β ∈ [0, π/2]`.
pub fn da_invert(theta: f64, theta_p: f64, eta: f64) -> Result<DaSandwich> {
    if !(eta >= -REACH_TOL && block_reachable(theta, theta_p, eta)) {
        return Err(Error::Unreachable(format!(
            "XX angle {eta} is not reachable from Da({theta}) and Da({theta_p})"
        )));
    }
    let eta = eta.max(0.0);
    let s = solve_block(theta, theta_p, eta)?;
    Ok(DaSandwich {
        theta,
        theta_p,
        beta: s.b + FRAC_PI_2,
        eta,
        tau_left: s.tl,
        tau_right: s.tr,
        dagger_form: false,
    })
}

/// Two `Db` gates around a `Z0(β0)Z1(β1)` layer.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DbSandwich {
    pub theta_x: f64,
    pub theta_y: f64,
    pub theta_xp: f64,
    pub theta_yp: f64,
    pub beta0: f64,
    pub beta1: f64,
    pub eta_x: f64,
    pub eta_y: f64,
    pub tau: [f64; 4],
}

impl DbSandwich {
    /// `Z0(τ0)Z1(τ1)·Db(θx,θy)·Z0(β0)Z1(β1)·Db(θx',θy')·Z0(τ2)Z1(τ3)`.
    pub fn assemble(&self) -> C4x4 {
        let zz = |a: f64, b: f64| kron(&rotation_1q(Axis::Z, a), &rotation_1q(Axis::Z, b));
        zz(self.tau[0], self.tau[1])
            * db(self.theta_x, self.theta_y)
            * zz(self.beta0, self.beta1)
            * db(self.theta_xp, self.theta_yp)
            * zz(self.tau[2], self.tau[3])
    }

    pub fn target(&self) -> C4x4 {
        db(self.eta_x, self.eta_y)
    }

    /// Sums and differences of the calibrations: `a0..a3`.
    pub fn a(&self) -> [f64; 4] {
        let t = self.tau;
        [t[0] + t[2], t[1] + t[3], t[0] - t[2], t[1] - t[3]]
    }

    /// Sums and differences of the basis angles: `b0..b3`.
    pub fn b(&self) -> [f64; 4] {
        [
            self.theta_x + self.theta_xp,
            self.theta_y + self.theta_yp,
            self.theta_x - self.theta_xp,
            self.theta_y - self.theta_yp,
        ]
    }
}

// Even subspace sees θx − θy and β0 + β1, odd sees θx + θy and β0 − β1.
fn db_blocks(tx: f64, ty: f64, txp: f64, typ: f64) -> ((f64, f64), (f64, f64)) {
    ((tx - ty, txp - typ), (tx + ty, txp + typ))
}

fn db_taus(even: (f64, f64), odd: (f64, f64)) -> [f64; 4] {
    [
        (even.0 + odd.0) / 2.0,
        (even.0 - odd.0) / 2.0,
        (even.1 + odd.1) / 2.0,
        (even.1 - odd.1) / 2.0,
    ]
}

/// Achieved `(ηx, ηy)` and calibrations for middle angles `β0, β1`.
pub fn db_forward(tx: f64, ty: f64, txp: f64, typ: f64, beta0: f64, beta1: f64) -> DbSandwich {
    let ((ae, ce), (ao, co)) = db_blocks(tx, ty, txp, typ);
    let (be, bo) = (beta0 + beta1, beta0 - beta1);
    let ee = block_forward(ae, be, ce);
    let eo = block_forward(ao, bo, co);
    let (tle, tre) = outer_phases(ae, be, ce, ee);
    let (tlo, tro) = outer_phases(ao, bo, co, eo);
    DbSandwich {
        theta_x: tx,
        theta_y: ty,
        theta_xp: txp,
        theta_yp: typ,
        beta0,
        beta1,
        eta_x: (eo + ee) / 2.0,
        eta_y: (eo - ee) / 2.0,
        tau: db_taus((tle, tre), (tlo, tro)),
    }
}

/// Middle angles and calibrations reaching `(ηx, ηy)`.
pub fn db_invert(tx: f64, ty: f64, txp: f64, typ: f64, eta_x: f64, eta_y: f64) -> Result<DbSandwich> {
    let ((ae, ce), (ao, co)) = db_blocks(tx, ty, txp, typ);
    let even = solve_block(ae, ce, eta_x - eta_y)?;
    let odd = solve_block(ao, co, eta_x + eta_y)?;
    Ok(DbSandwich {
        theta_x: tx,
        theta_y: ty,
        theta_xp: txp,
        theta_yp: typ,
        beta0: (even.b + odd.b) / 2.0,
        beta1: (even.b - odd.b) / 2.0,
        eta_x,
        eta_y,
        tau: db_taus((even.tl, even.tr), (odd.tl, odd.tr)),
    })
}

/// Rewrite rules for parameterised Cartan-coordinate transformations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Rule {
    PauliConversion,
    Reduce,
    DowngradeI,
    DowngradeII,
}

/// Left-hand side `D·R1(β)·D` (or `D·R1(β)·D†`) where `R1` is a rotation
/// on qubit 1 about `axis`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RuleContext {
    pub template: TemplateClass,
    pub axis: Axis,
    pub beta: f64,
}

/// One labelled factor of a gate sequence, in matrix-product order.
#[derive(Clone, Debug, PartialEq)]
pub struct Factor {
    pub label: String,
    pub matrix: C4x4,
}

impl Factor {
    fn new(label: impl Into<String>, matrix: C4x4) -> Self {
        Factor { label: label.into(), matrix }
    }
}

/// Product of a factor list.
pub fn product(seq: &[Factor]) -> C4x4 {
    seq.iter().fold(C4x4::identity(), |acc, f| acc * f.matrix)
}

fn template_gate(t: &TemplateClass) -> C4x4 {
    t.coord().to_matrix()
}

fn rot1(axis: Axis, beta: f64) -> C4x4 {
    on_q1(rotation_1q(axis, beta))
}

fn shape_err(rule: Rule, ctx: &RuleContext) -> Error {
    Error::ShapeMismatch(format!("{rule:?} does not apply to {} with a {:?} rotation", ctx.template.name(), ctx.axis))
}

/// Left-hand side of `rule` for the given context.
pub fn rule_lhs(rule: Rule, ctx: &RuleContext) -> Result<Vec<Factor>> {
    check_shape(rule, ctx)?;
    let d = template_gate(&ctx.template);
    let r = Factor::new(format!("{:?}1({})", ctx.axis, ctx.beta), rot1(ctx.axis, ctx.beta));
    let name = ctx.template.name();
    let second = match rule {
        Rule::PauliConversion | Rule::DowngradeI => Factor::new(format!("{name}†"), d.adjoint()),
        Rule::Reduce | Rule::DowngradeII => Factor::new(name, d),
    };
    Ok(vec![Factor::new(name, d), r, second])
}

fn check_shape(rule: Rule, ctx: &RuleContext) -> Result<()> {
    use TemplateClass::*;
    let ok = match (rule, &ctx.template, ctx.axis) {
        (Rule::PauliConversion, Da(_), Axis::Y) => true,
        (Rule::Reduce, Da(_), Axis::Z | Axis::Y) => true,
        (Rule::Reduce, Db(..), Axis::Z) => true,
        (Rule::DowngradeI | Rule::DowngradeII, Db(..), Axis::Y) => true,
        (Rule::DowngradeI | Rule::DowngradeII, Dc(..), Axis::Z) => true,
        _ => false,
    };
    if ok {
        Ok(())
    } else {
        Err(shape_err(rule, ctx))
    }
}

/// Applies a rewrite rule, returning an equivalent factor sequence.
pub fn apply_rule(rule: Rule, ctx: &RuleContext) -> Result<Vec<Factor>> {
    check_shape(rule, ctx)?;
    let d = template_gate(&ctx.template);
    let name = ctx.template.name();
    let beta = ctx.beta;
    let seq = match rule {
        Rule::PauliConversion => {
            // (HSH) fixes X and sends Z to −Y, so the Y rotation becomes a Z one
            let v = gates::h() * gates::s() * gates::h();
            let vv = kron(&v, &v);
            vec![
                Factor::new("HSH⊗HSH", vv),
                Factor::new(name, d),
                Factor::new(format!("Z1({})", -beta), rot1(Axis::Z, -beta)),
                Factor::new(format!("{name}†"), d.adjoint()),
                Factor::new("(HSH⊗HSH)†", vv.adjoint()),
            ]
        }
        Rule::Reduce => vec![
            Factor::new(name, d),
            Factor::new(format!("{:?}1({})", ctx.axis, beta - FRAC_PI_2), rot1(ctx.axis, beta - FRAC_PI_2)),
            Factor::new(format!("{name}†"), d.adjoint()),
            Factor::new(format!("{:?}1(π/2)", ctx.axis), rot1(ctx.axis, FRAC_PI_2)),
        ],
        Rule::DowngradeI | Rule::DowngradeII => {
            let (lower, lname, extra) = match ctx.template {
                TemplateClass::Db(x, y) => (cartan_exp([x, 0.0, 0.0]), "Da", cartan_exp([0.0, 2.0 * y, 0.0])),
                TemplateClass::Dc(x, y, z) => (cartan_exp([x, y, 0.0]), "Db", cartan_exp([0.0, 0.0, 2.0 * z])),
                TemplateClass::Da(_) => return Err(shape_err(rule, ctx)),
            };
            let r = Factor::new(format!("{:?}1({beta})", ctx.axis), rot1(ctx.axis, beta));
            if rule == Rule::DowngradeI {
                vec![Factor::new(lname, lower), r, Factor::new(format!("{lname}†"), lower.adjoint())]
            } else {
                vec![Factor::new("exp(2iθ PP)", extra), Factor::new(lname, lower), r, Factor::new(lname, lower)]
            }
        }
    };
    Ok(seq)
}

/// `Z0(a)·Z1(b)` convenience used by the synthesiser.
pub fn z_layer(a: f64, b: f64) -> C4x4 {
    on_q0(rotation_1q(Axis::Z, a)) * z1(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kak::{cartan_coordinate, locally_equivalent, CartanCoordinate};
    use crate::matcore::rotation_2q;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_4, FRAC_PI_8};

    #[test]
    fn da_forward_examples() {
        let s = da_forward(FRAC_PI_8, FRAC_PI_8, FRAC_PI_2);
        assert!((s.eta - FRAC_PI_4).abs() < 1e-12);
        assert!(s.tau().abs() < 1e-12);
        let s = da_forward(FRAC_PI_8, FRAC_PI_8, 0.0);
        assert!(s.eta.abs() < 1e-7);
        let s = da_forward(FRAC_PI_8, FRAC_PI_8, PI / 6.0);
        let coord = cartan_coordinate(&s.assemble()).unwrap();
        assert!(coord.approx_eq(&CartanCoordinate::new(s.eta, 0.0, 0.0), 1e-8));
        assert!(s.assemble().distance_up_to_phase(&s.target()) < 1e-8);
        assert!(s.with_dagger_form(true).assemble().distance_up_to_phase(&s.target()) < 1e-8);
    }

    #[test]
    fn da_invert_examples() {
        let s = da_invert(0.3, 0.2, 0.5).unwrap();
        assert!((s.beta - FRAC_PI_2).abs() < 1e-12);
        let s = da_invert(0.3, 0.3, 0.0).unwrap();
        assert!(s.beta.abs() < 1e-12);
        let s = da_invert(FRAC_PI_4, FRAC_PI_4, FRAC_PI_8).unwrap();
        assert!((s.beta - FRAC_PI_8).abs() < 1e-12);
        assert!(s.assemble().distance_up_to_phase(&s.target()) < 1e-8);
        let zz = rotation_2q(Axis::Z, FRAC_PI_8);
        assert!(locally_equivalent(&s.assemble(), &zz, 1e-8).unwrap());
        assert!(matches!(da_invert(0.1, 0.1, 0.3), Err(Error::Unreachable(_))));
    }

    #[test]
    fn db_forward_zero_middle() {
        let s = db_forward(0.5, 0.2, 0.3, 0.1, 0.0, 0.0);
        assert!((s.eta_x + s.eta_y - 1.1).abs() < 1e-12);
        assert!((s.eta_x - s.eta_y - 0.5).abs() < 1e-12);
        assert!(s.tau.iter().all(|t| t.abs() < 1e-12));
    }

    #[test]
    fn db_invert_reduces_to_da() {
        let d = da_invert(0.4, 0.3, 0.35).unwrap();
        let s = db_invert(0.4, 0.0, 0.3, 0.0, 0.35, 0.0).unwrap();
        assert!(s.beta1.abs() < 1e-12);
        assert!((s.beta0 - (d.beta - FRAC_PI_2)).abs() < 1e-12);
        assert!(s.assemble().distance_up_to_phase(&s.target()) < 1e-9);
    }

    #[test]
    fn db_cancels_yy() {
        let s = db_invert(0.5, 0.2, 0.4, 0.2, 0.3, 0.0).unwrap();
        assert!(s.assemble().distance_up_to_phase(&s.target()) < 1e-9);
    }

    #[test]
    fn eq_relations_hold_with_negated_sums() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let tx: f64 = rng.random_range(0.05..0.75);
            let ty: f64 = rng.random_range(0.01..tx);
            let txp: f64 = rng.random_range(0.05..0.75);
            let typ: f64 = rng.random_range(0.01..txp);
            let s = db_forward(tx, ty, txp, typ, rng.random_range(-PI..PI), rng.random_range(-PI..PI));
            assert!(s.assemble().distance_up_to_phase(&s.target()) < 1e-8);
            let a = s.a().map(|v| -v);
            let b = s.b();
            let (b0, b1) = (s.beta0, s.beta1);
            let (d, p) = (s.eta_x - s.eta_y, s.eta_x + s.eta_y);
            let lhs_rhs = [
                (d.cos() * (a[0] + a[1]).cos(), (b0 + b1).cos() * (b[0] - b[1]).cos()),
                (p.cos() * (a[0] - a[1]).cos(), (b0 - b1).cos() * (b[0] + b[1]).cos()),
                (d.cos() * (a[0] + a[1]).sin(), (b0 + b1).sin() * (b[2] - b[3]).cos()),
                (p.cos() * (a[0] - a[1]).sin(), (b0 - b1).sin() * (b[2] + b[3]).cos()),
                (p.sin() * (a[2] - a[3]).cos(), (b0 - b1).cos() * (b[0] + b[1]).sin()),
                (d.sin() * (a[2] + a[3]).cos(), (b0 + b1).cos() * (b[0] - b[1]).sin()),
                (d.sin() * (a[2] + a[3]).sin(), -(b0 + b1).sin() * (b[2] - b[3]).sin()),
                (p.sin() * (a[2] - a[3]).sin(), -(b0 - b1).sin() * (b[2] + b[3]).sin()),
            ];
            for (k, (l, r)) in lhs_rhs.iter().enumerate() {
                assert!((l - r).abs() < 1e-9, "relation {k}: {l} vs {r}");
            }
        }
    }

    #[test]
    fn rule_examples() {
        let ctx = RuleContext { template: TemplateClass::Da(0.3), axis: Axis::Z, beta: 0.7 };
        let lhs = product(&rule_lhs(Rule::Reduce, &ctx).unwrap());
        let rhs = product(&apply_rule(Rule::Reduce, &ctx).unwrap());
        assert!(lhs.max_abs_diff(&rhs) < 1e-12);

        let ctx = RuleContext { template: TemplateClass::Db(0.4, 0.1), axis: Axis::Y, beta: 0.5 };
        let lhs = product(&rule_lhs(Rule::DowngradeI, &ctx).unwrap());
        let da_ctx = RuleContext { template: TemplateClass::Da(0.4), axis: Axis::Y, beta: 0.5 };
        let da_lhs = product(&rule_lhs(Rule::PauliConversion, &da_ctx).unwrap());
        assert!(locally_equivalent(&lhs, &da_lhs, 1e-9).unwrap());

        let lhs = product(&rule_lhs(Rule::DowngradeII, &ctx).unwrap());
        let rhs = product(&apply_rule(Rule::DowngradeII, &ctx).unwrap());
        assert!(lhs.max_abs_diff(&rhs) < 1e-9);

        let bad = RuleContext { template: TemplateClass::Da(0.3), axis: Axis::X, beta: 0.1 };
        assert!(matches!(apply_rule(Rule::DowngradeI, &bad), Err(Error::ShapeMismatch(_))));
    }
}
