//! Compiling two-qubit unitaries into native basis-gate sequences.
//!
//! A target is first reduced to its Cartan coordinate `t`. The compiler then
//! grows a circuit whose interaction content is exactly `exp(i u·P)` for a
//! tracked triple `u`, starting either from the identity or from a block of
//! whole-gate *padding* invocations, and steers `u` onto `t` with pair moves
//! (see [`planner`]). The outer local layers of the target are attached at
//! the end, so every plan reproduces the target up to a global phase.

mod emit;
mod numeric;
pub mod orient;
pub mod planner;

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hwmodel::HardwareModel;
use crate::kak::{
    canonicalize, classify_template, kak_decompose, CartanCoordinate, KakFactorization, TemplateClass, ANGLE_TOL,
};
use crate::matcore::{gates, kron, C2x2, C4x4, INPUT_UNITARY_TOL};

use emit::{items_matrix, Builder, Item, Primitive};
use planner::{count_floor, Move, MoveKind};

/// Largest count estimate for which the planner also searches from the
/// identity; beyond it only the padded route runs, keeping the work per
/// call bounded.
const ORIGIN_SEARCH_LIMIT: usize = 8;
/// Extra counts tried above the L1 estimate.
const COUNT_SLACK: usize = 8;
/// Counts below which Db/Dc plans are also searched numerically.
const NUMERIC_SHORT: usize = 3;
/// Required reconstruction accuracy of a finished plan.
pub const PLAN_TOL: f64 = 1e-7;

/// A native two-qubit gate.
#[derive(Clone, Debug)]
pub struct BasisGate {
    pub label: String,
    pub matrix: C4x4,
    pub kak: KakFactorization,
    pub template: TemplateClass,
    /// Whether the inverse gate is calibrated too. Plans never invoke the
    /// inverse, so this only records the instruction-set property.
    pub dagger_available: bool,
}

impl BasisGate {
    pub fn new(label: impl Into<String>, matrix: C4x4) -> Result<Self> {
        matrix.ensure_unitary(INPUT_UNITARY_TOL)?;
        let kak = kak_decompose(&matrix)?;
        if kak.coord.l1() <= ANGLE_TOL {
            return Err(Error::InvalidArgument("a basis gate must be entangling".into()));
        }
        Ok(BasisGate {
            label: label.into(),
            matrix,
            kak,
            template: classify_template(&kak.coord),
            dagger_available: false,
        })
    }

    /// Basis gate `exp(i(x·XX + y·YY + z·ZZ))` for a template.
    pub fn from_template(label: impl Into<String>, template: TemplateClass) -> Result<Self> {
        Self::new(label, template.coord().to_matrix())
    }

    pub fn cx() -> Self {
        Self::new("cx", gates::cx()).expect("CX is a valid basis gate")
    }

    pub fn with_dagger(mut self, available: bool) -> Self {
        self.dagger_available = available;
        self
    }
}

/// Serialised description of a basis gate referenced by a plan.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanBasis {
    pub label: String,
    pub template: TemplateClass,
    pub matrix: C4x4,
}

/// One step of a plan, in time order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PlanStep {
    /// A single-qubit unitary on qubit 0 or 1.
    OneQubit { qubit: usize, matrix: C2x2 },
    /// An invocation of `bases[index]`.
    Basis { label: String, index: usize },
}

/// A compiled two-qubit circuit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthesisPlan {
    pub schema: u32,
    pub bases: Vec<PlanBasis>,
    /// Steps in time order (the first step acts first).
    pub steps: Vec<PlanStep>,
    pub basis_count: usize,
    pub target_coord: CartanCoordinate,
    /// The compiled unitary, kept so a saved plan can be re-verified.
    pub target: C4x4,
    /// `distance_up_to_phase(assemble(), target)`.
    pub residual_achieved: f64,
}

impl SynthesisPlan {
    /// Product of all steps.
    pub fn assemble(&self) -> C4x4 {
        self.steps.iter().fold(gates::i4(), |acc, s| step_matrix(s, &self.bases) * acc)
    }

    /// Invocation count per entry of `bases`.
    pub fn invocations(&self) -> Vec<usize> {
        let mut n = vec![0; self.bases.len()];
        for s in &self.steps {
            if let PlanStep::Basis { index, .. } = s {
                n[*index] += 1;
            }
        }
        n
    }
}

fn step_matrix(s: &PlanStep, bases: &[PlanBasis]) -> C4x4 {
    match s {
        PlanStep::OneQubit { qubit: 0, matrix } => kron(matrix, &gates::i2()),
        PlanStep::OneQubit { matrix, .. } => kron(&gates::i2(), matrix),
        PlanStep::Basis { index, .. } => bases[*index].matrix,
    }
}

/// Lower bound on the number of invocations.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostBound {
    pub n_lower: usize,
    pub k_t_value: f64,
    /// True when the bound came from the `N·w < π/4` regime.
    pub applicable: bool,
}

/// Whole-gate invocations placed before residual synthesis.
#[derive(Clone, Debug)]
pub struct Padding {
    pub steps: Vec<PlanStep>,
    pub invocations: usize,
    /// Sum of the oriented coordinates of the padding gates.
    pub padded: [f64; 3],
    /// `target − padded`, componentwise.
    pub residual: [f64; 3],
    moves: Vec<Move>,
}

fn basic_primitive(basis: &BasisGate, index: usize) -> Primitive {
    let coord = basis.kak.coord.as_array();
    Primitive {
        coord,
        variants: orient::variants(coord),
        kak: basis.kak,
        items: vec![Item::Invoke(index)],
        cost: 1,
    }
}

/// Best effective XX angle from two `Dc` invocations around a Pauli.
pub fn eq18_angle(angles: [f64; 3]) -> f64 {
    angles
        .iter()
        .map(|t| (2.0 * t.abs()).min((FRAC_PI_2 - 2.0 * t.abs()).abs()))
        .fold(0.0, f64::max)
}

/// `E = D·(P_j⊗I)·D·(P_j⊗I)` where `D` is the canonical interaction of
/// `basis`; realises `exp(i·2θ_j·P_jP_j)`, locally equivalent to a `Da` gate.
fn doubled_primitive(basis: &BasisGate, index: usize) -> Option<Primitive> {
    let coord = basis.kak.coord.as_array();
    let (best_j, best) = coord
        .iter()
        .map(|t| eq18_angle([*t, 0.0, 0.0]))
        .enumerate()
        .fold((0, 0.0), |acc, (j, v)| if v > acc.1 + 1e-12 { (j, v) } else { acc });
    if best <= 1e-9 {
        return None;
    }
    let k = &basis.kak;
    let p = crate::matcore::Axis::from_index(best_j).pauli();
    let items = vec![
        Item::Local(k.a.adjoint(), k.b.adjoint()),
        Item::Invoke(index),
        Item::Local(k.c.adjoint() * p * k.a.adjoint(), k.d.adjoint() * k.b.adjoint()),
        Item::Invoke(index),
        Item::Local(k.c.adjoint() * p, k.d.adjoint()),
    ];
    let mut mats = vec![gates::i4(); index + 1];
    mats[index] = basis.matrix;
    let kak = kak_decompose(&items_matrix(&items, &mats)).ok()?;
    let c = kak.coord.as_array();
    Some(Primitive { coord: c, variants: orient::variants(c), kak, items, cost: 2 })
}

fn sign(v: f64) -> f64 {
    if v < 0.0 {
        -1.0
    } else {
        1.0
    }
}

fn floor_ratio(v: f64, step: f64) -> usize {
    ((v.abs() / step) + 1e-9).floor().max(0.0) as usize
}

fn pad_move(g: [f64; 3]) -> Move {
    Move { prim: 0, g, kind: MoveKind::Pad }
}

fn padding_moves(t: [f64; 3], basis: &BasisGate) -> Vec<Move> {
    let mut moves = Vec::new();
    match basis.template {
        TemplateClass::Da(theta) => {
            for (k, tk) in t.iter().enumerate() {
                let mut g = [0.0; 3];
                g[k] = sign(*tk) * theta;
                moves.extend(std::iter::repeat_n(pad_move(g), floor_ratio(*tk, theta)));
            }
        }
        TemplateClass::Db(tx, ty) => {
            let k1 = floor_ratio(t[0], tx).min(floor_ratio(t[1], ty));
            moves.extend(std::iter::repeat_n(pad_move([tx, ty, 0.0]), k1));
            let r = [t[0] - k1 as f64 * tx, t[1] - k1 as f64 * ty, t[2]];
            let mut best: Option<(usize, [f64; 3])> = None;
            for i in 0..3 {
                for j in 0..3 {
                    if i == j {
                        continue;
                    }
                    let k2 = floor_ratio(r[i], tx).min(floor_ratio(r[j], ty));
                    if k2 > best.map_or(0, |b| b.0) {
                        let mut g = [0.0; 3];
                        g[i] = sign(r[i]) * tx;
                        g[j] = sign(r[j]) * ty;
                        best = Some((k2, g));
                    }
                }
            }
            if let Some((k2, g)) = best {
                moves.extend(std::iter::repeat_n(pad_move(g), k2));
            }
        }
        TemplateClass::Dc(..) => {
            let variants = orient::variants(basis.kak.coord.as_array());
            let mut r = t;
            loop {
                let fits = |v: &[f64; 3]| {
                    (0..3).all(|i| v[i] == 0.0 || (sign(v[i]) == sign(r[i]) && v[i].abs() <= r[i].abs() + 1e-12))
                };
                let pick = variants.iter().filter(|v| fits(v)).max_by(|a, b| {
                    let score = |v: &[f64; 3]| (0..3).map(|i| v[i].abs() * r[i].abs()).sum::<f64>();
                    score(a).total_cmp(&score(b))
                });
                match pick {
                    Some(v) => {
                        moves.push(pad_move(*v));
                        r = [r[0] - v[0], r[1] - v[1], r[2] - v[2]];
                    }
                    None => break,
                }
            }
        }
    }
    moves
}

/// Whole-gate padding of a canonical target with one basis gate.
pub fn pad_rotations(target: &CartanCoordinate, basis: &BasisGate) -> Padding {
    let t = target.as_array();
    let moves = padding_moves(t, basis);
    let prims = [basic_primitive(basis, 0)];
    let mut b = Builder::new();
    for m in &moves {
        b.apply(&prims, m).expect("padding moves are pure pads");
    }
    let padded = b.u;
    Padding {
        steps: to_steps(&b.body, &[basis.label.clone()]),
        invocations: moves.len(),
        padded,
        residual: [t[0] - padded[0], t[1] - padded[1], t[2] - padded[2]],
        moves,
    }
}

fn is_identity(m: &C2x2) -> bool {
    m.distance_up_to_phase(&gates::i2()) < 1e-14
}

/// Converts matrix-order items into time-ordered steps.
fn to_steps(items: &[Item], labels: &[String]) -> Vec<PlanStep> {
    let mut steps = Vec::new();
    for it in items.iter().rev() {
        match *it {
            Item::Local(a, b) => {
                for (q, m) in [(0, a), (1, b)] {
                    if !is_identity(&m) {
                        steps.push(PlanStep::OneQubit { qubit: q, matrix: m });
                    }
                }
            }
            Item::Invoke(i) => steps.push(PlanStep::Basis { label: labels[i].clone(), index: i }),
        }
    }
    steps
}

/// Runs `moves` and attaches the target's outer local layers.
fn finalize(target: &C4x4, kak: &KakFactorization, bases: &[&BasisGate], prims: &[Primitive], moves: &[Move]) -> Result<SynthesisPlan> {
    let mut b = Builder::new();
    for m in moves {
        b.apply(prims, m)?;
    }
    let canon = canonicalize(b.u);
    if !canon.coord.approx_eq(&kak.coord, ANGLE_TOL) {
        return Err(Error::Internal(format!("plan reached {:?}, wanted {:?}", canon.coord, kak.coord)));
    }
    let (lc, rc) = (canon.left, canon.right);
    let mut items = Vec::with_capacity(b.body.len() + 2);
    items.push(Item::Local(kak.a * lc.0 * b.left.0, kak.b * lc.1 * b.left.1));
    for it in &b.body {
        match (items.last_mut(), it) {
            (Some(Item::Local(pa, pb)), Item::Local(a, bb)) => {
                *pa = *pa * *a;
                *pb = *pb * *bb;
            }
            _ => items.push(*it),
        }
    }
    let tail = (rc.0 * kak.c, rc.1 * kak.d);
    match items.last_mut() {
        Some(Item::Local(pa, pb)) => {
            *pa = *pa * tail.0;
            *pb = *pb * tail.1;
        }
        _ => items.push(Item::Local(tail.0, tail.1)),
    }
    build_plan(target, kak, bases, items)
}

/// Wraps matrix-order items into a checked plan.
fn build_plan(target: &C4x4, kak: &KakFactorization, bases: &[&BasisGate], items: Vec<Item>) -> Result<SynthesisPlan> {
    let labels: Vec<String> = bases.iter().map(|g| g.label.clone()).collect();
    let mut plan = SynthesisPlan {
        schema: 1,
        bases: bases
            .iter()
            .map(|g| PlanBasis { label: g.label.clone(), template: g.template, matrix: g.matrix })
            .collect(),
        basis_count: items.iter().filter(|i| matches!(i, Item::Invoke(_))).count(),
        steps: to_steps(&items, &labels),
        target_coord: kak.coord,
        target: *target,
        residual_achieved: 0.0,
    };
    plan.residual_achieved = plan.assemble().distance_up_to_phase(target);
    if plan.residual_achieved > PLAN_TOL {
        return Err(Error::Internal(format!("plan misses the target by {:.3e}", plan.residual_achieved)));
    }
    Ok(plan)
}

/// Plans from `start` to `t` using primitive `prim` only.
fn plan_from(start: [f64; 3], t: [f64; 3], prims: &[Primitive], prim: usize) -> Option<Vec<Move>> {
    let p = &prims[prim];
    let lo = count_floor(start, t, p.coord);
    planner::plan(start, t, prim, &p.variants, lo, lo + COUNT_SLACK)
}

fn target_kak(target: &C4x4) -> Result<KakFactorization> {
    target.ensure_unitary(INPUT_UNITARY_TOL)?;
    kak_decompose(target)
}

fn residual_plan(
    target: &C4x4,
    kak: &KakFactorization,
    padding: &Padding,
    basis: &BasisGate,
    use_doubled: bool,
) -> Result<SynthesisPlan> {
    let mut prims = vec![basic_primitive(basis, 0)];
    if use_doubled {
        prims.push(
            doubled_primitive(basis, 0)
                .ok_or_else(|| Error::Unreachable(format!("{} has no usable doubled form", basis.label)))?,
        );
    }
    let which = prims.len() - 1;
    let t = kak.coord.as_array();
    let tail = plan_from(padding.padded, t, &prims, which)
        .ok_or_else(|| Error::Unreachable(format!("no residual plan for {t:?} with {}", basis.label)))?;
    let moves: Vec<Move> = padding.moves.iter().chain(tail.iter()).copied().collect();
    finalize(target, kak, &[basis], &prims, &moves)
}

fn expect_template(basis: &BasisGate, name: &str) -> Result<()> {
    if basis.template.name() == name {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{} is a {} gate, expected {name}", basis.label, basis.template.name())))
    }
}

/// Padding plus residual synthesis with a `Da` basis.
pub fn synth_residual_da(target: &C4x4, padding: &Padding, basis: &BasisGate) -> Result<SynthesisPlan> {
    expect_template(basis, "Da")?;
    residual_plan(target, &target_kak(target)?, padding, basis, false)
}

/// Padding plus residual synthesis with a `Db` basis.
pub fn synth_residual_db(target: &C4x4, padding: &Padding, basis: &BasisGate) -> Result<SynthesisPlan> {
    expect_template(basis, "Db")?;
    residual_plan(target, &target_kak(target)?, padding, basis, false)
}

/// Padding plus residual synthesis with a `Dc` basis; the residual uses
/// pairs of invocations acting as a single `Da` gate.
pub fn synth_residual_dc(target: &C4x4, padding: &Padding, basis: &BasisGate) -> Result<SynthesisPlan> {
    expect_template(basis, "Dc")?;
    residual_plan(target, &target_kak(target)?, padding, basis, true)
}

fn better(a: &SynthesisPlan, b: &SynthesisPlan) -> bool {
    (a.basis_count, a.residual_achieved) < (b.basis_count, b.residual_achieved)
}

/// Compiles a two-qubit unitary into invocations of one basis gate.
pub fn compile_2q(target: &C4x4, basis: &BasisGate) -> Result<SynthesisPlan> {
    let kak = target_kak(target)?;
    let t = kak.coord.as_array();
    let mut best: Option<SynthesisPlan> = None;
    let mut consider = |p: Result<SynthesisPlan>| {
        if let Ok(p) = p {
            if best.as_ref().is_none_or(|b| better(&p, b)) {
                best = Some(p);
            }
        }
    };

    let padding = pad_rotations(&kak.coord, basis);
    let is_dc = matches!(basis.template, TemplateClass::Dc(..));
    consider(residual_plan(target, &kak, &padding, basis, is_dc));

    let mut prims = vec![basic_primitive(basis, 0)];
    prims.extend(doubled_primitive(basis, 0));
    for which in 0..prims.len() {
        if count_floor([0.0; 3], t, prims[which].coord) * prims[which].cost <= ORIGIN_SEARCH_LIMIT {
            if let Some(moves) = plan_from([0.0; 3], t, &prims, which) {
                consider(finalize(target, &kak, &[basis], &prims, &moves));
            }
        }
    }
    // Short plans for Db/Dc gates, and a last resort when the structured
    // routes fail.
    let structured = best.as_ref().map(|p| p.basis_count);
    let numeric_max = match structured {
        Some(_) if matches!(basis.template, TemplateClass::Da(_)) => 0,
        Some(n) => n.min(NUMERIC_SHORT + 1),
        None => numeric::MAX_COUNT + 1,
    };
    let first = lower_bound(&kak.coord, basis).n_lower.max(2);
    for n in first..numeric_max {
        if let Ok(p) = numeric::complete(target, &kak, basis, n) {
            best = Some(p);
            break;
        }
    }
    best.ok_or_else(|| Error::Unreachable(format!("could not compile {:?} with {}", kak.coord, basis.label)))
}

/// What [`compile_2q_mixed`] optimises.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    MinCount,
    MinLatency,
    MaxFidelity,
}

/// Compiles with several basis gates at once: each gate alone, plus greedy
/// plans that pad with one gate and finish with another.
pub fn compile_2q_mixed(
    target: &C4x4,
    bases: &[BasisGate],
    objective: Objective,
    model: &HardwareModel,
) -> Result<SynthesisPlan> {
    if bases.is_empty() {
        return Err(Error::InvalidArgument("at least one basis gate is required".into()));
    }
    let kak = target_kak(target)?;
    let refs: Vec<&BasisGate> = bases.iter().collect();
    let mut plans = Vec::new();
    for (i, g) in bases.iter().enumerate() {
        if let Ok(p) = compile_2q(target, g) {
            plans.push(reindex(p, &refs, i));
        }
    }
    let t = kak.coord.as_array();
    for (i, pad) in bases.iter().enumerate() {
        let padding = pad_rotations(&kak.coord, pad);
        if padding.invocations == 0 {
            continue;
        }
        for (j, fin) in bases.iter().enumerate() {
            if i == j {
                continue;
            }
            let mut prims = vec![basic_primitive(pad, i), basic_primitive(fin, j)];
            prims.extend(doubled_primitive(fin, j));
            for which in 1..prims.len() {
                if let Some(tail) = plan_from(padding.padded, t, &prims, which) {
                    let moves: Vec<Move> = padding.moves.iter().chain(tail.iter()).copied().collect();
                    if let Ok(p) = finalize(target, &kak, &refs, &prims, &moves) {
                        plans.push(p);
                    }
                }
            }
        }
    }
    let key = |p: &SynthesisPlan| -> (f64, f64) {
        let err = model.plan_error(p).unwrap_or(f64::INFINITY);
        let lat = model.plan_latency(p).unwrap_or(f64::INFINITY);
        match objective {
            Objective::MinCount => (p.basis_count as f64, err),
            Objective::MinLatency => (lat, err),
            Objective::MaxFidelity => (err, p.basis_count as f64),
        }
    };
    plans
        .into_iter()
        .min_by(|a, b| key(a).partial_cmp(&key(b)).unwrap_or(std::cmp::Ordering::Equal))
        .ok_or_else(|| Error::Unreachable(format!("no basis gate could compile {:?}", kak.coord)))
}

/// Rewrites a single-basis plan to reference the full basis list.
fn reindex(mut plan: SynthesisPlan, bases: &[&BasisGate], index: usize) -> SynthesisPlan {
    plan.bases = bases
        .iter()
        .map(|g| PlanBasis { label: g.label.clone(), template: g.template, matrix: g.matrix })
        .collect();
    for s in &mut plan.steps {
        if let PlanStep::Basis { index: i, .. } = s {
            *i = index;
        }
    }
    plan
}

/// Largest interaction strength one invocation can add.
fn step_width(template: &TemplateClass) -> f64 {
    match *template {
        TemplateClass::Da(x) => x,
        TemplateClass::Db(x, y) => x + y,
        TemplateClass::Dc(x, y, z) => x + y + z.abs(),
    }
}

/// Lower bound on the invocation count from the interaction strength.
pub fn lower_bound(target: &CartanCoordinate, basis: &BasisGate) -> CostBound {
    let k_t = target.l1();
    let w = step_width(&basis.template);
    let s = k_t.sin();
    let mut n = 0usize;
    while (n as f64) * w < FRAC_PI_4 - 1e-12 {
        if s <= (n as f64 * w).sin() + 1e-12 {
            return CostBound { n_lower: n, k_t_value: k_t, applicable: true };
        }
        n += 1;
    }
    CostBound { n_lower: (FRAC_PI_4 / w - 1e-9).ceil() as usize, k_t_value: k_t, applicable: false }
}


#[cfg(test)]
mod tests;
