//! Move planning on the Cartan torus.
//!
//! The circuit built so far is kept exactly equal (up to phase and an
//! accumulated local layer) to `exp(i u·P)` for a raw triple `u`. A *pad*
//! adds an oriented primitive coordinate to `u`. A *pair* move on axes
//! `(p, q)` with third axis `r` puts a Z-type layer between the current
//! circuit and the next primitive: `u_p + u_q` and `u_p − u_q` each move
//! within a window set by the primitive, while `u_r` picks up the
//! primitive's `r` component.
//!
//! Plans use two phases. Phase one works on a pair `(S, O)` and finishes
//! axis `O`. Phase two works on `(S, R)` with primitives that have no `O`
//! component, finishing the other two axes.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::calib::block_reachable;

const EPS: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MoveKind {
    Pad,
    /// New values of `u_p`, `u_q` after the move.
    Pair { p: usize, q: usize, vp: f64, vq: f64 },
}

/// One primitive invocation with its oriented coordinate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Move {
    pub prim: usize,
    pub g: [f64; 3],
    pub kind: MoveKind,
}

impl Move {
    pub fn apply(&self, u: [f64; 3]) -> [f64; 3] {
        match self.kind {
            MoveKind::Pad => [u[0] + self.g[0], u[1] + self.g[1], u[2] + self.g[2]],
            MoveKind::Pair { p, q, vp, vq } => {
                let r = 3 - p - q;
                let mut out = u;
                out[p] = vp;
                out[q] = vq;
                out[r] = u[r] + self.g[r];
                out
            }
        }
    }
}

/// Folds an angle into `[0, π/2]` (the block relation only sees `cos²`).
pub fn fold(v: f64) -> f64 {
    let w = v.abs() % PI;
    if w > FRAC_PI_2 {
        PI - w
    } else {
        w
    }
}

/// Magnitudes reachable from `a` in `r` steps of size `c` (all folded).
pub fn reach(a: f64, c: f64, r: usize) -> (f64, f64) {
    match r {
        0 => (a, a),
        1 => {
            let l = (a - c).abs();
            let f = fold(a + c);
            (l.min(f), l.max(f))
        }
        _ => ((a - r as f64 * c).max(0.0), (a + r as f64 * c).min(FRAC_PI_2)),
    }
}

type Intervals = Vec<(f64, f64)>;

/// `{a : |a + shift| ∈ [lo, hi]}`.
fn abs_window(shift: f64, (lo, hi): (f64, f64)) -> Intervals {
    vec![(lo - shift, hi - shift), (-hi - shift, -lo - shift)]
}

fn intersect(xs: &Intervals, ys: &Intervals) -> Intervals {
    let mut out = Vec::new();
    for &(a, b) in xs {
        for &(c, d) in ys {
            let lo = a.max(c);
            let hi = b.min(d);
            if lo <= hi + EPS {
                out.push((lo, hi.max(lo)));
            }
        }
    }
    out
}

/// Waypoints for one block from signed `a0` to signed `t` in `r` steps.
fn schedule(a0: f64, c: f64, t: f64, r: usize) -> Option<Vec<f64>> {
    let cm = fold(c);
    let mut out = Vec::with_capacity(r);
    let mut v = a0;
    for i in 1..=r {
        let next = if i == r {
            t
        } else {
            let (l1, h1) = reach(fold(v), cm, 1);
            let (l2, h2) = reach(fold(t), cm, r - i);
            let lo = l1.max(l2);
            let hi = h1.min(h2);
            if lo > hi + EPS {
                return None;
            }
            0.5 * (lo + hi.max(lo))
        };
        if !block_reachable(v, c, next) {
            return None;
        }
        out.push(next);
        v = next;
    }
    Some(out)
}

/// A group of oriented variants sharing the same block step sizes.
#[derive(Clone, Debug)]
struct StepType {
    cs: f64,
    cd: f64,
    /// Third-axis contributions available, each with a representative.
    third: Vec<(f64, [f64; 3])>,
}

fn step_types(variants: &[[f64; 3]], p: usize, q: usize, require_zero_third: bool) -> Vec<StepType> {
    let r = 3 - p - q;
    let mut out: Vec<StepType> = Vec::new();
    for g in variants {
        if require_zero_third && g[r].abs() > EPS {
            continue;
        }
        let cs = fold(g[p] + g[q]);
        let cd = fold(g[p] - g[q]);
        match out.iter_mut().find(|t| (t.cs - cs).abs() < EPS && (t.cd - cd).abs() < EPS) {
            Some(t) => {
                if !t.third.iter().any(|(w, _)| (w - g[r]).abs() < EPS) {
                    t.third.push((g[r], *g));
                }
            }
            None => out.push(StepType { cs, cd, third: vec![(g[r], *g)] }),
        }
    }
    out
}

/// Candidate per-step third-axis choices for `n` steps, aiming the sum at
/// `want`. Returns the chosen variant for each step.
fn third_axis_choices(t: &StepType, n: usize, want: f64) -> Vec<Vec<[f64; 3]>> {
    let find = |pred: &dyn Fn(f64) -> bool| t.third.iter().find(|(w, _)| pred(*w)).copied();
    let zero = find(&|w| w.abs() < EPS);
    let pos = find(&|w| w > EPS);
    let neg = find(&|w| w < -EPS);
    let h = pos.map(|p| p.0).or(neg.map(|n| -n.0)).unwrap_or(0.0);
    if h == 0.0 {
        return vec![vec![zero.map(|z| z.1).unwrap_or(t.third[0].1); n]];
    }
    let n_i = n as i64;
    let kmin = if neg.is_some() { -n_i } else if zero.is_some() { 0 } else { n_i };
    let kmax = if pos.is_some() { n_i } else if zero.is_some() { 0 } else { -n_i };
    let step = if zero.is_some() { 1 } else { 2 };
    let on_lattice = |k: i64| k >= kmin && k <= kmax && (k - kmin) % step == 0;
    let ideal = (want / h).round() as i64;
    let mut ks: Vec<i64> = Vec::new();
    for k in [ideal, ideal - 1, ideal + 1, ideal - 2, ideal + 2, 0, 1, -1, kmin, kmax] {
        let k = k.clamp(kmin, kmax);
        if on_lattice(k) && !ks.contains(&k) {
            ks.push(k);
        }
        if ks.len() >= 3 {
            break;
        }
    }
    ks.into_iter()
        .map(|k| {
            let mut picks = Vec::with_capacity(n);
            let (mut plus, mut minus) = if zero.is_some() {
                (k.max(0) as usize, (-k).max(0) as usize)
            } else {
                (((n_i + k) / 2) as usize, ((n_i - k) / 2) as usize)
            };
            for _ in 0..n {
                if plus > 0 {
                    picks.push(pos.expect("positive option").1);
                    plus -= 1;
                } else if minus > 0 {
                    picks.push(neg.expect("negative option").1);
                    minus -= 1;
                } else {
                    picks.push(zero.expect("zero option").1);
                }
            }
            picks
        })
        .collect()
}

fn candidates(iv: &Intervals) -> Vec<f64> {
    let mut out = Vec::new();
    for &(lo, hi) in iv {
        out.push(0.5 * (lo + hi));
        if hi - lo > 1e-9 {
            out.push(lo + 1e-10);
            out.push(hi - 1e-10);
        }
    }
    out
}

fn pair_moves(prim: usize, p: usize, q: usize, s: &[f64], d: &[f64], gs: &[[f64; 3]]) -> Vec<Move> {
    (0..s.len())
        .map(|i| Move {
            prim,
            g: gs[i],
            kind: MoveKind::Pair { p, q, vp: 0.5 * (s[i] + d[i]), vq: 0.5 * (s[i] - d[i]) },
        })
        .collect()
}

fn run(start: [f64; 3], moves: &[Move]) -> [f64; 3] {
    moves.iter().fold(start, |u, m| m.apply(u))
}

fn close(a: [f64; 3], b: [f64; 3], tol: f64) -> bool {
    (0..3).all(|k| (a[k] - b[k]).abs() <= tol)
}

/// Searches two-phase plans with exactly `n` invocations.
fn try_count(start: [f64; 3], target: [f64; 3], prim: usize, variants: &[[f64; 3]], n: usize) -> Option<Vec<Move>> {
    const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    if n == 0 {
        return close(start, target, 1e-12).then(Vec::new);
    }
    let u0 = start;
    let r = target;
    for [s_ax, o_ax, r_ax] in PERMS {
        let types1 = step_types(variants, s_ax, o_ax, false);
        let types2 = step_types(variants, s_ax, r_ax, true);
        for n1 in (0..=n).rev() {
            let n2 = n - n1;
            if n2 > 0 && types2.is_empty() {
                continue;
            }
            if n1 == 0 && (u0[o_ax] - r[o_ax]).abs() > 1e-12 {
                continue;
            }
            let t1_list: Vec<Option<&StepType>> =
                if n1 == 0 { vec![None] } else { types1.iter().map(Some).collect() };
            let t2_list: Vec<Option<&StepType>> =
                if n2 == 0 { vec![None] } else { types2.iter().map(Some).collect() };
            for t1 in &t1_list {
                let choices = match t1 {
                    Some(t) => third_axis_choices(t, n1, r[r_ax] - u0[r_ax]),
                    None => vec![Vec::new()],
                };
                for picks in &choices {
                    let p_r = u0[r_ax] + picks.iter().map(|g| g[r_ax]).sum::<f64>();
                    if n2 == 0 && (p_r - r[r_ax]).abs() > 1e-12 {
                        continue;
                    }
                    for t2 in &t2_list {
                        let mut cons: Intervals = vec![(-10.0, 10.0)];
                        match t1 {
                            Some(t) => {
                                cons = intersect(&cons, &abs_window(r[o_ax], reach(fold(u0[s_ax] + u0[o_ax]), t.cs, n1)));
                                cons = intersect(&cons, &abs_window(-r[o_ax], reach(fold(u0[s_ax] - u0[o_ax]), t.cd, n1)));
                            }
                            None => cons = intersect(&cons, &vec![(u0[s_ax], u0[s_ax])]),
                        }
                        match t2 {
                            Some(t) => {
                                cons = intersect(&cons, &abs_window(p_r, reach(fold(r[s_ax] + r[r_ax]), t.cs, n2)));
                                cons = intersect(&cons, &abs_window(-p_r, reach(fold(r[s_ax] - r[r_ax]), t.cd, n2)));
                            }
                            None => cons = intersect(&cons, &vec![(r[s_ax], r[s_ax])]),
                        }
                        for a in candidates(&cons) {
                            if let Some(moves) =
                                build(u0, r, prim, [s_ax, o_ax, r_ax], (n1, n2), (*t1, *t2), picks, p_r, a)
                            {
                                return Some(moves);
                            }
                        }
                    }
                }
            }
        }
    }
    None
}

#[allow(clippy::too_many_arguments)]
fn build(
    u0: [f64; 3],
    r: [f64; 3],
    prim: usize,
    [s_ax, o_ax, r_ax]: [usize; 3],
    (n1, n2): (usize, usize),
    (t1, t2): (Option<&StepType>, Option<&StepType>),
    picks: &[[f64; 3]],
    p_r: f64,
    a: f64,
) -> Option<Vec<Move>> {
    let mut moves = Vec::with_capacity(n1 + n2);
    if let Some(t) = t1 {
        let s = schedule(u0[s_ax] + u0[o_ax], t.cs, a + r[o_ax], n1)?;
        let d = schedule(u0[s_ax] - u0[o_ax], t.cd, a - r[o_ax], n1)?;
        moves.extend(pair_moves(prim, s_ax, o_ax, &s, &d, picks));
    } else if (a - u0[s_ax]).abs() > 1e-12 {
        return None;
    }
    if let Some(t) = t2 {
        let s = schedule(a + p_r, t.cs, r[s_ax] + r[r_ax], n2)?;
        let d = schedule(a - p_r, t.cd, r[s_ax] - r[r_ax], n2)?;
        let g = t.third[0].1;
        moves.extend(pair_moves(prim, s_ax, r_ax, &s, &d, &vec![g; n2]));
    } else if (a - r[s_ax]).abs() > 1e-12 || (p_r - r[r_ax]).abs() > 1e-12 {
        return None;
    }
    close(run(u0, &moves), r, 1e-9).then_some(moves)
}

/// Smallest two-phase plan from `start` to exactly `target`, trying counts
/// in `n_min..=n_max`.
pub fn plan(
    start: [f64; 3],
    target: [f64; 3],
    prim: usize,
    variants: &[[f64; 3]],
    n_min: usize,
    n_max: usize,
) -> Option<Vec<Move>> {
    (n_min..=n_max).find_map(|n| try_count(start, target, prim, variants, n))
}

/// Count estimate from L1 growth: no move raises `‖u‖₁` by more than `‖g‖₁`.
pub fn count_floor(start: [f64; 3], target: [f64; 3], g: [f64; 3]) -> usize {
    let l1 = |v: [f64; 3]| v.iter().map(|x| x.abs()).sum::<f64>();
    let step = l1(g);
    if step <= 0.0 {
        return 0;
    }
    ((l1(target) - l1(start)) / step - 1e-9).ceil().max(0.0) as usize
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::orient::variants;
    use std::f64::consts::{FRAC_PI_4, FRAC_PI_8};

    fn count(target: [f64; 3], g: [f64; 3]) -> usize {
        let v = variants(g);
        let lo = count_floor([0.0; 3], target, g);
        plan([0.0; 3], target, 0, &v, lo, lo + 8).expect("plan").len()
    }

    #[test]
    fn cx_counts() {
        let cx = [FRAC_PI_4, 0.0, 0.0];
        assert_eq!(count([FRAC_PI_4, 0.0, 0.0], cx), 1);
        assert_eq!(count([FRAC_PI_8, 0.0, 0.0], cx), 2);
        assert_eq!(count([FRAC_PI_4, FRAC_PI_4, FRAC_PI_4], cx), 3);
        assert_eq!(count([0.6, 0.3, -0.1], cx), 3);
    }

    #[test]
    fn b_gate_swap() {
        assert_eq!(count([FRAC_PI_4, FRAC_PI_4, FRAC_PI_4], [FRAC_PI_4, FRAC_PI_8, 0.0]), 2);
    }

    #[test]
    fn reach_windows() {
        assert_eq!(reach(0.0, 0.3, 1), (0.3, 0.3));
        assert_eq!(reach(0.2, 0.3, 2), (0.0, 0.8));
    }
}
