//! Text grammars for angles, basis gates, benchmarks and design grids.

use std::f64::consts::{FRAC_PI_4, FRAC_PI_8, PI};

use cartan_synth::circuits::{gen_bv, gen_pauli_evo, gen_qaoa, gen_qft, Circuit};
use cartan_synth::hwmodel::Benchmark;
use cartan_synth::kak::TemplateClass;
use cartan_synth::matcore::{gates, C4x4};
use cartan_synth::C64;
use cartan_synth::synth::BasisGate;

/// Edge probability of generated QAOA graphs.
const QAOA_EDGE_PROB: f64 = 0.3;

/// `pi/<int>`, `<float>` or `<float>deg`, with an optional sign; `pi` alone
/// is accepted too.
pub fn angle(text: &str) -> Result<f64, String> {
    let t = text.trim();
    let (sign, body) = match t.strip_prefix('-') {
        Some(rest) => (-1.0, rest),
        None => (1.0, t.strip_prefix('+').unwrap_or(t)),
    };
    let value = if body == "pi" {
        PI
    } else if let Some(den) = body.strip_prefix("pi/") {
        let d: u64 = den.parse().map_err(|_| format!("bad angle `{text}`: expected pi/<int>"))?;
        if d == 0 {
            return Err(format!("bad angle `{text}`: division by zero"));
        }
        PI / d as f64
    } else if let Some(deg) = body.strip_suffix("deg") {
        let v: f64 = deg.parse().map_err(|_| format!("bad angle `{text}`"))?;
        v.to_radians()
    } else {
        body.parse().map_err(|_| format!("bad angle `{text}`"))?
    };
    if !value.is_finite() {
        return Err(format!("bad angle `{text}`"));
    }
    Ok(sign * value)
}

fn angles(text: &str) -> Result<Vec<f64>, String> {
    text.split(',').map(angle).collect()
}

/// One basis gate: `cx`, `da:<θ>`, `db:<θx>,<θy>` or `dc:<θx>,<θy>,<θz>`.
pub fn basis(text: &str) -> Result<BasisGate, String> {
    let t = text.trim();
    if t == "cx" {
        return Ok(BasisGate::cx());
    }
    let (kind, rest) = t.split_once(':').ok_or_else(|| format!("bad basis `{text}`: expected <template>:<angles>"))?;
    let a = angles(rest)?;
    let template = match (kind, a.as_slice()) {
        ("da", &[x]) => TemplateClass::Da(x),
        ("db", &[x, y]) => TemplateClass::Db(x, y),
        ("dc", &[x, y, z]) => TemplateClass::Dc(x, y, z),
        ("da" | "db" | "dc", _) => return Err(format!("bad basis `{text}`: wrong number of angles")),
        _ => return Err(format!("bad basis `{text}`: unknown template `{kind}`")),
    };
    check_template(&template).map_err(|e| format!("bad basis `{text}`: {e}"))?;
    BasisGate::from_template(t, template).map_err(|e| format!("bad basis `{text}`: {e}"))
}

fn check_template(t: &TemplateClass) -> Result<(), String> {
    let c = t.coord();
    let ok = match *t {
        TemplateClass::Da(_) => c.x > 0.0 && c.x <= FRAC_PI_4,
        TemplateClass::Db(..) => c.x <= FRAC_PI_4 && c.y > 0.0 && c.y <= c.x,
        TemplateClass::Dc(..) => c.x <= FRAC_PI_4 && c.y <= c.x && c.z.abs() <= c.y && c.z != 0.0,
    };
    if ok {
        Ok(())
    } else {
        Err("angles outside the template domain".into())
    }
}

/// A `+`-joined list of basis gates forming one instruction set.
pub fn basis_set(text: &str) -> Result<Vec<BasisGate>, String> {
    text.split('+').map(basis).collect()
}

/// Named two-qubit gates accepted by `decompose --gate`.
pub fn named_gate(name: &str) -> Result<C4x4, String> {
    Ok(match name {
        "cx" | "cnot" => gates::cx(),
        "cz" => C4x4::from_diag([C64::new(1.0, 0.0), C64::new(1.0, 0.0), C64::new(1.0, 0.0), C64::new(-1.0, 0.0)]),
        "swap" => gates::swap(),
        "iswap" => TemplateClass::Db(FRAC_PI_4, FRAC_PI_4).coord().to_matrix(),
        "b" => TemplateClass::Db(FRAC_PI_4, FRAC_PI_8).coord().to_matrix(),
        "id" | "i" => gates::i4(),
        _ => return Err(format!("unknown gate `{name}` (try cx, cz, swap, iswap, b, id)")),
    })
}

/// `qft:5,7`, `bv:8`, `qaoa:10`, `pauli:4` or `swap:3`; one benchmark per
/// size.
pub fn benchmarks(text: &str, seed: u64) -> Result<Vec<Benchmark>, String> {
    let (kind, sizes) = text.split_once(':').ok_or_else(|| format!("bad benchmark `{text}`: expected <name>:<sizes>"))?;
    sizes
        .split(',')
        .map(|s| {
            let n: usize = s.trim().parse().map_err(|_| format!("bad benchmark size `{s}`"))?;
            let circuit = build_benchmark(kind, n, seed).map_err(|e| format!("benchmark `{kind}:{n}`: {e}"))?;
            Ok(Benchmark { name: format!("{kind}-{n}"), circuit })
        })
        .collect()
}

fn build_benchmark(kind: &str, n: usize, seed: u64) -> Result<Circuit, String> {
    let c = match kind {
        "qft" => gen_qft(n),
        "bv" => gen_bv(n, None),
        "qaoa" => gen_qaoa(n, QAOA_EDGE_PROB, seed),
        "pauli" => gen_pauli_evo(n, 2 * n, seed),
        "swap" => swap_chain(n),
        _ => return Err(format!("unknown benchmark `{kind}` (try qft, bv, qaoa, pauli, swap)")),
    };
    c.map_err(|e| e.to_string())
}

/// `n` qubits with a SWAP between each neighbouring pair.
fn swap_chain(n: usize) -> cartan_synth::Result<Circuit> {
    let mut c = Circuit::new(n)?;
    for q in 0..n.saturating_sub(1) {
        c.add("swap", &[q, q + 1], &[])?;
    }
    Ok(c)
}

/// Design grids: a plain basis set, or a range `da:<lo>..<hi>@<count>`,
/// `db:<θx>,<lo>..<hi>@<count>` sweeping the last angle.
pub fn grid(text: &str) -> Result<Vec<Vec<BasisGate>>, String> {
    let Some((head, count)) = text.split_once('@') else {
        return Ok(vec![basis_set(text)?]);
    };
    let count: usize = count.parse().map_err(|_| format!("bad grid `{text}`: count must be an integer"))?;
    let (kind, rest) = head.split_once(':').ok_or_else(|| format!("bad grid `{text}`"))?;
    let (fixed, range) = match rest.rsplit_once(',') {
        Some((f, r)) => (Some(f), r),
        None => (None, rest),
    };
    let (lo, hi) = range.split_once("..").ok_or_else(|| format!("bad grid `{text}`: expected <lo>..<hi>"))?;
    let (lo, hi) = (angle(lo)?, angle(hi)?);
    let values: Vec<f64> = match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..count).map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64).collect(),
    };
    values
        .into_iter()
        .map(|v| {
            let spec = match fixed {
                Some(f) => format!("{kind}:{f},{v:?}"),
                None => format!("{kind}:{v:?}"),
            };
            Ok(vec![basis(&spec)?])
        })
        .collect()
}
