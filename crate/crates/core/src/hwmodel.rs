//! Latency and error model for native two-qubit gates, and instruction-set
//! evaluation on top of it.

use std::f64::consts::FRAC_PI_4;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuits::{transpile_circuit, Circuit, GateOp};
use crate::error::{Error, Result};
use crate::kak::{cartan_coordinate, classify_template, TemplateClass};
use crate::synth::{BasisGate, Objective, SynthesisPlan};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Coupling {
    XxOnly,
    XxPlusYy,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HardwareModel {
    pub coupling: Coupling,
    /// Error per radian of interaction time.
    pub error_slope: f64,
    /// Error paid by every invocation.
    pub error_offset: f64,
}

impl Default for HardwareModel {
    fn default() -> Self {
        HardwareModel { coupling: Coupling::XxOnly, error_slope: 5.76e-3 / FRAC_PI_4, error_offset: 1.909e-3 }
    }
}

impl HardwareModel {
    pub fn with_coupling(mut self, coupling: Coupling) -> Self {
        self.coupling = coupling;
        self
    }

    /// Interaction time in radians.
    pub fn raw_latency(&self, t: &TemplateClass) -> Result<f64> {
        match (self.coupling, *t) {
            (Coupling::XxOnly, _) => Ok(t.coord().l1()),
            (Coupling::XxPlusYy, TemplateClass::Da(x) | TemplateClass::Db(x, _)) => Ok(x),
            (Coupling::XxPlusYy, TemplateClass::Dc(..)) => {
                Err(Error::Unsupported("no latency rule for Dc gates under XX+YY coupling".into()))
            }
        }
    }

    /// Latency in units of one CX.
    pub fn gate_latency(&self, t: &TemplateClass) -> Result<f64> {
        Ok(self.raw_latency(t)? / FRAC_PI_4)
    }

    /// `m·τ + b` for interaction time `τ` in radians.
    pub fn gate_error(&self, tau_raw: f64) -> f64 {
        self.error_slope * tau_raw + self.error_offset
    }

    pub fn template_error(&self, t: &TemplateClass) -> Result<f64> {
        Ok(self.gate_error(self.raw_latency(t)?))
    }

    pub fn plan_fidelity(&self, plan: &SynthesisPlan) -> Result<f64> {
        let mut f = 1.0;
        for (b, n) in plan.bases.iter().zip(plan.invocations()) {
            if n > 0 {
                f *= (1.0 - self.template_error(&b.template)?).powi(n as i32);
            }
        }
        Ok(f)
    }

    pub fn plan_error(&self, plan: &SynthesisPlan) -> Result<f64> {
        Ok(1.0 - self.plan_fidelity(plan)?)
    }

    pub fn plan_latency(&self, plan: &SynthesisPlan) -> Result<f64> {
        let mut l = 0.0;
        for (b, n) in plan.bases.iter().zip(plan.invocations()) {
            if n > 0 {
                l += n as f64 * self.gate_latency(&b.template)?;
            }
        }
        Ok(l)
    }
}

impl HardwareModel {
    /// Product of `1 − p_e` over two-qubit ops; single-qubit gates are free.
    pub fn circuit_fidelity(&self, c: &Circuit) -> Result<f64> {
        let mut f = 1.0;
        for op in c.two_qubit_ops() {
            f *= 1.0 - self.template_error(&op_template(op)?)?;
        }
        Ok(f)
    }

    /// Serial latency of the two-qubit ops, in CX units.
    pub fn circuit_latency(&self, c: &Circuit) -> Result<f64> {
        c.two_qubit_ops().map(|op| self.gate_latency(&op_template(op)?)).sum()
    }
}

fn op_template(op: &GateOp) -> Result<TemplateClass> {
    let m = op.matrix_2q().ok_or_else(|| Error::InvalidArgument(format!("{} is not a two-qubit gate", op.kind.name())))?;
    Ok(classify_template(&cartan_coordinate(&m)?))
}

/// A candidate native gate set.
#[derive(Clone, Debug)]
pub struct InstructionSet {
    pub bases: Vec<BasisGate>,
    /// Score added per distinct basis gate.
    pub calibration_penalty: f64,
}

impl InstructionSet {
    pub fn new(bases: Vec<BasisGate>) -> Result<Self> {
        if bases.is_empty() {
            return Err(Error::InvalidArgument("an instruction set needs at least one basis gate".into()));
        }
        Ok(InstructionSet { bases, calibration_penalty: 0.0 })
    }

    pub fn label(&self) -> String {
        self.bases.iter().map(|b| b.label.as_str()).collect::<Vec<_>>().join("+")
    }

    /// Template angles of all bases, concatenated.
    pub fn angles(&self) -> Vec<f64> {
        self.bases.iter().flat_map(|b| b.template.coord().as_array()).collect()
    }
}

/// Linear weights of the scalar objective.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveWeights {
    pub infidelity: f64,
    pub latency: f64,
    pub basis_count: f64,
}

impl Default for ObjectiveWeights {
    fn default() -> Self {
        ObjectiveWeights { infidelity: 1.0, latency: 0.0, basis_count: 0.0 }
    }
}

/// A named benchmark circuit.
#[derive(Clone, Debug)]
pub struct Benchmark {
    pub name: String,
    pub circuit: Circuit,
}

/// One report row.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub config: String,
    pub angles: Vec<f64>,
    pub benchmark: String,
    pub fidelity: f64,
    pub latency: f64,
    pub basis_count: usize,
    pub lower_bound: usize,
    pub score: f64,
}

impl ReportRow {
    fn scored(mut self, w: &ObjectiveWeights, iset: &InstructionSet) -> Self {
        self.score = w.infidelity * (1.0 - self.fidelity)
            + w.latency * self.latency
            + w.basis_count * self.basis_count as f64
            + iset.calibration_penalty * iset.bases.len() as f64;
        self
    }
}

/// Transpiles every benchmark onto the instruction set.
pub fn evaluate_instruction_set(
    benchmarks: &[Benchmark],
    iset: &InstructionSet,
    model: &HardwareModel,
    weights: &ObjectiveWeights,
    objective: Objective,
) -> Result<Vec<ReportRow>> {
    benchmarks
        .iter()
        .map(|b| {
            let (_, r) = transpile_circuit(&b.circuit, &iset.bases, objective, model)?;
            Ok(ReportRow {
                config: iset.label(),
                angles: iset.angles(),
                benchmark: b.name.clone(),
                fidelity: r.fidelity,
                latency: r.latency,
                basis_count: r.basis_count,
                lower_bound: r.lower_bound,
                score: 0.0,
            }
            .scored(weights, iset))
        })
        .collect()
}

/// Evaluates every configuration over all benchmarks (aggregated into one
/// row per configuration) and ranks by score, ties by angle order.
pub fn sweep_design_space(
    benchmarks: &[Benchmark],
    grid: &[InstructionSet],
    model: &HardwareModel,
    weights: &ObjectiveWeights,
    objective: Objective,
) -> Result<Vec<ReportRow>> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument("the design grid is empty".into()));
    }
    let names = benchmarks.iter().map(|b| b.name.as_str()).collect::<Vec<_>>().join("+");
    let mut rows: Vec<ReportRow> = grid
        .par_iter()
        .map(|iset| {
            let per = evaluate_instruction_set(benchmarks, iset, model, weights, objective)?;
            Ok(ReportRow {
                config: iset.label(),
                angles: iset.angles(),
                benchmark: names.clone(),
                fidelity: per.iter().map(|r| r.fidelity).product(),
                latency: per.iter().map(|r| r.latency).sum(),
                basis_count: per.iter().map(|r| r.basis_count).sum(),
                lower_bound: per.iter().map(|r| r.lower_bound).sum(),
                score: 0.0,
            }
            .scored(weights, iset))
        })
        .collect::<Result<_>>()?;
    rows.sort_by(|a, b| {
        a.score.total_cmp(&b.score).then_with(|| {
            a.angles
                .iter()
                .zip(&b.angles)
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(a.angles.len().cmp(&b.angles.len()))
        })
    });
    Ok(rows)
}

/// CSV with one line per row; angles are `;`-separated.
pub fn report_csv(rows: &[ReportRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["config", "angles", "benchmark", "fidelity", "latency", "basis_count", "lower_bound", "score"])
        .map_err(csv_err)?;
    for r in rows {
        let angles = r.angles.iter().map(|a| format!("{a:?}")).collect::<Vec<_>>().join(";");
        w.write_record([
            r.config.clone(),
            angles,
            r.benchmark.clone(),
            format!("{:?}", r.fidelity),
            format!("{:?}", r.latency),
            r.basis_count.to_string(),
            r.lower_bound.to_string(),
            format!("{:?}", r.score),
        ])
        .map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Internal(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Internal(e.to_string()))
}

pub fn report_json(rows: &[ReportRow]) -> Result<String> {
    Ok(serde_json::to_string_pretty(rows)?)
}

fn csv_err(e: csv::Error) -> Error {
    Error::Internal(format!("csv: {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::{gen_bv, gen_qft};
    use std::f64::consts::{FRAC_PI_8, PI};

    fn da(t: f64) -> BasisGate {
        BasisGate::from_template(format!("da({t:.4})"), TemplateClass::Da(t)).unwrap()
    }

    #[test]
    fn latency_and_error_examples() {
        let m = HardwareModel::default();
        assert!((m.gate_latency(&TemplateClass::Da(FRAC_PI_4)).unwrap() - 1.0).abs() < 1e-15);
        let b = TemplateClass::Db(FRAC_PI_4, FRAC_PI_8);
        assert!((m.gate_latency(&b).unwrap() - 1.5).abs() < 1e-15);
        let xy = m.with_coupling(Coupling::XxPlusYy);
        assert!((xy.gate_latency(&b).unwrap() - 1.0).abs() < 1e-15);
        assert!(matches!(xy.gate_latency(&TemplateClass::Dc(0.3, 0.2, 0.1)), Err(Error::Unsupported(_))));
        assert!((m.gate_error(FRAC_PI_4) - 7.669e-3).abs() < 1e-12);
        assert!((m.gate_error(0.0) - 1.909e-3).abs() < 1e-15);
        assert!((m.template_error(&TemplateClass::Da(PI / 16.0)).unwrap() - 3.349e-3).abs() < 1e-12);
    }

    #[test]
    fn circuit_metrics() {
        let m = HardwareModel::default();
        let mut c = Circuit::new(2).unwrap();
        assert_eq!(m.circuit_fidelity(&c).unwrap(), 1.0);
        c.add("cx", &[0, 1], &[]).unwrap();
        c.add("cx", &[1, 0], &[]).unwrap();
        assert!((m.circuit_fidelity(&c).unwrap() - (1.0 - 7.669e-3f64).powi(2)).abs() < 1e-12);
        assert!((m.circuit_latency(&c).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn instruction_set_reports() {
        let m = HardwareModel::default();
        let w = ObjectiveWeights::default();
        let bv = [Benchmark { name: "bv3".into(), circuit: gen_bv(3, None).unwrap() }];
        let cx = InstructionSet::new(vec![BasisGate::cx()]).unwrap();
        let r = &evaluate_instruction_set(&bv, &cx, &m, &w, Objective::MaxFidelity).unwrap()[0];
        assert_eq!(r.basis_count, 3);
        assert!((r.latency - 3.0).abs() < 1e-12);

        let qft = [Benchmark { name: "qft5".into(), circuit: gen_qft(5).unwrap() }];
        let f_cx = evaluate_instruction_set(&qft, &cx, &m, &w, Objective::MaxFidelity).unwrap()[0].fidelity;
        let small = InstructionSet::new(vec![da(PI / 16.0)]).unwrap();
        let f_small = evaluate_instruction_set(&qft, &small, &m, &w, Objective::MaxFidelity).unwrap()[0].fidelity;
        assert!(f_small > f_cx);

        let rows = sweep_design_space(&qft, std::slice::from_ref(&small), &m, &w, Objective::MaxFidelity).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].fidelity, f_small);
        assert!(report_csv(&rows).unwrap().lines().count() == 2);
    }
}
