//! `cartan`: decompose two-qubit gates, transpile circuits and explore
//! instruction sets from the command line.

mod parse;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use cartan_synth::circuits::{
    circuit_unitary, emit_circuit, parse_circuit, transpile_circuit, Circuit, CircuitFormat, MAX_DENSE_QUBITS,
};
use cartan_synth::hwmodel::{
    evaluate_instruction_set, report_csv, report_json, sweep_design_space, Benchmark, Coupling, HardwareModel,
    InstructionSet, ObjectiveWeights, ReportRow,
};
use cartan_synth::matcore::C4x4;
use cartan_synth::synth::{compile_2q_mixed, lower_bound, BasisGate, Objective, SynthesisPlan, PLAN_TOL};
use clap::{Args, Parser, Subcommand, ValueEnum};

/// Environment variable holding the worker-thread count.
const WORKERS_ENV: &str = "CARTAN_WORKERS";
const DEFAULT_SEED: u64 = 2024;
/// Dense-equivalence tolerance for transpiled circuits.
const CIRCUIT_TOL: f64 = 1e-6;

#[derive(Parser)]
#[command(name = "cartan", version, about = "Two-qubit gate synthesis over arbitrary native basis gates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compile one two-qubit unitary into basis-gate invocations.
    Decompose(DecomposeArgs),
    /// Compile every two-qubit op of a circuit.
    Transpile(TranspileArgs),
    /// Report fidelity, latency and counts of benchmarks per instruction set.
    Bench(BenchArgs),
    /// Rank instruction sets from a grid by the weighted objective.
    Design(DesignArgs),
    /// Check a saved plan, or compare two circuits.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ObjectiveArg {
    MinCount,
    MinLatency,
    MaxFidelity,
}

impl From<ObjectiveArg> for Objective {
    fn from(o: ObjectiveArg) -> Self {
        match o {
            ObjectiveArg::MinCount => Objective::MinCount,
            ObjectiveArg::MinLatency => Objective::MinLatency,
            ObjectiveArg::MaxFidelity => Objective::MaxFidelity,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum CouplingArg {
    Xx,
    #[value(name = "xx+yy", alias = "xxyy")]
    XxYy,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum CircuitFormatArg {
    Qasm,
    Json,
}

#[derive(Args)]
struct ModelArgs {
    /// Physical coupling of the native gates.
    #[arg(long, value_enum, default_value = "xx")]
    coupling: CouplingArg,
    /// Error per radian of interaction time.
    #[arg(long)]
    error_slope: Option<f64>,
    /// Error paid per invocation.
    #[arg(long)]
    error_offset: Option<f64>,
    #[arg(long, value_enum, default_value = "max-fidelity")]
    objective: ObjectiveArg,
}

impl ModelArgs {
    fn model(&self) -> HardwareModel {
        let mut m = HardwareModel::default().with_coupling(match self.coupling {
            CouplingArg::Xx => Coupling::XxOnly,
            CouplingArg::XxYy => Coupling::XxPlusYy,
        });
        if let Some(s) = self.error_slope {
            m.error_slope = s;
        }
        if let Some(b) = self.error_offset {
            m.error_offset = b;
        }
        m
    }
}

#[derive(Args)]
struct DecomposeArgs {
    /// Named target: cx, cz, swap, iswap, b or id.
    #[arg(long, conflicts_with = "matrix", required_unless_present = "matrix")]
    gate: Option<String>,
    /// JSON file with a `matrix` field, or a two-qubit JSON circuit.
    #[arg(long)]
    matrix: Option<PathBuf>,
    /// Basis gates, e.g. `da:pi/16`, `db:pi/4,pi/8`, `cx`; `+` joins several.
    #[arg(long, required = true)]
    basis: Vec<String>,
    /// Where to write the plan JSON.
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[command(flatten)]
    model: ModelArgs,
}

#[derive(Args)]
struct TranspileArgs {
    /// Input circuit (OpenQASM subset or JSON).
    input: PathBuf,
    #[arg(long, required = true)]
    basis: Vec<String>,
    /// Output circuit; printed to stdout when absent.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Output format; defaults from the output extension, else JSON.
    #[arg(long, value_enum)]
    format: Option<CircuitFormatArg>,
    /// Compare dense unitaries before and after (small circuits only).
    #[arg(long)]
    check: bool,
    #[command(flatten)]
    model: ModelArgs,
}

#[derive(Args)]
struct BenchArgs {
    /// Benchmarks such as `qft:5,7`, `bv:8`, `qaoa:10`, `pauli:4`, `swap:3`.
    #[arg(required = true)]
    benchmarks: Vec<String>,
    /// One instruction set per flag; `+` joins gates within a set.
    #[arg(long, required = true)]
    basis: Vec<String>,
    #[arg(long, value_enum, default_value = "csv")]
    format: ReportFormat,
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[command(flatten)]
    weights: WeightArgs,
    #[command(flatten)]
    model: ModelArgs,
}

#[derive(Args)]
struct WeightArgs {
    #[arg(long, default_value_t = 1.0)]
    w_infidelity: f64,
    #[arg(long, default_value_t = 0.0)]
    w_latency: f64,
    #[arg(long, default_value_t = 0.0)]
    w_count: f64,
    /// Score added per distinct basis gate in a set.
    #[arg(long, default_value_t = 0.0)]
    penalty: f64,
}

impl WeightArgs {
    fn weights(&self) -> ObjectiveWeights {
        ObjectiveWeights { infidelity: self.w_infidelity, latency: self.w_latency, basis_count: self.w_count }
    }
}

#[derive(Args)]
struct DesignArgs {
    #[arg(required = true)]
    benchmarks: Vec<String>,
    /// Basis sets or ranges such as `da:pi/64..pi/4@100` or
    /// `db:pi/4,pi/32..pi/4@8`; repeatable.
    #[arg(long)]
    grid: Vec<String>,
    /// Only print the best `top` configurations.
    #[arg(long)]
    top: Option<usize>,
    #[arg(long, value_enum, default_value = "csv")]
    format: ReportFormat,
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[command(flatten)]
    weights: WeightArgs,
    #[command(flatten)]
    model: ModelArgs,
}

#[derive(Args)]
struct VerifyArgs {
    /// Plan JSON written by `decompose`.
    #[arg(long, conflicts_with = "circuits", required_unless_present = "circuits")]
    plan: Option<PathBuf>,
    /// Two circuits to compare as dense unitaries.
    #[arg(long, num_args = 2, value_names = ["LHS", "RHS"])]
    circuits: Vec<PathBuf>,
    #[arg(long)]
    tol: Option<f64>,
}

enum Failure {
    /// Bad flags or unreadable input: exit 2.
    Usage(String),
    /// A verification distance exceeded its tolerance: exit 1.
    Mismatch(String),
}

impl From<cartan_synth::Error> for Failure {
    fn from(e: cartan_synth::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))
}

fn write_or_print(path: Option<&Path>, text: &str) -> Outcome {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| usage(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            if !text.ends_with('\n') {
                println!();
            }
            Ok(())
        }
    }
}

fn bases(specs: &[String]) -> Result<Vec<BasisGate>, Failure> {
    let mut out = Vec::new();
    for s in specs {
        out.extend(parse::basis_set(s).map_err(usage)?);
    }
    Ok(out)
}

fn benchmarks(specs: &[String], seed: u64) -> Result<Vec<Benchmark>, Failure> {
    let mut out = Vec::new();
    for s in specs {
        out.extend(parse::benchmarks(s, seed).map_err(usage)?);
    }
    Ok(out)
}

fn load_target(args: &DecomposeArgs) -> Result<C4x4, Failure> {
    if let Some(g) = &args.gate {
        return parse::named_gate(g).map_err(usage);
    }
    let path = args.matrix.as_ref().expect("clap enforces --gate or --matrix");
    let text = read(path)?;
    let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    if let Some(m) = value.get("matrix") {
        let m: C4x4 = serde_json::from_value(m.clone()).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        return Ok(m);
    }
    let c = parse_circuit(&text)?;
    if c.n_qubits != 2 {
        return Err(usage(format!("{}: expected a two-qubit circuit, got {} qubits", path.display(), c.n_qubits)));
    }
    let u = circuit_unitary(&c)?;
    let pairs: Vec<[f64; 2]> = u.data.iter().map(|z| [z.re, z.im]).collect();
    Ok(C4x4::from_pairs(&pairs)?)
}

fn decompose(args: DecomposeArgs) -> Outcome {
    let target = load_target(&args)?;
    let bases = bases(&args.basis)?;
    let model = args.model.model();
    let start = Instant::now();
    let plan = compile_2q_mixed(&target, &bases, args.model.objective.into(), &model)?;
    let elapsed = start.elapsed();
    let bound = bases.iter().map(|b| lower_bound(&plan.target_coord, b).n_lower).min().unwrap_or(0);
    let c = plan.target_coord;
    println!("target_coord: [{:?}, {:?}, {:?}]", c.x, c.y, c.z);
    println!("basis_count: {}", plan.basis_count);
    println!("invocations: {:?}", plan.invocations());
    println!("lower_bound: {bound}");
    println!("residual: {:e}", plan.residual_achieved);
    println!("compile_us: {:.1}", elapsed.as_secs_f64() * 1e6);
    if let Some(p) = &args.output {
        let json = serde_json::to_string_pretty(&plan).map_err(|e| usage(e.to_string()))?;
        write_or_print(Some(p), &json)?;
    }
    Ok(())
}

fn dense_distance(a: &Circuit, b: &Circuit) -> Result<f64, Failure> {
    if a.n_qubits != b.n_qubits {
        return Err(usage(format!("qubit counts differ: {} vs {}", a.n_qubits, b.n_qubits)));
    }
    if a.n_qubits > MAX_DENSE_QUBITS {
        return Err(usage(format!("dense comparison is limited to {MAX_DENSE_QUBITS} qubits")));
    }
    Ok(circuit_unitary(a)?.distance_up_to_phase(&circuit_unitary(b)?))
}

fn transpile(args: TranspileArgs) -> Outcome {
    let circuit = parse_circuit(&read(&args.input)?)?;
    let bases = bases(&args.basis)?;
    let model = args.model.model();
    let (out, report) = transpile_circuit(&circuit, &bases, args.model.objective.into(), &model)?;
    let format = match args.format {
        Some(CircuitFormatArg::Qasm) => CircuitFormat::QasmSubset,
        Some(CircuitFormatArg::Json) => CircuitFormat::Json,
        None if args.output.as_ref().is_some_and(|p| p.extension().is_some_and(|e| e == "qasm")) => {
            CircuitFormat::QasmSubset
        }
        None => CircuitFormat::Json,
    };
    let text = emit_circuit(&out, format)?;
    let distance = if args.check { Some(dense_distance(&circuit, &out)?) } else { None };
    match &args.output {
        Some(p) => write_or_print(Some(p), &text)?,
        None => write_or_print(None, &text)?,
    }
    let summary = serde_json::to_string(&report).map_err(|e| usage(e.to_string()))?;
    eprintln!("report: {summary}");
    if let Some(d) = distance {
        eprintln!("dense_distance: {d:e}");
        if d > CIRCUIT_TOL {
            return Err(Failure::Mismatch(format!("transpiled circuit differs by {d:e}")));
        }
    }
    Ok(())
}

fn render(rows: &[ReportRow], format: ReportFormat) -> Result<String, Failure> {
    Ok(match format {
        ReportFormat::Csv => report_csv(rows)?,
        ReportFormat::Json => report_json(rows)?,
    })
}

fn bench(args: BenchArgs) -> Outcome {
    let benches = benchmarks(&args.benchmarks, args.seed)?;
    let model = args.model.model();
    let weights = args.weights.weights();
    let mut rows = Vec::new();
    for spec in &args.basis {
        let mut iset = InstructionSet::new(parse::basis_set(spec).map_err(usage)?)?;
        iset.calibration_penalty = args.weights.penalty;
        rows.extend(evaluate_instruction_set(&benches, &iset, &model, &weights, args.model.objective.into())?);
    }
    write_or_print(args.output.as_deref(), &render(&rows, args.format)?)
}

fn design(args: DesignArgs) -> Outcome {
    let benches = benchmarks(&args.benchmarks, args.seed)?;
    let mut grid = Vec::new();
    for spec in &args.grid {
        for set in parse::grid(spec).map_err(usage)? {
            let mut iset = InstructionSet::new(set)?;
            iset.calibration_penalty = args.weights.penalty;
            grid.push(iset);
        }
    }
    if grid.is_empty() {
        return Err(usage("the design grid is empty; pass at least one --grid"));
    }
    let model = args.model.model();
    let start = Instant::now();
    let mut rows = sweep_design_space(&benches, &grid, &model, &args.weights.weights(), args.model.objective.into())?;
    eprintln!("evaluated {} configurations in {:.3} s", grid.len(), start.elapsed().as_secs_f64());
    if let Some(k) = args.top {
        rows.truncate(k);
    }
    write_or_print(args.output.as_deref(), &render(&rows, args.format)?)
}

fn verify(args: VerifyArgs) -> Outcome {
    let (distance, tol) = if let Some(p) = &args.plan {
        let plan: SynthesisPlan =
            serde_json::from_str(&read(p)?).map_err(|e| usage(format!("{}: {e}", p.display())))?;
        if plan.schema != 1 {
            return Err(usage(format!("unsupported plan schema {}", plan.schema)));
        }
        (plan.assemble().distance_up_to_phase(&plan.target), args.tol.unwrap_or(PLAN_TOL))
    } else {
        let a = parse_circuit(&read(&args.circuits[0])?)?;
        let b = parse_circuit(&read(&args.circuits[1])?)?;
        (dense_distance(&a, &b)?, args.tol.unwrap_or(CIRCUIT_TOL))
    };
    println!("distance: {distance:e}");
    if distance < tol {
        println!("ok");
        Ok(())
    } else {
        Err(Failure::Mismatch(format!("distance {distance:e} exceeds tolerance {tol:e}")))
    }
}

fn configure_workers() -> Outcome {
    let Ok(v) = std::env::var(WORKERS_ENV) else {
        return Ok(());
    };
    let n: usize = v.parse().map_err(|_| usage(format!("{WORKERS_ENV} must be a positive integer, got `{v}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| usage(format!("cannot start {n} workers: {e}")))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_workers().and_then(|()| match cli.command {
        Command::Decompose(a) => decompose(a),
        Command::Transpile(a) => transpile(a),
        Command::Bench(a) => bench(a),
        Command::Design(a) => design(a),
        Command::Verify(a) => verify(a),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Mismatch(m)) => {
            eprintln!("verification failed: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}
