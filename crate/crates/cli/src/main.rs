//! Command-line front end: solve runs, span censuses, invariant checks and
//! circuit export.
//!
//! Exit codes: 0 success, 2 bad usage, 3 input error, 4 budget guard,
//! 5 verification failure.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use quper::circuit::{build_ansatz, circuit_stats, lower_to_linear_topology, synthesize_params, AnsatzKind, Circuit, SolverAnsatz};
use quper::dsm::{birkhoff_decompose, extract_dsm, DsmJob, DEFAULT_BIRKHOFF_TOL};
use quper::experiments::{
    census_csv, run_census, run_census_sweep, run_solve, run_verify, CensusConfig, CensusMode, Fault, InstanceSpec,
    SolveConfig, VerifyConfig,
};
use quper::group::recognize_affine;
use quper::optimizer::QuperConfig;
use quper::{Permutation, QuperError, Result};

const VERIFY_FAILED: u8 = 5;

#[derive(Parser)]
#[command(name = "quper", version, about = "Permutation-spanning circuits and the variational QAP/GIP solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a quadratic assignment instance.
    SolveQap(SolveQapArgs),
    /// Solve a graph isomorphism instance.
    SolveGip(SolveGipArgs),
    /// Count the permutations an ansatz reaches at binary parameters.
    Span(SpanArgs),
    /// Run the group, gate and DSM invariant suites.
    Verify(VerifyArgs),
    /// Print an ansatz, or the circuit realizing an affine permutation.
    Compile(CompileArgs),
    /// Extract the DSM of a circuit at given parameters.
    Dsm(DsmArgs),
}

#[derive(Args)]
struct SolverArgs {
    /// bruhat, borel or sel.
    #[arg(long, default_value = "bruhat")]
    ansatz: String,
    /// Largest number of ancilla qubits.
    #[arg(long, default_value_t = 0)]
    ancilla: usize,
    /// Iterations per ancilla level.
    #[arg(long, default_value_t = 1000)]
    iters: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    lr: Option<f64>,
    /// Finite-difference step.
    #[arg(long, default_value_t = 1e-5)]
    h: f64,
    /// Random-order projection trials per iteration.
    #[arg(long, default_value_t = 50)]
    trials: usize,
    /// Report JSON path (stdout otherwise).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-iteration JSONL trace path.
    #[arg(long)]
    trace: Option<PathBuf>,
}

impl SolverArgs {
    fn config(&self, default_lr: f64) -> Result<QuperConfig> {
        Ok(QuperConfig {
            ansatz: self.ansatz.parse::<SolverAnsatz>()?,
            m_max: self.ancilla,
            iterations: self.iters,
            seed: self.seed,
            lr: self.lr.unwrap_or(default_lr),
            h: self.h,
            projection_trials: self.trials,
            ..QuperConfig::default()
        })
    }
}

#[derive(Args)]
struct SolveQapArgs {
    /// QAPLIB .dat file; a .sln next to it supplies the optimum.
    #[arg(long, conflicts_with = "random")]
    instance: Option<PathBuf>,
    /// Random instance: size and seed.
    #[arg(long, num_args = 2, value_names = ["N", "SEED"])]
    random: Option<Vec<u64>>,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args)]
struct SolveGipArgs {
    /// Random planted instance with this many vertices.
    #[arg(long, conflicts_with = "graphs")]
    random: Option<usize>,
    /// Draw the planted permutation from the affine span.
    #[arg(long, requires = "random")]
    span_restricted: bool,
    #[arg(long, default_value_t = 0.5)]
    edge_prob: f64,
    /// Seed of the random graph (defaults to --seed).
    #[arg(long)]
    instance_seed: Option<u64>,
    /// Two graph files (edge list, or adjacency .csv).
    #[arg(long, num_args = 2, value_names = ["A", "B"])]
    graphs: Option<Vec<PathBuf>>,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args)]
struct SpanArgs {
    /// System qubits.
    #[arg(long)]
    q: Option<usize>,
    #[arg(long, default_value_t = 0)]
    ancilla: usize,
    /// Ansatz family (lx, bruhat, borel, weyl, sel, xlayer).
    #[arg(long, default_value = "lx", conflicts_with = "circuit")]
    ansatz: String,
    /// Circuit text file instead of a built-in ansatz.
    #[arg(long)]
    circuit: Option<PathBuf>,
    #[arg(long)]
    sel_layers: Option<usize>,
    /// `exhaustive`, or `sample N`.
    #[arg(long, num_args = 1..=2, value_names = ["MODE", "N"], default_values = ["exhaustive"])]
    mode: Vec<String>,
    /// Vary only the first this-many parameters.
    #[arg(long)]
    params: Option<usize>,
    /// One row per prefix length up to --params.
    #[arg(long)]
    sweep: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Largest exhaustive census, as a power of two.
    #[arg(long, default_value_t = 24)]
    budget: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 3)]
    q: usize,
    /// Include the four-qubit enumerations.
    #[arg(long)]
    deep: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Corrupt the x gate matrix (test hook).
    #[arg(long, hide = true)]
    inject_fault: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CompileArgs {
    #[arg(long, default_value = "lx")]
    ansatz: String,
    #[arg(long, required_unless_present = "permutation")]
    q: Option<usize>,
    #[arg(long)]
    sel_layers: Option<usize>,
    /// Synthesize this affine permutation (one-line notation) instead.
    #[arg(long)]
    permutation: Option<String>,
    /// Rewrite for nearest-neighbour connectivity.
    #[arg(long)]
    lower: bool,
    /// Print parameter count and depth as JSON instead of the circuit.
    #[arg(long)]
    stats: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DsmArgs {
    #[arg(long)]
    circuit: PathBuf,
    #[arg(long, default_value_t = 0)]
    ancilla: usize,
    /// Comma or space separated angles; `pi` multiples like `0.5pi` accepted.
    #[arg(long, allow_hyphen_values = true)]
    theta: String,
    /// Print Birkhoff terms as JSON instead of the CSV matrix.
    #[arg(long)]
    birkhoff: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn write_or_print(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| QuperError::Io(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn solve(spec: InstanceSpec, solver: &SolverArgs, default_lr: f64) -> Result<()> {
    let cfg = SolveConfig { instance: spec, solver: solver.config(default_lr)? };
    let (report, trace) = run_solve(&cfg)?;
    if let Some(p) = &solver.trace {
        write_or_print(Some(p), &trace.to_jsonl())?;
    }
    write_or_print(solver.out.as_deref(), &to_json(&report))?;
    eprintln!("best {} (random baseline {})", report.best_value, report.baseline_value);
    if let Some(gap) = report.relative_gap {
        eprintln!("relative optimality gap {gap}");
    }
    Ok(())
}

fn solve_qap(a: &SolveQapArgs) -> Result<()> {
    let spec = match (&a.instance, &a.random) {
        (Some(path), None) => InstanceSpec::Qaplib { path: path.clone() },
        (None, Some(r)) => InstanceSpec::RandomQap { n: r[0] as usize, seed: r[1] },
        _ => return Err(QuperError::InvalidArgument("give exactly one of --instance or --random".into())),
    };
    solve(spec, &a.solver, QuperConfig::default().lr)
}

fn solve_gip(a: &SolveGipArgs) -> Result<()> {
    let spec = match (a.random, &a.graphs) {
        (Some(n), None) => InstanceSpec::RandomGip {
            n,
            seed: a.instance_seed.unwrap_or(a.solver.seed),
            edge_prob: a.edge_prob,
            span_restricted: a.span_restricted,
        },
        (None, Some(g)) => InstanceSpec::Graphs { a: g[0].clone(), b: g[1].clone() },
        _ => return Err(QuperError::InvalidArgument("give exactly one of --random or --graphs".into())),
    };
    solve(spec, &a.solver, 0.4)
}

fn read_circuit(path: &Path) -> Result<Circuit> {
    let text = fs::read_to_string(path).map_err(|e| QuperError::Io(format!("{}: {e}", path.display())))?;
    Circuit::parse_text(&text)
}

fn span(a: &SpanArgs) -> Result<()> {
    let circuit = match &a.circuit {
        Some(path) => read_circuit(path)?,
        None => {
            let q = a.q.ok_or_else(|| QuperError::InvalidArgument("--q is required without --circuit".into()))?;
            build_ansatz(a.ansatz.parse::<AnsatzKind>()?, q + a.ancilla, a.sel_layers)?
        }
    };
    let mode = match a.mode.iter().map(String::as_str).collect::<Vec<_>>().as_slice() {
        ["exhaustive"] => CensusMode::Exhaustive,
        ["sample", n] => CensusMode::Sample(
            n.parse().map_err(|_| QuperError::InvalidArgument(format!("bad sample count {n:?}")))?,
        ),
        other => return Err(QuperError::InvalidArgument(format!("unknown mode {other:?} (exhaustive | sample N)"))),
    };
    let cfg = CensusConfig { params: a.params, seed: a.seed, max_exhaustive_bits: a.budget, ..CensusConfig::new(circuit, a.ancilla, mode) };
    let rows = if a.sweep { run_census_sweep(&cfg)? } else { vec![run_census(&cfg)?] };
    write_or_print(a.out.as_deref(), &census_csv(&rows))
}

fn verify(a: &VerifyArgs) -> Result<bool> {
    let cfg = VerifyConfig {
        q_max: a.q,
        deep: a.deep,
        seed: a.seed,
        fault: a.inject_fault.then_some(Fault::CorruptX),
    };
    let report = run_verify(&cfg);
    for s in &report.suites {
        let status = if s.passed { "PASS" } else { "FAIL" };
        eprintln!("{status} {} ({} checks)", s.name, s.checks);
        if let Some(c) = &s.counterexample {
            eprintln!("  counterexample: {c}");
        }
    }
    write_or_print(a.out.as_deref(), &to_json(&report))?;
    Ok(report.passed)
}

fn compile(a: &CompileArgs) -> Result<()> {
    let (mut circuit, theta) = match &a.permutation {
        Some(text) => {
            let p: Permutation = text.parse()?;
            let map = recognize_affine(&p)?
                .ok_or_else(|| QuperError::InvalidArgument(format!("{p} is not an affine map of the basis")))?;
            let (c, theta) = synthesize_params(&map)?;
            (c, Some(theta))
        }
        None => {
            let q = a.q.expect("clap enforces --q");
            (build_ansatz(a.ansatz.parse::<AnsatzKind>()?, q, a.sel_layers)?, None)
        }
    };
    if a.lower {
        circuit = lower_to_linear_topology(&circuit);
    }
    let text = if a.stats {
        to_json(&circuit_stats(&circuit))
    } else {
        let mut text = circuit.to_text();
        if let Some(theta) = theta {
            let cells: Vec<String> = theta.iter().map(|&t| if t == 0.0 { "0".into() } else { "pi".into() }).collect();
            text.push_str(&format!("# theta {}\n", cells.join(" ")));
        }
        text
    };
    write_or_print(a.out.as_deref(), &text)
}

fn parse_angle(token: &str) -> Result<f64> {
    let bad = || QuperError::InvalidArgument(format!("bad angle {token:?}"));
    match token.strip_suffix("pi") {
        Some("") => Ok(PI),
        Some("-") => Ok(-PI),
        Some(coef) => coef.parse::<f64>().map(|c| c * PI).map_err(|_| bad()),
        None => token.parse::<f64>().map_err(|_| bad()),
    }
}

fn dsm(a: &DsmArgs) -> Result<()> {
    let circuit = read_circuit(&a.circuit)?;
    let theta = a
        .theta
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(parse_angle)
        .collect::<Result<Vec<_>>>()?;
    let d = extract_dsm(&DsmJob::new(circuit, a.ancilla, theta)?)?;
    let text = if a.birkhoff {
        let mut s = birkhoff_decompose(&d, DEFAULT_BIRKHOFF_TOL)?.to_json();
        s.push('\n');
        s
    } else {
        d.to_csv()
    };
    write_or_print(a.out.as_deref(), &text)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::SolveQap(a) => solve_qap(a).map(|_| true),
        Command::SolveGip(a) => solve_gip(a).map(|_| true),
        Command::Span(a) => span(a).map(|_| true),
        Command::Verify(a) => verify(a),
        Command::Compile(a) => compile(a).map(|_| true),
        Command::Dsm(a) => dsm(a).map(|_| true),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(VERIFY_FAILED),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
