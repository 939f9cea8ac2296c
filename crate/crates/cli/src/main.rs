//! `qcount` — circuit analysis by weighted model counting.
//!
//! One-shot batch subcommands; every run prints a stable `RESULT ...`
//! key=value line for scripting. Exit codes: 0 success / positive verdict,
//! 1 negative verdict, 2 usage or input error.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use qcount_core::circuit::GateRegistry;
use qcount_core::counter::{run_solver, CountResult, SolverKind};
use qcount_core::equiv;
use qcount_core::qasm;
use qcount_core::sim;
use qcount_core::synth;
use qcount_core::verify;
use qcount_core::{Circuit, ConditionSpec, GateSet, MeasurementSpec, SynthesisProblem, WeightedCnf};

#[derive(Parser)]
#[command(name = "qcount", version, about = "Quantum circuit analysis by weighted model counting")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Solver {
    Dpll,
    Bruteforce,
}

impl From<Solver> for SolverKind {
    fn from(s: Solver) -> SolverKind {
        match s {
            Solver::Dpll => SolverKind::Dpll,
            Solver::Bruteforce => SolverKind::BruteForce,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Probability of a basis measurement outcome on a circuit
    Simulate {
        circuit: PathBuf,
        /// Per-qubit symbols over {I, 0, 1}, e.g. "0II1"
        #[arg(long)]
        measure: String,
        /// Write the sandwich formula to a .wcnf file instead of solving
        #[arg(long, value_name = "PATH")]
        emit_cnf: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "dpll")]
        solver: Solver,
        #[arg(long, value_name = "PATH")]
        gate_defs: Option<PathBuf>,
    },
    /// Decide (approximate) equivalence of two circuits
    Equiv {
        u: PathBuf,
        v: PathBuf,
        #[arg(long, default_value_t = 0.0)]
        epsilon: f64,
        #[arg(long, value_name = "PATH")]
        emit_cnf: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "dpll")]
        solver: Solver,
        #[arg(long, value_name = "PATH")]
        gate_defs: Option<PathBuf>,
    },
    /// Decide the Hoare triple {pre} circuit {post}
    Verify {
        circuit: PathBuf,
        /// Precondition, e.g. `[4:0]` or `[]`
        #[arg(long)]
        pre: String,
        /// Postcondition, same syntax
        #[arg(long)]
        post: String,
        /// Compare against a second count of F_P(q,q) instead of 2^(n-k)
        #[arg(long)]
        two_counts: bool,
        #[arg(long, value_name = "PATH")]
        emit_cnf: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "dpll")]
        solver: Solver,
        #[arg(long, value_name = "PATH")]
        gate_defs: Option<PathBuf>,
    },
    /// Depth-optimal synthesis of a target circuit over a gate set
    Synth {
        target: PathBuf,
        /// Comma-separated gate list, e.g. "H,T,CX,CSX" or "rz(pi/8),h"
        #[arg(long)]
        gates: String,
        #[arg(long, default_value_t = 0.0)]
        epsilon: f64,
        #[arg(long)]
        max_depth: usize,
        /// Export the final parametric instance with `c max` annotations
        #[arg(long, value_name = "PATH")]
        export_maxcnf: Option<PathBuf>,
        #[arg(long, value_name = "PATH")]
        gate_defs: Option<PathBuf>,
    },
    /// Compile a circuit and measurement spec into a .wcnf file
    Encode {
        circuit: PathBuf,
        /// Defaults to the all-identity spec
        #[arg(long)]
        measure: Option<String>,
        #[arg(short, long, value_name = "PATH")]
        output: PathBuf,
        #[arg(long, value_name = "PATH")]
        gate_defs: Option<PathBuf>,
    },
    /// Count a .wcnf file; prints "re im" and statistics
    Count {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "dpll")]
        solver: Solver,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn load_registry(path: &Option<PathBuf>) -> Result<GateRegistry> {
    match path {
        None => Ok(GateRegistry::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .with_context(|| format!("reading {}", p.display()))?;
            GateRegistry::parse(&text).map_err(Into::into)
        }
    }
}

fn load_circuit(path: &Path, registry: &GateRegistry) -> Result<Circuit> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    qasm::parse_with(&text, registry)
        .with_context(|| format!("parsing {}", path.display()))
}

struct Report {
    cmd: &'static str,
    fields: Vec<(String, String)>,
}

impl Report {
    fn new(cmd: &'static str) -> Report {
        Report { cmd, fields: Vec::new() }
    }

    fn field(&mut self, key: &str, value: impl Into<String>) -> &mut Self {
        self.fields.push((key.to_string(), value.into()));
        self
    }

    fn stats(&mut self, count: &CountResult) -> &mut Self {
        self.field("decisions", count.decisions.to_string())
            .field("propagations", count.propagations.to_string())
            .field("cache_hits", count.cache_hits.to_string())
    }

    fn elapsed(&mut self, t0: Instant) -> &mut Self {
        self.field("time_s", format!("{:.6}", t0.elapsed().as_secs_f64()))
    }

    fn print(&self) {
        let mut line = format!("RESULT cmd={}", self.cmd);
        for (k, v) in &self.fields {
            let _ = write!(line, " {k}={v}");
        }
        println!("{line}");
    }
}

fn emit_formula(f: &WeightedCnf, path: &Path, cmd: &'static str, t0: Instant) -> Result<ExitCode> {
    std::fs::write(path, f.to_wdimacs())
        .with_context(|| format!("writing {}", path.display()))?;
    let mut report = Report::new(cmd);
    report
        .field("emitted", path.display().to_string())
        .field("vars", f.num_vars().to_string())
        .field("clauses", f.clauses().len().to_string())
        .elapsed(t0)
        .print();
    Ok(ExitCode::SUCCESS)
}

fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::Simulate { circuit, measure, emit_cnf, solver, gate_defs } => {
            let t0 = Instant::now();
            let registry = load_registry(&gate_defs)?;
            let c = load_circuit(&circuit, &registry)?;
            let m = MeasurementSpec::parse(&measure)?;
            if let Some(path) = emit_cnf {
                let f = sim::build_sandwich(&c, &m)?;
                return emit_formula(&f, &path, "simulate", t0);
            }
            let outcome = sim::simulate_full(&c, &m, solver.into())?;
            println!("{:.11e}", outcome.probability);
            Report::new("simulate")
                .field("file", circuit.display().to_string())
                .field("measure", &measure)
                .field("probability", format!("{:.11e}", outcome.probability))
                .field("re", format!("{:.16e}", outcome.count.value.re))
                .field("im", format!("{:.16e}", outcome.count.value.im))
                .stats(&outcome.count)
                .elapsed(t0)
                .print();
            Ok(ExitCode::SUCCESS)
        }
        Command::Equiv { u, v, epsilon, emit_cnf, solver, gate_defs } => {
            let t0 = Instant::now();
            let registry = load_registry(&gate_defs)?;
            let cu = load_circuit(&u, &registry)?;
            let cv = load_circuit(&v, &registry)?;
            if let Some(path) = emit_cnf {
                let f = equiv::build_cyclic(&cu, &cv)?;
                return emit_formula(&f, &path, "equiv", t0);
            }
            let (verdict, count) = equiv::check_equiv_full(&cu, &cv, epsilon, solver.into())?;
            println!("fidelity={} equivalent={}", verdict.fidelity, verdict.equivalent);
            Report::new("equiv")
                .field("u", u.display().to_string())
                .field("v", v.display().to_string())
                .field("epsilon", epsilon.to_string())
                .field("fidelity", verdict.fidelity.to_string())
                .field("equivalent", verdict.equivalent.to_string())
                .field("trace_re", format!("{:.16e}", verdict.trace_value.re))
                .field("trace_im", format!("{:.16e}", verdict.trace_value.im))
                .stats(&count)
                .elapsed(t0)
                .print();
            Ok(if verdict.equivalent { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Verify { circuit, pre, post, two_counts, emit_cnf, solver, gate_defs } => {
            let t0 = Instant::now();
            let registry = load_registry(&gate_defs)?;
            let c = load_circuit(&circuit, &registry)?;
            let p = ConditionSpec::parse(&pre, c.qubits())?;
            let q = ConditionSpec::parse(&post, c.qubits())?;
            if let Some(path) = emit_cnf {
                let f = verify::build_verify_formula(&p, &c, &q)?;
                return emit_formula(&f, &path, "verify", t0);
            }
            let outcome = verify::verify_full(&p, &c, &q, solver.into(), two_counts)?;
            println!("{}", if outcome.holds { "True" } else { "False" });
            Report::new("verify")
                .field("file", circuit.display().to_string())
                .field("pre", &pre)
                .field("post", &post)
                .field("holds", outcome.holds.to_string())
                .field("lhs_re", format!("{:.16e}", outcome.lhs.re))
                .field("lhs_im", format!("{:.16e}", outcome.lhs.im))
                .field("rhs", format!("{:.16e}", outcome.rhs.re))
                .stats(&outcome.count)
                .elapsed(t0)
                .print();
            Ok(if outcome.holds { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Synth { target, gates, epsilon, max_depth, export_maxcnf, gate_defs } => {
            let t0 = Instant::now();
            let registry = load_registry(&gate_defs)?;
            let c = load_circuit(&target, &registry)?;
            let kinds = gates
                .split(',')
                .map(|s| qasm::parse_gate_spec(s, &registry))
                .collect::<Result<Vec<_>, _>>()?;
            let gate_set = GateSet::new(kinds)?;
            let problem =
                SynthesisProblem { target: c, gate_set, epsilon, max_depth };
            let result = synth::synthesize(&problem)?;
            if let Some(path) = export_maxcnf {
                let depth = result.depth.max(1);
                let (f, groups) = synth::build_parametric_instance(
                    &problem.target,
                    &problem.gate_set,
                    depth,
                )?;
                let text = synth::export_maxcount(&f, &groups)?;
                std::fs::write(&path, text)
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            print!("{}", qasm::print(&result.circuit));
            println!(
                "depth={} fidelity={} iterations={}",
                result.depth, result.fidelity, result.iterations
            );
            let candidates: u64 = result.iteration_stats.iter().map(|s| s.candidates).sum();
            Report::new("synth")
                .field("target", target.display().to_string())
                .field("gates", &gates)
                .field("epsilon", epsilon.to_string())
                .field("depth", result.depth.to_string())
                .field("fidelity", result.fidelity.to_string())
                .field("iterations", result.iterations.to_string())
                .field("success", result.success.to_string())
                .field("candidates", candidates.to_string())
                .elapsed(t0)
                .print();
            Ok(if result.success { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Encode { circuit, measure, output, gate_defs } => {
            let t0 = Instant::now();
            let registry = load_registry(&gate_defs)?;
            let c = load_circuit(&circuit, &registry)?;
            let m = match measure {
                Some(s) => MeasurementSpec::parse(&s)?,
                None => MeasurementSpec::all_identity(c.qubits()),
            };
            let f = sim::build_sandwich(&c, &m)?;
            emit_formula(&f, &output, "encode", t0)
        }
        Command::Count { file, solver } => {
            let t0 = Instant::now();
            let text = std::fs::read_to_string(&file)
                .with_context(|| format!("reading {}", file.display()))?;
            let (f, _max) = WeightedCnf::from_wdimacs(&text)?;
            let count = run_solver(&f, solver.into())?;
            println!("{:.16e} {:.16e}", count.value.re, count.value.im);
            Report::new("count")
                .field("file", file.display().to_string())
                .field("re", format!("{:.16e}", count.value.re))
                .field("im", format!("{:.16e}", count.value.im))
                .stats(&count)
                .elapsed(t0)
                .print();
            Ok(ExitCode::SUCCESS)
        }
    }
}
