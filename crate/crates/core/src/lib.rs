//! Quantum circuit analysis by exact complex-weighted model counting.
//!
//! Circuits are parsed from OpenQASM 2.0 into a gate-level IR and compiled
//! into CNF formulas whose literals carry complex weights. The weighted model
//! count of such a formula recovers amplitudes, measurement probabilities,
//! operator traces and fidelities, which the four engines instrument:
//!
//! * [`sim`] — strong simulation (probability of a basis measurement outcome),
//! * [`equiv`] — exact and approximate circuit equivalence,
//! * [`mod@verify`] — Hoare triples over diagonal basis projectors,
//! * [`synth`] — depth-optimal resynthesis over a chosen gate set.
//!
//! Counting is done in-process by a brute-force enumerator and a DPLL-style
//! search with component caching ([`counter`]); a dense statevector simulator
//! ([`statevector`]) serves as an independent cross-check for every engine.

pub mod circuit;
pub mod cnf;
pub mod counter;
pub mod encoder;
pub mod equiv;
mod parallel;
pub mod qasm;
pub mod random;
pub mod sim;
pub mod statevector;
pub mod synth;
pub mod verify;

pub use circuit::{dagger, layers, Circuit, Gate, GateKind, GateRegistry};
pub use cnf::{Clause, Literal, WeightedCnf};
pub use counter::{count, count_bruteforce, CountResult, SolverKind};
pub use equiv::{check_equiv, cyclic_trace, fidelity, EquivVerdict};
pub use sim::{simulate, MeasurementSpec};
pub use synth::{synthesize, GateSet, SynthesisProblem, SynthesisResult};
pub use verify::{verify, ConditionSpec};

/// Errors shared by the IR, encoders, counters and engines.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Qasm(#[from] qasm::ParseError),
    #[error(transparent)]
    Cnf(#[from] cnf::CnfError),
    #[error("invalid gate: {0}")]
    InvalidGate(String),
    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),
    #[error("spec has length {got}, circuit has {expected} qubits")]
    SpecLength { expected: usize, got: usize },
    #[error("invalid spec symbol '{0}' (expected one of I, 0, 1)")]
    SpecSymbol(char),
    #[error("invalid condition: {0}")]
    Condition(String),
    #[error("circuits act on different qubit counts ({left} vs {right})")]
    QubitMismatch { left: usize, right: usize },
    #[error("epsilon {0} out of range [0, 1]")]
    EpsilonRange(f64),
    #[error("formula has {vars} variables, brute-force limit is {limit}")]
    VarLimit { vars: u32, limit: u32 },
    #[error("circuit has {qubits} qubits, limit is {limit}")]
    QubitLimit { qubits: usize, limit: usize },
    #[error("count has imaginary residue {0:e}, expected a real value")]
    ImaginaryResidue(f64),
    #[error("{0}")]
    ValueRange(String),
    #[error("gate definition file: {0}")]
    GateDefs(String),
    #[error("synthesis: {0}")]
    Synth(String),
}
