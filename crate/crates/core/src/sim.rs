//! Strong simulation: the probability of a computational-basis measurement
//! outcome, computed as the weighted model count of the sandwich formula
//!
//! ```text
//! F_|0>(q0) ^ F_C(q0 -> q1) ^ F_P(q1) ^ F_Cdag(q1 -> q2) ^ F_<0|(q2)
//! ```
//!
//! The bra side is realized by encoding `dagger(c)`; adjoint gates carry the
//! conjugated weights of their ket-side counterparts, so the count equals
//! `<0| Cdag P C |0>`.

use crate::circuit::{dagger, Circuit};
use crate::cnf::WeightedCnf;
use crate::counter::{run_solver, CountResult, SolverKind};
use crate::encoder::{encode_bra, encode_circuit, encode_projector, encode_zero_state, ProjectorSpec};
use crate::Error;

const REAL_TOLERANCE: f64 = 1e-9;

/// Per-qubit measurement symbols over `{I, 0, 1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeasurementSpec(ProjectorSpec);

impl MeasurementSpec {
    pub fn parse(s: &str) -> Result<MeasurementSpec, Error> {
        Ok(MeasurementSpec(ProjectorSpec::parse(s)?))
    }

    pub fn all_identity(n: usize) -> MeasurementSpec {
        MeasurementSpec(ProjectorSpec::identity(n))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn projector(&self) -> &ProjectorSpec {
        &self.0
    }
}

/// Builds the sandwich formula whose count is the outcome probability.
pub fn build_sandwich(c: &Circuit, m: &MeasurementSpec) -> Result<WeightedCnf, Error> {
    if m.len() != c.qubits() {
        return Err(Error::SpecLength { expected: c.qubits(), got: m.len() });
    }
    let mut f = WeightedCnf::new();
    let q0 = encode_zero_state(&mut f, c.qubits())?;
    let ket = encode_circuit(&mut f, c, &q0)?;
    let q1 = encode_projector(&mut f, m.projector(), &ket.frame)?;
    let bra = encode_circuit(&mut f, &dagger(c), &q1)?;
    encode_bra(&mut f, &bra.frame, &"0".repeat(c.qubits()))?;
    Ok(f)
}

/// Probability plus the raw count and solver statistics.
#[derive(Debug, Clone, Copy)]
pub struct SimOutcome {
    pub probability: f64,
    pub count: CountResult,
}

/// Probability of observing an outcome compatible with `m` after running `c`
/// on `|0..0>`.
pub fn simulate(c: &Circuit, m: &MeasurementSpec) -> Result<f64, Error> {
    Ok(simulate_full(c, m, SolverKind::Dpll)?.probability)
}

pub fn simulate_full(
    c: &Circuit,
    m: &MeasurementSpec,
    solver: SolverKind,
) -> Result<SimOutcome, Error> {
    let f = build_sandwich(c, m)?;
    let count = run_solver(&f, solver)?;
    let value = count.value;
    if value.im.abs() > REAL_TOLERANCE {
        return Err(Error::ImaginaryResidue(value.im));
    }
    if value.re < -REAL_TOLERANCE || value.re > 1.0 + REAL_TOLERANCE {
        return Err(Error::ValueRange(format!(
            "probability {} outside [0, 1] beyond tolerance",
            value.re
        )));
    }
    Ok(SimOutcome { probability: value.re.clamp(0.0, 1.0), count })
}
