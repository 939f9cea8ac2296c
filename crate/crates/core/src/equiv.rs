//! Equivalence checking via the cyclic encoding.
//!
//! `F_U(q0 -> q1) ^ F_Vdag(q1 -> q2) ^ F_I(q0, q2)` with the initial frame
//! left unconstrained counts to `Tr(U Vdag)`; the Jamiolkowski fidelity
//! `|Tr(U Vdag)|^2 / 4^n` then decides (approximate) equivalence against a
//! threshold `1 - epsilon`. Fidelity is insensitive to global phase, so the
//! `rz` phase convention documented in [`crate::circuit`] does not affect
//! verdicts.

use num_complex::Complex64;

use crate::circuit::{dagger, Circuit};
use crate::cnf::WeightedCnf;
use crate::counter::{run_solver, CountResult, SolverKind};
use crate::encoder::{encode_circuit, identify_frames, QubitFrame};
use crate::Error;

/// Fidelity slack treated as exact equality (`epsilon = 0`).
pub const EXACT_TOLERANCE: f64 = 1e-9;

/// Outcome of an equivalence query.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquivVerdict {
    pub fidelity: f64,
    pub equivalent: bool,
    pub epsilon: f64,
    pub trace_value: Complex64,
}

/// Builds the cyclic encoding of `u` against `v`.
pub fn build_cyclic(u: &Circuit, v: &Circuit) -> Result<WeightedCnf, Error> {
    if u.qubits() != v.qubits() {
        return Err(Error::QubitMismatch { left: u.qubits(), right: v.qubits() });
    }
    let mut f = WeightedCnf::new();
    let q0 = QubitFrame::fresh(&mut f, u.qubits());
    let enc_u = encode_circuit(&mut f, u, &q0)?;
    let enc_v = encode_circuit(&mut f, &dagger(v), &enc_u.frame)?;
    identify_frames(&mut f, &q0, &enc_v.frame);
    Ok(f)
}

/// `Tr(U Vdag)` as a weighted model count.
pub fn cyclic_trace(u: &Circuit, v: &Circuit) -> Result<Complex64, Error> {
    Ok(cyclic_trace_full(u, v, SolverKind::Dpll)?.0)
}

pub fn cyclic_trace_full(
    u: &Circuit,
    v: &Circuit,
    solver: SolverKind,
) -> Result<(Complex64, CountResult), Error> {
    let f = build_cyclic(u, v)?;
    let count = run_solver(&f, solver)?;
    Ok((count.value, count))
}

/// Converts a trace into a fidelity, checking the <= 1e-9 overshoot bound
/// before clamping into `[0, 1]`.
pub fn fidelity_from_trace(trace: Complex64, n: usize) -> Result<f64, Error> {
    let dim = (1u64 << n) as f64;
    let raw = trace.norm_sqr() / (dim * dim);
    if raw > 1.0 + EXACT_TOLERANCE {
        return Err(Error::ValueRange(format!("fidelity {raw} above 1 beyond tolerance")));
    }
    Ok(raw.clamp(0.0, 1.0))
}

/// Jamiolkowski fidelity between the unitaries of two circuits.
pub fn fidelity(u: &Circuit, v: &Circuit) -> Result<f64, Error> {
    fidelity_from_trace(cyclic_trace(u, v)?, u.qubits())
}

/// Threshold for a given epsilon; `epsilon = 0` keeps a 1e-9 slack so that
/// double-precision phases can reach exact verdicts.
pub fn effective_threshold(epsilon: f64) -> f64 {
    1.0 - epsilon.max(EXACT_TOLERANCE)
}

/// Decides whether `u` and `v` are equivalent up to `epsilon`.
pub fn check_equiv(u: &Circuit, v: &Circuit, epsilon: f64) -> Result<EquivVerdict, Error> {
    Ok(check_equiv_full(u, v, epsilon, SolverKind::Dpll)?.0)
}

pub fn check_equiv_full(
    u: &Circuit,
    v: &Circuit,
    epsilon: f64,
    solver: SolverKind,
) -> Result<(EquivVerdict, CountResult), Error> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::EpsilonRange(epsilon));
    }
    let (trace, count) = cyclic_trace_full(u, v, solver)?;
    let fid = fidelity_from_trace(trace, u.qubits())?;
    let verdict = EquivVerdict {
        fidelity: fid,
        equivalent: fid >= effective_threshold(epsilon),
        epsilon,
        trace_value: trace,
    };
    Ok((verdict, count))
}
