//! Hoare-triple verification for diagonal basis projectors.
//!
//! `{P} C {Q}` holds iff `Tr(C P Cdag Q) = Tr(P)`. The left side is counted
//! from a cyclic chain realizing the trace of the operator product: a free
//! frame runs through `C`, the `Q` pins, `dagger(C)` and the `P` pins before
//! being identified with its start (`Tr(P Cdag Q C)`, a cyclic rotation of
//! the product). The right side is `2^(n-k)` for `k` pinned qubits, computed
//! analytically; `two_counts` mode counts `F_P(q, q)` instead.

use num_complex::Complex64;

use crate::circuit::{dagger, Circuit};
use crate::cnf::WeightedCnf;
use crate::counter::{run_solver, CountResult, SolverKind};
use crate::encoder::{encode_circuit, encode_projector, identify_frames, ProjSym, ProjectorSpec, QubitFrame};
use crate::Error;

const REL_TOLERANCE: f64 = 1e-9;

/// A partial assignment of qubits to bits; unconstrained qubits mean the
/// identity projector. Surface syntax: `[4:0]`, `[0:1,2:0]`, `[]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionSpec {
    constraints: Vec<(usize, bool)>,
}

impl ConditionSpec {
    pub fn identity() -> ConditionSpec {
        ConditionSpec { constraints: Vec::new() }
    }

    pub fn new(mut constraints: Vec<(usize, bool)>, n: usize) -> Result<ConditionSpec, Error> {
        constraints.sort_by_key(|&(q, _)| q);
        for (i, &(q, _)) in constraints.iter().enumerate() {
            if q >= n {
                return Err(Error::Condition(format!("qubit {q} out of range for {n} qubit(s)")));
            }
            if i > 0 && constraints[i - 1].0 == q {
                return Err(Error::Condition(format!("qubit {q} constrained twice")));
            }
        }
        Ok(ConditionSpec { constraints })
    }

    /// Parses `[i:b(,i:b)*]` or `[]`.
    pub fn parse(s: &str, n: usize) -> Result<ConditionSpec, Error> {
        let s = s.trim();
        let inner = s
            .strip_prefix('[')
            .and_then(|rest| rest.strip_suffix(']'))
            .ok_or_else(|| Error::Condition(format!("'{s}' is not of the form [i:b,...]")))?;
        let inner = inner.trim();
        if inner.is_empty() {
            return ConditionSpec::new(Vec::new(), n);
        }
        let mut constraints = Vec::new();
        for part in inner.split(',') {
            let (q, b) = part
                .split_once(':')
                .ok_or_else(|| Error::Condition(format!("bad constraint '{part}'")))?;
            let q: usize = q
                .trim()
                .parse()
                .map_err(|_| Error::Condition(format!("bad qubit index '{q}'")))?;
            let b = match b.trim() {
                "0" => false,
                "1" => true,
                other => return Err(Error::Condition(format!("bad bit '{other}'"))),
            };
            constraints.push((q, b));
        }
        ConditionSpec::new(constraints, n)
    }

    pub fn constraints(&self) -> &[(usize, bool)] {
        &self.constraints
    }

    pub fn to_projector(&self, n: usize) -> ProjectorSpec {
        let mut syms = vec![ProjSym::I; n].into_boxed_slice();
        for &(q, b) in &self.constraints {
            syms[q] = if b { ProjSym::One } else { ProjSym::Zero };
        }
        ProjectorSpec::new(syms.into_vec())
    }
}

/// Builds the formula counting `Tr(C P Cdag Q)`.
pub fn build_verify_formula(
    pre: &ConditionSpec,
    c: &Circuit,
    post: &ConditionSpec,
) -> Result<WeightedCnf, Error> {
    let n = c.qubits();
    let mut f = WeightedCnf::new();
    let q0 = QubitFrame::fresh(&mut f, n);
    let fwd = encode_circuit(&mut f, c, &q0)?;
    let q1 = encode_projector(&mut f, &post.to_projector(n), &fwd.frame)?;
    let bwd = encode_circuit(&mut f, &dagger(c), &q1)?;
    let q2 = encode_projector(&mut f, &pre.to_projector(n), &bwd.frame)?;
    identify_frames(&mut f, &q2, &q0);
    Ok(f)
}

/// Builds `F_P(q, q)`: a fresh frame with only the projector pins. Its count
/// is `Tr(P) = 2^(n-k)`.
pub fn build_condition_formula(spec: &ConditionSpec, n: usize) -> WeightedCnf {
    let mut f = WeightedCnf::new();
    let frame = QubitFrame::fresh(&mut f, n);
    encode_projector(&mut f, &spec.to_projector(n), &frame).expect("lengths match");
    f
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyOutcome {
    pub holds: bool,
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub count: CountResult,
}

/// Decides the Hoare triple `{pre} c {post}`.
pub fn verify(pre: &ConditionSpec, c: &Circuit, post: &ConditionSpec) -> Result<bool, Error> {
    Ok(verify_full(pre, c, post, SolverKind::Dpll, false)?.holds)
}

/// `two_counts` replaces the analytic `Tr(P)` with a second solver call on
/// `F_P(q, q)`, mirroring the two-count comparison shape.
pub fn verify_full(
    pre: &ConditionSpec,
    c: &Circuit,
    post: &ConditionSpec,
    solver: SolverKind,
    two_counts: bool,
) -> Result<VerifyOutcome, Error> {
    let n = c.qubits();
    if let Some(&(q, _)) = pre
        .constraints()
        .iter()
        .chain(post.constraints())
        .find(|&&(q, _)| q >= n)
    {
        return Err(Error::Condition(format!("qubit {q} out of range for {n} qubit(s)")));
    }
    let f = build_verify_formula(pre, c, post)?;
    let count = run_solver(&f, solver)?;
    let lhs = count.value;
    let rhs = if two_counts {
        run_solver(&build_condition_formula(pre, n), solver)?.value
    } else {
        Complex64::new((1u64 << (n - pre.constraints().len())) as f64, 0.0)
    };
    let holds = (lhs - rhs).norm() <= REL_TOLERANCE * (1.0 + rhs.norm());
    Ok(VerifyOutcome { holds, lhs, rhs, count })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Gate;
    use crate::statevector::{circuit_matrix, statevector, UnitaryMatrix};

    #[test]
    fn parse_examples() {
        let s = ConditionSpec::parse("[4:0]", 5).unwrap();
        assert_eq!(s.constraints(), &[(4, false)]);
        let s = ConditionSpec::parse("[]", 3).unwrap();
        assert!(s.constraints().is_empty());
        let s = ConditionSpec::parse("[0:1,2:0]", 3).unwrap();
        assert_eq!(s.constraints(), &[(0, true), (2, false)]);
    }

    #[test]
    fn parse_rejects_malformed_and_out_of_range() {
        assert!(ConditionSpec::parse("4:0", 5).is_err());
        assert!(ConditionSpec::parse("[4:2]", 5).is_err());
        assert!(ConditionSpec::parse("[7:0]", 5).is_err());
        assert!(ConditionSpec::parse("[1:0,1:1]", 5).is_err());
    }

    #[test]
    fn x_on_other_qubit_preserves_condition() {
        let c = Circuit::new(2, vec![Gate::x(1)]).unwrap();
        let p = ConditionSpec::parse("[0:0]", 2).unwrap();
        assert!(verify(&p, &c, &p).unwrap());
    }

    #[test]
    fn x_on_constrained_qubit_breaks_condition() {
        let c = Circuit::new(1, vec![Gate::x(0)]).unwrap();
        let p = ConditionSpec::parse("[0:0]", 1).unwrap();
        assert!(!verify(&p, &c, &p).unwrap());
    }

    #[test]
    fn uncomputed_ancilla_is_preserved() {
        let c = Circuit::new(2, vec![Gate::cx(0, 1), Gate::cx(0, 1)]).unwrap();
        let p = ConditionSpec::parse("[1:0]", 2).unwrap();
        assert!(verify(&p, &c, &p).unwrap());
    }

    #[test]
    fn identity_precondition_always_holds() {
        for seed in 0..8u64 {
            let mut rng = crate::random::rng(seed.wrapping_add(77));
            let n = 1 + (seed as usize) % 4;
            let c = crate::random::random_circuit(&mut rng, n, 12);
            let id = ConditionSpec::identity();
            assert!(verify(&id, &c, &id).unwrap(), "seed {seed}");
        }
    }

    #[test]
    fn two_counts_mode_agrees() {
        let c = Circuit::new(2, vec![Gate::cx(0, 1), Gate::t(0), Gate::cx(0, 1)]).unwrap();
        let p = ConditionSpec::parse("[1:0]", 2).unwrap();
        let a = verify_full(&p, &c, &p, SolverKind::Dpll, false).unwrap();
        let b = verify_full(&p, &c, &p, SolverKind::Dpll, true).unwrap();
        assert_eq!(a.holds, b.holds);
        assert!((a.rhs - b.rhs).norm() <= 1e-12);
    }

    fn projector_matrix(spec: &ConditionSpec, n: usize) -> UnitaryMatrix {
        let dim = 1usize << n;
        let mut m = UnitaryMatrix::identity(dim);
        for idx in 0..dim {
            let keep = spec
                .constraints()
                .iter()
                .all(|&(q, b)| ((idx >> (n - 1 - q)) & 1 == 1) == b);
            if !keep {
                m.data[idx * dim + idx] = num_complex::Complex64::new(0.0, 0.0);
            }
        }
        m
    }

    #[test]
    fn agrees_with_matrix_oracle() {
        for seed in 0..20u64 {
            let mut rng = crate::random::rng(seed.wrapping_mul(13).wrapping_add(1));
            let n = 1 + (seed as usize) % 4;
            let c = crate::random::random_circuit(&mut rng, n, 10);
            let rand_cond = |rng: &mut rand_chacha::ChaCha8Rng| {
                use rand::Rng;
                let k = rng.random_range(0..=n);
                let mut qubits: Vec<usize> = (0..n).collect();
                let mut picked = Vec::new();
                for _ in 0..k {
                    let i = rng.random_range(0..qubits.len());
                    picked.push((qubits.remove(i), rng.random_bool(0.5)));
                }
                ConditionSpec::new(picked, n).unwrap()
            };
            let p = rand_cond(&mut rng);
            let q = rand_cond(&mut rng);
            let got = verify(&p, &c, &q).unwrap();
            let u = circuit_matrix(&c).unwrap();
            let lhs = u
                .mul(&projector_matrix(&p, n))
                .mul(&u.adjoint())
                .mul(&projector_matrix(&q, n))
                .trace();
            let rhs = projector_matrix(&p, n).trace();
            let expect = (lhs - rhs).norm() <= 1e-9 * (1.0 + rhs.norm());
            assert_eq!(got, expect, "seed {seed}");
        }
    }

    #[test]
    fn true_verdicts_are_skew_sound() {
        // whenever the triple holds, every constrained basis state maps into
        // the postcondition subspace
        let mut checked = 0;
        for seed in 0..40u64 {
            let mut rng = crate::random::rng(seed.wrapping_mul(7).wrapping_add(2));
            let n = 1 + (seed as usize) % 3;
            let c = crate::random::random_circuit(&mut rng, n, 8);
            use rand::Rng;
            let q_pick = rng.random_range(0..n);
            let p = ConditionSpec::new(vec![(q_pick, rng.random_bool(0.5))], n).unwrap();
            let q = ConditionSpec::new(vec![(rng.random_range(0..n), rng.random_bool(0.5))], n)
                .unwrap();
            if !verify(&p, &c, &q).unwrap() {
                continue;
            }
            checked += 1;
            let dim = 1usize << n;
            for b in 0..dim {
                let in_p = p
                    .constraints()
                    .iter()
                    .all(|&(qq, bit)| ((b >> (n - 1 - qq)) & 1 == 1) == bit);
                if !in_p {
                    continue;
                }
                // prepare |b> by X gates, run c, project onto Q, compare
                let mut gates: Vec<Gate> = Vec::new();
                for qq in 0..n {
                    if (b >> (n - 1 - qq)) & 1 == 1 {
                        gates.push(Gate::x(qq));
                    }
                }
                gates.extend(c.gates().to_vec());
                let state = statevector(&Circuit::new(n, gates).unwrap()).unwrap();
                let mut residual = 0.0;
                for (idx, amp) in state.iter().enumerate() {
                    let in_q = q
                        .constraints()
                        .iter()
                        .all(|&(qq, bit)| ((idx >> (n - 1 - qq)) & 1 == 1) == bit);
                    if !in_q {
                        residual += amp.norm_sqr();
                    }
                }
                assert!(residual <= 1e-9, "seed {seed} basis {b}: residual {residual}");
            }
        }
        assert!(checked > 0, "no true triples sampled");
    }
}
