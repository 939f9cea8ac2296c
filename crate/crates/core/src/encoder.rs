//! Computational-basis CNF encodings of states, gates and circuits.
//!
//! Every gate encoding `F_U(q, q')` obeys the transfer contract: conjoined
//! with a state encoding over the input frame `q`, the weighted model count
//! with the output frame pinned to basis `r` and the input produced by basis
//! `b` equals the matrix entry `U[r][b]`. Circuits are encoded by chaining
//! gate encodings through successive frames, as in bounded model checking.
//!
//! Common gates use hand-written encodings (few variables, diagonal gates
//! reuse their input variable); everything else goes through the
//! entry-indexed fallback, which introduces one weighted auxiliary per
//! nonzero matrix entry and excludes zero entries with a covering clause.

use num_complex::Complex64;

use crate::circuit::{Circuit, Gate, GateKind};
use crate::cnf::{Literal, WeightedCnf};
use crate::Error;

/// Maps each qubit to the CNF variable currently representing it.
#[derive(Debug, Clone, PartialEq)]
pub struct QubitFrame(Vec<u32>);

impl QubitFrame {
    pub fn new(vars: Vec<u32>) -> QubitFrame {
        debug_assert!(
            vars.iter().enumerate().all(|(i, v)| !vars[..i].contains(v)),
            "frame variables must be pairwise distinct"
        );
        QubitFrame(vars)
    }

    pub fn var(&self, qubit: usize) -> u32 {
        self.0[qubit]
    }

    pub fn vars(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Allocates a frame of fresh, unconstrained variables.
    pub fn fresh(f: &mut WeightedCnf, n: usize) -> QubitFrame {
        QubitFrame((0..n).map(|_| f.fresh_var()).collect())
    }
}

/// Per-qubit projector symbols.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProjSym {
    I,
    Zero,
    One,
}

/// A diagonal projector `{I, |0><0|, |1><1|}` per qubit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProjectorSpec(Vec<ProjSym>);

impl ProjectorSpec {
    pub fn new(syms: Vec<ProjSym>) -> ProjectorSpec {
        ProjectorSpec(syms)
    }

    pub fn identity(n: usize) -> ProjectorSpec {
        ProjectorSpec(vec![ProjSym::I; n])
    }

    /// Parses a string over `{I, 0, 1}`, one symbol per qubit.
    pub fn parse(s: &str) -> Result<ProjectorSpec, Error> {
        s.chars()
            .map(|ch| match ch {
                'I' => Ok(ProjSym::I),
                '0' => Ok(ProjSym::Zero),
                '1' => Ok(ProjSym::One),
                other => Err(Error::SpecSymbol(other)),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(ProjectorSpec)
    }

    pub fn syms(&self) -> &[ProjSym] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of constrained (non-identity) positions.
    pub fn constrained(&self) -> usize {
        self.0.iter().filter(|s| !matches!(s, ProjSym::I)).count()
    }
}

/// Record of one gate encoding: the resulting frame, the variables it
/// allocated and the literals it weighted.
#[derive(Debug, Clone)]
pub struct GateEncoding {
    pub frame: QubitFrame,
    pub fresh_vars: Vec<u32>,
    pub weighted: Vec<Literal>,
}

/// Aggregate record for a whole circuit encoding.
#[derive(Debug, Clone)]
pub struct CircuitEncoding {
    pub frame: QubitFrame,
    pub weighted: Vec<Literal>,
}

/// Encodes the basis state `|bits>`: one fresh variable per qubit, pinned by
/// unit clauses.
pub fn encode_basis_state(f: &mut WeightedCnf, bits: &str) -> Result<QubitFrame, Error> {
    if bits.is_empty() {
        return Err(Error::ValueRange("basis state needs at least one qubit".into()));
    }
    let frame = QubitFrame::fresh(f, bits.chars().count());
    encode_bra(f, &frame, bits)?;
    Ok(frame)
}

/// Encodes `|0..0>` over `n` qubits.
pub fn encode_zero_state(f: &mut WeightedCnf, n: usize) -> Result<QubitFrame, Error> {
    if n == 0 {
        return Err(Error::ValueRange("basis state needs at least one qubit".into()));
    }
    encode_basis_state(f, &"0".repeat(n))
}

/// Pins the frame variables to `bits` with unit clauses. Basis bras carry
/// real unit amplitudes, so no weights are touched; a weighted ket encoding
/// reused as a bra must additionally run [`conjugate_weights`] over the
/// literals it introduced.
pub fn encode_bra(f: &mut WeightedCnf, frame: &QubitFrame, bits: &str) -> Result<(), Error> {
    let bits: Vec<char> = bits.chars().collect();
    if bits.len() != frame.len() {
        return Err(Error::SpecLength { expected: frame.len(), got: bits.len() });
    }
    for (i, b) in bits.iter().enumerate() {
        let v = frame.var(i);
        match b {
            '0' => f.add_lits(&[Literal::negative(v)]),
            '1' => f.add_lits(&[Literal::positive(v)]),
            other => return Err(Error::SpecSymbol(*other)),
        }
    }
    Ok(())
}

/// Complex-conjugates the stored weights of exactly the given literals.
pub fn conjugate_weights(f: &mut WeightedCnf, lits: &[Literal]) {
    for &lit in lits {
        if let Some(w) = f.stored_weight(lit) {
            f.set_weight(lit, w.conj()).expect("literal was already weighted");
        }
    }
}

/// Adds equivalence clauses identifying two frames (the identity-overlap
/// `F_I`); positions already sharing a variable need no clause.
pub fn identify_frames(f: &mut WeightedCnf, a: &QubitFrame, b: &QubitFrame) {
    debug_assert_eq!(a.len(), b.len());
    for i in 0..a.len() {
        let (x, y) = (a.var(i), b.var(i));
        if x == y {
            continue;
        }
        f.add_lits(&[Literal::positive(x), Literal::negative(y)]);
        f.add_lits(&[Literal::negative(x), Literal::positive(y)]);
    }
}

/// Applies a diagonal projector: `0`/`1` positions are pinned in place (the
/// projector is diagonal, so the variable is reused); `I` positions are
/// untouched. Returns the unchanged frame.
pub fn encode_projector(
    f: &mut WeightedCnf,
    spec: &ProjectorSpec,
    frame: &QubitFrame,
) -> Result<QubitFrame, Error> {
    if spec.len() != frame.len() {
        return Err(Error::SpecLength { expected: frame.len(), got: spec.len() });
    }
    for (i, sym) in spec.syms().iter().enumerate() {
        let v = frame.var(i);
        match sym {
            ProjSym::I => {}
            ProjSym::Zero => f.add_lits(&[Literal::negative(v)]),
            ProjSym::One => f.add_lits(&[Literal::positive(v)]),
        }
    }
    Ok(frame.clone())
}

/// Result of the entry-indexed fallback encoding.
pub(crate) struct FallbackEncoding {
    pub aux_vars: Vec<u32>,
    pub weighted: Vec<Literal>,
}

/// Entry-indexed encoding of an arbitrary `k`-qubit matrix between explicit
/// input and output variables: one auxiliary per nonzero entry, true exactly
/// when the input variables spell the column and the output variables spell
/// the row; a covering clause excludes zero-entry transitions. With `guard`
/// set, the negated selector is added to every clause so a deselected copy
/// imposes nothing (the caller must additionally pin the auxiliaries).
pub(crate) fn encode_gate_matrix(
    f: &mut WeightedCnf,
    matrix: &[Complex64],
    in_vars: &[u32],
    out_vars: &[u32],
    guard: Option<Literal>,
) -> FallbackEncoding {
    let k = in_vars.len();
    debug_assert_eq!(out_vars.len(), k);
    let dim = 1usize << k;
    debug_assert_eq!(matrix.len(), dim * dim);
    let mut aux_vars = Vec::new();
    let mut weighted = Vec::new();
    let mut cover: Vec<Literal> = Vec::new();
    let with_guard = |mut lits: Vec<Literal>| -> Vec<Literal> {
        if let Some(g) = guard {
            lits.push(g);
        }
        lits
    };
    for r in 0..dim {
        for c in 0..dim {
            let entry = matrix[r * dim + c];
            if entry.re == 0.0 && entry.im == 0.0 {
                continue;
            }
            let e = f.fresh_var();
            aux_vars.push(e);
            cover.push(Literal::positive(e));
            // e -> each input/output variable takes its bit value
            let mut long_clause = vec![Literal::positive(e)];
            for (j, &v) in in_vars.iter().enumerate() {
                let bit = (c >> (k - 1 - j)) & 1 == 1;
                let lit = if bit { Literal::positive(v) } else { Literal::negative(v) };
                f.add_lits(&with_guard(vec![Literal::negative(e), lit]));
                long_clause.push(lit.negated());
            }
            for (j, &v) in out_vars.iter().enumerate() {
                let bit = (r >> (k - 1 - j)) & 1 == 1;
                let lit = if bit { Literal::positive(v) } else { Literal::negative(v) };
                f.add_lits(&with_guard(vec![Literal::negative(e), lit]));
                long_clause.push(lit.negated());
            }
            f.add_lits(&with_guard(long_clause));
            if entry != Complex64::new(1.0, 0.0) {
                let lit = Literal::positive(e);
                f.set_weight(lit, entry).expect("fresh variable");
                weighted.push(lit);
            }
        }
    }
    f.add_lits(&with_guard(cover));
    FallbackEncoding { aux_vars, weighted }
}

/// Encodes one gate against the current frame and returns the frame with the
/// touched qubits remapped to the gate's output variables.
pub fn encode_gate(f: &mut WeightedCnf, gate: &Gate, frame: &QubitFrame) -> Result<GateEncoding, Error> {
    for &q in gate.operands() {
        if q >= frame.len() {
            return Err(Error::InvalidCircuit(format!(
                "gate {} uses q[{}] but the frame has {} qubit(s)",
                gate.kind().name(),
                q,
                frame.len()
            )));
        }
    }
    let mut vars = frame.vars().to_vec();
    let mut fresh_vars = Vec::new();
    let mut weighted = Vec::new();
    match gate.kind() {
        GateKind::Id => {}
        GateKind::X => {
            let q = vars[gate.operands()[0]];
            let qp = f.fresh_var();
            fresh_vars.push(qp);
            f.add_lits(&[Literal::positive(qp), Literal::positive(q)]);
            f.add_lits(&[Literal::negative(qp), Literal::negative(q)]);
            vars[gate.operands()[0]] = qp;
        }
        GateKind::H => {
            let q = vars[gate.operands()[0]];
            let qp = f.fresh_var();
            let h = f.fresh_var();
            fresh_vars.extend([qp, h]);
            // h <-> (q and q')
            f.add_lits(&[Literal::negative(h), Literal::positive(q)]);
            f.add_lits(&[Literal::negative(h), Literal::positive(qp)]);
            f.add_lits(&[Literal::positive(h), Literal::negative(q), Literal::negative(qp)]);
            let m = gate.kind().matrix();
            f.set_weight(Literal::positive(h), m[3]).expect("fresh");
            f.set_weight(Literal::negative(h), m[0]).expect("fresh");
            weighted.push(Literal::positive(h));
            weighted.push(Literal::negative(h));
            vars[gate.operands()[0]] = qp;
        }
        k if k.diagonal_phase().is_some() => {
            // diagonal gates keep their variable; a phase auxiliary tracks |1>
            let q = vars[gate.operands()[0]];
            let p = f.fresh_var();
            fresh_vars.push(p);
            f.add_lits(&[Literal::negative(p), Literal::positive(q)]);
            f.add_lits(&[Literal::positive(p), Literal::negative(q)]);
            let phase = k.diagonal_phase().unwrap();
            f.set_weight(Literal::positive(p), phase).expect("fresh");
            weighted.push(Literal::positive(p));
        }
        GateKind::Cx => {
            let c = vars[gate.operands()[0]];
            let t = vars[gate.operands()[1]];
            let tp = f.fresh_var();
            fresh_vars.push(tp);
            // t' <-> (c xor t)
            f.add_lits(&[Literal::negative(tp), Literal::positive(c), Literal::positive(t)]);
            f.add_lits(&[Literal::negative(tp), Literal::negative(c), Literal::negative(t)]);
            f.add_lits(&[Literal::positive(tp), Literal::positive(c), Literal::negative(t)]);
            f.add_lits(&[Literal::positive(tp), Literal::negative(c), Literal::positive(t)]);
            vars[gate.operands()[1]] = tp;
        }
        GateKind::Cz => {
            let c = vars[gate.operands()[0]];
            let t = vars[gate.operands()[1]];
            let p = f.fresh_var();
            fresh_vars.push(p);
            // p <-> (c and t), weighted -1
            f.add_lits(&[Literal::negative(p), Literal::positive(c)]);
            f.add_lits(&[Literal::negative(p), Literal::positive(t)]);
            f.add_lits(&[Literal::positive(p), Literal::negative(c), Literal::negative(t)]);
            f.set_weight(Literal::positive(p), Complex64::new(-1.0, 0.0)).expect("fresh");
            weighted.push(Literal::positive(p));
        }
        GateKind::Ccx => {
            let c1 = vars[gate.operands()[0]];
            let c2 = vars[gate.operands()[1]];
            let t = vars[gate.operands()[2]];
            let a = f.fresh_var();
            let tp = f.fresh_var();
            fresh_vars.extend([a, tp]);
            // a <-> (c1 and c2)
            f.add_lits(&[Literal::negative(a), Literal::positive(c1)]);
            f.add_lits(&[Literal::negative(a), Literal::positive(c2)]);
            f.add_lits(&[Literal::positive(a), Literal::negative(c1), Literal::negative(c2)]);
            // t' <-> (t xor a)
            f.add_lits(&[Literal::negative(tp), Literal::positive(t), Literal::positive(a)]);
            f.add_lits(&[Literal::negative(tp), Literal::negative(t), Literal::negative(a)]);
            f.add_lits(&[Literal::positive(tp), Literal::positive(t), Literal::negative(a)]);
            f.add_lits(&[Literal::positive(tp), Literal::negative(t), Literal::positive(a)]);
            vars[gate.operands()[2]] = tp;
        }
        kind => {
            // entry-indexed fallback for everything else
            let matrix = kind.matrix();
            let in_vars: Vec<u32> = gate.operands().iter().map(|&q| vars[q]).collect();
            let out_vars: Vec<u32> = gate.operands().iter().map(|_| f.fresh_var()).collect();
            fresh_vars.extend(&out_vars);
            let enc = encode_gate_matrix(f, &matrix, &in_vars, &out_vars, None);
            fresh_vars.extend(&enc.aux_vars);
            weighted.extend(enc.weighted);
            for (j, &q) in gate.operands().iter().enumerate() {
                vars[q] = out_vars[j];
            }
        }
    }
    Ok(GateEncoding { frame: QubitFrame::new(vars), fresh_vars, weighted })
}

/// Folds [`encode_gate`] over a circuit's gates in program order.
pub fn encode_circuit(
    f: &mut WeightedCnf,
    c: &Circuit,
    frame: &QubitFrame,
) -> Result<CircuitEncoding, Error> {
    if frame.len() != c.qubits() {
        return Err(Error::SpecLength { expected: c.qubits(), got: frame.len() });
    }
    let mut frame = frame.clone();
    let mut weighted = Vec::new();
    for gate in c.gates() {
        let enc = encode_gate(f, gate, &frame)?;
        frame = enc.frame;
        weighted.extend(enc.weighted);
    }
    Ok(CircuitEncoding { frame, weighted })
}
