//! Gate-level circuit representation.
//!
//! A [`Circuit`] is a qubit count plus an ordered gate list; gates carry a
//! [`GateKind`] and their operand qubits. Every kind exposes its unitary
//! matrix so that encodings can be checked against dense linear algebra.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};
use std::sync::Arc;

use num_complex::Complex64;

use crate::Error;

/// A user-registered gate: a name, an arity and a row-major unitary matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CustomGate {
    pub name: String,
    pub arity: usize,
    /// Row-major, `2^arity x 2^arity`.
    pub matrix: Vec<Complex64>,
}

/// The supported gate alphabet. Rotation kinds carry their angle in radians.
#[derive(Debug, Clone, PartialEq)]
pub enum GateKind {
    X,
    Y,
    Z,
    H,
    S,
    Sdg,
    T,
    Tdg,
    Rx(f64),
    Ry(f64),
    Rz(f64),
    Cx,
    Cz,
    Csx,
    Csxdg,
    Ccx,
    Swap,
    Id,
    Custom(Arc<CustomGate>),
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

impl GateKind {
    pub fn arity(&self) -> usize {
        match self {
            GateKind::X
            | GateKind::Y
            | GateKind::Z
            | GateKind::H
            | GateKind::S
            | GateKind::Sdg
            | GateKind::T
            | GateKind::Tdg
            | GateKind::Rx(_)
            | GateKind::Ry(_)
            | GateKind::Rz(_)
            | GateKind::Id => 1,
            GateKind::Cx | GateKind::Cz | GateKind::Csx | GateKind::Csxdg | GateKind::Swap => 2,
            GateKind::Ccx => 3,
            GateKind::Custom(g) => g.arity,
        }
    }

    /// QASM mnemonic for this kind.
    pub fn name(&self) -> &str {
        match self {
            GateKind::X => "x",
            GateKind::Y => "y",
            GateKind::Z => "z",
            GateKind::H => "h",
            GateKind::S => "s",
            GateKind::Sdg => "sdg",
            GateKind::T => "t",
            GateKind::Tdg => "tdg",
            GateKind::Rx(_) => "rx",
            GateKind::Ry(_) => "ry",
            GateKind::Rz(_) => "rz",
            GateKind::Cx => "cx",
            GateKind::Cz => "cz",
            GateKind::Csx => "csx",
            GateKind::Csxdg => "csxdg",
            GateKind::Ccx => "ccx",
            GateKind::Swap => "swap",
            GateKind::Id => "id",
            GateKind::Custom(g) => &g.name,
        }
    }

    pub fn angle(&self) -> Option<f64> {
        match self {
            GateKind::Rx(a) | GateKind::Ry(a) | GateKind::Rz(a) => Some(*a),
            _ => None,
        }
    }

    /// Row-major unitary matrix of dimension `2^arity`.
    ///
    /// `Rz` uses the global-phase-free convention `diag(1, e^{i theta})`, so
    /// raw traces may differ from the half-angle convention by a global
    /// phase; probabilities and fidelities are unaffected.
    pub fn matrix(&self) -> Vec<Complex64> {
        let o = c(0.0, 0.0);
        let l = c(1.0, 0.0);
        match self {
            GateKind::X => vec![o, l, l, o],
            GateKind::Y => vec![o, c(0.0, -1.0), c(0.0, 1.0), o],
            GateKind::Z => vec![l, o, o, c(-1.0, 0.0)],
            GateKind::H => {
                let h = FRAC_1_SQRT_2;
                vec![c(h, 0.0), c(h, 0.0), c(h, 0.0), c(-h, 0.0)]
            }
            GateKind::S => vec![l, o, o, c(0.0, 1.0)],
            GateKind::Sdg => vec![l, o, o, c(0.0, -1.0)],
            GateKind::T => vec![l, o, o, phase(FRAC_PI_4)],
            GateKind::Tdg => vec![l, o, o, phase(-FRAC_PI_4)],
            GateKind::Rx(a) => {
                let (cos, sin) = ((a / 2.0).cos(), (a / 2.0).sin());
                vec![c(cos, 0.0), c(0.0, -sin), c(0.0, -sin), c(cos, 0.0)]
            }
            GateKind::Ry(a) => {
                let (cos, sin) = ((a / 2.0).cos(), (a / 2.0).sin());
                vec![c(cos, 0.0), c(-sin, 0.0), c(sin, 0.0), c(cos, 0.0)]
            }
            GateKind::Rz(a) => vec![l, o, o, phase(*a)],
            GateKind::Cx => embed_controlled(&GateKind::X.matrix()),
            GateKind::Cz => embed_controlled(&GateKind::Z.matrix()),
            GateKind::Csx => embed_controlled(&sqrt_x()),
            GateKind::Csxdg => embed_controlled(&adjoint2(&sqrt_x())),
            GateKind::Ccx => {
                let mut m = vec![o; 64];
                for i in 0..6 {
                    m[i * 8 + i] = l;
                }
                m[6 * 8 + 7] = l;
                m[7 * 8 + 6] = l;
                m
            }
            GateKind::Swap => {
                let mut m = vec![o; 16];
                // permutation |ab> -> |ba>
                m[0] = l;
                m[6] = l;
                m[9] = l;
                m[15] = l;
                m
            }
            GateKind::Id => vec![l, o, o, l],
            GateKind::Custom(g) => g.matrix.clone(),
        }
    }

    /// Phase applied to `|1>` for diagonal single-qubit kinds.
    pub fn diagonal_phase(&self) -> Option<Complex64> {
        match self {
            GateKind::Z | GateKind::S | GateKind::Sdg | GateKind::T | GateKind::Tdg
            | GateKind::Rz(_) => Some(self.matrix()[3]),
            _ => None,
        }
    }

    pub fn adjoint(&self) -> GateKind {
        match self {
            GateKind::S => GateKind::Sdg,
            GateKind::Sdg => GateKind::S,
            GateKind::T => GateKind::Tdg,
            GateKind::Tdg => GateKind::T,
            GateKind::Csx => GateKind::Csxdg,
            GateKind::Csxdg => GateKind::Csx,
            GateKind::Rx(a) => GateKind::Rx(-a),
            GateKind::Ry(a) => GateKind::Ry(-a),
            GateKind::Rz(a) => GateKind::Rz(-a),
            GateKind::Custom(g) => {
                let name = match g.name.strip_suffix("dg") {
                    Some(base) => base.to_string(),
                    None => format!("{}dg", g.name),
                };
                GateKind::Custom(Arc::new(CustomGate {
                    name,
                    arity: g.arity,
                    matrix: adjoint_matrix(&g.matrix, 1 << g.arity),
                }))
            }
            // X, Y, Z, H, Cx, Cz, Ccx, Swap, Id are self-adjoint.
            other => other.clone(),
        }
    }
}

fn phase(theta: f64) -> Complex64 {
    Complex64::from_polar(1.0, theta)
}

fn sqrt_x() -> Vec<Complex64> {
    // sqrt(X): squares to X.
    vec![c(0.5, 0.5), c(0.5, -0.5), c(0.5, -0.5), c(0.5, 0.5)]
}

fn adjoint2(m: &[Complex64]) -> Vec<Complex64> {
    adjoint_matrix(m, 2)
}

fn adjoint_matrix(m: &[Complex64], dim: usize) -> Vec<Complex64> {
    let mut out = vec![c(0.0, 0.0); dim * dim];
    for r in 0..dim {
        for col in 0..dim {
            out[r * dim + col] = m[col * dim + r].conj();
        }
    }
    out
}

/// Controlled version of a single-qubit matrix, control = first operand.
fn embed_controlled(u: &[Complex64]) -> Vec<Complex64> {
    let mut m = vec![c(0.0, 0.0); 16];
    m[0] = c(1.0, 0.0);
    m[5] = c(1.0, 0.0);
    m[2 * 4 + 2] = u[0];
    m[2 * 4 + 3] = u[1];
    m[3 * 4 + 2] = u[2];
    m[3 * 4 + 3] = u[3];
    m
}

/// A gate application: kind plus ordered operand qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    kind: GateKind,
    operands: Vec<usize>,
}

impl Gate {
    pub fn new(kind: GateKind, operands: Vec<usize>) -> Result<Gate, Error> {
        if operands.len() != kind.arity() {
            return Err(Error::InvalidGate(format!(
                "{} expects {} operand(s), got {}",
                kind.name(),
                kind.arity(),
                operands.len()
            )));
        }
        for (i, a) in operands.iter().enumerate() {
            if operands[..i].contains(a) {
                return Err(Error::InvalidGate(format!(
                    "{} has repeated operand q[{}]",
                    kind.name(),
                    a
                )));
            }
        }
        if let Some(a) = kind.angle() {
            if !a.is_finite() {
                return Err(Error::InvalidGate(format!("non-finite angle {a}")));
            }
        }
        Ok(Gate { kind, operands })
    }

    pub fn kind(&self) -> &GateKind {
        &self.kind
    }

    pub fn operands(&self) -> &[usize] {
        &self.operands
    }

    pub fn x(q: usize) -> Gate {
        Gate::new(GateKind::X, vec![q]).unwrap()
    }
    pub fn y(q: usize) -> Gate {
        Gate::new(GateKind::Y, vec![q]).unwrap()
    }
    pub fn z(q: usize) -> Gate {
        Gate::new(GateKind::Z, vec![q]).unwrap()
    }
    pub fn h(q: usize) -> Gate {
        Gate::new(GateKind::H, vec![q]).unwrap()
    }
    pub fn s(q: usize) -> Gate {
        Gate::new(GateKind::S, vec![q]).unwrap()
    }
    pub fn sdg(q: usize) -> Gate {
        Gate::new(GateKind::Sdg, vec![q]).unwrap()
    }
    pub fn t(q: usize) -> Gate {
        Gate::new(GateKind::T, vec![q]).unwrap()
    }
    pub fn tdg(q: usize) -> Gate {
        Gate::new(GateKind::Tdg, vec![q]).unwrap()
    }
    pub fn rx(theta: f64, q: usize) -> Gate {
        Gate::new(GateKind::Rx(theta), vec![q]).unwrap()
    }
    pub fn ry(theta: f64, q: usize) -> Gate {
        Gate::new(GateKind::Ry(theta), vec![q]).unwrap()
    }
    pub fn rz(theta: f64, q: usize) -> Gate {
        Gate::new(GateKind::Rz(theta), vec![q]).unwrap()
    }
    pub fn id(q: usize) -> Gate {
        Gate::new(GateKind::Id, vec![q]).unwrap()
    }
    pub fn cx(control: usize, target: usize) -> Gate {
        Gate::new(GateKind::Cx, vec![control, target]).unwrap()
    }
    pub fn cz(control: usize, target: usize) -> Gate {
        Gate::new(GateKind::Cz, vec![control, target]).unwrap()
    }
    pub fn csx(control: usize, target: usize) -> Gate {
        Gate::new(GateKind::Csx, vec![control, target]).unwrap()
    }
    pub fn csxdg(control: usize, target: usize) -> Gate {
        Gate::new(GateKind::Csxdg, vec![control, target]).unwrap()
    }
    pub fn swap(a: usize, b: usize) -> Gate {
        Gate::new(GateKind::Swap, vec![a, b]).unwrap()
    }
    pub fn ccx(c1: usize, c2: usize, target: usize) -> Gate {
        Gate::new(GateKind::Ccx, vec![c1, c2, target]).unwrap()
    }
}

/// A circuit: qubit count plus gates in program order.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    n: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n: usize, gates: Vec<Gate>) -> Result<Circuit, Error> {
        if n == 0 {
            return Err(Error::InvalidCircuit("qubit count must be >= 1".into()));
        }
        let mut circ = Circuit { n, gates: Vec::new() };
        for g in gates {
            circ.push(g)?;
        }
        Ok(circ)
    }

    pub fn empty(n: usize) -> Result<Circuit, Error> {
        Circuit::new(n, Vec::new())
    }

    pub fn push(&mut self, gate: Gate) -> Result<(), Error> {
        if let Some(&q) = gate.operands().iter().find(|&&q| q >= self.n) {
            return Err(Error::InvalidCircuit(format!(
                "gate {} uses q[{}] but the circuit has {} qubit(s)",
                gate.kind().name(),
                q,
                self.n
            )));
        }
        self.gates.push(gate);
        Ok(())
    }

    pub fn qubits(&self) -> usize {
        self.n
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }
}

/// Reverse the gate order and replace each gate by its adjoint, yielding a
/// circuit whose unitary is the conjugate transpose of the input's.
pub fn dagger(c: &Circuit) -> Circuit {
    let gates = c
        .gates
        .iter()
        .rev()
        .map(|g| Gate {
            kind: g.kind.adjoint(),
            operands: g.operands.clone(),
        })
        .collect();
    Circuit { n: c.n, gates }
}

/// Greedy as-soon-as-possible layering: each gate lands in the earliest layer
/// after every earlier gate sharing one of its qubits.
pub fn layers(c: &Circuit) -> Vec<Vec<Gate>> {
    let mut next_free = vec![0usize; c.n];
    let mut out: Vec<Vec<Gate>> = Vec::new();
    for g in &c.gates {
        let layer = g.operands.iter().map(|&q| next_free[q]).max().unwrap_or(0);
        if layer == out.len() {
            out.push(Vec::new());
        }
        for &q in &g.operands {
            next_free[q] = layer + 1;
        }
        out[layer].push(g.clone());
    }
    out
}

/// Named custom gates loadable from a definition file.
///
/// The file format is line-oriented: a header `name arity` followed by
/// `2^arity` rows of `2^arity` whitespace-separated `re,im` entries. Blank
/// lines and `#` comments are skipped. For every gate `g` an adjoint `gdg`
/// is registered automatically unless the file defines it.
#[derive(Debug, Clone, Default)]
pub struct GateRegistry {
    gates: BTreeMap<String, Arc<CustomGate>>,
}

impl GateRegistry {
    pub fn new() -> GateRegistry {
        GateRegistry::default()
    }

    pub fn lookup(&self, name: &str) -> Option<GateKind> {
        self.gates.get(name).map(|g| GateKind::Custom(g.clone()))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.gates.keys().map(|s| s.as_str())
    }

    pub fn register(&mut self, gate: CustomGate) -> Result<(), Error> {
        let dim = 1usize << gate.arity;
        if gate.matrix.len() != dim * dim {
            return Err(Error::GateDefs(format!(
                "gate {} needs a {dim}x{dim} matrix",
                gate.name
            )));
        }
        if !is_unitary(&gate.matrix, dim, 1e-6) {
            return Err(Error::GateDefs(format!("gate {} matrix is not unitary", gate.name)));
        }
        let adj_name = match gate.name.strip_suffix("dg") {
            Some(base) => base.to_string(),
            None => format!("{}dg", gate.name),
        };
        let adj = CustomGate {
            name: adj_name.clone(),
            arity: gate.arity,
            matrix: adjoint_matrix(&gate.matrix, dim),
        };
        self.gates.insert(gate.name.clone(), Arc::new(gate));
        self.gates.entry(adj_name).or_insert_with(|| Arc::new(adj));
        Ok(())
    }

    pub fn parse(text: &str) -> Result<GateRegistry, Error> {
        let mut reg = GateRegistry::new();
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        while let Some(header) = lines.next() {
            let mut it = header.split_whitespace();
            let name = it.next().unwrap().to_string();
            let arity: usize = it
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::GateDefs(format!("bad header line '{header}'")))?;
            if it.next().is_some() {
                return Err(Error::GateDefs(format!("bad header line '{header}'")));
            }
            if !name.chars().all(|ch| ch.is_ascii_lowercase() || ch.is_ascii_digit() || ch == '_')
            {
                return Err(Error::GateDefs(format!(
                    "gate name '{name}' must be lowercase ascii"
                )));
            }
            if arity == 0 || arity > 3 {
                return Err(Error::GateDefs(format!("gate {name}: arity {arity} unsupported")));
            }
            let dim = 1usize << arity;
            let mut matrix = Vec::with_capacity(dim * dim);
            for _ in 0..dim {
                let row = lines
                    .next()
                    .ok_or_else(|| Error::GateDefs(format!("gate {name}: missing matrix row")))?;
                let entries: Vec<&str> = row.split_whitespace().collect();
                if entries.len() != dim {
                    return Err(Error::GateDefs(format!(
                        "gate {name}: expected {dim} entries per row, got {}",
                        entries.len()
                    )));
                }
                for e in entries {
                    let (re, im) = e
                        .split_once(',')
                        .ok_or_else(|| Error::GateDefs(format!("gate {name}: bad entry '{e}'")))?;
                    let re: f64 = re
                        .parse()
                        .map_err(|_| Error::GateDefs(format!("gate {name}: bad number '{re}'")))?;
                    let im: f64 = im
                        .parse()
                        .map_err(|_| Error::GateDefs(format!("gate {name}: bad number '{im}'")))?;
                    matrix.push(Complex64::new(re, im));
                }
            }
            reg.register(CustomGate { name, arity, matrix })?;
        }
        Ok(reg)
    }
}

fn is_unitary(m: &[Complex64], dim: usize, tol: f64) -> bool {
    for r in 0..dim {
        for col in 0..dim {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..dim {
                acc += m[r * dim + k] * m[col * dim + k].conj();
            }
            let expect = if r == col { 1.0 } else { 0.0 };
            if (acc - expect).norm() > tol {
                return false;
            }
        }
    }
    true
}
