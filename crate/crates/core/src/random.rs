//! Seeded generators for circuits, formulas and measurement specs.
//!
//! Used by the differential test suites and the benchmarks. Everything is
//! driven by an explicit ChaCha stream so runs are reproducible; the
//! `QCOUNT_SEED` environment variable overrides suite seeds.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::circuit::{Circuit, Gate, GateKind};
use crate::cnf::{Clause, Literal, WeightedCnf};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Suite seed: `QCOUNT_SEED` if set, otherwise the given default.
pub fn seed_from_env(default: u64) -> u64 {
    std::env::var("QCOUNT_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(default)
}

fn kind_pool(n: usize, rng: &mut impl Rng) -> Vec<GateKind> {
    let mut kinds = vec![
        GateKind::X,
        GateKind::Y,
        GateKind::Z,
        GateKind::H,
        GateKind::S,
        GateKind::Sdg,
        GateKind::T,
        GateKind::Tdg,
        GateKind::Rx(rng.random_range(-3.2..3.2)),
        GateKind::Ry(rng.random_range(-3.2..3.2)),
        GateKind::Rz(rng.random_range(-3.2..3.2)),
        GateKind::Id,
    ];
    if n >= 2 {
        kinds.extend([GateKind::Cx, GateKind::Cz, GateKind::Csx, GateKind::Csxdg, GateKind::Swap]);
    }
    if n >= 3 {
        kinds.push(GateKind::Ccx);
    }
    kinds
}

/// A random circuit over the full supported gate alphabet (arity permitting).
pub fn random_circuit(rng: &mut impl Rng, n: usize, max_gates: usize) -> Circuit {
    let len = rng.random_range(0..=max_gates);
    let mut c = Circuit::empty(n).expect("n >= 1");
    for _ in 0..len {
        let pool = kind_pool(n, rng);
        let kind = pool[rng.random_range(0..pool.len())].clone();
        let mut operands: Vec<usize> = Vec::new();
        while operands.len() < kind.arity() {
            let q = rng.random_range(0..n);
            if !operands.contains(&q) {
                operands.push(q);
            }
        }
        c.push(Gate::new(kind, operands).expect("valid gate")).expect("in range");
    }
    c
}

/// Random circuit guaranteed to contain at least one `rz` gate.
pub fn random_circuit_with_rz(rng: &mut impl Rng, n: usize, max_gates: usize) -> Circuit {
    let c = random_circuit(rng, n, max_gates.saturating_sub(1).max(1));
    let mut gates: Vec<Gate> = c.gates().to_vec();
    if !gates.iter().any(|g| matches!(g.kind(), GateKind::Rz(_))) {
        let pos = rng.random_range(0..=gates.len());
        let q = rng.random_range(0..n);
        gates.insert(pos, Gate::rz(rng.random_range(-3.2..3.2), q));
    }
    Circuit::new(n, gates).expect("valid circuit")
}

/// Random measurement spec over `{I, 0, 1}`.
pub fn random_measurement(rng: &mut impl Rng, n: usize) -> String {
    (0..n)
        .map(|_| match rng.random_range(0..3) {
            0 => 'I',
            1 => '0',
            _ => '1',
        })
        .collect()
}

fn random_weight(rng: &mut impl Rng) -> Complex64 {
    // |w| <= 2 by construction
    Complex64::new(rng.random_range(-1.4..1.4), rng.random_range(-1.4..1.4))
}

/// Random weighted formula: up to `max_vars` variables, up to `max_clauses`
/// clauses of length 1..=3 over distinct variables, and random complex
/// weights with modulus at most 2 on roughly half the literals.
pub fn random_formula(rng: &mut impl Rng, max_vars: u32, max_clauses: usize) -> WeightedCnf {
    let n = rng.random_range(1..=max_vars);
    let mut f = WeightedCnf::new();
    for _ in 0..n {
        f.fresh_var();
    }
    let m = rng.random_range(0..=max_clauses);
    for _ in 0..m {
        let len = rng.random_range(1..=3.min(n));
        let mut vars: Vec<u32> = Vec::new();
        while (vars.len() as u32) < len {
            let v = rng.random_range(1..=n);
            if !vars.contains(&v) {
                vars.push(v);
            }
        }
        let lits: Vec<Literal> = vars
            .into_iter()
            .map(|v| if rng.random_bool(0.5) { Literal::positive(v) } else { Literal::negative(v) })
            .collect();
        f.add_clause(Clause::new(lits).expect("distinct vars")).expect("allocated");
    }
    for v in 1..=n {
        if rng.random_bool(0.5) {
            f.set_weight(Literal::positive(v), random_weight(rng)).unwrap();
        }
        if rng.random_bool(0.5) {
            f.set_weight(Literal::negative(v), random_weight(rng)).unwrap();
        }
    }
    f
}
