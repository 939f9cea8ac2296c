//! Dense statevector simulation, used as the independent oracle against
//! which every CNF encoding is validated.
//!
//! Qubit 0 is the most significant bit of an amplitude index, matching the
//! convention that the bit string `b0 b1 .. b(n-1)` (qubit i at position i)
//! labels basis state `sum b_i * 2^(n-1-i)`.

use num_complex::Complex64;

use crate::circuit::{Circuit, Gate};
use crate::Error;

pub const STATEVECTOR_QUBIT_LIMIT: usize = 12;
pub const MATRIX_QUBIT_LIMIT: usize = 10;

/// A row-major square complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix {
    pub dim: usize,
    pub data: Vec<Complex64>,
}

impl UnitaryMatrix {
    pub fn identity(dim: usize) -> UnitaryMatrix {
        let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            data[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        UnitaryMatrix { dim, data }
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.dim + c]
    }

    /// `self * other` (matrix product).
    pub fn mul(&self, other: &UnitaryMatrix) -> UnitaryMatrix {
        assert_eq!(self.dim, other.dim);
        let dim = self.dim;
        let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
        for r in 0..dim {
            for k in 0..dim {
                let a = self.data[r * dim + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for c in 0..dim {
                    data[r * dim + c] += a * other.data[k * dim + c];
                }
            }
        }
        UnitaryMatrix { dim, data }
    }

    pub fn adjoint(&self) -> UnitaryMatrix {
        let dim = self.dim;
        let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
        for r in 0..dim {
            for c in 0..dim {
                data[r * dim + c] = self.data[c * dim + r].conj();
            }
        }
        UnitaryMatrix { dim, data }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.data[i * self.dim + i]).sum()
    }

    /// `Tr(self * other)` without forming the product.
    pub fn trace_of_product(&self, other: &UnitaryMatrix) -> Complex64 {
        assert_eq!(self.dim, other.dim);
        let dim = self.dim;
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..dim {
            for j in 0..dim {
                acc += self.data[i * dim + j] * other.data[j * dim + i];
            }
        }
        acc
    }

    pub fn max_abs_diff(&self, other: &UnitaryMatrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Index of the basis state labelled by `bits` (one char per qubit).
pub fn basis_index(bits: &str) -> usize {
    bits.chars().fold(0, |acc, b| (acc << 1) | (b == '1') as usize)
}

/// Applies a gate to a dense amplitude vector over `n` qubits.
pub fn apply_gate(state: &mut [Complex64], gate: &Gate, n: usize) {
    let k = gate.kind().arity();
    let matrix = gate.kind().matrix();
    let dim = 1usize << k;
    // bit position of each operand within an amplitude index
    let positions: Vec<usize> = gate.operands().iter().map(|&q| n - 1 - q).collect();
    let mask: usize = positions.iter().map(|&p| 1usize << p).sum();
    let mut input = vec![Complex64::new(0.0, 0.0); dim];
    for base in 0..state.len() {
        if base & mask != 0 {
            continue;
        }
        for (c, slot) in input.iter_mut().enumerate() {
            let mut idx = base;
            for (j, &p) in positions.iter().enumerate() {
                if (c >> (k - 1 - j)) & 1 == 1 {
                    idx |= 1 << p;
                }
            }
            *slot = state[idx];
        }
        for r in 0..dim {
            let mut acc = Complex64::new(0.0, 0.0);
            for (c, &amp) in input.iter().enumerate() {
                acc += matrix[r * dim + c] * amp;
            }
            let mut idx = base;
            for (j, &p) in positions.iter().enumerate() {
                if (r >> (k - 1 - j)) & 1 == 1 {
                    idx |= 1 << p;
                }
            }
            state[idx] = acc;
        }
    }
}

/// Simulates `c` on `|0..0>` and returns the final amplitude vector.
pub fn statevector(c: &Circuit) -> Result<Vec<Complex64>, Error> {
    if c.qubits() > STATEVECTOR_QUBIT_LIMIT {
        return Err(Error::QubitLimit { qubits: c.qubits(), limit: STATEVECTOR_QUBIT_LIMIT });
    }
    let mut state = vec![Complex64::new(0.0, 0.0); 1 << c.qubits()];
    state[0] = Complex64::new(1.0, 0.0);
    for g in c.gates() {
        apply_gate(&mut state, g, c.qubits());
    }
    debug_assert!(
        (state.iter().map(|a| a.norm_sqr()).sum::<f64>() - 1.0).abs() < 1e-9,
        "statevector lost normalization"
    );
    Ok(state)
}

/// Full unitary of a circuit, built column by column.
pub fn circuit_matrix(c: &Circuit) -> Result<UnitaryMatrix, Error> {
    if c.qubits() > MATRIX_QUBIT_LIMIT {
        return Err(Error::QubitLimit { qubits: c.qubits(), limit: MATRIX_QUBIT_LIMIT });
    }
    let dim = 1usize << c.qubits();
    let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
    for col in 0..dim {
        let mut state = vec![Complex64::new(0.0, 0.0); dim];
        state[col] = Complex64::new(1.0, 0.0);
        for g in c.gates() {
            apply_gate(&mut state, g, c.qubits());
        }
        for row in 0..dim {
            data[row * dim + col] = state[row];
        }
    }
    Ok(UnitaryMatrix { dim, data })
}

/// `|Tr(U V^dag)|^2 / 4^n` for matrices of equal dimension `2^n`.
pub fn jamiolkowski_fidelity(u: &UnitaryMatrix, v: &UnitaryMatrix) -> f64 {
    let t = u.trace_of_product(&v.adjoint());
    t.norm_sqr() / ((u.dim * u.dim) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn empty_circuit_is_ground_state() {
        let c = Circuit::empty(1).unwrap();
        let v = statevector(&c).unwrap();
        assert_eq!(v, vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]);
    }

    #[test]
    fn hadamard_gives_plus_state() {
        let c = Circuit::new(1, vec![Gate::h(0)]).unwrap();
        let v = statevector(&c).unwrap();
        assert!((v[0].re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((v[1].re - FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn bell_state_amplitudes() {
        let c = Circuit::new(2, vec![Gate::h(0), Gate::cx(0, 1)]).unwrap();
        let v = statevector(&c).unwrap();
        assert!((v[0].re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!(v[1].norm() < 1e-15);
        assert!(v[2].norm() < 1e-15);
        assert!((v[3].re - FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn qubit_zero_is_most_significant() {
        // X on qubit 1 of a 2-qubit register: |00> -> |01> = index 1
        let c = Circuit::new(2, vec![Gate::x(1)]).unwrap();
        let v = statevector(&c).unwrap();
        assert!((v[basis_index("01")].re - 1.0).abs() < 1e-15);
        // X on qubit 0: |00> -> |10> = index 2
        let c = Circuit::new(2, vec![Gate::x(0)]).unwrap();
        let v = statevector(&c).unwrap();
        assert!((v[basis_index("10")].re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn qubit_limit_enforced() {
        let c = Circuit::empty(13).unwrap();
        assert!(matches!(statevector(&c), Err(Error::QubitLimit { .. })));
    }

    #[test]
    fn circuit_matrix_is_unitary_for_random_circuits() {
        for seed in 0..20 {
            let mut rng = crate::random::rng(seed);
            let n = 1 + (seed as usize) % 4;
            let c = crate::random::random_circuit(&mut rng, n, 15);
            let m = circuit_matrix(&c).unwrap();
            let prod = m.mul(&m.adjoint());
            let id = UnitaryMatrix::identity(m.dim);
            assert!(prod.max_abs_diff(&id) < 1e-9, "seed {seed}");
        }
    }

    #[test]
    fn dagger_circuit_matrix_is_conjugate_transpose() {
        for seed in 0..15u64 {
            let mut rng = crate::random::rng(seed.wrapping_add(500));
            let n = 1 + (seed as usize) % 4;
            let c = crate::random::random_circuit(&mut rng, n, 12);
            let m = circuit_matrix(&c).unwrap();
            let md = circuit_matrix(&crate::circuit::dagger(&c)).unwrap();
            assert!(md.max_abs_diff(&m.adjoint()) < 1e-9, "seed {seed}");
        }
    }

    #[test]
    fn ccx_matrix_matches_simulation() {
        let c = Circuit::new(3, vec![Gate::x(0), Gate::x(1), Gate::ccx(0, 1, 2)]).unwrap();
        let v = statevector(&c).unwrap();
        assert!((v[basis_index("111")].re - 1.0).abs() < 1e-15);
    }
}
