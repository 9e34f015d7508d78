//! Dense statevector simulator.
//!
//! Amplitudes live in a flat array where qubit 0 is the least significant
//! bit of the basis index. Gates are applied in place by stride iteration;
//! no full `2^n × 2^n` matrix is ever built.

mod gate;
pub(crate) mod kernels;

pub use gate::{Gate, GateKind};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type Mat2 = [[C64; 2]; 2];
pub type Mat4 = [[C64; 4]; 4];

pub const MAX_QUBITS: usize = 16;

/// Pure state of an `n`-qubit register.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<C64>,
}

fn check_width(n_qubits: usize) -> Result<()> {
    if n_qubits == 0 || n_qubits > MAX_QUBITS {
        return Err(Error::Config(format!(
            "qubit count {n_qubits} outside 1..={MAX_QUBITS}"
        )));
    }
    Ok(())
}

impl StateVector {
    /// `|0…0⟩` on `n_qubits` qubits.
    pub fn zero(n_qubits: usize) -> Result<Self> {
        check_width(n_qubits)?;
        let mut amps = vec![C64::ZERO; 1 << n_qubits];
        amps[0] = C64::ONE;
        Ok(StateVector { n_qubits, amps })
    }

    /// Wrap an amplitude vector. Length must be `2^n_qubits` and the norm 1
    /// within `1e-8`.
    pub fn from_amplitudes(n_qubits: usize, amps: Vec<C64>) -> Result<Self> {
        check_width(n_qubits)?;
        if amps.len() != 1 << n_qubits {
            return Err(Error::dim(1 << n_qubits, amps.len(), "amplitude count"));
        }
        let state = StateVector { n_qubits, amps };
        let norm = state.norm();
        if (norm - 1.0).abs() > 1e-8 {
            return Err(Error::Normalization(format!("state norm is {norm}")));
        }
        Ok(state)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub(crate) fn amps_mut(&mut self) -> &mut [C64] {
        &mut self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Probabilities of every basis state.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Apply a gate in place.
    pub fn apply(&mut self, gate: &Gate) -> Result<()> {
        gate.validate(self.n_qubits)?;
        self.apply_unchecked(gate);
        Ok(())
    }

    pub(crate) fn apply_unchecked(&mut self, gate: &Gate) {
        let w = &gate.wires;
        let amps = &mut self.amps;
        match gate.kind {
            GateKind::H | GateKind::RX | GateKind::RY | GateKind::U3 => {
                kernels::apply_1q(amps, w[0], &gate.target_matrix())
            }
            GateKind::RZ => {
                let m = gate.target_matrix();
                kernels::apply_diag_1q(amps, w[0], m[0][0], m[1][1])
            }
            GateKind::CNOT | GateKind::CRX => {
                kernels::apply_controlled_1q(amps, w[0], w[1], &gate.target_matrix())
            }
            GateKind::CZ | GateKind::CRZ => {
                let m = gate.target_matrix();
                kernels::apply_controlled_diag(amps, w[0], w[1], m[0][0], m[1][1])
            }
            GateKind::MultiRZ => {
                let even = C64::from_polar(1.0, -gate.params[0] / 2.0);
                let odd = C64::from_polar(1.0, gate.params[0] / 2.0);
                kernels::apply_parity_phase(amps, w[0], w[1], even, odd)
            }
        }
    }

    /// Apply a 4×4 unitary on the wire pair `(w0, w1)`; local index is
    /// `bit(w0) + 2·bit(w1)`.
    pub(crate) fn apply_pair_matrix(&mut self, pair: (usize, usize), m: &Mat4) {
        kernels::apply_mat4(&mut self.amps, pair.0, pair.1, m)
    }

    /// `(P(qubit = 0), P(qubit = 1))`.
    pub fn qubit_probabilities(&self, qubit: usize) -> Result<(f64, f64)> {
        if qubit >= self.n_qubits {
            return Err(Error::Config(format!(
                "qubit {qubit} out of range for {} qubit(s)",
                self.n_qubits
            )));
        }
        let mask = 1usize << qubit;
        let (mut p0, mut p1) = (0.0, 0.0);
        for (i, a) in self.amps.iter().enumerate() {
            if i & mask == 0 {
                p0 += a.norm_sqr();
            } else {
                p1 += a.norm_sqr();
            }
        }
        Ok((p0, p1))
    }
}

/// `apply_gate(state, gate)` in value form.
pub fn apply_gate(mut state: StateVector, gate: &Gate) -> Result<StateVector> {
    state.apply(gate)?;
    Ok(state)
}

/// `⟨a|b⟩`.
pub fn inner_product(a: &StateVector, b: &StateVector) -> Result<C64> {
    if a.n_qubits != b.n_qubits {
        return Err(Error::dim(a.n_qubits, b.n_qubits, "inner product qubit count"));
    }
    Ok(kernels::vdot(&a.amps, &b.amps))
}
