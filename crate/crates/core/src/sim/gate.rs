//! Gate definitions and their 2×2 / 4×4 matrices.
//!
//! Rotations follow `R_P(θ) = exp(-iθP/2)`. `U3(θ, φ, λ)` equals
//! `RZ(φ)·RY(θ)·RZ(λ)` times the global phase `e^{i(φ+λ)/2}`.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::{Mat2, Mat4, C64};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GateKind {
    H,
    RX,
    RY,
    RZ,
    U3,
    CNOT,
    CZ,
    CRX,
    CRZ,
    MultiRZ,
}

impl GateKind {
    pub fn param_arity(self) -> usize {
        match self {
            GateKind::H | GateKind::CNOT | GateKind::CZ => 0,
            GateKind::U3 => 3,
            _ => 1,
        }
    }

    pub fn wire_count(self) -> usize {
        match self {
            GateKind::H | GateKind::RX | GateKind::RY | GateKind::RZ | GateKind::U3 => 1,
            _ => 2,
        }
    }

    /// Diagonal in the computational basis.
    pub fn is_diagonal(self) -> bool {
        matches!(
            self,
            GateKind::RZ | GateKind::CZ | GateKind::CRZ | GateKind::MultiRZ
        )
    }

    /// Controlled kinds list the control wire first.
    pub fn is_controlled(self) -> bool {
        matches!(
            self,
            GateKind::CNOT | GateKind::CZ | GateKind::CRX | GateKind::CRZ
        )
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// A gate instance: kind, angles in radians, and target wires.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    pub kind: GateKind,
    pub params: Vec<f64>,
    pub wires: Vec<usize>,
}

impl Gate {
    /// Build a gate, checking parameter arity and wire count.
    pub fn new(kind: GateKind, params: &[f64], wires: &[usize]) -> Result<Self> {
        let gate = Gate {
            kind,
            params: params.to_vec(),
            wires: wires.to_vec(),
        };
        gate.check_shape()?;
        Ok(gate)
    }

    pub fn h(q: usize) -> Self {
        Self::raw(GateKind::H, &[], &[q])
    }
    pub fn rx(q: usize, theta: f64) -> Self {
        Self::raw(GateKind::RX, &[theta], &[q])
    }
    pub fn ry(q: usize, theta: f64) -> Self {
        Self::raw(GateKind::RY, &[theta], &[q])
    }
    pub fn rz(q: usize, theta: f64) -> Self {
        Self::raw(GateKind::RZ, &[theta], &[q])
    }
    pub fn u3(q: usize, theta: f64, phi: f64, lambda: f64) -> Self {
        Self::raw(GateKind::U3, &[theta, phi, lambda], &[q])
    }
    pub fn cnot(control: usize, target: usize) -> Self {
        Self::raw(GateKind::CNOT, &[], &[control, target])
    }
    pub fn cz(control: usize, target: usize) -> Self {
        Self::raw(GateKind::CZ, &[], &[control, target])
    }
    pub fn crx(control: usize, target: usize, theta: f64) -> Self {
        Self::raw(GateKind::CRX, &[theta], &[control, target])
    }
    pub fn crz(control: usize, target: usize, theta: f64) -> Self {
        Self::raw(GateKind::CRZ, &[theta], &[control, target])
    }
    pub fn multi_rz(a: usize, b: usize, theta: f64) -> Self {
        Self::raw(GateKind::MultiRZ, &[theta], &[a, b])
    }

    fn raw(kind: GateKind, params: &[f64], wires: &[usize]) -> Self {
        Gate {
            kind,
            params: params.to_vec(),
            wires: wires.to_vec(),
        }
    }

    fn check_shape(&self) -> Result<()> {
        if self.params.len() != self.kind.param_arity() {
            return Err(Error::Gate(format!(
                "{} takes {} parameter(s), got {}",
                self.kind,
                self.kind.param_arity(),
                self.params.len()
            )));
        }
        if self.wires.len() != self.kind.wire_count() {
            return Err(Error::Gate(format!(
                "{} acts on {} wire(s), got {}",
                self.kind,
                self.kind.wire_count(),
                self.wires.len()
            )));
        }
        if self.wires.len() == 2 && self.wires[0] == self.wires[1] {
            return Err(Error::Gate(format!(
                "{} wire collision on qubit {}",
                self.kind, self.wires[0]
            )));
        }
        Ok(())
    }

    /// Full validation against a register width.
    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        self.check_shape()?;
        if let Some(&w) = self.wires.iter().find(|&&w| w >= n_qubits) {
            return Err(Error::Gate(format!(
                "{} wire {} out of range for {} qubit(s)",
                self.kind, w, n_qubits
            )));
        }
        Ok(())
    }

    /// Same gate with angles negated. This is the inverse for every kind
    /// except `U3`, whose inverse is `U3(-θ, -λ, -φ)`.
    pub fn negated(&self) -> Self {
        Gate {
            kind: self.kind,
            params: self.params.iter().map(|p| -p).collect(),
            wires: self.wires.clone(),
        }
    }

    /// The exact inverse gate.
    pub fn inverse(&self) -> Self {
        match self.kind {
            GateKind::U3 => Gate::raw(
                GateKind::U3,
                &[-self.params[0], -self.params[2], -self.params[1]],
                &self.wires,
            ),
            _ => self.negated(),
        }
    }

    /// 2×2 matrix of the single-qubit action (the target action for
    /// controlled kinds). `MultiRZ` has no such form.
    pub(crate) fn target_matrix(&self) -> Mat2 {
        let p = &self.params;
        match self.kind {
            GateKind::H => {
                let r = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
                [[r, r], [r, -r]]
            }
            GateKind::RX | GateKind::CRX => rx_matrix(p[0]),
            GateKind::RY => ry_matrix(p[0]),
            GateKind::RZ | GateKind::CRZ => rz_matrix(p[0]),
            GateKind::U3 => u3_matrix(p[0], p[1], p[2]),
            GateKind::CNOT => [[C64::ZERO, C64::ONE], [C64::ONE, C64::ZERO]],
            GateKind::CZ => [[C64::ONE, C64::ZERO], [C64::ZERO, -C64::ONE]],
            GateKind::MultiRZ => unreachable!("MultiRZ has no single-qubit form"),
        }
    }

    /// Derivative of the target matrix with respect to parameter `k`.
    pub(crate) fn target_matrix_derivative(&self, k: usize) -> Mat2 {
        let p = &self.params;
        match self.kind {
            GateKind::RX | GateKind::CRX => {
                let (s, c) = (p[0] / 2.0).sin_cos();
                let a = C64::new(-s / 2.0, 0.0);
                let b = C64::new(0.0, -c / 2.0);
                [[a, b], [b, a]]
            }
            GateKind::RY => {
                let (s, c) = (p[0] / 2.0).sin_cos();
                [
                    [C64::new(-s / 2.0, 0.0), C64::new(-c / 2.0, 0.0)],
                    [C64::new(c / 2.0, 0.0), C64::new(-s / 2.0, 0.0)],
                ]
            }
            GateKind::RZ | GateKind::CRZ => {
                let e = C64::from_polar(0.5, -p[0] / 2.0);
                let f = C64::from_polar(0.5, p[0] / 2.0);
                [
                    [e * C64::new(0.0, -1.0), C64::ZERO],
                    [C64::ZERO, f * C64::new(0.0, 1.0)],
                ]
            }
            GateKind::U3 => u3_derivative(p[0], p[1], p[2], k),
            _ => [[C64::ZERO; 2]; 2],
        }
    }

    /// 4×4 matrix of this gate restricted to the wire pair `(w0, w1)`.
    /// Local basis index is `bit(w0) + 2·bit(w1)`.
    pub(crate) fn local_matrix(&self, pair: (usize, usize)) -> Mat4 {
        self.local_embed(pair, None)
    }

    /// Derivative of [`local_matrix`](Self::local_matrix) with respect to parameter `k`.
    pub(crate) fn local_matrix_derivative(&self, pair: (usize, usize), k: usize) -> Mat4 {
        self.local_embed(pair, Some(k))
    }

    fn local_embed(&self, pair: (usize, usize), deriv: Option<usize>) -> Mat4 {
        let pos = |w: usize| -> usize {
            if w == pair.0 {
                0
            } else if w == pair.1 {
                1
            } else {
                panic!("wire {w} outside local pair {pair:?}")
            }
        };
        let mut out = [[C64::ZERO; 4]; 4];
        if self.kind == GateKind::MultiRZ {
            let theta = self.params[0];
            for (l, row) in out.iter_mut().enumerate() {
                let parity = (l & 1) ^ (l >> 1);
                let sign = if parity == 0 { -1.0 } else { 1.0 };
                row[l] = match deriv {
                    None => C64::from_polar(1.0, sign * theta / 2.0),
                    Some(_) => C64::from_polar(1.0, sign * theta / 2.0) * C64::new(0.0, sign / 2.0),
                };
            }
            return out;
        }
        let m = match deriv {
            None => self.target_matrix(),
            Some(k) => self.target_matrix_derivative(k),
        };
        if self.kind.wire_count() == 1 {
            let t = pos(self.wires[0]);
            let bit = 1 << t;
            for l in 0..4 {
                for r in 0..4 {
                    if (l & !bit) == (r & !bit) {
                        out[l][r] = m[(l >> t) & 1][(r >> t) & 1];
                    }
                }
            }
        } else {
            let cbit = 1 << pos(self.wires[0]);
            let t = pos(self.wires[1]);
            let tbit = 1 << t;
            for l in 0..4 {
                for r in 0..4 {
                    if (l & !tbit) != (r & !tbit) {
                        continue;
                    }
                    if l & cbit == 0 {
                        // control off: identity, derivative zero
                        if deriv.is_none() && l == r {
                            out[l][r] = C64::ONE;
                        }
                    } else {
                        out[l][r] = m[(l >> t) & 1][(r >> t) & 1];
                    }
                }
            }
        }
        out
    }
}

pub(crate) fn rx_matrix(theta: f64) -> Mat2 {
    let (s, c) = (theta / 2.0).sin_cos();
    [
        [C64::new(c, 0.0), C64::new(0.0, -s)],
        [C64::new(0.0, -s), C64::new(c, 0.0)],
    ]
}

pub(crate) fn ry_matrix(theta: f64) -> Mat2 {
    let (s, c) = (theta / 2.0).sin_cos();
    [
        [C64::new(c, 0.0), C64::new(-s, 0.0)],
        [C64::new(s, 0.0), C64::new(c, 0.0)],
    ]
}

pub(crate) fn rz_matrix(theta: f64) -> Mat2 {
    [
        [C64::from_polar(1.0, -theta / 2.0), C64::ZERO],
        [C64::ZERO, C64::from_polar(1.0, theta / 2.0)],
    ]
}

pub(crate) fn u3_matrix(theta: f64, phi: f64, lambda: f64) -> Mat2 {
    let (s, c) = (theta / 2.0).sin_cos();
    [
        [C64::new(c, 0.0), -C64::from_polar(s, lambda)],
        [C64::from_polar(s, phi), C64::from_polar(c, phi + lambda)],
    ]
}

fn u3_derivative(theta: f64, phi: f64, lambda: f64, k: usize) -> Mat2 {
    let (s, c) = (theta / 2.0).sin_cos();
    let i = C64::new(0.0, 1.0);
    match k {
        0 => [
            [C64::new(-s / 2.0, 0.0), -C64::from_polar(c / 2.0, lambda)],
            [C64::from_polar(c / 2.0, phi), -C64::from_polar(s / 2.0, phi + lambda)],
        ],
        1 => [
            [C64::ZERO, C64::ZERO],
            [i * C64::from_polar(s, phi), i * C64::from_polar(c, phi + lambda)],
        ],
        2 => [
            [C64::ZERO, -i * C64::from_polar(s, lambda)],
            [C64::ZERO, i * C64::from_polar(c, phi + lambda)],
        ],
        _ => panic!("U3 has three parameters"),
    }
}
