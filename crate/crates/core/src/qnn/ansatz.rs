//! Two-qubit ansatz blocks.
//!
//! Each block acts on an ordered wire pair `(a, b)`. Controlled
//! cross-links follow the circuit diagrams: the first controlled rotation
//! is driven by `b`, the second by `a`. Pooling is driven by `a` and
//! rotates `b`, so the surviving wire is always the second of the pair.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::{Gate, GateKind, StateVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AnsatzKind {
    #[serde(rename = "u_ttn")]
    UTtn,
    #[serde(rename = "u_9")]
    U9,
    #[serde(rename = "u_13")]
    U13,
    #[serde(rename = "u_14")]
    U14,
    #[serde(rename = "u_so4")]
    USo4,
    #[serde(rename = "u_5")]
    U5,
    #[serde(rename = "u_6")]
    U6,
    #[serde(rename = "u_su4")]
    USu4,
    #[serde(rename = "pooling")]
    Pooling,
}

impl AnsatzKind {
    pub const ALL: [AnsatzKind; 9] = [
        AnsatzKind::UTtn,
        AnsatzKind::U9,
        AnsatzKind::U13,
        AnsatzKind::U14,
        AnsatzKind::USo4,
        AnsatzKind::U5,
        AnsatzKind::U6,
        AnsatzKind::USu4,
        AnsatzKind::Pooling,
    ];

    pub fn param_count(self) -> usize {
        match self {
            AnsatzKind::UTtn | AnsatzKind::U9 | AnsatzKind::Pooling => 2,
            AnsatzKind::U13 | AnsatzKind::U14 | AnsatzKind::USo4 => 6,
            AnsatzKind::U5 | AnsatzKind::U6 => 10,
            AnsatzKind::USu4 => 15,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            AnsatzKind::UTtn => "u_ttn",
            AnsatzKind::U9 => "u_9",
            AnsatzKind::U13 => "u_13",
            AnsatzKind::U14 => "u_14",
            AnsatzKind::USo4 => "u_so4",
            AnsatzKind::U5 => "u_5",
            AnsatzKind::U6 => "u_6",
            AnsatzKind::USu4 => "u_su4",
            AnsatzKind::Pooling => "pooling",
        }
    }
}

impl fmt::Display for AnsatzKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A gate in a block plus the block-local index of each of its parameters.
pub(crate) struct BlockGate {
    pub gate: Gate,
    pub param_slots: Vec<usize>,
}

fn g(gate: Gate, slots: &[usize]) -> BlockGate {
    BlockGate {
        gate,
        param_slots: slots.to_vec(),
    }
}

/// Gate sequence of one block on `(a, b)`. `p` must hold `kind.param_count()` angles.
pub(crate) fn block_gates(kind: AnsatzKind, p: &[f64], a: usize, b: usize) -> Vec<BlockGate> {
    debug_assert_eq!(p.len(), kind.param_count());
    match kind {
        AnsatzKind::UTtn => vec![
            g(Gate::ry(a, p[0]), &[0]),
            g(Gate::ry(b, p[1]), &[1]),
            g(Gate::cnot(a, b), &[]),
        ],
        AnsatzKind::U9 => vec![
            g(Gate::h(a), &[]),
            g(Gate::h(b), &[]),
            g(Gate::cz(a, b), &[]),
            g(Gate::rx(a, p[0]), &[0]),
            g(Gate::rx(b, p[1]), &[1]),
        ],
        AnsatzKind::U13 | AnsatzKind::U14 => {
            let cross = |c: usize, t: usize, theta: f64| {
                if kind == AnsatzKind::U13 {
                    Gate::crz(c, t, theta)
                } else {
                    Gate::crx(c, t, theta)
                }
            };
            vec![
                g(Gate::ry(a, p[0]), &[0]),
                g(Gate::ry(b, p[1]), &[1]),
                g(cross(b, a, p[2]), &[2]),
                g(Gate::ry(a, p[3]), &[3]),
                g(Gate::ry(b, p[4]), &[4]),
                g(cross(a, b, p[5]), &[5]),
            ]
        }
        AnsatzKind::USo4 => vec![
            g(Gate::ry(a, p[0]), &[0]),
            g(Gate::ry(b, p[1]), &[1]),
            g(Gate::cnot(a, b), &[]),
            g(Gate::ry(a, p[2]), &[2]),
            g(Gate::ry(b, p[3]), &[3]),
            g(Gate::cnot(a, b), &[]),
            g(Gate::ry(a, p[4]), &[4]),
            g(Gate::ry(b, p[5]), &[5]),
        ],
        AnsatzKind::U5 | AnsatzKind::U6 => {
            let cross = |c: usize, t: usize, theta: f64| {
                if kind == AnsatzKind::U5 {
                    Gate::crz(c, t, theta)
                } else {
                    Gate::crx(c, t, theta)
                }
            };
            vec![
                g(Gate::rx(a, p[0]), &[0]),
                g(Gate::rx(b, p[1]), &[1]),
                g(Gate::rz(a, p[2]), &[2]),
                g(Gate::rz(b, p[3]), &[3]),
                g(cross(b, a, p[4]), &[4]),
                g(cross(a, b, p[5]), &[5]),
                g(Gate::rx(a, p[6]), &[6]),
                g(Gate::rx(b, p[7]), &[7]),
                g(Gate::rz(a, p[8]), &[8]),
                g(Gate::rz(b, p[9]), &[9]),
            ]
        }
        AnsatzKind::USu4 => vec![
            g(Gate::u3(a, p[0], p[1], p[2]), &[0, 1, 2]),
            g(Gate::u3(b, p[3], p[4], p[5]), &[3, 4, 5]),
            g(Gate::cnot(a, b), &[]),
            g(Gate::ry(a, p[6]), &[6]),
            g(Gate::rz(b, p[7]), &[7]),
            g(Gate::cnot(b, a), &[]),
            g(Gate::ry(a, p[8]), &[8]),
            g(Gate::cnot(a, b), &[]),
            g(Gate::u3(a, p[9], p[10], p[11]), &[9, 10, 11]),
            g(Gate::u3(b, p[12], p[13], p[14]), &[12, 13, 14]),
        ],
        AnsatzKind::Pooling => vec![
            g(Gate::crz(a, b, p[0]), &[0]),
            g(Gate::crx(a, b, p[1]), &[1]),
        ],
    }
}

/// Gate kind that carries each block-local parameter.
pub(crate) fn param_gate_kinds(kind: AnsatzKind) -> Vec<GateKind> {
    let zeros = vec![0.0; kind.param_count()];
    let mut out = vec![GateKind::H; kind.param_count()];
    for bg in block_gates(kind, &zeros, 0, 1) {
        for &slot in &bg.param_slots {
            out[slot] = bg.gate.kind;
        }
    }
    out
}

/// Apply one block to `state` on `wires = (a, b)`.
pub fn apply_block(
    state: &mut StateVector,
    kind: AnsatzKind,
    params: &[f64],
    wires: (usize, usize),
) -> Result<()> {
    if params.len() != kind.param_count() {
        return Err(Error::Gate(format!(
            "{kind} takes {} parameters, got {}",
            kind.param_count(),
            params.len()
        )));
    }
    for bg in block_gates(kind, params, wires.0, wires.1) {
        state.apply(&bg.gate)?;
    }
    Ok(())
}
