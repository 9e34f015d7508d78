//! Fused block execution and adjoint differentiation.
//!
//! Each ansatz block is folded into one 4×4 unitary on its wire pair, which
//! cuts passes over the amplitude array by the number of gates per block.
//! Derivative matrices `∂U/∂θ` are kept per block so that a single reverse
//! sweep yields every parameter's gradient.

use super::{ansatz, QnnConfig};
use crate::sim::kernels::{self, dagger4, identity4, matmul4};
use crate::sim::{Mat4, StateVector, C64};

pub(super) struct FusedBlock {
    pair: (usize, usize),
    u: Mat4,
    u_dag: Mat4,
    /// `(global parameter index, ∂U/∂θ)`.
    derivs: Vec<(usize, Mat4)>,
}

pub(super) struct Fused {
    blocks: Vec<FusedBlock>,
}

impl Fused {
    pub fn build(config: &QnnConfig, values: &[f64], with_derivs: bool) -> Fused {
        let blocks = config
            .layout()
            .into_iter()
            .map(|slot| {
                let p = &values[slot.offset..slot.offset + slot.kind.param_count()];
                let pair = slot.wires;
                let gates = ansatz::block_gates(slot.kind, p, pair.0, pair.1);
                let locals: Vec<Mat4> = gates.iter().map(|bg| bg.gate.local_matrix(pair)).collect();
                // prefix[j] = L_j ⋯ L_1 (prefix[0] = I)
                let mut prefix = vec![identity4()];
                for l in &locals {
                    let next = matmul4(l, prefix.last().unwrap());
                    prefix.push(next);
                }
                let u = *prefix.last().unwrap();
                let mut derivs = Vec::new();
                if with_derivs {
                    // suffix[j] = L_m ⋯ L_{j+1}
                    let m = locals.len();
                    let mut suffix = vec![identity4(); m + 1];
                    for j in (0..m).rev() {
                        suffix[j] = matmul4(&suffix[j + 1], &locals[j]);
                    }
                    for (j, bg) in gates.iter().enumerate() {
                        for (t, &slot_idx) in bg.param_slots.iter().enumerate() {
                            let d = bg.gate.local_matrix_derivative(pair, t);
                            let full = matmul4(&suffix[j + 1], &matmul4(&d, &prefix[j]));
                            derivs.push((slot.offset + slot_idx, full));
                        }
                    }
                }
                FusedBlock {
                    pair,
                    u,
                    u_dag: dagger4(&u),
                    derivs,
                }
            })
            .collect();
        Fused { blocks }
    }

    pub fn run(&self, state: &mut StateVector) {
        for b in &self.blocks {
            state.apply_pair_matrix(b.pair, &b.u);
        }
    }

    /// Accumulate `weight · ∂p1/∂θ` into `grad`, given the final state.
    pub fn backprop(&self, mut psi: StateVector, weight: f64, grad: &mut [f64]) {
        if weight == 0.0 {
            return;
        }
        let mut lambda = psi.clone();
        kernels::project_one(lambda.amps_mut(), 0);
        for b in self.blocks.iter().rev() {
            psi.apply_pair_matrix(b.pair, &b.u_dag);
            if !b.derivs.is_empty() {
                let m = kernels::pair_overlap(lambda.amplitudes(), psi.amplitudes(), b.pair.0, b.pair.1);
                for (k, d) in &b.derivs {
                    let mut acc = C64::ZERO;
                    for r in 0..4 {
                        for c in 0..4 {
                            acc += d[r][c] * m[r][c];
                        }
                    }
                    grad[*k] += weight * 2.0 * acc.re;
                }
            }
            lambda.apply_pair_matrix(b.pair, &b.u_dag);
        }
    }
}

pub(super) fn p1(state: &StateVector) -> f64 {
    kernels::prob_one(state.amplitudes(), 0)
}
