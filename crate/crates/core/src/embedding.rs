//! Classical-to-quantum data encodings: angle (X/Y/Z), amplitude, and IQP.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::{Gate, StateVector, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EmbeddingKind {
    AngleX,
    AngleY,
    AngleZ,
    Amplitude,
    Iqp,
}

impl EmbeddingKind {
    pub fn name(self) -> &'static str {
        match self {
            EmbeddingKind::AngleX => "angle_x",
            EmbeddingKind::AngleY => "angle_y",
            EmbeddingKind::AngleZ => "angle_z",
            EmbeddingKind::Amplitude => "amplitude",
            EmbeddingKind::Iqp => "iqp",
        }
    }

    pub fn is_angle(self) -> bool {
        matches!(
            self,
            EmbeddingKind::AngleX | EmbeddingKind::AngleY | EmbeddingKind::AngleZ
        )
    }
}

fn default_iqp_repeats() -> usize {
    2
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmbeddingSpec {
    pub kind: EmbeddingKind,
    /// Layer repetitions, IQP only.
    #[serde(default = "default_iqp_repeats")]
    pub iqp_repeats: usize,
}

impl EmbeddingSpec {
    pub fn new(kind: EmbeddingKind) -> Self {
        EmbeddingSpec {
            kind,
            iqp_repeats: default_iqp_repeats(),
        }
    }

    pub fn iqp(repeats: usize) -> Self {
        EmbeddingSpec {
            kind: EmbeddingKind::Iqp,
            iqp_repeats: repeats,
        }
    }

    /// Check that `n_features` can be encoded on `n_qubits`.
    pub fn check(&self, n_features: usize, n_qubits: usize) -> Result<()> {
        match self.kind {
            EmbeddingKind::Amplitude => {
                if n_qubits > crate::sim::MAX_QUBITS || n_features > 1 << n_qubits {
                    return Err(Error::dim(
                        1 << n_qubits.min(crate::sim::MAX_QUBITS),
                        n_features,
                        "amplitude embedding holds at most 2^n features",
                    ));
                }
            }
            _ => {
                if n_features != n_qubits {
                    return Err(Error::dim(
                        n_qubits,
                        n_features,
                        format!("{} embedding needs one feature per qubit", self.kind.name()),
                    ));
                }
                if self.kind == EmbeddingKind::Iqp && self.iqp_repeats == 0 {
                    return Err(Error::Config("iqp_repeats must be at least 1".into()));
                }
            }
        }
        Ok(())
    }
}

/// Rotation gate encoding `x` on `wire` for an angle embedding kind.
pub(crate) fn angle_gate(kind: EmbeddingKind, wire: usize, x: f64) -> Gate {
    match kind {
        EmbeddingKind::AngleX => Gate::rx(wire, x),
        EmbeddingKind::AngleY => Gate::ry(wire, x),
        EmbeddingKind::AngleZ => Gate::rz(wire, x),
        _ => unreachable!("not an angle embedding"),
    }
}

/// Adjacent wire pairs of the IQP entangling ring.
fn ring_pairs(n: usize) -> Vec<(usize, usize)> {
    match n {
        0 | 1 => Vec::new(),
        2 => vec![(0, 1)],
        _ => (0..n).map(|i| (i, (i + 1) % n)).collect(),
    }
}

/// Encode `x` into a normalized state on `n_qubits`.
pub fn embed(x: &[f64], n_qubits: usize, spec: &EmbeddingSpec) -> Result<StateVector> {
    spec.check(x.len(), n_qubits)?;
    match spec.kind {
        EmbeddingKind::Amplitude => {
            let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm == 0.0 || !norm.is_finite() {
                return Err(Error::Normalization(format!(
                    "amplitude embedding needs a nonzero finite vector (norm {norm})"
                )));
            }
            let mut amps = vec![C64::ZERO; 1 << n_qubits];
            for (a, v) in amps.iter_mut().zip(x) {
                *a = C64::new(v / norm, 0.0);
            }
            StateVector::from_amplitudes(n_qubits, amps)
        }
        EmbeddingKind::Iqp => {
            let mut state = StateVector::zero(n_qubits)?;
            let pairs = ring_pairs(n_qubits);
            for _ in 0..spec.iqp_repeats {
                for q in 0..n_qubits {
                    state.apply_unchecked(&Gate::h(q));
                }
                for (q, &v) in x.iter().enumerate() {
                    state.apply_unchecked(&Gate::rz(q, v));
                }
                for &(a, b) in &pairs {
                    state.apply_unchecked(&Gate::multi_rz(a, b, x[a] * x[b]));
                }
            }
            Ok(state)
        }
        kind => {
            let mut state = StateVector::zero(n_qubits)?;
            for (q, &v) in x.iter().enumerate() {
                state.apply_unchecked(&angle_gate(kind, q, v));
            }
            Ok(state)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn amplitude_normalizes() {
        let s = embed(&[3.0, 4.0], 1, &EmbeddingSpec::new(EmbeddingKind::Amplitude)).unwrap();
        assert!((s.amplitudes()[0] - C64::new(0.6, 0.0)).norm() < 1e-15);
        assert!((s.amplitudes()[1] - C64::new(0.8, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn amplitude_pads_to_register() {
        let mut x = vec![0.0; 16];
        x[0] = 5.0;
        let s = embed(&x, 16, &EmbeddingSpec::new(EmbeddingKind::Amplitude)).unwrap();
        assert_eq!(s.amplitudes().len(), 65_536);
        assert_eq!(s.amplitudes()[0], C64::ONE);
        assert_eq!(s.amplitudes().iter().filter(|a| **a == C64::ZERO).count(), 65_535);
    }

    #[test]
    fn amplitude_rejects_zero_and_oversize() {
        let spec = EmbeddingSpec::new(EmbeddingKind::Amplitude);
        assert!(matches!(embed(&[0.0, 0.0], 1, &spec), Err(Error::Normalization(_))));
        assert!(matches!(embed(&[1.0, 2.0, 3.0], 1, &spec), Err(Error::Dimension { .. })));
    }

    #[test]
    fn angle_y_pi_flips_every_qubit() {
        let s = embed(&[PI, PI], 2, &EmbeddingSpec::new(EmbeddingKind::AngleY)).unwrap();
        for q in 0..2 {
            assert!((s.qubit_probabilities(q).unwrap().1 - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn angle_z_keeps_mass_on_zero() {
        let s = embed(&[0.3, -2.0, 5.0], 3, &EmbeddingSpec::new(EmbeddingKind::AngleZ)).unwrap();
        let p = s.probabilities();
        assert!((p[0] - 1.0).abs() < 1e-12);
        assert!(p[1..].iter().all(|v| *v < 1e-12));
    }

    #[test]
    fn iqp_zero_input_is_identity() {
        let s = embed(&[0.0; 4], 4, &EmbeddingSpec::iqp(2)).unwrap();
        assert!((s.amplitudes()[0] - C64::ONE).norm() < 1e-12);
    }

    #[test]
    fn angle_needs_matching_width() {
        let spec = EmbeddingSpec::new(EmbeddingKind::AngleX);
        assert!(matches!(embed(&[1.0, 2.0], 3, &spec), Err(Error::Dimension { .. })));
        assert!(matches!(
            embed(&[1.0], 1, &EmbeddingSpec::iqp(0)),
            Err(Error::Config(_))
        ));
    }

    fn any_kind() -> impl Strategy<Value = EmbeddingSpec> {
        prop_oneof![
            Just(EmbeddingSpec::new(EmbeddingKind::AngleX)),
            Just(EmbeddingSpec::new(EmbeddingKind::AngleY)),
            Just(EmbeddingSpec::new(EmbeddingKind::AngleZ)),
            Just(EmbeddingSpec::new(EmbeddingKind::Amplitude)),
            (1usize..4).prop_map(EmbeddingSpec::iqp),
        ]
    }

    proptest! {
        #[test]
        fn output_is_normalized(spec in any_kind(), x in prop::collection::vec(-4.0f64..4.0, 4)) {
            prop_assume!(x.iter().any(|v| v.abs() > 1e-3));
            let s = embed(&x, 4, &spec).unwrap();
            prop_assert!((s.norm() - 1.0).abs() < 1e-10);
        }

        #[test]
        fn amplitude_is_scale_invariant(x in prop::collection::vec(-4.0f64..4.0, 5), c in 0.01f64..100.0) {
            prop_assume!(x.iter().any(|v| v.abs() > 1e-3));
            let spec = EmbeddingSpec::new(EmbeddingKind::Amplitude);
            let scaled: Vec<f64> = x.iter().map(|v| v * c).collect();
            let a = embed(&x, 3, &spec).unwrap();
            let b = embed(&scaled, 3, &spec).unwrap();
            for (p, q) in a.amplitudes().iter().zip(b.amplitudes()) {
                prop_assert!((p - q).norm() < 1e-10);
            }
        }

        #[test]
        fn angles_are_periodic(kind in prop_oneof![Just(EmbeddingKind::AngleX), Just(EmbeddingKind::AngleY), Just(EmbeddingKind::AngleZ)],
                               x in prop::collection::vec(-4.0f64..4.0, 3), i in 0usize..3) {
            let spec = EmbeddingSpec::new(kind);
            let mut shifted = x.clone();
            shifted[i] += 2.0 * PI;
            let a = embed(&x, 3, &spec).unwrap().probabilities();
            let b = embed(&shifted, 3, &spec).unwrap().probabilities();
            for (p, q) in a.iter().zip(&b) {
                prop_assert!((p - q).abs() < 1e-10);
            }
        }

        #[test]
        fn embedding_is_deterministic(spec in any_kind(), x in prop::collection::vec(-4.0f64..4.0, 4)) {
            prop_assume!(x.iter().any(|v| v.abs() > 1e-3));
            let a = embed(&x, 4, &spec).unwrap();
            let b = embed(&x, 4, &spec).unwrap();
            prop_assert_eq!(a.amplitudes(), b.amplitudes());
        }
    }
}
