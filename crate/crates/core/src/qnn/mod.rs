//! Quantum neural network classifier: tiled two-qubit ansatz blocks, an
//! optional pooling funnel onto qubit 0, and BCE training with Adam.

mod ansatz;
mod engine;

pub use ansatz::{apply_block, AnsatzKind};

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

use rand::seq::index;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::embedding::{embed, EmbeddingSpec};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::optim::{Adam, AdamConfig};
use crate::rng;
use crate::sim::{Gate, GateKind, StateVector, MAX_QUBITS};

use engine::Fused;

/// Probability clamp used by the cross-entropy loss.
pub const PROB_EPS: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Wiring {
    /// Brick pattern over even then odd pairs, closing the ring with `(n−1, 0)`.
    Ladder,
    /// Same without the wrap-around pair.
    OneD,
}

fn default_layers() -> usize {
    2
}

fn default_true() -> bool {
    true
}

fn default_wiring() -> Wiring {
    Wiring::Ladder
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QnnConfig {
    pub n_qubits: usize,
    pub ansatz: AnsatzKind,
    #[serde(default = "default_layers")]
    pub layers: usize,
    #[serde(default = "default_true")]
    pub pooling: bool,
    pub embedding: EmbeddingSpec,
    #[serde(default = "default_wiring")]
    pub wiring: Wiring,
}

/// One block placement in the circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockSlot {
    pub kind: AnsatzKind,
    pub wires: (usize, usize),
    /// Index of the block's first parameter in the flat parameter vector.
    pub offset: usize,
}

impl QnnConfig {
    pub fn new(n_qubits: usize, ansatz: AnsatzKind, embedding: EmbeddingSpec) -> Self {
        QnnConfig {
            n_qubits,
            ansatz,
            layers: default_layers(),
            pooling: true,
            embedding,
            wiring: Wiring::Ladder,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(2..=MAX_QUBITS).contains(&self.n_qubits) {
            return Err(Error::Config(format!(
                "QNN width {} outside 2..={MAX_QUBITS}",
                self.n_qubits
            )));
        }
        if self.layers == 0 {
            return Err(Error::Config("QNN needs at least one layer".into()));
        }
        if self.ansatz == AnsatzKind::Pooling {
            return Err(Error::Config(
                "pooling is not a convolutional ansatz; set `pooling: true` instead".into(),
            ));
        }
        Ok(())
    }

    /// Wire pairs of one convolutional layer, in application order.
    pub fn layer_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.n_qubits;
        let mut pairs: Vec<_> = (0..n.saturating_sub(1)).step_by(2).map(|i| (i, i + 1)).collect();
        pairs.extend((1..n.saturating_sub(1)).step_by(2).map(|i| (i, i + 1)));
        // with two wires the ring pair duplicates (0, 1)
        if self.wiring == Wiring::Ladder && n > 2 {
            pairs.push((n - 1, 0));
        }
        pairs
    }

    /// Pooling pairs `(discarded, kept)`.
    pub fn pooling_pairs(&self) -> Vec<(usize, usize)> {
        if !self.pooling {
            return Vec::new();
        }
        let n = self.n_qubits;
        let mut out = Vec::new();
        if n.is_power_of_two() {
            let mut active: Vec<usize> = (0..n).collect();
            while active.len() > 1 {
                for k in 0..active.len() / 2 {
                    out.push((active[2 * k + 1], active[2 * k]));
                }
                active = active.iter().step_by(2).copied().collect();
            }
        } else {
            out.extend((0..n / 2).map(|k| (2 * k + 1, 2 * k)));
        }
        out
    }

    /// Every block in application order with its parameter offset.
    pub fn layout(&self) -> Vec<BlockSlot> {
        let mut slots = Vec::new();
        let mut offset = 0;
        let pairs = self.layer_pairs();
        for _ in 0..self.layers {
            for &wires in &pairs {
                slots.push(BlockSlot {
                    kind: self.ansatz,
                    wires,
                    offset,
                });
                offset += self.ansatz.param_count();
            }
        }
        for wires in self.pooling_pairs() {
            slots.push(BlockSlot {
                kind: AnsatzKind::Pooling,
                wires,
                offset,
            });
            offset += AnsatzKind::Pooling.param_count();
        }
        slots
    }

    pub fn param_count(&self) -> usize {
        self.layers * self.layer_pairs().len() * self.ansatz.param_count()
            + self.pooling_pairs().len() * AnsatzKind::Pooling.param_count()
    }

    /// The trainable part of the circuit as a flat gate list.
    pub fn circuit(&self, params: &QnnParams) -> Result<Vec<Gate>> {
        self.check_params(params)?;
        let mut gates = Vec::new();
        for slot in self.layout() {
            let p = &params.values[slot.offset..slot.offset + slot.kind.param_count()];
            gates.extend(
                ansatz::block_gates(slot.kind, p, slot.wires.0, slot.wires.1)
                    .into_iter()
                    .map(|bg| bg.gate),
            );
        }
        Ok(gates)
    }

    /// Gate kind carrying each parameter, used to pick the shift rule.
    fn param_kinds(&self) -> Vec<GateKind> {
        let mut kinds = Vec::with_capacity(self.param_count());
        for slot in self.layout() {
            kinds.extend(ansatz::param_gate_kinds(slot.kind));
        }
        kinds
    }

    fn check_params(&self, params: &QnnParams) -> Result<()> {
        self.validate()?;
        let want = self.param_count();
        if params.values.len() != want {
            return Err(Error::dim(want, params.values.len(), "QNN parameter count"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QnnParams {
    values: Vec<f64>,
}

impl QnnParams {
    pub fn new(config: &QnnConfig, values: Vec<f64>) -> Result<Self> {
        let p = QnnParams { values };
        config.check_params(&p)?;
        Ok(p)
    }

    /// Uniform on `[0, 2π)`.
    pub fn random(config: &QnnConfig, seed: u64) -> Result<Self> {
        config.validate()?;
        let mut rng = rng::seeded(seed);
        let values = (0..config.param_count())
            .map(|_| rng.random_range(0.0..2.0 * PI))
            .collect();
        Ok(QnnParams { values })
    }

    pub fn zeros(config: &QnnConfig) -> Result<Self> {
        config.validate()?;
        Ok(QnnParams {
            values: vec![0.0; config.param_count()],
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Optimizer {
    Adam,
}

/// How training differentiates the loss.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GradientMethod {
    /// Shift rule, two to four circuit runs per parameter and sample.
    ParameterShift,
    /// Reverse-mode sweep over fused block unitaries; one forward and one
    /// backward pass per sample regardless of parameter count.
    Adjoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainSettings {
    pub iterations: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    #[serde(default = "default_optimizer")]
    pub optimizer: Optimizer,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_gradient")]
    pub gradient: GradientMethod,
}

fn default_optimizer() -> Optimizer {
    Optimizer::Adam
}

fn default_gradient() -> GradientMethod {
    GradientMethod::Adjoint
}

impl Default for TrainSettings {
    fn default() -> Self {
        TrainSettings {
            iterations: 200,
            batch_size: 32,
            learning_rate: 0.01,
            optimizer: Optimizer::Adam,
            seed: 0,
            gradient: GradientMethod::Adjoint,
        }
    }
}

impl TrainSettings {
    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 || self.batch_size == 0 {
            return Err(Error::Config("iterations and batch_size must be positive".into()));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::Config(format!(
                "learning rate must be positive, got {}",
                self.learning_rate
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub params: QnnParams,
    /// Mini-batch loss before each update.
    pub loss_history: Vec<f64>,
}

/// Per-sample cross-entropy with clamped probability.
pub fn bce(p1: f64, label: u8) -> f64 {
    let p = p1.clamp(PROB_EPS, 1.0 - PROB_EPS);
    if label == 1 {
        -p.ln()
    } else {
        -(1.0 - p).ln()
    }
}

/// d bce / d p1; zero where the clamp is active.
fn bce_slope(p1: f64, label: u8) -> f64 {
    if !(PROB_EPS..=1.0 - PROB_EPS).contains(&p1) {
        0.0
    } else if label == 1 {
        -1.0 / p1
    } else {
        1.0 / (1.0 - p1)
    }
}

fn check_batch(config: &QnnConfig, x: &Matrix, y: &[u8]) -> Result<()> {
    if x.rows() == 0 {
        return Err(Error::Usage("empty batch".into()));
    }
    if x.rows() != y.len() {
        return Err(Error::dim(x.rows(), y.len(), "label count"));
    }
    if let Some(bad) = y.iter().find(|&&v| v > 1) {
        return Err(Error::Usage(format!("labels must be 0 or 1, got {bad}")));
    }
    config.embedding.check(x.cols(), config.n_qubits)
}

fn embedded(config: &QnnConfig, x: &[f64]) -> Result<StateVector> {
    embed(x, config.n_qubits, &config.embedding)
}

/// P(qubit 0 = 1) after embedding `x` and running the ansatz circuit.
pub fn forward(config: &QnnConfig, params: &QnnParams, x: &[f64]) -> Result<f64> {
    config.check_params(params)?;
    let fused = Fused::build(config, &params.values, false);
    let mut state = embedded(config, x)?;
    fused.run(&mut state);
    Ok(engine::p1(&state))
}

/// Forward probabilities for every row of `x`.
pub fn predict_proba(config: &QnnConfig, params: &QnnParams, x: &Matrix) -> Result<Vec<f64>> {
    config.check_params(params)?;
    config.embedding.check(x.cols(), config.n_qubits)?;
    let fused = Fused::build(config, &params.values, false);
    (0..x.rows())
        .into_par_iter()
        .map(|i| {
            let mut state = embedded(config, x.row(i))?;
            fused.run(&mut state);
            Ok(engine::p1(&state))
        })
        .collect()
}

/// Class labels with the `p1 ≥ 0.5 → 1` rule.
pub fn predict(config: &QnnConfig, params: &QnnParams, x: &Matrix) -> Result<Vec<u8>> {
    Ok(predict_proba(config, params, x)?
        .into_iter()
        .map(|p| u8::from(p >= 0.5))
        .collect())
}

/// Mean cross-entropy over the batch.
pub fn loss(config: &QnnConfig, params: &QnnParams, x: &Matrix, y: &[u8]) -> Result<f64> {
    check_batch(config, x, y)?;
    let p = predict_proba(config, params, x)?;
    Ok(p.iter().zip(y).map(|(&p, &l)| bce(p, l)).sum::<f64>() / y.len() as f64)
}

/// Loss gradient by the parameter-shift rule.
///
/// Single-qubit rotations (including each U3 angle) use the two-term rule
/// with shift π/2. Controlled rotations have generator eigenvalues
/// {0, ±½}, for which the two-term rule is inexact, so they use the
/// four-term rule with shifts ±π/2 and ±3π/2.
pub fn gradient(config: &QnnConfig, params: &QnnParams, x: &Matrix, y: &[u8]) -> Result<Vec<f64>> {
    check_batch(config, x, y)?;
    config.check_params(params)?;
    let states: Vec<StateVector> = (0..x.rows())
        .map(|i| embedded(config, x.row(i)))
        .collect::<Result<_>>()?;
    let eval = |values: &[f64]| -> Vec<f64> {
        let fused = Fused::build(config, values, false);
        states
            .par_iter()
            .map(|s| {
                let mut s = s.clone();
                fused.run(&mut s);
                engine::p1(&s)
            })
            .collect()
    };
    let base = eval(&params.values);
    let n = y.len() as f64;
    let slopes: Vec<f64> = base.iter().zip(y).map(|(&p, &l)| bce_slope(p, l) / n).collect();

    let kinds = config.param_kinds();
    let mut shifted = params.values.clone();
    let mut grad = vec![0.0; params.len()];
    for (k, kind) in kinds.iter().enumerate() {
        let mut at = |delta: f64| {
            shifted[k] = params.values[k] + delta;
            let r = eval(&shifted);
            shifted[k] = params.values[k];
            r
        };
        let dp: Vec<f64> = if kind.is_controlled() {
            let c_plus = (SQRT_2 + 1.0) / (4.0 * SQRT_2);
            let c_minus = (SQRT_2 - 1.0) / (4.0 * SQRT_2);
            let (p1, m1) = (at(FRAC_PI_2), at(-FRAC_PI_2));
            let (p3, m3) = (at(3.0 * FRAC_PI_2), at(-3.0 * FRAC_PI_2));
            (0..base.len())
                .map(|s| c_plus * (p1[s] - m1[s]) - c_minus * (p3[s] - m3[s]))
                .collect()
        } else {
            let (p, m) = (at(FRAC_PI_2), at(-FRAC_PI_2));
            p.iter().zip(&m).map(|(a, b)| 0.5 * (a - b)).collect()
        };
        grad[k] = dp.iter().zip(&slopes).map(|(d, s)| d * s).sum();
    }
    Ok(grad)
}

/// Loss and its gradient by one adjoint sweep per sample.
pub fn adjoint_gradient(
    config: &QnnConfig,
    params: &QnnParams,
    x: &Matrix,
    y: &[u8],
) -> Result<(f64, Vec<f64>)> {
    check_batch(config, x, y)?;
    config.check_params(params)?;
    let rows: Vec<usize> = (0..x.rows()).collect();
    loss_and_adjoint(config, &params.values, x, y, &rows)
}

fn loss_and_adjoint(
    config: &QnnConfig,
    values: &[f64],
    x: &Matrix,
    y: &[u8],
    rows: &[usize],
) -> Result<(f64, Vec<f64>)> {
    let fused = Fused::build(config, values, true);
    let n = rows.len() as f64;
    let per_sample: Vec<(f64, Vec<f64>)> = rows
        .par_iter()
        .map(|&i| {
            let mut state = embedded(config, x.row(i))?;
            fused.run(&mut state);
            let p = engine::p1(&state);
            let mut g = vec![0.0; values.len()];
            fused.backprop(state, bce_slope(p, y[i]) / n, &mut g);
            Ok((bce(p, y[i]) / n, g))
        })
        .collect::<Result<_>>()?;
    // fixed-order reduction keeps results independent of scheduling
    let mut total = 0.0;
    let mut grad = vec![0.0; values.len()];
    for (l, g) in per_sample {
        total += l;
        for (a, b) in grad.iter_mut().zip(&g) {
            *a += b;
        }
    }
    Ok((total, grad))
}

/// Adam training on random mini-batches drawn without replacement.
pub fn train(
    config: &QnnConfig,
    settings: &TrainSettings,
    x: &Matrix,
    y: &[u8],
) -> Result<TrainOutcome> {
    settings.validate()?;
    config.validate()?;
    check_batch(config, x, y)?;
    let mut params = QnnParams::random(config, rng::derive(settings.seed, 0))?;
    let mut batch_rng = rng::seeded(rng::derive(settings.seed, 1));
    let Optimizer::Adam = settings.optimizer;
    let mut adam = Adam::new(params.len(), AdamConfig::with_lr(settings.learning_rate));
    let batch = settings.batch_size.min(x.rows());
    let mut history = Vec::with_capacity(settings.iterations);
    for _ in 0..settings.iterations {
        let rows = index::sample(&mut batch_rng, x.rows(), batch).into_vec();
        let (l, g) = match settings.gradient {
            GradientMethod::Adjoint => loss_and_adjoint(config, &params.values, x, y, &rows)?,
            GradientMethod::ParameterShift => {
                let bx = x.select_rows(&rows);
                let by: Vec<u8> = rows.iter().map(|&i| y[i]).collect();
                (
                    loss(config, &params, &bx, &by)?,
                    gradient(config, &params, &bx, &by)?,
                )
            }
        };
        history.push(l);
        adam.step(&mut params.values, &g);
    }
    Ok(TrainOutcome {
        params,
        loss_history: history,
    })
}
