//! Symmetric autoencoder `m → h → d → h → m` with `h = max(d, ⌈m/2⌉)`.
//! Hidden layers use ReLU (or identity for the linear ablation); the code
//! and output layers are linear.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::linalg::Matrix;
use crate::nn::{fit, FitSettings, LayerSpec, Loss, Network, Shape};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    Relu,
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AutoencoderSettings {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub activation: Activation,
}

impl Default for AutoencoderSettings {
    fn default() -> Self {
        AutoencoderSettings {
            epochs: 100,
            batch_size: 16,
            learning_rate: 0.005,
            activation: Activation::Relu,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Autoencoder {
    net: Network,
    /// Number of leading layers that form the encoder.
    encoder_len: usize,
    /// Mean training MSE per epoch.
    pub loss_history: Vec<f64>,
}

pub(crate) fn hidden_width(m: usize, d: usize) -> usize {
    d.max(m.div_ceil(2))
}

impl Autoencoder {
    pub fn build(m: usize, d: usize, activation: Activation, seed: u64) -> Result<Autoencoder> {
        let h = hidden_width(m, d);
        let act = |v: &mut Vec<LayerSpec>| {
            if activation == Activation::Relu {
                v.push(LayerSpec::ReLU);
            }
        };
        let mut layers = vec![LayerSpec::Dense { input: m, output: h }];
        act(&mut layers);
        layers.push(LayerSpec::Dense { input: h, output: d });
        let encoder_len = layers.len();
        layers.push(LayerSpec::Dense { input: d, output: h });
        act(&mut layers);
        layers.push(LayerSpec::Dense { input: h, output: m });
        Ok(Autoencoder {
            net: Network::new(Shape::flat(m), layers, seed)?,
            encoder_len,
            loss_history: Vec::new(),
        })
    }

    pub fn fit(train: &Matrix, d: usize, s: &AutoencoderSettings, seed: u64) -> Result<Autoencoder> {
        let mut ae = Autoencoder::build(train.cols(), d, s.activation, rng::derive(seed, 0))?;
        if s.epochs > 0 {
            ae.loss_history = fit(
                &mut ae.net,
                train,
                train,
                Loss::Mse,
                &FitSettings {
                    epochs: s.epochs,
                    batch_size: s.batch_size,
                    learning_rate: s.learning_rate,
                    seed: rng::derive(seed, 1),
                },
            )?;
        }
        Ok(ae)
    }

    pub fn network(&self) -> &Network {
        &self.net
    }

    /// Code-layer activations for each row.
    pub fn encode(&self, x: &Matrix) -> Result<Matrix> {
        let encoder = Network::new(
            self.net.input_shape(),
            self.net.layers()[..self.encoder_len].to_vec(),
            0,
        )
        .and_then(|mut e| {
            let n: usize = e.param_count();
            e.set_weights(&self.net.weights()[..n])?;
            Ok(e)
        })?;
        let rows: Vec<Vec<f64>> = x.iter_rows().map(|r| encoder.predict(r)).collect::<Result<_>>()?;
        if rows.is_empty() {
            return Ok(Matrix::zeros(0, self.code_dim()));
        }
        Matrix::from_rows(&rows)
    }

    pub fn code_dim(&self) -> usize {
        match self.net.layers()[self.encoder_len - 1] {
            LayerSpec::Dense { output, .. } => output,
            _ => unreachable!("encoder ends in a dense layer"),
        }
    }

    /// Mean squared reconstruction error over all entries.
    pub fn reconstruction_mse(&self, x: &Matrix) -> Result<f64> {
        let mut total = 0.0;
        for r in x.iter_rows() {
            total += Loss::Mse.value(&self.net.predict(r)?, r);
        }
        Ok(total / x.rows().max(1) as f64)
    }
}
