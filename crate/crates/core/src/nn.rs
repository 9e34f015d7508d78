//! Small feed-forward network engine: dense and 1-D convolution layers,
//! max pooling, ReLU and sigmoid, with MSE or BCE loss and Adam training.
//!
//! Activations are channel-major vectors with a [`Shape`]; a plain feature
//! vector of length `m` has shape `{channels: 1, len: m}`.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::optim::{Adam, AdamConfig};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Shape {
    pub channels: usize,
    pub len: usize,
}

impl Shape {
    pub fn flat(len: usize) -> Self {
        Shape { channels: 1, len }
    }

    pub fn size(self) -> usize {
        self.channels * self.len
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LayerSpec {
    Dense { input: usize, output: usize },
    Conv1D { in_ch: usize, out_ch: usize, kernel: usize },
    MaxPool1D { width: usize },
    ReLU,
    Sigmoid,
    Flatten,
}

impl LayerSpec {
    pub fn param_count(self) -> usize {
        match self {
            LayerSpec::Dense { input, output } => input * output + output,
            LayerSpec::Conv1D { in_ch, out_ch, kernel } => out_ch * (in_ch * kernel + 1),
            _ => 0,
        }
    }

    fn fan_in(self) -> usize {
        match self {
            LayerSpec::Dense { input, .. } => input,
            LayerSpec::Conv1D { in_ch, kernel, .. } => in_ch * kernel,
            _ => 1,
        }
    }

    fn output_shape(self, s: Shape) -> Result<Shape> {
        let mismatch = |want: usize, got: usize, what: &str| Err(Error::dim(want, got, what.to_string()));
        match self {
            LayerSpec::Dense { input, output } => {
                if s.channels != 1 || s.len != input {
                    return mismatch(input, s.size(), "dense input (flatten first)");
                }
                Ok(Shape::flat(output))
            }
            LayerSpec::Conv1D { in_ch, out_ch, kernel } => {
                if s.channels != in_ch {
                    return mismatch(in_ch, s.channels, "conv1d input channels");
                }
                if kernel == 0 || s.len < kernel {
                    return mismatch(kernel, s.len, "conv1d input length");
                }
                Ok(Shape {
                    channels: out_ch,
                    len: s.len - kernel + 1,
                })
            }
            LayerSpec::MaxPool1D { width } => {
                if width == 0 || s.len < width {
                    return mismatch(width, s.len, "max-pool input length");
                }
                Ok(Shape {
                    channels: s.channels,
                    len: s.len / width,
                })
            }
            LayerSpec::ReLU | LayerSpec::Sigmoid => Ok(s),
            LayerSpec::Flatten => Ok(Shape::flat(s.size())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Loss {
    Mse,
    /// Binary cross-entropy on a probability output, clamped to [1e-7, 1−1e-7].
    Bce,
}

impl Loss {
    pub fn value(self, out: &[f64], target: &[f64]) -> f64 {
        let k = out.len() as f64;
        match self {
            Loss::Mse => out.iter().zip(target).map(|(o, t)| (o - t) * (o - t)).sum::<f64>() / k,
            Loss::Bce => {
                out.iter()
                    .zip(target)
                    .map(|(&o, &t)| {
                        let p = o.clamp(1e-7, 1.0 - 1e-7);
                        -(t * p.ln() + (1.0 - t) * (1.0 - p).ln())
                    })
                    .sum::<f64>()
                    / k
            }
        }
    }

    fn grad(self, out: &[f64], target: &[f64]) -> Vec<f64> {
        let k = out.len() as f64;
        match self {
            Loss::Mse => out.iter().zip(target).map(|(o, t)| 2.0 * (o - t) / k).collect(),
            Loss::Bce => out
                .iter()
                .zip(target)
                .map(|(&o, &t)| {
                    if !(1e-7..=1.0 - 1e-7).contains(&o) {
                        0.0
                    } else {
                        (-t / o + (1.0 - t) / (1.0 - o)) / k
                    }
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Network {
    layers: Vec<LayerSpec>,
    /// `shapes[i]` is the input shape of layer `i`; the last entry is the output.
    shapes: Vec<Shape>,
    offsets: Vec<usize>,
    weights: Vec<f64>,
    /// Activations from the last `forward`, input first.
    cache: Option<Vec<Vec<f64>>>,
}

impl Network {
    /// Validate the shape chain and initialize weights uniform on ±1/√fan_in.
    pub fn new(input: Shape, layers: Vec<LayerSpec>, seed: u64) -> Result<Self> {
        let mut shapes = vec![input];
        let mut offsets = Vec::with_capacity(layers.len());
        let mut total = 0;
        for l in &layers {
            let next = l.output_shape(*shapes.last().unwrap())?;
            shapes.push(next);
            offsets.push(total);
            total += l.param_count();
        }
        let mut rng = rng::seeded(seed);
        let mut weights = Vec::with_capacity(total);
        for l in &layers {
            let bound = 1.0 / (l.fan_in() as f64).sqrt();
            weights.extend((0..l.param_count()).map(|_| rng.random_range(-bound..=bound)));
        }
        Ok(Network {
            layers,
            shapes,
            offsets,
            weights,
            cache: None,
        })
    }

    pub fn layers(&self) -> &[LayerSpec] {
        &self.layers
    }

    pub fn input_shape(&self) -> Shape {
        self.shapes[0]
    }

    pub fn output_shape(&self) -> Shape {
        *self.shapes.last().unwrap()
    }

    pub fn param_count(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn set_weights(&mut self, w: &[f64]) -> Result<()> {
        if w.len() != self.weights.len() {
            return Err(Error::dim(self.weights.len(), w.len(), "network weight count"));
        }
        self.weights.copy_from_slice(w);
        self.cache = None;
        Ok(())
    }

    fn layer_weights(&self, i: usize) -> &[f64] {
        &self.weights[self.offsets[i]..self.offsets[i] + self.layers[i].param_count()]
    }

    fn check_input(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.shapes[0].size() {
            return Err(Error::dim(self.shapes[0].size(), x.len(), "network input length"));
        }
        Ok(())
    }

    fn run(&self, x: &[f64], keep: bool) -> (Vec<f64>, Vec<Vec<f64>>) {
        let mut acts = Vec::new();
        let mut cur = x.to_vec();
        for (i, l) in self.layers.iter().enumerate() {
            let next = layer_forward(*l, self.shapes[i], self.layer_weights(i), &cur);
            if keep {
                acts.push(std::mem::replace(&mut cur, next));
            } else {
                cur = next;
            }
        }
        if keep {
            acts.push(cur.clone());
        }
        (cur, acts)
    }

    /// Forward pass without touching the cache.
    pub fn predict(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_input(x)?;
        Ok(self.run(x, false).0)
    }

    /// Forward pass that caches activations for [`Network::backward`].
    pub fn forward(&mut self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_input(x)?;
        let (out, acts) = self.run(x, true);
        self.cache = Some(acts);
        Ok(out)
    }

    /// Gradient of `loss(output, target)` for every weight, from the cached forward.
    pub fn backward(&self, loss: Loss, target: &[f64]) -> Result<Vec<f64>> {
        let acts = self
            .cache
            .as_ref()
            .ok_or_else(|| Error::Usage("backward called without a cached forward pass".into()))?;
        let out = acts.last().unwrap();
        if target.len() != out.len() {
            return Err(Error::dim(out.len(), target.len(), "loss target length"));
        }
        let mut grad = vec![0.0; self.weights.len()];
        let mut delta = loss.grad(out, target);
        for i in (0..self.layers.len()).rev() {
            let l = self.layers[i];
            let range = self.offsets[i]..self.offsets[i] + l.param_count();
            delta = layer_backward(
                l,
                self.shapes[i],
                self.layer_weights(i),
                &acts[i],
                &acts[i + 1],
                &delta,
                &mut grad[range],
            );
        }
        Ok(grad)
    }
}

fn sigmoid(v: f64) -> f64 {
    if v >= 0.0 {
        1.0 / (1.0 + (-v).exp())
    } else {
        let e = v.exp();
        e / (1.0 + e)
    }
}

fn layer_forward(l: LayerSpec, s: Shape, w: &[f64], x: &[f64]) -> Vec<f64> {
    match l {
        LayerSpec::Dense { input, output } => {
            let (wm, b) = w.split_at(input * output);
            (0..output)
                .map(|o| {
                    let row = &wm[o * input..(o + 1) * input];
                    b[o] + row.iter().zip(x).map(|(a, v)| a * v).sum::<f64>()
                })
                .collect()
        }
        LayerSpec::Conv1D { in_ch, out_ch, kernel } => {
            let out_len = s.len - kernel + 1;
            let (wm, b) = w.split_at(out_ch * in_ch * kernel);
            let mut y = vec![0.0; out_ch * out_len];
            for o in 0..out_ch {
                for t in 0..out_len {
                    let mut acc = b[o];
                    for i in 0..in_ch {
                        let wk = &wm[(o * in_ch + i) * kernel..(o * in_ch + i + 1) * kernel];
                        let xs = &x[i * s.len + t..i * s.len + t + kernel];
                        acc += wk.iter().zip(xs).map(|(a, v)| a * v).sum::<f64>();
                    }
                    y[o * out_len + t] = acc;
                }
            }
            y
        }
        LayerSpec::MaxPool1D { width } => {
            let out_len = s.len / width;
            let mut y = Vec::with_capacity(s.channels * out_len);
            for c in 0..s.channels {
                for t in 0..out_len {
                    let win = &x[c * s.len + t * width..c * s.len + (t + 1) * width];
                    y.push(win.iter().copied().fold(f64::NEG_INFINITY, f64::max));
                }
            }
            y
        }
        LayerSpec::ReLU => x.iter().map(|v| v.max(0.0)).collect(),
        LayerSpec::Sigmoid => x.iter().map(|&v| sigmoid(v)).collect(),
        LayerSpec::Flatten => x.to_vec(),
    }
}

/// Accumulate weight gradients into `gw` and return the input gradient.
fn layer_backward(
    l: LayerSpec,
    s: Shape,
    w: &[f64],
    x: &[f64],
    y: &[f64],
    dy: &[f64],
    gw: &mut [f64],
) -> Vec<f64> {
    match l {
        LayerSpec::Dense { input, output } => {
            let (wm, _) = w.split_at(input * output);
            let (gwm, gb) = gw.split_at_mut(input * output);
            let mut dx = vec![0.0; input];
            for o in 0..output {
                let d = dy[o];
                gb[o] += d;
                for j in 0..input {
                    gwm[o * input + j] += d * x[j];
                    dx[j] += d * wm[o * input + j];
                }
            }
            dx
        }
        LayerSpec::Conv1D { in_ch, out_ch, kernel } => {
            let out_len = s.len - kernel + 1;
            let (wm, _) = w.split_at(out_ch * in_ch * kernel);
            let (gwm, gb) = gw.split_at_mut(out_ch * in_ch * kernel);
            let mut dx = vec![0.0; in_ch * s.len];
            for o in 0..out_ch {
                for t in 0..out_len {
                    let d = dy[o * out_len + t];
                    gb[o] += d;
                    for i in 0..in_ch {
                        let base = (o * in_ch + i) * kernel;
                        for k in 0..kernel {
                            gwm[base + k] += d * x[i * s.len + t + k];
                            dx[i * s.len + t + k] += d * wm[base + k];
                        }
                    }
                }
            }
            dx
        }
        LayerSpec::MaxPool1D { width } => {
            let out_len = s.len / width;
            let mut dx = vec![0.0; s.size()];
            for c in 0..s.channels {
                for t in 0..out_len {
                    let start = c * s.len + t * width;
                    let m = y[c * out_len + t];
                    // route to the first maximal entry
                    let k = (0..width).find(|&k| x[start + k] == m).unwrap_or(0);
                    dx[start + k] += dy[c * out_len + t];
                }
            }
            dx
        }
        LayerSpec::ReLU => x
            .iter()
            .zip(dy)
            .map(|(&v, &d)| if v > 0.0 { d } else { 0.0 })
            .collect(),
        LayerSpec::Sigmoid => y.iter().zip(dy).map(|(&v, &d)| d * v * (1.0 - v)).collect(),
        LayerSpec::Flatten => dy.to_vec(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitSettings {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub seed: u64,
}

/// Mini-batch Adam on rows of `x` against rows of `targets`. Returns the
/// mean training loss of each epoch.
pub fn fit(
    net: &mut Network,
    x: &Matrix,
    targets: &Matrix,
    loss: Loss,
    settings: &FitSettings,
) -> Result<Vec<f64>> {
    if x.rows() != targets.rows() {
        return Err(Error::dim(x.rows(), targets.rows(), "target row count"));
    }
    if x.rows() == 0 {
        return Err(Error::Usage("cannot fit on an empty set".into()));
    }
    if settings.batch_size == 0 || !(settings.learning_rate > 0.0) {
        return Err(Error::Config("batch_size and learning_rate must be positive".into()));
    }
    let mut adam = Adam::new(net.param_count(), AdamConfig::with_lr(settings.learning_rate));
    let mut rng = rng::seeded(settings.seed);
    let mut order: Vec<usize> = (0..x.rows()).collect();
    let mut history = Vec::with_capacity(settings.epochs);
    let mut w = net.weights.clone();
    for _ in 0..settings.epochs {
        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        for batch in order.chunks(settings.batch_size) {
            let mut g = vec![0.0; w.len()];
            for &i in batch {
                let out = net.forward(x.row(i))?;
                epoch_loss += loss.value(&out, targets.row(i));
                let gi = net.backward(loss, targets.row(i))?;
                for (a, b) in g.iter_mut().zip(&gi) {
                    *a += b;
                }
            }
            let scale = 1.0 / batch.len() as f64;
            g.iter_mut().for_each(|v| *v *= scale);
            adam.step(&mut w, &g);
            net.set_weights(&w)?;
        }
        history.push(epoch_loss / x.rows() as f64);
    }
    Ok(history)
}

/// Conv1D(1→16,k3) → ReLU → Conv1D(16→32,k3) → ReLU → MaxPool1D(2) →
/// Flatten → Dense → Sigmoid.
pub fn cnn_baseline(n_features: usize, seed: u64) -> Result<Network> {
    if n_features < 6 {
        return Err(Error::dim(6, n_features, "CNN baseline needs at least 6 features"));
    }
    let pooled = (n_features - 4) / 2;
    Network::new(
        Shape::flat(n_features),
        vec![
            LayerSpec::Conv1D { in_ch: 1, out_ch: 16, kernel: 3 },
            LayerSpec::ReLU,
            LayerSpec::Conv1D { in_ch: 16, out_ch: 32, kernel: 3 },
            LayerSpec::ReLU,
            LayerSpec::MaxPool1D { width: 2 },
            LayerSpec::Flatten,
            LayerSpec::Dense { input: 32 * pooled, output: 1 },
            LayerSpec::Sigmoid,
        ],
        seed,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CnnSettings {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
}

impl Default for CnnSettings {
    fn default() -> Self {
        CnnSettings {
            epochs: 60,
            batch_size: 16,
            learning_rate: 0.005,
        }
    }
}

/// Train the baseline CNN and return thresholded test predictions.
pub fn train_cnn_baseline(
    train_x: &Matrix,
    train_y: &[u8],
    test_x: &Matrix,
    settings: &CnnSettings,
    seed: u64,
) -> Result<Vec<u8>> {
    if train_x.rows() != train_y.len() {
        return Err(Error::dim(train_x.rows(), train_y.len(), "label count"));
    }
    let mut net = cnn_baseline(train_x.cols(), rng::derive(seed, 0))?;
    let targets = Matrix::new(
        train_y.len(),
        1,
        train_y.iter().map(|&v| f64::from(v)).collect(),
    )?;
    fit(
        &mut net,
        train_x,
        &targets,
        Loss::Bce,
        &FitSettings {
            epochs: settings.epochs,
            batch_size: settings.batch_size,
            learning_rate: settings.learning_rate,
            seed: rng::derive(seed, 1),
        },
    )?;
    test_x
        .iter_rows()
        .map(|r| Ok(u8::from(net.predict(r)?[0] >= 0.5)))
        .collect()
}
