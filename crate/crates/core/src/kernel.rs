//! Fidelity quantum kernel `k(x, x') = |⟨φ(x)|φ(x')⟩|²` with optional
//! trainable layers, trained by kernel-target alignment.
//!
//! Each layer applies `RY(θ)` on every wire, a CNOT ring, then the angle
//! encoding of the data. Untrainable kernels use all-zero angles, so a
//! single layer reduces to the plain embedding. Amplitude and IQP encodings
//! are only available untrainable and ignore `layers`.

use rand::seq::index::sample;
use serde::{Deserialize, Serialize};

use crate::embedding::{angle_gate, embed, EmbeddingSpec};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::optim::{Adam, AdamConfig};
use crate::qnn::TrainSettings;
use crate::rng;
use crate::sim::{inner_product, Gate, StateVector};
use crate::svm;

pub const MAX_KERNEL_QUBITS: usize = 8;

fn default_layers() -> usize {
    1
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelConfig {
    pub n_qubits: usize,
    #[serde(default = "default_layers")]
    pub layers: usize,
    pub embedding: EmbeddingSpec,
    #[serde(default)]
    pub trainable: bool,
}

impl KernelConfig {
    pub fn new(n_qubits: usize, embedding: EmbeddingSpec) -> Self {
        KernelConfig {
            n_qubits,
            layers: 1,
            embedding,
            trainable: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_qubits == 0 || self.n_qubits > MAX_KERNEL_QUBITS {
            return Err(Error::Config(format!(
                "kernel width must be 1..={MAX_KERNEL_QUBITS} qubits, got {}",
                self.n_qubits
            )));
        }
        if self.layers == 0 {
            return Err(Error::Config("kernel needs at least one layer".into()));
        }
        if self.trainable && !self.embedding.kind.is_angle() {
            return Err(Error::Config(format!(
                "trainable kernels need an angle embedding, got {}",
                self.embedding.kind.name()
            )));
        }
        Ok(())
    }

    pub fn param_count(&self) -> usize {
        self.layers * self.n_qubits
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelParams {
    pub values: Vec<f64>,
}

impl KernelParams {
    pub fn new(config: &KernelConfig, values: Vec<f64>) -> Result<Self> {
        if values.len() != config.param_count() {
            return Err(Error::dim(config.param_count(), values.len(), "kernel parameter count"));
        }
        Ok(KernelParams { values })
    }

    pub fn zeros(config: &KernelConfig) -> Self {
        KernelParams {
            values: vec![0.0; config.param_count()],
        }
    }
}

fn ring(n: usize) -> Vec<(usize, usize)> {
    match n {
        0 | 1 => Vec::new(),
        2 => vec![(0, 1)],
        _ => (0..n).map(|i| (i, (i + 1) % n)).collect(),
    }
}

/// Embedded state `|φ(x)⟩`.
pub fn feature_state(config: &KernelConfig, params: &KernelParams, x: &[f64]) -> Result<StateVector> {
    config.validate()?;
    if params.values.len() != config.param_count() {
        return Err(Error::dim(config.param_count(), params.values.len(), "kernel parameter count"));
    }
    config.embedding.check(x.len(), config.n_qubits)?;
    let kind = config.embedding.kind;
    if !kind.is_angle() {
        return embed(x, config.n_qubits, &config.embedding);
    }
    let n = config.n_qubits;
    let mut state = StateVector::zero(n)?;
    for layer in params.values.chunks(n) {
        for (q, &theta) in layer.iter().enumerate() {
            state.apply_unchecked(&Gate::ry(q, theta));
        }
        for (a, b) in ring(n) {
            state.apply_unchecked(&Gate::cnot(a, b));
        }
        for (q, &v) in x.iter().enumerate() {
            state.apply_unchecked(&angle_gate(kind, q, v));
        }
    }
    Ok(state)
}

fn fidelity(a: &StateVector, b: &StateVector) -> Result<f64> {
    Ok(inner_product(a, b)?.norm_sqr())
}

pub fn kernel_entry(config: &KernelConfig, params: &KernelParams, xi: &[f64], xj: &[f64]) -> Result<f64> {
    if xi.len() != xj.len() {
        return Err(Error::dim(xi.len(), xj.len(), "kernel input lengths"));
    }
    fidelity(&feature_state(config, params, xi)?, &feature_state(config, params, xj)?)
}

fn states(config: &KernelConfig, params: &KernelParams, x: &Matrix) -> Result<Vec<StateVector>> {
    x.iter_rows().map(|r| feature_state(config, params, r)).collect()
}

fn gram_of_states(s: &[StateVector]) -> Result<Matrix> {
    let m = s.len();
    let mut k = Matrix::zeros(m, m);
    for i in 0..m {
        k[(i, i)] = fidelity(&s[i], &s[i])?;
        for j in i + 1..m {
            let v = fidelity(&s[i], &s[j])?;
            k[(i, j)] = v;
            k[(j, i)] = v;
        }
    }
    Ok(k)
}

/// Symmetric `m × m` kernel matrix over the rows of `x`.
pub fn gram(config: &KernelConfig, params: &KernelParams, x: &Matrix) -> Result<Matrix> {
    if x.rows() < 2 {
        return Err(Error::Usage(format!("Gram matrix needs at least 2 samples, got {}", x.rows())));
    }
    gram_of_states(&states(config, params, x)?)
}

/// Kernel values between rows of `a` (rows of the result) and `b`.
pub fn cross_gram(config: &KernelConfig, params: &KernelParams, a: &Matrix, b: &Matrix) -> Result<Matrix> {
    let sa = states(config, params, a)?;
    let sb = states(config, params, b)?;
    let mut k = Matrix::zeros(sa.len(), sb.len());
    for (i, p) in sa.iter().enumerate() {
        for (j, q) in sb.iter().enumerate() {
            k[(i, j)] = fidelity(p, q)?;
        }
    }
    Ok(k)
}

fn check_signed(y: &[i8], m: usize) -> Result<()> {
    if y.len() != m {
        return Err(Error::Usage(format!("{} labels for a {m}-sample kernel", y.len())));
    }
    if let Some(bad) = y.iter().find(|&&v| v != 1 && v != -1) {
        return Err(Error::Usage(format!("alignment labels must be ±1, got {bad}")));
    }
    Ok(())
}

/// `⟨K, yyᵀ⟩_F / (‖K‖_F ‖yyᵀ‖_F)`.
pub fn target_alignment(k: &Matrix, y: &[i8]) -> Result<f64> {
    check_signed(y, k.rows())?;
    let (mut inner, mut norm) = (0.0, 0.0);
    for i in 0..k.rows() {
        for j in 0..k.cols() {
            inner += k[(i, j)] * f64::from(y[i] * y[j]);
            norm += k[(i, j)].powi(2);
        }
    }
    Ok(inner / (norm.sqrt() * y.len() as f64))
}

/// SVM dual objective `Σα − ½ΣΣ αᵢαⱼyᵢyⱼKᵢⱼ`.
pub fn svc_loss(k: &Matrix, y: &[i8], alphas: &[f64]) -> Result<f64> {
    let m = k.rows();
    if k.cols() != m || y.len() != m || alphas.len() != m {
        return Err(Error::Usage(format!(
            "svc_loss sizes disagree: K {}×{}, {} labels, {} alphas",
            k.rows(),
            k.cols(),
            y.len(),
            alphas.len()
        )));
    }
    Ok(svm::dual_objective(k, y, alphas))
}

/// Alignment and its gradient with respect to the kernel angles on the
/// rows of `x`, by the two-term shift rule applied to each occurrence of
/// an angle (once in each state of an overlap).
pub fn alignment_gradient(config: &KernelConfig, params: &KernelParams, x: &Matrix, y: &[i8]) -> Result<(f64, Vec<f64>)> {
    check_signed(y, x.rows())?;
    let base = states(config, params, x)?;
    let k = gram_of_states(&base)?;
    let m = x.rows();
    let frob = k.data().iter().map(|v| v * v).sum::<f64>().sqrt();
    let inner: f64 = (0..m)
        .flat_map(|i| (0..m).map(move |j| (i, j)))
        .map(|(i, j)| k[(i, j)] * f64::from(y[i] * y[j]))
        .sum();
    let ny = m as f64;
    let align = inner / (frob * ny);
    // dA/dK_ij
    let weight = |i: usize, j: usize| f64::from(y[i] * y[j]) / (frob * ny) - inner * k[(i, j)] / (frob.powi(3) * ny);

    let half = std::f64::consts::FRAC_PI_2;
    let mut grad = vec![0.0; params.values.len()];
    for (p, g) in grad.iter_mut().enumerate() {
        let shifted = |delta: f64| {
            let mut v = params.clone();
            v.values[p] += delta;
            states(config, &v, x)
        };
        let plus = shifted(half)?;
        let minus = shifted(-half)?;
        for i in 0..m {
            for j in 0..m {
                if i == j {
                    continue;
                }
                // shift only the occurrence inside |φ(x_i)⟩; the (j, i)
                // term covers the other occurrence
                let dk = 0.5 * (fidelity(&plus[i], &base[j])? - fidelity(&minus[i], &base[j])?);
                *g += 2.0 * weight(i, j) * dk;
            }
        }
    }
    Ok((align, grad))
}

#[derive(Debug, Clone)]
pub struct KernelTraining {
    pub params: KernelParams,
    /// Alignment on the full training set before training and after each step.
    pub alignment_history: Vec<f64>,
}

/// Maximize alignment with Adam, starting from zero angles. Each step
/// differentiates on `settings.batch_size` rows drawn without replacement.
pub fn train_kernel(config: &KernelConfig, x: &Matrix, y: &[u8], settings: &TrainSettings) -> Result<KernelTraining> {
    config.validate()?;
    if !config.trainable {
        return Err(Error::Usage("train_kernel needs a trainable kernel config".into()));
    }
    if x.rows() != y.len() {
        return Err(Error::dim(x.rows(), y.len(), "label count"));
    }
    let signed = svm::signed_labels(y);
    let mut params = KernelParams::zeros(config);
    let mut history = vec![target_alignment(&gram(config, &params, x)?, &signed)?];
    if settings.iterations == 0 {
        return Ok(KernelTraining {
            params,
            alignment_history: history,
        });
    }
    settings.validate()?;
    let mut adam = Adam::new(params.values.len(), AdamConfig::with_lr(settings.learning_rate));
    let mut r = rng::seeded(rng::derive(settings.seed, 1));
    let batch = settings.batch_size.min(x.rows());
    for _ in 0..settings.iterations {
        let idx = sample(&mut r, x.rows(), batch).into_vec();
        let bx = x.select_rows(&idx);
        let by: Vec<i8> = idx.iter().map(|&i| signed[i]).collect();
        let (_, g) = alignment_gradient(config, &params, &bx, &by)?;
        let neg: Vec<f64> = g.iter().map(|v| -v).collect();
        adam.step(&mut params.values, &neg);
        history.push(target_alignment(&gram(config, &params, x)?, &signed)?);
    }
    Ok(KernelTraining {
        params,
        alignment_history: history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::EmbeddingKind;
    use rand::Rng;
    use std::f64::consts::PI;

    fn angle_y(n: usize) -> KernelConfig {
        KernelConfig::new(n, EmbeddingSpec::new(EmbeddingKind::AngleY))
    }

    #[test]
    fn one_qubit_angle_y_overlap() {
        let c = angle_y(1);
        let p = KernelParams::zeros(&c);
        for (a, b) in [(0.3, -1.1), (2.0, 2.0), (0.0, PI)] {
            let k = kernel_entry(&c, &p, &[a], &[b]).unwrap();
            assert!((k - ((a - b) / 2.0).cos().powi(2)).abs() < 1e-12);
        }
    }

    #[test]
    fn single_layer_matches_plain_embedding() {
        let c = angle_y(4);
        let x = [0.1, -0.7, 1.3, 2.2];
        let s = feature_state(&c, &KernelParams::zeros(&c), &x).unwrap();
        let e = embed(&x, 4, &c.embedding).unwrap();
        assert!((inner_product(&s, &e).unwrap().norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn alignment_examples() {
        let k = Matrix::identity(2);
        assert!((target_alignment(&k, &[1, 1]).unwrap() - 0.5f64.sqrt()).abs() < 1e-12);
        let y = [1i8, -1, 1];
        let yy = Matrix::new(3, 3, (0..9).map(|t| 2.0 * f64::from(y[t / 3] * y[t % 3])).collect()).unwrap();
        assert!((target_alignment(&yy, &y).unwrap() - 1.0).abs() < 1e-12);
        assert!(matches!(target_alignment(&k, &[1, 0]), Err(Error::Usage(_))));
    }

    #[test]
    fn svc_loss_examples() {
        let k = Matrix::identity(2);
        assert_eq!(svc_loss(&k, &[1, -1], &[0.0, 0.0]).unwrap(), 0.0);
        assert!((svc_loss(&k, &[1, -1], &[1.0, 1.0]).unwrap() - 1.0).abs() < 1e-12);
        assert!(matches!(svc_loss(&k, &[1], &[1.0, 1.0]), Err(Error::Usage(_))));
    }

    #[test]
    fn alignment_gradient_matches_finite_differences() {
        let mut c = angle_y(3);
        c.layers = 2;
        c.trainable = true;
        let mut r = rng::seeded(4);
        let p = KernelParams::new(&c, (0..6).map(|_| r.random_range(0.0..2.0 * PI)).collect()).unwrap();
        let x = Matrix::new(5, 3, (0..15).map(|_| r.random_range(-1.0..1.0)).collect()).unwrap();
        let y = [1, -1, 1, 1, -1];
        let (a0, g) = alignment_gradient(&c, &p, &x, &y).unwrap();
        assert!((a0 - target_alignment(&gram(&c, &p, &x).unwrap(), &y).unwrap()).abs() < 1e-12);
        let h = 1e-5;
        for k in 0..6 {
            let mut hi = p.clone();
            hi.values[k] += h;
            let mut lo = p.clone();
            lo.values[k] -= h;
            let f = |q: &KernelParams| target_alignment(&gram(&c, q, &x).unwrap(), &y).unwrap();
            let fd = (f(&hi) - f(&lo)) / (2.0 * h);
            assert!((fd - g[k]).abs() < 1e-7, "param {k}: {fd} vs {}", g[k]);
        }
    }

    #[test]
    fn training_rules() {
        let mut c = angle_y(2);
        let x = Matrix::from_rows(&[[0.1, 0.2], [0.0, 0.1], [3.0, 2.9], [2.9, 3.1]]).unwrap();
        let y = [0, 0, 1, 1];
        let s = TrainSettings {
            iterations: 0,
            batch_size: 4,
            learning_rate: 0.1,
            ..TrainSettings::default()
        };
        assert!(matches!(train_kernel(&c, &x, &y, &s), Err(Error::Usage(_))));
        c.trainable = true;
        let t = train_kernel(&c, &x, &y, &s).unwrap();
        assert_eq!(t.params, KernelParams::zeros(&c));
        let t = train_kernel(&c, &x, &y, &TrainSettings { iterations: 30, ..s }).unwrap();
        assert!(t.alignment_history.last().unwrap() >= &t.alignment_history[0]);
        assert_eq!(t.alignment_history.len(), 31);
    }

    #[test]
    fn trainable_requires_angle_embedding() {
        let mut c = KernelConfig::new(4, EmbeddingSpec::new(EmbeddingKind::Amplitude));
        c.trainable = true;
        assert!(matches!(c.validate(), Err(Error::Config(_))));
    }
}
