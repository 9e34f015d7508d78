//! Exact t-SNE with a k-nearest-neighbour extension for unseen rows.

use rand::Rng;
use rand_distr::Normal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TsneSettings {
    pub perplexity: f64,
    pub iterations: usize,
    pub learning_rate: f64,
    pub early_exaggeration: f64,
    /// Iterations run with exaggerated P; momentum also switches here.
    pub exaggeration_iterations: usize,
    pub initial_momentum: f64,
    pub final_momentum: f64,
    /// Neighbours used to place unseen rows.
    pub extension_k: usize,
}

impl Default for TsneSettings {
    fn default() -> Self {
        TsneSettings {
            perplexity: 30.0,
            iterations: 1000,
            learning_rate: 200.0,
            early_exaggeration: 12.0,
            exaggeration_iterations: 250,
            initial_momentum: 0.5,
            final_momentum: 0.8,
            extension_k: 5,
        }
    }
}

impl TsneSettings {
    /// Largest perplexity accepted for `n` rows (exclusive bound).
    pub fn perplexity_limit(n: usize) -> f64 {
        (n as f64 - 1.0) / 3.0
    }
}

#[derive(Debug, Clone)]
pub struct TsneFit {
    pub embedding: Matrix,
    /// KL(P‖Q) against the unexaggerated P, one entry per iteration.
    pub kl_history: Vec<f64>,
    train: Matrix,
    k: usize,
}

fn sq_distances(x: &Matrix) -> Vec<f64> {
    let n = x.rows();
    let mut d = vec![0.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let v: f64 = x.row(i).iter().zip(x.row(j)).map(|(a, b)| (a - b).powi(2)).sum();
            d[i * n + j] = v;
            d[j * n + i] = v;
        }
    }
    d
}

/// Conditional row `P(·|i)` whose entropy matches `ln(perplexity)`.
fn conditional_row(dist: &[f64], i: usize, target_entropy: f64, out: &mut [f64]) {
    let n = dist.len();
    let (mut beta, mut lo, mut hi) = (1.0f64, f64::NEG_INFINITY, f64::INFINITY);
    for _ in 0..200 {
        let mut sum = 0.0;
        let mut weighted = 0.0;
        for j in 0..n {
            out[j] = if j == i { 0.0 } else { (-dist[j] * beta).exp() };
            sum += out[j];
            weighted += dist[j] * out[j];
        }
        if sum <= 0.0 {
            // every neighbour underflowed; bandwidth is far too narrow
            hi = beta;
            beta = if lo.is_finite() { 0.5 * (lo + hi) } else { beta / 2.0 };
            continue;
        }
        let entropy = sum.ln() + beta * weighted / sum;
        let diff = entropy - target_entropy;
        for v in out.iter_mut() {
            *v /= sum;
        }
        if diff.abs() < 1e-5 {
            return;
        }
        if diff > 0.0 {
            lo = beta;
            beta = if hi.is_finite() { 0.5 * (beta + hi) } else { beta * 2.0 };
        } else {
            hi = beta;
            beta = if lo.is_finite() { 0.5 * (beta + lo) } else { beta / 2.0 };
        }
    }
}

fn joint_probabilities(x: &Matrix, perplexity: f64) -> Vec<f64> {
    let n = x.rows();
    let dist = sq_distances(x);
    let target = perplexity.ln();
    let mut cond = vec![0.0; n * n];
    for i in 0..n {
        conditional_row(&dist[i * n..(i + 1) * n], i, target, &mut cond[i * n..(i + 1) * n]);
    }
    let mut p = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                p[i * n + j] = ((cond[i * n + j] + cond[j * n + i]) / (2.0 * n as f64)).max(1e-12);
            }
        }
    }
    p
}

/// Embed `x` in `d` dimensions.
pub fn tsne(x: &Matrix, d: usize, s: &TsneSettings, seed: u64) -> Result<TsneFit> {
    let n = x.rows();
    if d == 0 {
        return Err(Error::Config("t-SNE target dimension must be positive".into()));
    }
    let limit = TsneSettings::perplexity_limit(n);
    if !(s.perplexity > 0.0 && s.perplexity < limit) {
        return Err(Error::Config(format!(
            "perplexity {} infeasible for {n} rows (must be below {limit:.3})",
            s.perplexity
        )));
    }
    if s.extension_k == 0 {
        return Err(Error::Config("extension_k must be positive".into()));
    }
    let p = joint_probabilities(x, s.perplexity);

    let mut rng = rng::seeded(seed);
    let normal = Normal::new(0.0, 1e-4).expect("valid normal");
    let mut y: Vec<f64> = (0..n * d).map(|_| rng.sample(normal)).collect();
    let mut update = vec![0.0; n * d];
    let mut gains = vec![1.0f64; n * d];
    let mut num = vec![0.0; n * n];
    let mut grad = vec![0.0; n * d];
    let mut kl_history = Vec::with_capacity(s.iterations);

    for it in 0..s.iterations {
        let exaggerate = it < s.exaggeration_iterations;
        let momentum = if exaggerate {
            s.initial_momentum
        } else {
            s.final_momentum
        };
        let factor = if exaggerate { s.early_exaggeration } else { 1.0 };

        let mut z = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                let dd: f64 = (0..d).map(|k| (y[i * d + k] - y[j * d + k]).powi(2)).sum();
                let v = 1.0 / (1.0 + dd);
                num[i * n + j] = v;
                num[j * n + i] = v;
                z += 2.0 * v;
            }
        }

        let mut kl = 0.0;
        grad.iter_mut().for_each(|g| *g = 0.0);
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let pij = p[i * n + j];
                let q = (num[i * n + j] / z).max(1e-12);
                kl += pij * (pij / q).ln();
                let coeff = 4.0 * (factor * pij - q) * num[i * n + j];
                for k in 0..d {
                    grad[i * d + k] += coeff * (y[i * d + k] - y[j * d + k]);
                }
            }
        }
        kl_history.push(kl);

        for idx in 0..n * d {
            let g = grad[idx];
            gains[idx] = if (g > 0.0) != (update[idx] > 0.0) {
                gains[idx] + 0.2
            } else {
                (gains[idx] * 0.8).max(0.01)
            };
            update[idx] = momentum * update[idx] - s.learning_rate * gains[idx] * g;
            y[idx] += update[idx];
        }
        for k in 0..d {
            let mean = (0..n).map(|i| y[i * d + k]).sum::<f64>() / n as f64;
            for i in 0..n {
                y[i * d + k] -= mean;
            }
        }
    }

    Ok(TsneFit {
        embedding: Matrix::new(n, d, y)?,
        kl_history,
        train: x.clone(),
        k: s.extension_k,
    })
}

impl TsneFit {
    /// Place unseen rows at the inverse-distance weighted mean of the
    /// embeddings of their `k` nearest training rows.
    pub fn extend(&self, x: &Matrix) -> Result<Matrix> {
        if x.cols() != self.train.cols() {
            return Err(Error::dim(self.train.cols(), x.cols(), "t-SNE extension feature count"));
        }
        let d = self.embedding.cols();
        let k = self.k.min(self.train.rows());
        let mut out = Matrix::zeros(x.rows(), d);
        for (i, r) in x.iter_rows().enumerate() {
            let mut dists: Vec<(f64, usize)> = self
                .train
                .iter_rows()
                .enumerate()
                .map(|(j, t)| (r.iter().zip(t).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt(), j))
                .collect();
            dists.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            let near = &dists[..k];
            let row = out.row_mut(i);
            if near[0].0 == 0.0 {
                row.copy_from_slice(self.embedding.row(near[0].1));
                continue;
            }
            let total: f64 = near.iter().map(|(dist, _)| 1.0 / dist).sum();
            for &(dist, j) in near {
                let w = 1.0 / dist / total;
                for (o, e) in row.iter_mut().zip(self.embedding.row(j)) {
                    *o += w * e;
                }
            }
        }
        Ok(out)
    }
}
