//! Binary soft-margin SVC trained by sequential minimal optimization, on a
//! precomputed Gram matrix or an RBF kernel over raw features.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelSource {
    Precomputed,
    Rbf { gamma: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SvcSettings {
    pub c: f64,
    /// KKT tolerance.
    pub tol: f64,
    pub max_passes: usize,
}

impl Default for SvcSettings {
    fn default() -> Self {
        SvcSettings {
            c: 1.0,
            tol: 1e-3,
            max_passes: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SvcModel {
    pub alphas: Vec<f64>,
    /// Decision function is `Σ αᵢ yᵢ k(xᵢ, x) + bias`.
    pub bias: f64,
    pub support: Vec<usize>,
    pub c: f64,
    pub kernel: KernelSource,
    /// Training labels in {−1, +1}.
    pub labels: Vec<i8>,
    /// Dual objective `Σα − ½ΣΣ αᵢαⱼyᵢyⱼKᵢⱼ` at `alphas`.
    pub objective: f64,
    pub passes: usize,
    /// Training features, kept for the RBF path.
    train_x: Option<Matrix>,
}

/// Map {0, 1} labels to {−1, +1}.
pub fn signed_labels(y: &[u8]) -> Vec<i8> {
    y.iter().map(|&v| if v == 1 { 1 } else { -1 }).collect()
}

fn check_labels(y: &[i8]) -> Result<()> {
    if let Some(bad) = y.iter().find(|&&v| v != 1 && v != -1) {
        return Err(Error::Usage(format!("SVC labels must be ±1, got {bad}")));
    }
    Ok(())
}

/// `Σα − ½ΣΣ αᵢαⱼyᵢyⱼKᵢⱼ`.
pub fn dual_objective(k: &Matrix, y: &[i8], alphas: &[f64]) -> f64 {
    let m = alphas.len();
    let mut quad = 0.0;
    for i in 0..m {
        if alphas[i] == 0.0 {
            continue;
        }
        for j in 0..m {
            quad += alphas[i] * alphas[j] * f64::from(y[i]) * f64::from(y[j]) * k[(i, j)];
        }
    }
    alphas.iter().sum::<f64>() - 0.5 * quad
}

/// RBF width `1 / (n_features · Var(X))` over all entries.
pub fn default_gamma(x: &Matrix) -> f64 {
    let n = x.data().len() as f64;
    let mean = x.data().iter().sum::<f64>() / n;
    let var = x.data().iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    if var > 0.0 {
        1.0 / (x.cols() as f64 * var)
    } else {
        1.0
    }
}

pub fn rbf_gram(a: &Matrix, b: &Matrix, gamma: f64) -> Matrix {
    let mut k = Matrix::zeros(a.rows(), b.rows());
    for (i, ra) in a.iter_rows().enumerate() {
        for (j, rb) in b.iter_rows().enumerate() {
            let d: f64 = ra.iter().zip(rb).map(|(p, q)| (p - q).powi(2)).sum();
            k[(i, j)] = (-gamma * d).exp();
        }
    }
    k
}

struct Smo<'a> {
    k: &'a Matrix,
    y: Vec<f64>,
    alpha: Vec<f64>,
    /// Platt threshold: `u = Σ αyK − b`.
    b: f64,
    err: Vec<f64>,
    c: f64,
    tol: f64,
}

const EPS: f64 = 1e-12;

impl Smo<'_> {
    fn is_free(&self, i: usize) -> bool {
        self.alpha[i] > EPS && self.alpha[i] < self.c - EPS
    }

    fn take_step(&mut self, i1: usize, i2: usize) -> bool {
        if i1 == i2 {
            return false;
        }
        let (a1, a2) = (self.alpha[i1], self.alpha[i2]);
        let (y1, y2) = (self.y[i1], self.y[i2]);
        let (e1, e2) = (self.err[i1], self.err[i2]);
        let s = y1 * y2;
        let c = self.c;
        let (lo, hi) = if y1 != y2 {
            ((a2 - a1).max(0.0), (c + a2 - a1).min(c))
        } else {
            ((a1 + a2 - c).max(0.0), (a1 + a2).min(c))
        };
        if hi - lo < EPS {
            return false;
        }
        let k11 = self.k[(i1, i1)];
        let k12 = self.k[(i1, i2)];
        let k22 = self.k[(i2, i2)];
        let eta = k11 + k22 - 2.0 * k12;
        let mut new2 = if eta > EPS {
            (a2 + y2 * (e1 - e2) / eta).clamp(lo, hi)
        } else {
            // objective is linear along the segment; take the better end
            let f1 = y1 * (e1 + self.b) - a1 * k11 - s * a2 * k12;
            let f2 = y2 * (e2 + self.b) - s * a1 * k12 - a2 * k22;
            let obj = |a2n: f64| {
                let a1n = a1 + s * (a2 - a2n);
                a1n * f1 + a2n * f2 + 0.5 * a1n * a1n * k11 + 0.5 * a2n * a2n * k22 + s * a1n * a2n * k12
            };
            let (ol, oh) = (obj(lo), obj(hi));
            if ol < oh - EPS {
                lo
            } else if ol > oh + EPS {
                hi
            } else {
                a2
            }
        };
        if (new2 - a2).abs() < EPS * (new2 + a2 + EPS) {
            return false;
        }
        if new2 < EPS {
            new2 = 0.0;
        } else if new2 > c - EPS {
            new2 = c;
        }
        let mut new1 = a1 + s * (a2 - new2);
        if new1 < EPS {
            new1 = 0.0;
        } else if new1 > c - EPS {
            new1 = c;
        }

        let d1 = y1 * (new1 - a1);
        let d2 = y2 * (new2 - a2);
        let b1 = e1 + d1 * k11 + d2 * k12 + self.b;
        let b2 = e2 + d1 * k12 + d2 * k22 + self.b;
        let free = |a: f64| a > 0.0 && a < c;
        let new_b = if free(new1) {
            b1
        } else if free(new2) {
            b2
        } else {
            0.5 * (b1 + b2)
        };
        let db = new_b - self.b;
        for i in 0..self.err.len() {
            self.err[i] += d1 * self.k[(i, i1)] + d2 * self.k[(i, i2)] - db;
        }
        self.alpha[i1] = new1;
        self.alpha[i2] = new2;
        self.b = new_b;
        true
    }

    fn examine(&mut self, i2: usize) -> bool {
        let (y2, a2, e2) = (self.y[i2], self.alpha[i2], self.err[i2]);
        let r2 = e2 * y2;
        if !((r2 < -self.tol && a2 < self.c) || (r2 > self.tol && a2 > 0.0)) {
            return false;
        }
        let m = self.alpha.len();
        let free: Vec<usize> = (0..m).filter(|&i| self.is_free(i)).collect();
        if free.len() > 1 {
            let mut best = None;
            let mut gap = -1.0;
            for &i in &free {
                let g = (self.err[i] - e2).abs();
                if g > gap {
                    gap = g;
                    best = Some(i);
                }
            }
            if let Some(i1) = best {
                if self.take_step(i1, i2) {
                    return true;
                }
            }
        }
        for &i1 in &free {
            if self.take_step(i1, i2) {
                return true;
            }
        }
        for i1 in 0..m {
            if self.take_step(i1, i2) {
                return true;
            }
        }
        false
    }
}

fn fit_gram(k: &Matrix, y: &[i8], s: &SvcSettings, kernel: KernelSource, train_x: Option<Matrix>) -> Result<SvcModel> {
    let m = y.len();
    if k.rows() != k.cols() {
        return Err(Error::Usage(format!("Gram matrix is {}×{}, not square", k.rows(), k.cols())));
    }
    if k.rows() != m {
        return Err(Error::dim(m, k.rows(), "Gram matrix size vs label count"));
    }
    if m < 2 {
        return Err(Error::Usage("SVC needs at least two samples".into()));
    }
    check_labels(y)?;
    if !(s.c > 0.0) || !(s.tol > 0.0) {
        return Err(Error::Config("C and tol must be positive".into()));
    }

    let yf: Vec<f64> = y.iter().map(|&v| f64::from(v)).collect();
    let finish = |alpha: Vec<f64>, passes: usize| -> SvcModel {
        let bias = intercept(k, &yf, &alpha, s.c);
        let support = (0..m).filter(|&i| alpha[i] > 0.0).collect();
        let objective = dual_objective(k, y, &alpha);
        SvcModel {
            alphas: alpha,
            bias,
            support,
            c: s.c,
            kernel,
            labels: y.to_vec(),
            objective,
            passes,
            train_x: train_x.clone(),
        }
    };

    if y.iter().all(|&v| v == y[0]) {
        let mut model = finish(vec![0.0; m], 0);
        model.bias = f64::from(y[0]);
        return Ok(model);
    }

    let mut smo = Smo {
        k,
        err: yf.iter().map(|v| -v).collect(),
        y: yf.clone(),
        alpha: vec![0.0; m],
        b: 0.0,
        c: s.c,
        tol: s.tol,
    };
    let mut passes = 0;
    let mut examine_all = true;
    let mut changed = 0;
    while changed > 0 || examine_all {
        if passes >= s.max_passes {
            return Err(Error::Convergence {
                passes,
                model: Box::new(finish(smo.alpha, passes)),
            });
        }
        passes += 1;
        changed = 0;
        for i in 0..m {
            if examine_all || smo.is_free(i) {
                changed += usize::from(smo.examine(i));
            }
        }
        if examine_all {
            examine_all = false;
        } else if changed == 0 {
            examine_all = true;
        }
    }
    Ok(finish(smo.alpha, passes))
}

/// Bias from free support vectors, or the midpoint of the KKT-feasible
/// interval when every α sits at a bound.
fn intercept(k: &Matrix, y: &[f64], alpha: &[f64], c: f64) -> f64 {
    let m = y.len();
    let g: Vec<f64> = (0..m)
        .map(|i| (0..m).map(|j| alpha[j] * y[j] * k[(i, j)]).sum())
        .collect();
    let free: Vec<usize> = (0..m).filter(|&i| alpha[i] > 0.0 && alpha[i] < c).collect();
    if !free.is_empty() {
        return free.iter().map(|&i| y[i] - g[i]).sum::<f64>() / free.len() as f64;
    }
    let (mut lower, mut upper) = (f64::NEG_INFINITY, f64::INFINITY);
    for i in 0..m {
        let v = y[i] - g[i];
        let at_zero = alpha[i] <= 0.0;
        if (y[i] > 0.0) == at_zero {
            lower = lower.max(v);
        } else {
            upper = upper.min(v);
        }
    }
    match (lower.is_finite(), upper.is_finite()) {
        (true, true) => 0.5 * (lower + upper),
        (true, false) => lower,
        (false, true) => upper,
        (false, false) => 0.0,
    }
}

/// Fit on a precomputed Gram matrix.
pub fn fit_precomputed(k: &Matrix, y: &[i8], s: &SvcSettings) -> Result<SvcModel> {
    fit_gram(k, y, s, KernelSource::Precomputed, None)
}

/// Fit with an RBF kernel; `gamma = None` uses [`default_gamma`].
pub fn fit_rbf(x: &Matrix, y: &[i8], gamma: Option<f64>, s: &SvcSettings) -> Result<SvcModel> {
    let gamma = gamma.unwrap_or_else(|| default_gamma(x));
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::Config(format!("RBF gamma must be positive, got {gamma}")));
    }
    let k = rbf_gram(x, x, gamma);
    fit_gram(&k, y, s, KernelSource::Rbf { gamma }, Some(x.clone()))
}

impl SvcModel {
    /// Decision value from kernel values against every training sample.
    pub fn decision_from_kernel_row(&self, k_row: &[f64]) -> Result<f64> {
        if k_row.len() != self.alphas.len() {
            return Err(Error::dim(self.alphas.len(), k_row.len(), "kernel row length"));
        }
        Ok(self
            .support
            .iter()
            .map(|&i| self.alphas[i] * f64::from(self.labels[i]) * k_row[i])
            .sum::<f64>()
            + self.bias)
    }

    /// Labels for each row of a test-by-train kernel matrix. Ties go to +1.
    pub fn predict_gram(&self, k_test: &Matrix) -> Result<Vec<i8>> {
        k_test
            .iter_rows()
            .map(|r| Ok(if self.decision_from_kernel_row(r)? >= 0.0 { 1 } else { -1 }))
            .collect()
    }

    /// Decision value for a raw feature vector (RBF models only).
    pub fn decision(&self, x: &[f64]) -> Result<f64> {
        let (KernelSource::Rbf { gamma }, Some(train)) = (self.kernel, &self.train_x) else {
            return Err(Error::Usage("model was fitted on a precomputed kernel; pass kernel rows".into()));
        };
        if x.len() != train.cols() {
            return Err(Error::dim(train.cols(), x.len(), "feature count"));
        }
        let row: Vec<f64> = train
            .iter_rows()
            .map(|t| (-gamma * t.iter().zip(x).map(|(p, q)| (p - q).powi(2)).sum::<f64>()).exp())
            .collect();
        self.decision_from_kernel_row(&row)
    }

    pub fn predict(&self, x: &Matrix) -> Result<Vec<i8>> {
        x.iter_rows()
            .map(|r| Ok(if self.decision(r)? >= 0.0 { 1 } else { -1 }))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_point_identity_kernel() {
        let k = Matrix::identity(2);
        let m = fit_precomputed(&k, &[1, -1], &SvcSettings::default()).unwrap();
        assert!((m.alphas[0] - 1.0).abs() < 1e-9 && (m.alphas[1] - 1.0).abs() < 1e-9);
        assert!(m.bias.abs() < 1e-9);
        assert!((m.objective - 1.0).abs() < 1e-9);
    }

    #[test]
    fn identical_labels_predict_that_label() {
        let x = Matrix::from_rows(&[[0.0, 1.0], [1.0, 0.0], [2.0, 2.0]]).unwrap();
        for label in [1i8, -1] {
            let m = fit_rbf(&x, &[label; 3], None, &SvcSettings::default()).unwrap();
            let probe = Matrix::from_rows(&[[5.0, -3.0], [0.0, 0.0]]).unwrap();
            assert_eq!(m.predict(&probe).unwrap(), vec![label; 2]);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let k = Matrix::zeros(2, 3);
        assert!(matches!(fit_precomputed(&k, &[1, -1], &SvcSettings::default()), Err(Error::Usage(_))));
        let k = Matrix::identity(2);
        assert!(matches!(fit_precomputed(&k, &[1, 0], &SvcSettings::default()), Err(Error::Usage(_))));
    }

    #[test]
    fn convergence_error_keeps_partial_model() {
        let x = Matrix::from_rows(&[[0.0], [1.0], [2.0], [3.0], [0.5], [2.5]]).unwrap();
        let s = SvcSettings {
            max_passes: 1,
            tol: 1e-12,
            ..SvcSettings::default()
        };
        match fit_rbf(&x, &[1, -1, 1, -1, -1, 1], None, &s) {
            Err(Error::Convergence { passes, model }) => {
                assert_eq!(passes, 1);
                assert_eq!(model.alphas.len(), 6);
            }
            other => panic!("expected convergence error, got {other:?}"),
        }
    }

    #[test]
    fn separable_support_vectors_keep_their_label() {
        let x = Matrix::from_rows(&[[0.0, 0.0], [0.2, 0.1], [3.0, 3.0], [3.1, 2.8]]).unwrap();
        let y = [-1, -1, 1, 1];
        let m = fit_rbf(&x, &y, Some(0.5), &SvcSettings::default()).unwrap();
        assert_eq!(m.predict(&x).unwrap(), y.to_vec());
        let dual: f64 = m.alphas.iter().zip(&y).map(|(a, &l)| a * f64::from(l)).sum();
        assert!(dual.abs() < 1e-8);
        assert!(m.alphas.iter().all(|&a| (0.0..=m.c).contains(&a)));
    }

    #[test]
    fn tiny_gamma_gives_constant_prediction() {
        let x = Matrix::from_rows(&[[-1.0], [-0.5], [0.5], [1.0], [0.2]]).unwrap();
        let y = [1, 1, -1, -1, 1];
        let m = fit_rbf(&x, &y, Some(1e-9), &SvcSettings::default()).unwrap();
        let p = m.predict(&Matrix::from_rows(&[[-3.0], [0.0], [3.0]]).unwrap()).unwrap();
        assert!(p.iter().all(|&v| v == p[0]));
    }
}
