//! Copula-driven generator with a nonlinear labelling rule.
//!
//! Informative features come from a Gaussian copula mapped to uniform
//! marginals on [−1, 1]. The label is whether a registered function of the
//! informative block exceeds its sample median.

use std::f64::consts::{PI, SQRT_2};

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{Dataset, DatasetSpec};
use crate::error::{Error, Result};
use crate::linalg::{cholesky, Matrix};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LabelFunction {
    /// `x1·x2 + sin(π·x3) + x4²`
    ProductSineSquare,
    /// `x1·x2`
    Xor,
    /// `x1² + x2²`
    Radial,
    /// `sin(π·x1) · cos(π·x2)`
    SineCosine,
}

impl LabelFunction {
    pub fn arity(self) -> usize {
        match self {
            LabelFunction::ProductSineSquare => 4,
            LabelFunction::Xor | LabelFunction::Radial | LabelFunction::SineCosine => 2,
        }
    }

    pub fn eval(self, x: &[f64]) -> f64 {
        match self {
            LabelFunction::ProductSineSquare => x[0] * x[1] + (PI * x[2]).sin() + x[3] * x[3],
            LabelFunction::Xor => x[0] * x[1],
            LabelFunction::Radial => x[0] * x[0] + x[1] * x[1],
            LabelFunction::SineCosine => (PI * x[0]).sin() * (PI * x[1]).cos(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorrelationSpec {
    /// Unit diagonal with one common off-diagonal value.
    Equicorrelation(f64),
    /// Explicit matrix, one row per informative feature.
    Full(Vec<Vec<f64>>),
}

impl CorrelationSpec {
    fn matrix(&self, n: usize) -> Result<Matrix> {
        let m = match self {
            CorrelationSpec::Equicorrelation(rho) => {
                let mut m = Matrix::identity(n);
                for i in 0..n {
                    for j in 0..n {
                        if i != j {
                            m[(i, j)] = *rho;
                        }
                    }
                }
                m
            }
            CorrelationSpec::Full(rows) => {
                let m = Matrix::from_rows(rows)?;
                if m.rows() != n || m.cols() != n {
                    return Err(Error::dim(n, m.rows(), "correlation matrix size"));
                }
                for i in 0..n {
                    if (m[(i, i)] - 1.0).abs() > 1e-12 {
                        return Err(Error::Config("correlation diagonal must be 1".into()));
                    }
                    for j in 0..i {
                        if (m[(i, j)] - m[(j, i)]).abs() > 1e-12 {
                            return Err(Error::Config("correlation matrix must be symmetric".into()));
                        }
                    }
                }
                m
            }
        };
        Ok(m)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NonlinearGenConfig {
    pub n_samples: usize,
    pub n_informative: usize,
    pub n_redundant: usize,
    pub n_nuisance: usize,
    pub correlation: CorrelationSpec,
    pub function: LabelFunction,
    pub seed: u64,
}

impl Default for NonlinearGenConfig {
    fn default() -> Self {
        NonlinearGenConfig {
            n_samples: 500,
            n_informative: 4,
            n_redundant: 6,
            n_nuisance: 6,
            correlation: CorrelationSpec::Equicorrelation(0.3),
            function: LabelFunction::ProductSineSquare,
            seed: 0,
        }
    }
}

impl NonlinearGenConfig {
    /// Eight-column variant: 4 informative, 2 redundant, 2 nuisance.
    pub fn eight_features() -> Self {
        NonlinearGenConfig {
            n_redundant: 2,
            n_nuisance: 2,
            ..NonlinearGenConfig::default()
        }
    }

    pub fn n_features(&self) -> usize {
        self.n_informative + self.n_redundant + self.n_nuisance
    }
}

/// Standard normal CDF.
fn normal_cdf(z: f64) -> f64 {
    0.5 * (1.0 + libm::erf(z / SQRT_2))
}

pub(super) fn generate(cfg: &NonlinearGenConfig) -> Result<Dataset> {
    let n_inf = cfg.n_informative;
    if n_inf < cfg.function.arity() {
        return Err(Error::Config(format!(
            "label function {:?} needs {} informative features, got {n_inf}",
            cfg.function,
            cfg.function.arity()
        )));
    }
    if cfg.n_samples < 2 {
        return Err(Error::Config("need at least two samples".into()));
    }
    let corr = cfg.correlation.matrix(n_inf)?;
    let l = cholesky(&corr)
        .map_err(|_| Error::Config("copula correlation matrix is not positive definite".into()))?;
    let mut rng = rng::seeded(cfg.seed);
    let n = cfg.n_samples;
    let d = cfg.n_features();

    let b: Vec<f64> = (0..n_inf * cfg.n_redundant)
        .map(|_| 2.0 * rng.random::<f64>() - 1.0)
        .collect();

    let mut x = Matrix::zeros(n, d);
    let mut scores = Vec::with_capacity(n);
    for i in 0..n {
        let g: Vec<f64> = (0..n_inf).map(|_| rng.sample(StandardNormal)).collect();
        let row = x.row_mut(i);
        for j in 0..n_inf {
            let z: f64 = (0..=j).map(|k| l[(j, k)] * g[k]).sum();
            row[j] = 2.0 * normal_cdf(z) - 1.0;
        }
        for r in 0..cfg.n_redundant {
            row[n_inf + r] = (0..n_inf).map(|j| row[j] * b[j * cfg.n_redundant + r]).sum();
        }
        for v in &mut row[n_inf + cfg.n_redundant..] {
            *v = 2.0 * rng.random::<f64>() - 1.0;
        }
        scores.push(cfg.function.eval(&row[..n_inf]));
    }

    // upper half of the score ranking gets label 1; ties go by row order
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]).then(a.cmp(&b)));
    let mut y = vec![0u8; n];
    for &i in &order[n - n / 2..] {
        y[i] = 1;
    }

    let mut ds = Dataset::new(x, y)?;
    ds.source = Some(DatasetSpec::Nonlinear(cfg.clone()));
    Ok(ds)
}
