//! Gaussian-cluster generator in the style of the classic Madelon
//! construction: clusters sit on hypercube vertices, with redundant,
//! repeated and pure-noise columns appended.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{Dataset, DatasetSpec};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LinearGenConfig {
    pub n_samples: usize,
    pub n_features: usize,
    pub n_informative: usize,
    pub n_redundant: usize,
    pub n_repeated: usize,
    pub clusters_per_class: usize,
    /// Half the hypercube side length.
    pub class_sep: f64,
    /// Fraction of labels flipped after generation.
    pub flip_y: f64,
    pub seed: u64,
}

impl Default for LinearGenConfig {
    fn default() -> Self {
        LinearGenConfig {
            n_samples: 500,
            n_features: 16,
            n_informative: 8,
            n_redundant: 4,
            n_repeated: 0,
            clusters_per_class: 2,
            class_sep: 1.0,
            flip_y: 0.01,
            seed: 0,
        }
    }
}

impl LinearGenConfig {
    fn validate(&self) -> Result<()> {
        let used = self.n_informative + self.n_redundant + self.n_repeated;
        if used > self.n_features {
            return Err(Error::Config(format!(
                "informative + redundant + repeated = {used} exceeds n_features = {}",
                self.n_features
            )));
        }
        if self.n_informative == 0 || self.clusters_per_class == 0 {
            return Err(Error::Config(
                "need at least one informative feature and one cluster per class".into(),
            ));
        }
        let n_clusters = 2 * self.clusters_per_class;
        if self.n_informative < 63 && (1u64 << self.n_informative) < n_clusters as u64 {
            return Err(Error::Config(format!(
                "{} informative features give fewer than {n_clusters} hypercube vertices",
                self.n_informative
            )));
        }
        if self.n_samples < n_clusters {
            return Err(Error::Config(format!(
                "{} samples cannot fill {n_clusters} clusters",
                self.n_samples
            )));
        }
        if !(0.0..=1.0).contains(&self.flip_y) || !self.class_sep.is_finite() {
            return Err(Error::Config("flip_y must lie in [0, 1] and class_sep be finite".into()));
        }
        Ok(())
    }
}

fn uniform_pm1(rng: &mut rng::Rng) -> f64 {
    2.0 * rng.random::<f64>() - 1.0
}

pub(super) fn generate(cfg: &LinearGenConfig) -> Result<Dataset> {
    cfg.validate()?;
    let mut rng = rng::seeded(cfg.seed);
    let n = cfg.n_samples;
    let n_inf = cfg.n_informative;
    let n_clusters = 2 * cfg.clusters_per_class;

    // distinct hypercube vertices, one per cluster
    let mut seen = HashSet::new();
    let mut centroids = Vec::with_capacity(n_clusters);
    while centroids.len() < n_clusters {
        let bits: Vec<bool> = (0..n_inf).map(|_| rng.random()).collect();
        if seen.insert(bits.clone()) {
            centroids.push(
                bits.iter()
                    .map(|&b| if b { cfg.class_sep } else { -cfg.class_sep })
                    .collect::<Vec<f64>>(),
            );
        }
    }

    let mut sizes = vec![n / n_clusters; n_clusters];
    for s in sizes.iter_mut().take(n % n_clusters) {
        *s += 1;
    }

    let mut x = Matrix::zeros(n, cfg.n_features);
    let mut y = vec![0u8; n];
    let mut start = 0;
    for (k, (&size, centroid)) in sizes.iter().zip(&centroids).enumerate() {
        // random covariance: z · A with A uniform on [−1, 1]
        let a: Vec<f64> = (0..n_inf * n_inf).map(|_| uniform_pm1(&mut rng)).collect();
        for i in start..start + size {
            y[i] = (k % 2) as u8;
            let z: Vec<f64> = (0..n_inf).map(|_| rng.sample(StandardNormal)).collect();
            let row = x.row_mut(i);
            for j in 0..n_inf {
                let mut v = centroid[j];
                for (l, zl) in z.iter().enumerate() {
                    v += zl * a[l * n_inf + j];
                }
                row[j] = v;
            }
        }
        start += size;
    }

    if cfg.n_redundant > 0 {
        let b: Vec<f64> = (0..n_inf * cfg.n_redundant).map(|_| uniform_pm1(&mut rng)).collect();
        for i in 0..n {
            let row = x.row_mut(i);
            for r in 0..cfg.n_redundant {
                row[n_inf + r] = (0..n_inf).map(|j| row[j] * b[j * cfg.n_redundant + r]).sum();
            }
        }
    }

    let base = n_inf + cfg.n_redundant;
    if cfg.n_repeated > 0 {
        let src: Vec<usize> = (0..cfg.n_repeated)
            .map(|_| ((base - 1) as f64 * rng.random::<f64>()).round() as usize)
            .collect();
        for i in 0..n {
            let row = x.row_mut(i);
            for (r, &s) in src.iter().enumerate() {
                row[base + r] = row[s];
            }
        }
    }

    for i in 0..n {
        for j in base + cfg.n_repeated..cfg.n_features {
            x[(i, j)] = rng.sample(StandardNormal);
        }
    }

    for label in &mut y {
        if rng.random::<f64>() < cfg.flip_y {
            *label = 1 - *label;
        }
    }

    let mut rows: Vec<usize> = (0..n).collect();
    rows.shuffle(&mut rng);
    let mut cols: Vec<usize> = (0..cfg.n_features).collect();
    cols.shuffle(&mut rng);
    let mut shuffled = Matrix::zeros(n, cfg.n_features);
    for (dst, &src) in rows.iter().enumerate() {
        for (dj, &sj) in cols.iter().enumerate() {
            shuffled[(dst, dj)] = x[(src, sj)];
        }
    }
    let y = rows.iter().map(|&i| y[i]).collect();

    let mut ds = Dataset::new(shuffled, y)?;
    ds.source = Some(DatasetSpec::Linear(cfg.clone()));
    Ok(ds)
}
