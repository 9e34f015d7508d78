//! Per-column scaling fitted on train rows.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scaling {
    None,
    /// Zero mean, unit (population) variance.
    Standardize,
    /// Train range mapped to [0, 1].
    MinMax,
}

impl Scaling {
    pub fn tag(self) -> &'static str {
        match self {
            Scaling::None => "raw",
            Scaling::Standardize => "std",
            Scaling::MinMax => "minmax",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scaler {
    shift: Vec<f64>,
    scale: Vec<f64>,
}

impl Scaler {
    pub fn fit(kind: Scaling, train: &Matrix) -> Scaler {
        let m = train.cols();
        match kind {
            Scaling::None => Scaler {
                shift: vec![0.0; m],
                scale: vec![1.0; m],
            },
            Scaling::Standardize => {
                let mean = train.column_means();
                let mut var = vec![0.0; m];
                for r in train.iter_rows() {
                    for j in 0..m {
                        var[j] += (r[j] - mean[j]).powi(2);
                    }
                }
                let n = train.rows().max(1) as f64;
                let scale = var
                    .iter()
                    .map(|v| {
                        let s = (v / n).sqrt();
                        if s > 0.0 { s } else { 1.0 }
                    })
                    .collect();
                Scaler { shift: mean, scale }
            }
            Scaling::MinMax => {
                let mut lo = vec![f64::INFINITY; m];
                let mut hi = vec![f64::NEG_INFINITY; m];
                for r in train.iter_rows() {
                    for j in 0..m {
                        lo[j] = lo[j].min(r[j]);
                        hi[j] = hi[j].max(r[j]);
                    }
                }
                let scale = lo
                    .iter()
                    .zip(&hi)
                    .map(|(l, h)| if h > l { h - l } else { 1.0 })
                    .collect();
                Scaler { shift: lo, scale }
            }
        }
    }

    pub fn transform(&self, x: &Matrix) -> Result<Matrix> {
        if x.cols() != self.shift.len() {
            return Err(Error::dim(self.shift.len(), x.cols(), "scaler feature count"));
        }
        let mut out = x.clone();
        for i in 0..out.rows() {
            for (j, v) in out.row_mut(i).iter_mut().enumerate() {
                *v = (*v - self.shift[j]) / self.scale[j];
            }
        }
        Ok(out)
    }
}
