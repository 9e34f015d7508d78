//! 4×4 grayscale images: class 0 lights a diagonal, class 1 a full row or
//! column. Pixels are flattened row-major.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Dataset, DatasetSpec};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ImageGenConfig {
    pub n_samples: usize,
    /// Intensity range of structure pixels.
    pub high: [f64; 2],
    /// Intensity range of background pixels.
    pub background: [f64; 2],
    /// Share of samples in class 0; 0.5 is balanced.
    pub offset: f64,
    pub seed: u64,
}

impl Default for ImageGenConfig {
    fn default() -> Self {
        ImageGenConfig {
            n_samples: 500,
            high: [0.7, 1.0],
            background: [0.0, 0.3],
            offset: 0.5,
            seed: 0,
        }
    }
}

impl ImageGenConfig {
    fn validate(&self) -> Result<()> {
        let [hl, hh] = self.high;
        let [bl, bh] = self.background;
        if !(0.0 < hl && hl <= hh && hh <= 1.0) || !(0.0 <= bl && bl <= bh && bh < 1.0) {
            return Err(Error::Config(format!(
                "intensity ranges {:?} / {:?} must be ordered within [0, 1]",
                self.high, self.background
            )));
        }
        if bh >= hl {
            return Err(Error::Config(format!(
                "background range {:?} overlaps structure range {:?}",
                self.background, self.high
            )));
        }
        if !(self.offset > 0.0 && self.offset < 1.0) {
            return Err(Error::Config(format!("offset must lie in (0, 1), got {}", self.offset)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Structure {
    MainDiagonal,
    AntiDiagonal,
    Row(usize),
    Column(usize),
}

impl Structure {
    pub fn label(self) -> u8 {
        match self {
            Structure::MainDiagonal | Structure::AntiDiagonal => 0,
            Structure::Row(_) | Structure::Column(_) => 1,
        }
    }

    pub fn contains(self, r: usize, c: usize) -> bool {
        match self {
            Structure::MainDiagonal => r == c,
            Structure::AntiDiagonal => r + c == 3,
            Structure::Row(k) => r == k,
            Structure::Column(k) => c == k,
        }
    }

    fn random(label: u8, rng: &mut rng::Rng) -> Structure {
        if label == 0 {
            if rng.random() {
                Structure::MainDiagonal
            } else {
                Structure::AntiDiagonal
            }
        } else {
            let k = rng.random_range(0..4);
            if rng.random() {
                Structure::Row(k)
            } else {
                Structure::Column(k)
            }
        }
    }
}

/// Sixteen row-major pixel intensities for `structure`.
pub fn render_image(structure: Structure, cfg: &ImageGenConfig, rng: &mut rng::Rng) -> [f64; 16] {
    let mut px = [0.0; 16];
    for (i, p) in px.iter_mut().enumerate() {
        let [lo, hi] = if structure.contains(i / 4, i % 4) {
            cfg.high
        } else {
            cfg.background
        };
        *p = lo + (hi - lo) * rng.random::<f64>();
    }
    px
}

pub(super) fn generate(cfg: &ImageGenConfig) -> Result<Dataset> {
    cfg.validate()?;
    let mut rng = rng::seeded(cfg.seed);
    let n0 = (cfg.offset * cfg.n_samples as f64).round() as usize;
    let mut labels: Vec<u8> = (0..cfg.n_samples).map(|i| u8::from(i >= n0)).collect();
    labels.shuffle(&mut rng);
    let mut data = Vec::with_capacity(16 * cfg.n_samples);
    for &label in &labels {
        let s = Structure::random(label, &mut rng);
        data.extend_from_slice(&render_image(s, cfg, &mut rng));
    }
    let mut ds = Dataset::new(Matrix::new(cfg.n_samples, 16, data)?, labels)?;
    ds.source = Some(DatasetSpec::Image4x4(cfg.clone()));
    Ok(ds)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pixels_bounded_and_sixteen_wide() {
        let ds = generate(&ImageGenConfig::default()).unwrap();
        assert_eq!(ds.n_features(), 16);
        assert!(ds.x.data().iter().all(|v| (0.0..=1.0).contains(v)));
        assert_eq!(ds.class_counts(), (250, 250));
    }

    #[test]
    fn row_structure_lights_its_row() {
        let cfg = ImageGenConfig::default();
        let mut rng = rng::seeded(2);
        let px = render_image(Structure::Row(2), &cfg, &mut rng);
        assert!(px[8..12].iter().all(|&v| v >= cfg.high[0]));
        assert!(px[..8].iter().chain(&px[12..]).all(|&v| v <= cfg.background[1]));
        assert_eq!(Structure::Row(2).label(), 1);
    }

    #[test]
    fn anti_diagonal_pixels() {
        let cfg = ImageGenConfig::default();
        let px = render_image(Structure::AntiDiagonal, &cfg, &mut rng::seeded(0));
        for i in 0..16 {
            let on = [3, 6, 9, 12].contains(&i);
            assert_eq!(px[i] >= cfg.high[0], on, "pixel {i}");
        }
    }

    #[test]
    fn offset_controls_split() {
        let ds = generate(&ImageGenConfig {
            n_samples: 100,
            offset: 0.7,
            ..ImageGenConfig::default()
        })
        .unwrap();
        assert_eq!(ds.class_counts(), (70, 30));
    }

    #[test]
    fn overlapping_ranges_rejected() {
        let cfg = ImageGenConfig {
            background: [0.0, 0.8],
            ..ImageGenConfig::default()
        };
        assert!(matches!(generate(&cfg), Err(Error::Config(_))));
    }
}
