//! Synthetic binary classification datasets, a stratified splitter and
//! CSV round-tripping.

mod image;
mod linear;
mod nonlinear;

pub use image::{render_image, ImageGenConfig, Structure};
pub use linear::LinearGenConfig;
pub use nonlinear::{CorrelationSpec, LabelFunction, NonlinearGenConfig};

use std::path::Path;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::rng;

/// Generator choice plus its configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DatasetSpec {
    Linear(LinearGenConfig),
    Nonlinear(NonlinearGenConfig),
    #[serde(rename = "image4x4")]
    Image4x4(ImageGenConfig),
}

impl DatasetSpec {
    pub fn name(&self) -> &'static str {
        match self {
            DatasetSpec::Linear(_) => "linear",
            DatasetSpec::Nonlinear(_) => "nonlinear",
            DatasetSpec::Image4x4(_) => "image4x4",
        }
    }

    pub fn seed(&self) -> u64 {
        match self {
            DatasetSpec::Linear(c) => c.seed,
            DatasetSpec::Nonlinear(c) => c.seed,
            DatasetSpec::Image4x4(c) => c.seed,
        }
    }

    pub fn with_seed(&self, seed: u64) -> DatasetSpec {
        let mut s = self.clone();
        match &mut s {
            DatasetSpec::Linear(c) => c.seed = seed,
            DatasetSpec::Nonlinear(c) => c.seed = seed,
            DatasetSpec::Image4x4(c) => c.seed = seed,
        }
        s
    }

    pub fn generate(&self) -> Result<Dataset> {
        match self {
            DatasetSpec::Linear(c) => gen_linear(c),
            DatasetSpec::Nonlinear(c) => gen_nonlinear(c),
            DatasetSpec::Image4x4(c) => gen_image4x4(c),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub x: Matrix,
    pub y: Vec<u8>,
    /// Generator that produced the data; `None` for loaded files.
    pub source: Option<DatasetSpec>,
}

impl Dataset {
    pub fn new(x: Matrix, y: Vec<u8>) -> Result<Self> {
        if x.rows() != y.len() {
            return Err(Error::dim(x.rows(), y.len(), "label count"));
        }
        if let Some(bad) = y.iter().find(|&&v| v > 1) {
            return Err(Error::Usage(format!("labels must be 0 or 1, got {bad}")));
        }
        if !x.is_finite() {
            return Err(Error::Config("dataset contains non-finite values".into()));
        }
        Ok(Dataset { x, y, source: None })
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.x.cols()
    }

    /// `(count of label 0, count of label 1)`.
    pub fn class_counts(&self) -> (usize, usize) {
        let ones = self.y.iter().filter(|&&v| v == 1).count();
        (self.y.len() - ones, ones)
    }

    pub fn subset(&self, idx: &[usize]) -> Dataset {
        Dataset {
            x: self.x.select_rows(idx),
            y: idx.iter().map(|&i| self.y[i]).collect(),
            source: self.source.clone(),
        }
    }
}

pub fn gen_linear(cfg: &LinearGenConfig) -> Result<Dataset> {
    linear::generate(cfg)
}

pub fn gen_nonlinear(cfg: &NonlinearGenConfig) -> Result<Dataset> {
    nonlinear::generate(cfg)
}

pub fn gen_image4x4(cfg: &ImageGenConfig) -> Result<Dataset> {
    image::generate(cfg)
}

/// Row indices of a stratified train/test partition.
pub fn split_indices(y: &[u8], train_fraction: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::Config(format!(
            "train fraction must lie in (0, 1), got {train_fraction}"
        )));
    }
    let mut rng = rng::seeded(seed);
    let (mut train, mut test) = (Vec::new(), Vec::new());
    for class in [0u8, 1] {
        let mut idx: Vec<usize> = (0..y.len()).filter(|&i| y[i] == class).collect();
        idx.shuffle(&mut rng);
        let n_train = (train_fraction * idx.len() as f64).round() as usize;
        test.extend_from_slice(&idx[n_train..]);
        idx.truncate(n_train);
        train.extend(idx);
    }
    if train.is_empty() || test.is_empty() {
        return Err(Error::Config(format!(
            "split of {} samples at {train_fraction} leaves an empty side",
            y.len()
        )));
    }
    train.shuffle(&mut rng);
    test.shuffle(&mut rng);
    Ok((train, test))
}

/// Stratified, shuffled train/test split.
pub fn split(ds: &Dataset, train_fraction: f64, seed: u64) -> Result<(Dataset, Dataset)> {
    let (train, test) = split_indices(&ds.y, train_fraction, seed)?;
    Ok((ds.subset(&train), ds.subset(&test)))
}

/// Write with header `f0,…,f{n−1},label`.
pub fn write_csv(ds: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header: Vec<String> = (0..ds.n_features()).map(|j| format!("f{j}")).collect();
    header.push("label".into());
    w.write_record(&header)?;
    for (row, label) in ds.x.iter_rows().zip(&ds.y) {
        let mut rec: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
        rec.push(label.to_string());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Read a file written by [`write_csv`]; the last column holds labels.
pub fn read_csv(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    let mut r = csv::Reader::from_path(path)?;
    let header = r.headers()?.clone();
    if header.iter().last() != Some("label") {
        return Err(Error::Parse {
            location: format!("{}:1", path.display()),
            message: "last column must be `label`".into(),
        });
    }
    let n_features = header.len() - 1;
    let mut data = Vec::new();
    let mut y = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        let parse_err = |msg: String| Error::Parse {
            location: format!("{}:{line}", path.display()),
            message: msg,
        };
        for field in rec.iter().take(n_features) {
            data.push(
                field
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| parse_err(format!("bad number {field:?}: {e}")))?,
            );
        }
        let label = rec.get(n_features).unwrap_or_default().trim();
        y.push(match label {
            "0" => 0,
            "1" => 1,
            other => return Err(parse_err(format!("label must be 0 or 1, got {other:?}"))),
        });
    }
    Dataset::new(Matrix::new(y.len(), n_features, data)?, y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn split_is_stratified_80_20() {
        let ds = gen_linear(&LinearGenConfig {
            flip_y: 0.0,
            ..LinearGenConfig::default()
        })
        .unwrap();
        let (tr, te) = split(&ds, 0.8, 3).unwrap();
        assert_eq!((tr.len(), te.len()), (400, 100));
        assert_eq!(tr.class_counts(), (200, 200));
        assert_eq!(te.class_counts(), (50, 50));
    }

    #[test]
    fn split_is_a_deterministic_partition() {
        let y: Vec<u8> = (0..37).map(|i| (i % 3 == 0) as u8).collect();
        let (a, b) = split_indices(&y, 0.7, 5).unwrap();
        assert_eq!(split_indices(&y, 0.7, 5).unwrap(), (a.clone(), b.clone()));
        let mut all: Vec<usize> = a.iter().chain(&b).copied().collect();
        all.sort();
        assert_eq!(all, (0..37).collect::<Vec<_>>());
        assert!(a.iter().all(|i| !b.contains(i)));
    }

    #[test]
    fn degenerate_split_rejected() {
        assert!(split_indices(&[0, 1], 0.0, 1).is_err());
        assert!(split_indices(&[0, 1], 1.0, 1).is_err());
        assert!(split_indices(&[1], 0.5, 1).is_err());
    }

    #[test]
    fn csv_roundtrip() {
        let ds = gen_image4x4(&ImageGenConfig {
            n_samples: 20,
            ..ImageGenConfig::default()
        })
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("img.csv");
        write_csv(&ds, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("f0,f1,f2,f3,f4,f5,f6,f7,f8,f9,f10,f11,f12,f13,f14,f15,label\n"));
        let back = read_csv(&path).unwrap();
        assert_eq!(back.x, ds.x);
        assert_eq!(back.y, ds.y);
    }

    #[test]
    fn csv_errors_name_the_line() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "f0,label\n1.0,0\nabc,1\n").unwrap();
        match read_csv(&path) {
            Err(Error::Parse { location, .. }) => assert!(location.ends_with(":3")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn spec_serde_roundtrip() {
        let spec = DatasetSpec::Nonlinear(NonlinearGenConfig::default());
        let text = serde_json::to_string(&spec).unwrap();
        assert!(text.contains("\"kind\":\"nonlinear\""));
        let back: DatasetSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back, spec);
        let img: DatasetSpec = serde_json::from_str(r#"{"kind":"image4x4"}"#).unwrap();
        assert_eq!(img, DatasetSpec::Image4x4(ImageGenConfig::default()));
    }
}
