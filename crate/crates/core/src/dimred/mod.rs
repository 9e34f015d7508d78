//! Dimensionality reduction behind one fit-on-train, transform-both
//! interface.

mod autoencoder;
mod linear;
mod scale;
mod tsne;

pub use autoencoder::{Activation, Autoencoder, AutoencoderSettings};
pub use linear::{Pca, TruncatedSvd};
pub use scale::{Scaler, Scaling};
pub use tsne::{tsne, TsneFit, TsneSettings};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Pca,
    #[serde(rename = "tsvd")]
    TruncatedSvd,
    Tsne,
    Autoencoder,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Pca => "pca",
            Method::TruncatedSvd => "tsvd",
            Method::Tsne => "tsne",
            Method::Autoencoder => "autoencoder",
        }
    }

    pub fn parse(s: &str) -> Result<Method> {
        match s {
            "pca" => Ok(Method::Pca),
            "tsvd" | "svd" => Ok(Method::TruncatedSvd),
            "tsne" => Ok(Method::Tsne),
            "autoencoder" => Ok(Method::Autoencoder),
            other => Err(Error::Usage(format!(
                "unknown reduction method {other:?} (expected pca, tsvd, tsne or autoencoder)"
            ))),
        }
    }

    /// Input scaling applied when the configuration does not choose one.
    pub fn default_scaling(self) -> Scaling {
        match self {
            Method::Autoencoder => Scaling::MinMax,
            _ => Scaling::Standardize,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReductionSpec {
    pub method: Method,
    pub target_dim: usize,
    #[serde(default)]
    pub tsne: TsneSettings,
    #[serde(default)]
    pub autoencoder: AutoencoderSettings,
    #[serde(default)]
    pub seed: u64,
}

impl ReductionSpec {
    pub fn new(method: Method, target_dim: usize) -> Self {
        ReductionSpec {
            method,
            target_dim,
            tsne: TsneSettings::default(),
            autoencoder: AutoencoderSettings::default(),
            seed: 0,
        }
    }
}

/// Train and test matrices in the reduced space.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedDataset {
    pub train: Matrix,
    pub test: Matrix,
}

pub(crate) fn check_dims(train: &Matrix, test: &Matrix, d: usize) -> Result<()> {
    if d == 0 || d > train.cols() {
        return Err(Error::dim(
            train.cols(),
            d,
            "target dimension must lie in 1..=feature count",
        ));
    }
    if test.cols() != train.cols() {
        return Err(Error::dim(train.cols(), test.cols(), "test feature count"));
    }
    if train.rows() < 2 {
        return Err(Error::dim(2, train.rows(), "reduction needs at least two train rows"));
    }
    Ok(())
}

pub fn pca_fit_transform(train: &Matrix, test: &Matrix, d: usize) -> Result<ReducedDataset> {
    check_dims(train, test, d)?;
    let pca = Pca::fit(train, d)?;
    Ok(ReducedDataset {
        train: pca.transform(train)?,
        test: pca.transform(test)?,
    })
}

pub fn tsvd_fit_transform(train: &Matrix, test: &Matrix, d: usize) -> Result<ReducedDataset> {
    check_dims(train, test, d)?;
    let svd = TruncatedSvd::fit(train, d)?;
    Ok(ReducedDataset {
        train: svd.transform(train)?,
        test: svd.transform(test)?,
    })
}

pub fn tsne_fit_transform(
    train: &Matrix,
    test: &Matrix,
    d: usize,
    settings: &TsneSettings,
    seed: u64,
) -> Result<ReducedDataset> {
    check_dims(train, test, d)?;
    let fit = tsne(train, d, settings, seed)?;
    let test = fit.extend(test)?;
    Ok(ReducedDataset {
        train: fit.embedding,
        test,
    })
}

pub fn autoencoder_fit_transform(
    train: &Matrix,
    test: &Matrix,
    d: usize,
    settings: &AutoencoderSettings,
    seed: u64,
) -> Result<ReducedDataset> {
    check_dims(train, test, d)?;
    let ae = Autoencoder::fit(train, d, settings, seed)?;
    Ok(ReducedDataset {
        train: ae.encode(train)?,
        test: ae.encode(test)?,
    })
}

/// Dispatch on `spec.method`.
pub fn fit_transform(spec: &ReductionSpec, train: &Matrix, test: &Matrix) -> Result<ReducedDataset> {
    let d = spec.target_dim;
    match spec.method {
        Method::Pca => pca_fit_transform(train, test, d),
        Method::TruncatedSvd => tsvd_fit_transform(train, test, d),
        Method::Tsne => tsne_fit_transform(train, test, d, &spec.tsne, spec.seed),
        Method::Autoencoder => autoencoder_fit_transform(train, test, d, &spec.autoencoder, spec.seed),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn random(rows: usize, cols: usize, seed: u64) -> Matrix {
        let mut r = crate::rng::seeded(seed);
        Matrix::new(rows, cols, (0..rows * cols).map(|_| r.random_range(-2.0..2.0)).collect()).unwrap()
    }

    #[test]
    fn every_method_hits_target_dim_and_ignores_test_rows() {
        let train = random(40, 6, 1);
        let test = random(7, 6, 2);
        let zeros = Matrix::zeros(7, 6);
        for method in [Method::Pca, Method::TruncatedSvd, Method::Tsne, Method::Autoencoder] {
            let mut spec = ReductionSpec::new(method, 3);
            spec.tsne.iterations = 300;
            spec.tsne.perplexity = 5.0;
            spec.autoencoder.epochs = 20;
            let a = fit_transform(&spec, &train, &test).unwrap();
            let b = fit_transform(&spec, &train, &zeros).unwrap();
            assert_eq!((a.train.cols(), a.test.cols()), (3, 3), "{method:?}");
            assert_eq!(a.train, b.train, "{method:?} leaked test rows into the fit");
            assert_ne!(a.test, b.test);
        }
    }

    #[test]
    fn target_dim_bounds() {
        let train = random(10, 4, 3);
        for d in [0, 5] {
            assert!(matches!(
                pca_fit_transform(&train, &train, d),
                Err(Error::Dimension { .. })
            ));
        }
    }

    #[test]
    fn method_names_roundtrip() {
        for m in [Method::Pca, Method::TruncatedSvd, Method::Tsne, Method::Autoencoder] {
            assert_eq!(Method::parse(m.name()).unwrap(), m);
        }
        assert!(Method::parse("isomap").is_err());
    }
}
