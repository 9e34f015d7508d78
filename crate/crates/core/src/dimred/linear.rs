//! PCA and truncated SVD via the symmetric eigendecomposition of the
//! (centered or raw) Gram matrix `XᵀX`.

use crate::error::{Error, Result};
use crate::linalg::{fix_column_signs, symmetric_eigen, Matrix};

fn gram(x: &Matrix, mean: Option<&[f64]>) -> Matrix {
    let m = x.cols();
    let mut g = Matrix::zeros(m, m);
    let mut centered = vec![0.0; m];
    for r in x.iter_rows() {
        for j in 0..m {
            centered[j] = r[j] - mean.map_or(0.0, |mu| mu[j]);
        }
        for a in 0..m {
            let ca = centered[a];
            if ca == 0.0 {
                continue;
            }
            for b in a..m {
                g[(a, b)] += ca * centered[b];
            }
        }
    }
    for a in 0..m {
        for b in 0..a {
            g[(a, b)] = g[(b, a)];
        }
    }
    g
}

fn project(x: &Matrix, mean: Option<&[f64]>, components: &Matrix) -> Result<Matrix> {
    if x.cols() != components.rows() {
        return Err(Error::dim(components.rows(), x.cols(), "projection feature count"));
    }
    let d = components.cols();
    let mut out = Matrix::zeros(x.rows(), d);
    for (i, r) in x.iter_rows().enumerate() {
        for k in 0..d {
            out[(i, k)] = r
                .iter()
                .enumerate()
                .map(|(j, v)| (v - mean.map_or(0.0, |mu| mu[j])) * components[(j, k)])
                .sum();
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Pca {
    pub mean: Vec<f64>,
    /// Unit principal axes as columns, `m × d`.
    pub components: Matrix,
    /// Covariance eigenvalues of the kept axes, descending.
    pub explained_variance: Vec<f64>,
}

impl Pca {
    pub fn fit(train: &Matrix, d: usize) -> Result<Pca> {
        if train.rows() < 2 || d == 0 || d > train.cols() {
            return Err(Error::dim(train.cols(), d, "PCA target dimension"));
        }
        let mean = train.column_means();
        let mut cov = gram(train, Some(&mean));
        let denom = (train.rows() - 1) as f64;
        for i in 0..cov.rows() {
            for v in cov.row_mut(i) {
                *v /= denom;
            }
        }
        let eig = symmetric_eigen(&cov)?;
        let mut components = eig.vectors.leading_columns(d);
        fix_column_signs(&mut components);
        Ok(Pca {
            mean,
            components,
            explained_variance: eig.values[..d].to_vec(),
        })
    }

    pub fn transform(&self, x: &Matrix) -> Result<Matrix> {
        project(x, Some(&self.mean), &self.components)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSvd {
    /// Right singular vectors as columns, `m × d`.
    pub components: Matrix,
    /// Descending, non-negative.
    pub singular_values: Vec<f64>,
}

impl TruncatedSvd {
    pub fn fit(train: &Matrix, d: usize) -> Result<TruncatedSvd> {
        if train.rows() < 1 || d == 0 || d > train.cols() {
            return Err(Error::dim(train.cols(), d, "truncated SVD target dimension"));
        }
        let eig = symmetric_eigen(&gram(train, None))?;
        let mut components = eig.vectors.leading_columns(d);
        fix_column_signs(&mut components);
        Ok(TruncatedSvd {
            components,
            singular_values: eig.values[..d].iter().map(|l| l.max(0.0).sqrt()).collect(),
        })
    }

    /// `x · V_d`; on the training matrix this equals `U_d Σ_d`.
    pub fn transform(&self, x: &Matrix) -> Result<Matrix> {
        project(x, None, &self.components)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn pca_on_a_line() {
        let x = Matrix::from_rows(&[[1.0, 1.0], [2.0, 2.0], [3.0, 3.0]]).unwrap();
        let p = Pca::fit(&x, 1).unwrap();
        let t = p.transform(&x).unwrap();
        let s2 = 2f64.sqrt();
        for (got, want) in t.column(0).iter().zip([-s2, 0.0, s2]) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
    }

    #[test]
    fn tsvd_of_diagonal() {
        let x = Matrix::from_rows(&[[3.0, 0.0], [0.0, 2.0]]).unwrap();
        let s = TruncatedSvd::fit(&x, 1).unwrap();
        let t = s.transform(&x).unwrap();
        assert!((t[(0, 0)].abs() - 3.0).abs() < 1e-12);
        assert!(t[(1, 0)].abs() < 1e-12);
        assert!((s.singular_values[0] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn tsvd_recovers_rank_one() {
        let u = [1.0, -2.0, 0.5, 3.0];
        let v = [0.3, 0.4, -1.2];
        let rows: Vec<Vec<f64>> = u.iter().map(|a| v.iter().map(|b| a * b).collect()).collect();
        let x = Matrix::from_rows(&rows).unwrap();
        let s = TruncatedSvd::fit(&x, 1).unwrap();
        let t = s.transform(&x).unwrap();
        let recon = t.matmul(&s.components.transpose()).unwrap();
        let err: f64 = recon.data().iter().zip(x.data()).map(|(a, b)| (a - b).powi(2)).sum();
        assert!(err.sqrt() < 1e-8);
    }

    #[test]
    fn full_rank_pca_preserves_distances() {
        let mut r = crate::rng::seeded(2);
        let x = Matrix::new(12, 5, (0..60).map(|_| r.random_range(-3.0..3.0)).collect()).unwrap();
        let t = Pca::fit(&x, 5).unwrap().transform(&x).unwrap();
        let dist = |m: &Matrix, a: usize, b: usize| -> f64 {
            m.row(a).iter().zip(m.row(b)).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt()
        };
        for a in 0..12 {
            for b in 0..12 {
                assert!((dist(&x, a, b) - dist(&t, a, b)).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn sign_convention_is_fixed() {
        let mut r = crate::rng::seeded(6);
        let x = Matrix::new(20, 4, (0..80).map(|_| r.random_range(-1.0..1.0)).collect()).unwrap();
        let p = Pca::fit(&x, 4).unwrap();
        for k in 0..4 {
            let col = p.components.column(k);
            let big = col.iter().copied().fold(0.0f64, |a, v| if v.abs() > a.abs() { v } else { a });
            assert!(big > 0.0);
        }
    }
}
