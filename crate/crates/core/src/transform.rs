//! The dataset map φ: subsample, standardize, whiten, then rotate to
//! independent components. The result is a uniform point cloud.

use nalgebra::{DMatrix, SymmetricEigen};
use ndarray::{Array1, Array2, Axis};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::ot::DiscreteMeasure;

/// Eigenvalues of the covariance at or below this are treated as null
/// directions and dropped by whitening.
const EIGEN_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransformConfig {
    pub max_rows: usize,
    pub ica_max_iter: usize,
    pub ica_tol: f64,
    pub seed: u64,
}

impl Default for TransformConfig {
    fn default() -> Self {
        Self {
            max_rows: 2000,
            ica_max_iter: 200,
            ica_tol: 1e-4,
            seed: 0,
        }
    }
}

impl TransformConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_rows < 2 {
            return Err(Error::InvalidConfig(format!(
                "max_rows must be >= 2, got {}",
                self.max_rows
            )));
        }
        if !(self.ica_tol > 0.0) {
            return Err(Error::InvalidConfig("ica_tol must be positive".into()));
        }
        Ok(())
    }

    /// Short hex digest of the canonical JSON form; stored next to every
    /// meta-entry so a store built under another transform is detectable.
    pub fn fingerprint(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        let digest = Sha256::digest(json.as_bytes());
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Column-wise z-scores with population variance. Constant columns become 0.
pub fn standardize(x: &Array2<f64>) -> Result<Array2<f64>> {
    if x.nrows() == 0 {
        return Err(Error::Empty(
            "cannot standardize a matrix with no rows".into(),
        ));
    }
    let mean = x.mean_axis(Axis(0)).expect("nonempty");
    let mut out = x - &mean;
    for mut col in out.axis_iter_mut(Axis(1)) {
        let var = col.iter().map(|v| v * v).sum::<f64>() / col.len() as f64;
        let sd = var.sqrt();
        if sd > 0.0 && sd.is_finite() {
            col.mapv_inplace(|v| v / sd);
        } else {
            col.fill(0.0);
        }
    }
    Ok(out)
}

/// Uniform sample of `max_rows` rows without replacement, original order
/// kept. Identity when the matrix is already small enough.
pub fn subsample(x: &Array2<f64>, max_rows: usize, seed: u64) -> Array2<f64> {
    if x.nrows() <= max_rows {
        return x.clone();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut idx = rand::seq::index::sample(&mut rng, x.nrows(), max_rows).into_vec();
    idx.sort_unstable();
    x.select(Axis(0), &idx)
}

/// Outcome of [`fast_ica`].
#[derive(Debug, Clone)]
pub struct IcaOutput {
    /// `n x k` sources, `k` = number of non-null covariance directions.
    pub sources: Array2<f64>,
    pub converged: bool,
    pub iterations: usize,
}

fn to_na(x: &Array2<f64>) -> DMatrix<f64> {
    DMatrix::from_fn(x.nrows(), x.ncols(), |i, j| x[[i, j]])
}

fn from_na(m: &DMatrix<f64>) -> Array2<f64> {
    Array2::from_shape_fn((m.nrows(), m.ncols()), |(i, j)| m[(i, j)])
}

/// PCA whitening: rows of the result have identity covariance over the
/// retained directions. Components are ordered by decreasing variance.
pub fn whiten(x: &Array2<f64>) -> Array2<f64> {
    let n = x.nrows() as f64;
    let centered = x - &x.mean_axis(Axis(0)).expect("nonempty");
    let xm = to_na(&centered);
    let cov = xm.transpose() * &xm / n;
    let eig = SymmetricEigen::new(cov);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len())
        .filter(|&k| eig.eigenvalues[k] > EIGEN_FLOOR)
        .collect();
    order.sort_by(|&i, &j| {
        eig.eigenvalues[j]
            .total_cmp(&eig.eigenvalues[i])
            .then(i.cmp(&j))
    });
    let proj = DMatrix::from_fn(x.ncols(), order.len(), |i, k| {
        let c = order[k];
        // fix the eigenvector sign so the output is deterministic
        let v = eig.eigenvectors.column(c);
        let pivot = v
            .iter()
            .copied()
            .fold(0.0_f64, |m, e| if e.abs() > m.abs() { e } else { m });
        v[i] * pivot.signum() / eig.eigenvalues[c].sqrt()
    });
    from_na(&(xm * proj))
}

/// `(W W^T)^{-1/2} W`
fn sym_decorrelate(w: &DMatrix<f64>) -> DMatrix<f64> {
    let eig = SymmetricEigen::new(w * w.transpose());
    let inv_sqrt = DMatrix::from_diagonal(
        &eig.eigenvalues
            .map(|l| 1.0 / l.max(f64::MIN_POSITIVE).sqrt()),
    );
    &eig.eigenvectors * inv_sqrt * eig.eigenvectors.transpose() * w
}

/// Symmetric FastICA with the logcosh contrast on whitened data. Falls back
/// to the whitened matrix when the fixed point does not settle.
pub fn fast_ica(x: &Array2<f64>, cfg: &TransformConfig) -> Result<IcaOutput> {
    cfg.validate()?;
    if x.nrows() == 0 {
        return Err(Error::Empty(
            "cannot run ICA on a matrix with no rows".into(),
        ));
    }
    let white = whiten(x);
    let k = white.ncols();
    if k <= 1 {
        return Ok(IcaOutput {
            sources: white,
            converged: true,
            iterations: 0,
        });
    }
    let n = white.nrows() as f64;
    let z = to_na(&white).transpose(); // k x n
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut w = sym_decorrelate(&DMatrix::from_fn(k, k, |_, _| {
        StandardNormal.sample(&mut rng)
    }));

    for it in 1..=cfg.ica_max_iter {
        let wx = &w * &z;
        let g = wx.map(f64::tanh);
        let g_prime_mean: Vec<f64> = (0..k)
            .map(|r| g.row(r).iter().map(|t| 1.0 - t * t).sum::<f64>() / n)
            .collect();
        let mut next = &g * z.transpose() / n;
        for r in 0..k {
            let wr = w.row(r) * g_prime_mean[r];
            let mut row = next.row_mut(r);
            row -= wr;
        }
        let next = sym_decorrelate(&next);
        let lim = (0..k)
            .map(|r| (next.row(r).dot(&w.row(r)).abs() - 1.0).abs())
            .fold(0.0_f64, f64::max);
        w = next;
        if lim < cfg.ica_tol {
            let sources = from_na(&(&w * &z).transpose());
            return Ok(IcaOutput {
                sources,
                converged: true,
                iterations: it,
            });
        }
    }
    Ok(IcaOutput {
        sources: white,
        converged: false,
        iterations: cfg.ica_max_iter,
    })
}

/// φ: the uniform point cloud LOTUS compares datasets by. Labels are never
/// read.
pub fn phi(dataset: &Dataset, cfg: &TransformConfig) -> Result<DiscreteMeasure> {
    phi_with_status(dataset, cfg).map(|(m, _)| m)
}

/// [`phi`] that also reports whether ICA converged.
pub fn phi_with_status(
    dataset: &Dataset,
    cfg: &TransformConfig,
) -> Result<(DiscreteMeasure, bool)> {
    cfg.validate()?;
    let x = dataset.features();
    if x.nrows() < 2 || x.ncols() == 0 {
        return Err(Error::Empty(format!(
            "dataset {:?} needs at least 2 rows and 1 column, has {}x{}",
            dataset.name,
            x.nrows(),
            x.ncols()
        )));
    }
    let sampled = subsample(x, cfg.max_rows, cfg.seed);
    let ica = fast_ica(&standardize(&sampled)?, cfg)?;
    Ok((DiscreteMeasure::uniform(ica.sources)?, ica.converged))
}

/// Sample covariance (population normalization), for checks and reports.
pub fn covariance(x: &Array2<f64>) -> Array2<f64> {
    let mean: Array1<f64> = x
        .mean_axis(Axis(0))
        .unwrap_or_else(|| Array1::zeros(x.ncols()));
    let c = x - &mean;
    c.t().dot(&c) / x.nrows().max(1) as f64
}
