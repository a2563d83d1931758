//! Unsupervised outlier detectors. Every detector maps an `n x d` matrix to
//! `n` finite scores, higher meaning more outlying; none of them sees labels.

mod abod;
mod config;
mod hbos;
mod iforest;
mod knn;
mod loda;

use ndarray::{Array1, Array2};

pub use abod::abod_score;
pub use config::{Detector, ParamValue, PipelineConfig};
pub use hbos::hbos_score;
pub use iforest::iforest_score;
pub use knn::{knn_score, KnnMethod};
pub use loda::loda_score;

use crate::error::{Error, Result};
use crate::transform::standardize;

/// Seed used by the randomized detectors inside [`fit_score`].
pub const DETECTOR_SEED: u64 = 0;

pub type ScoreVector = Array1<f64>;

/// Validates `cfg`, optionally standardizes `x`, and runs the detector.
pub fn fit_score(cfg: &PipelineConfig, x: &Array2<f64>) -> Result<ScoreVector> {
    cfg.validate()?;
    if x.nrows() == 0 {
        return Err(Error::Empty("no rows to score".into()));
    }
    let standardized;
    let x = if cfg.standardize_input {
        standardized = standardize(x)?;
        &standardized
    } else {
        x
    };
    let scores = match cfg.detector {
        Detector::Knn => knn_score(x, cfg.int("k")?, cfg.str("method")?.parse()?)?,
        Detector::Hbos => hbos_score(x, cfg.int("n_bins")?)?,
        Detector::Iforest => iforest_score(
            x,
            cfg.int("n_estimators")?,
            cfg.int("max_samples")?,
            DETECTOR_SEED,
        )?,
        Detector::Loda => loda_score(
            x,
            cfg.int("n_projections")?,
            cfg.int("n_bins")?,
            DETECTOR_SEED,
        )?,
        Detector::Abod => abod_score(x, cfg.int("k")?)?,
    };
    if scores.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical(format!(
            "{cfg} produced non-finite scores"
        )));
    }
    Ok(scores)
}
