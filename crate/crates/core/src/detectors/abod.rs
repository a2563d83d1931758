use ndarray::{Array1, Array2};
use rayon::prelude::*;

use super::knn::neighbors;
use crate::error::{Error, Result};

/// Fast angle-based outlier score over the `k` nearest neighbors: the
/// negated variance of `<u, v> / (|u|^2 |v|^2)` across neighbor pairs.
/// Pairs involving a zero difference vector are skipped.
pub fn abod_score(x: &Array2<f64>, k: usize) -> Result<Array1<f64>> {
    if k < 2 {
        return Err(Error::InvalidConfig(format!("abod needs k >= 2, got {k}")));
    }
    let nb = neighbors(x, k)?;
    let d = x.ncols();
    let scores: Vec<f64> = nb
        .par_iter()
        .enumerate()
        .map(|(i, list)| {
            let p = x.row(i);
            let diffs: Vec<(Vec<f64>, f64)> = list
                .iter()
                .map(|&(j, _)| {
                    let u: Vec<f64> = (0..d).map(|c| x[[j, c]] - p[c]).collect();
                    let norm2 = u.iter().map(|v| v * v).sum();
                    (u, norm2)
                })
                .collect();
            let mut terms = Vec::with_capacity(k * (k - 1) / 2);
            for a in 0..diffs.len() {
                for b in a + 1..diffs.len() {
                    let (u, nu) = &diffs[a];
                    let (v, nv) = &diffs[b];
                    if *nu == 0.0 || *nv == 0.0 {
                        continue;
                    }
                    let dot: f64 = u.iter().zip(v).map(|(s, t)| s * t).sum();
                    terms.push(dot / (nu * nv));
                }
            }
            if terms.is_empty() {
                return 0.0;
            }
            let m = terms.len() as f64;
            let mean = terms.iter().sum::<f64>() / m;
            -(terms.iter().map(|t| (t - mean) * (t - mean)).sum::<f64>() / m)
        })
        .collect();
    Ok(Array1::from(scores))
}
