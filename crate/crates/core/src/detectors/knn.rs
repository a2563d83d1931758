use std::str::FromStr;

use ndarray::{Array1, Array2, ArrayView1};
use rayon::prelude::*;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KnnMethod {
    Largest,
    Mean,
    Median,
}

impl FromStr for KnnMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "largest" => Ok(KnnMethod::Largest),
            "mean" => Ok(KnnMethod::Mean),
            "median" => Ok(KnnMethod::Median),
            other => Err(Error::InvalidConfig(format!(
                "unknown knn method `{other}`"
            ))),
        }
    }
}

fn sq_dist(a: ArrayView1<f64>, b: ArrayView1<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(u, v)| (u - v) * (u - v)).sum()
}

/// Indices and Euclidean distances of the `k` nearest other points of every
/// row, nearest first; equal distances are ordered by index.
pub(crate) fn neighbors(x: &Array2<f64>, k: usize) -> Result<Vec<Vec<(usize, f64)>>> {
    let n = x.nrows();
    if k == 0 || k >= n {
        return Err(Error::InvalidConfig(format!(
            "k must satisfy 1 <= k < n, got k={k}, n={n}"
        )));
    }
    Ok((0..n)
        .into_par_iter()
        .map(|i| {
            let xi = x.row(i);
            let mut d: Vec<(usize, f64)> = (0..n)
                .filter(|&j| j != i)
                .map(|j| (j, sq_dist(xi, x.row(j))))
                .collect();
            let by_dist =
                |a: &(usize, f64), b: &(usize, f64)| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0));
            d.select_nth_unstable_by(k - 1, by_dist);
            d.truncate(k);
            d.sort_unstable_by(by_dist);
            d.into_iter().map(|(j, s)| (j, s.sqrt())).collect()
        })
        .collect())
}

/// Distance-to-neighbors score: the k-th distance, or the mean or median of
/// the k nearest.
pub fn knn_score(x: &Array2<f64>, k: usize, method: KnnMethod) -> Result<Array1<f64>> {
    let nb = neighbors(x, k)?;
    Ok(nb
        .iter()
        .map(|list| {
            let d: Vec<f64> = list.iter().map(|&(_, v)| v).collect();
            match method {
                KnnMethod::Largest => d[k - 1],
                KnnMethod::Mean => d.iter().sum::<f64>() / k as f64,
                KnnMethod::Median if k % 2 == 1 => d[k / 2],
                KnnMethod::Median => 0.5 * (d[k / 2 - 1] + d[k / 2]),
            }
        })
        .collect())
}
