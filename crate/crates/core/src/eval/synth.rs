use std::fmt;
use std::str::FromStr;

use ndarray::{Array1, Array2, Axis};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};

/// Outliers are drawn from a box this many times wider than the inliers'
/// per-feature range, sharing its centre.
const OUTLIER_BOX: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    GaussBlob,
    TwoClusters,
    CorrelatedGauss,
    Ring,
    SubspaceOutliers,
    ScaledBlob,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::GaussBlob,
        Family::TwoClusters,
        Family::CorrelatedGauss,
        Family::Ring,
        Family::SubspaceOutliers,
        Family::ScaledBlob,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::GaussBlob => "gauss_blob",
            Family::TwoClusters => "two_clusters",
            Family::CorrelatedGauss => "correlated_gauss",
            Family::Ring => "ring",
            Family::SubspaceOutliers => "subspace_outliers",
            Family::ScaledBlob => "scaled_blob",
        }
    }

    fn inliers(self, n: usize, d: usize, rng: &mut ChaCha8Rng) -> Array2<f64> {
        let mut normal = || -> f64 { StandardNormal.sample(&mut *rng) };
        match self {
            Family::GaussBlob => Array2::from_shape_simple_fn((n, d), normal),
            Family::TwoClusters => {
                let mut x = Array2::from_shape_simple_fn((n, d), &mut normal);
                for (i, mut row) in x.outer_iter_mut().enumerate() {
                    row[0] += if i % 2 == 0 { 4.0 } else { -4.0 };
                }
                x
            }
            Family::CorrelatedGauss => {
                // equicorrelation 0.8
                let mut x = Array2::zeros((n, d));
                for mut row in x.outer_iter_mut() {
                    let common = normal();
                    row.mapv_inplace(|_| 0.8f64.sqrt() * common + 0.2f64.sqrt() * normal());
                }
                x
            }
            Family::Ring => {
                let mut x = Array2::from_shape_simple_fn((n, d), || 0.3 * normal());
                for mut row in x.outer_iter_mut() {
                    let t = rng.random_range(0.0..std::f64::consts::TAU);
                    row[0] += 5.0 * t.cos();
                    if d > 1 {
                        row[1] += 5.0 * t.sin();
                    }
                }
                x
            }
            Family::SubspaceOutliers => {
                // inliers near a random subspace of half the dimension
                let k = d.div_ceil(2);
                let basis = Array2::from_shape_simple_fn((k, d), &mut normal);
                let z = Array2::from_shape_simple_fn((n, k), &mut normal);
                z.dot(&basis) + Array2::from_shape_simple_fn((n, d), || 0.05 * normal())
            }
            Family::ScaledBlob => {
                // Gaussian scale mixture: one log-normal scale per point
                let scale = LogNormal::new(0.0, 0.75).expect("valid log-normal");
                let mut x = Array2::from_shape_simple_fn((n, d), &mut normal);
                for mut row in x.outer_iter_mut() {
                    let s = scale.sample(rng);
                    row.mapv_inplace(|v| v * s);
                }
                x
            }
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown family `{s}`")))
    }
}

/// `n` labeled rows: `round(contamination * n)` outliers from a uniform box
/// around the inliers, the rest from the family's generative process. Rows
/// are shuffled; the result is a pure function of the arguments.
pub fn generate_synthetic(
    family: Family,
    n: usize,
    d: usize,
    contamination: f64,
    seed: u64,
) -> Result<Dataset> {
    if !(contamination > 0.0 && contamination < 0.5) {
        return Err(Error::InvalidConfig(format!(
            "contamination must be in (0, 0.5), got {contamination}"
        )));
    }
    if d == 0 {
        return Err(Error::InvalidConfig("d must be >= 1".into()));
    }
    let n_out = (contamination * n as f64).round() as usize;
    let n_in = n.saturating_sub(n_out);
    if n_out == 0 || n_in < 2 {
        return Err(Error::InvalidConfig(format!(
            "n={n} with contamination {contamination} leaves {n_in} inliers and {n_out} outliers"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inliers = family.inliers(n_in, d, &mut rng);

    let lo = inliers.fold_axis(Axis(0), f64::INFINITY, |&m, &v| m.min(v));
    let hi = inliers.fold_axis(Axis(0), f64::NEG_INFINITY, |&m, &v| m.max(v));
    let centre: Array1<f64> = (&lo + &hi) / 2.0;
    let half: Array1<f64> = (&hi - &lo) * (OUTLIER_BOX / 2.0);
    let outliers = Array2::from_shape_fn((n_out, d), |(_, j)| {
        let h = half[j].max(f64::MIN_POSITIVE);
        centre[j] + rng.random_range(-h..h)
    });

    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut x = Array2::zeros((n, d));
    let mut labels = vec![0u8; n];
    for (dst, &src) in order.iter().enumerate() {
        if src < n_in {
            x.row_mut(dst).assign(&inliers.row(src));
        } else {
            x.row_mut(dst).assign(&outliers.row(src - n_in));
            labels[dst] = 1;
        }
    }
    Dataset::new(format!("{family}_s{seed}"), x, Some(labels))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_and_determinism() {
        for family in Family::ALL {
            let ds = generate_synthetic(family, 500, 4, 0.05, 3).unwrap();
            assert_eq!(ds.n_rows(), 500);
            assert_eq!(ds.labels().unwrap().iter().filter(|&&y| y == 1).count(), 25);
            assert_eq!(ds, generate_synthetic(family, 500, 4, 0.05, 3).unwrap());
            assert_ne!(ds, generate_synthetic(family, 500, 4, 0.05, 4).unwrap());
        }
    }

    #[test]
    fn names_round_trip() {
        for family in Family::ALL {
            assert_eq!(family.name().parse::<Family>().unwrap(), family);
        }
        assert!("moons".parse::<Family>().is_err());
    }

    #[test]
    fn invalid_contamination() {
        assert!(generate_synthetic(Family::Ring, 100, 2, 0.0, 0).is_err());
        assert!(generate_synthetic(Family::Ring, 100, 2, 0.5, 0).is_err());
        assert!(generate_synthetic(Family::Ring, 10, 2, 0.01, 0).is_err());
    }

    #[test]
    fn one_dimensional_families_work() {
        for family in Family::ALL {
            generate_synthetic(family, 50, 1, 0.1, 0).unwrap();
        }
    }
}
