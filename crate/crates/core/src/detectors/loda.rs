use ndarray::{Array1, Array2};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::hbos::neg_log_density;
use crate::error::{Error, Result};

/// Lightweight on-line detector of anomalies: mean `-ln(density)` over
/// histograms of random sparse projections.
pub fn loda_score(
    x: &Array2<f64>,
    n_projections: usize,
    n_bins: usize,
    seed: u64,
) -> Result<Array1<f64>> {
    if n_projections == 0 {
        return Err(Error::InvalidConfig("n_projections must be >= 1".into()));
    }
    if n_bins < 2 {
        return Err(Error::InvalidConfig(format!(
            "n_bins must be >= 2, got {n_bins}"
        )));
    }
    let (n, d) = x.dim();
    let mut score = Array1::zeros(n);
    if d == 0 {
        return Ok(score);
    }
    let nonzero = ((d as f64).sqrt().round() as usize).clamp(1, d);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..n_projections {
        let idx = rand::seq::index::sample(&mut rng, d, nonzero);
        let mut w = Array1::<f64>::zeros(d);
        for j in idx.iter() {
            w[j] = StandardNormal.sample(&mut rng);
        }
        let proj = x.dot(&w).to_vec();
        for (s, v) in score.iter_mut().zip(neg_log_density(&proj, n_bins)) {
            *s += v;
        }
    }
    Ok(score / n_projections as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn identical_points_tie() {
        let x = Array2::from_elem((6, 3), 1.5);
        let s = loda_score(&x, 10, 5, 0).unwrap();
        assert!(s.iter().all(|&v| v == s[0]));
    }

    #[test]
    fn far_point_scores_highest() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut x = Array2::from_shape_fn((200, 3), |_| rng.random_range(-1.0..1.0));
        x.row_mut(199).fill(25.0);
        let s = loda_score(&x, 50, 10, 0).unwrap();
        assert!((0..199).all(|i| s[i] < s[199]));
    }

    #[test]
    fn deterministic_per_seed() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let x = Array2::from_shape_fn((50, 4), |_| rng.random_range(-1.0..1.0));
        assert_eq!(
            loda_score(&x, 20, 10, 7).unwrap(),
            loda_score(&x, 20, 10, 7).unwrap()
        );
    }
}
