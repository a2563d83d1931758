use ndarray::{Array1, Array2};

use crate::error::{Error, Result};

/// Bin densities are floored here before taking logs.
pub(crate) const DENSITY_FLOOR: f64 = 1e-12;

/// `-ln(density)` of each value's bin in an equal-width histogram over
/// `[min, max]`. A constant input contributes zero.
pub(crate) fn neg_log_density(values: &[f64], n_bins: usize) -> Vec<f64> {
    let n = values.len();
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    if n == 0 || !(hi > lo) {
        return vec![0.0; n];
    }
    let width = (hi - lo) / n_bins as f64;
    let bin = |v: f64| (((v - lo) / width) as usize).min(n_bins - 1);
    let mut counts = vec![0usize; n_bins];
    for &v in values {
        counts[bin(v)] += 1;
    }
    values
        .iter()
        .map(|&v| {
            let density = counts[bin(v)] as f64 / (n as f64 * width);
            -density.max(DENSITY_FLOOR).ln()
        })
        .collect()
}

/// Histogram-based outlier score: sum over features of `-ln(density)`.
pub fn hbos_score(x: &Array2<f64>, n_bins: usize) -> Result<Array1<f64>> {
    if n_bins < 2 {
        return Err(Error::InvalidConfig(format!(
            "n_bins must be >= 2, got {n_bins}"
        )));
    }
    let mut score = Array1::zeros(x.nrows());
    for col in x.columns() {
        let values = col.to_vec();
        for (s, v) in score.iter_mut().zip(neg_log_density(&values, n_bins)) {
            *s += v;
        }
    }
    Ok(score)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn uniform_fill_gives_equal_scores() {
        // bin centres of 4 bins over [0, 4], two points each
        let x =
            Array2::from_shape_vec((8, 1), vec![0.0, 0.5, 1.5, 1.6, 2.5, 2.6, 3.5, 4.0]).unwrap();
        let s = hbos_score(&x, 4).unwrap();
        assert!(s.iter().all(|&v| (v - s[0]).abs() < 1e-12));
    }

    #[test]
    fn isolated_point_scores_highest() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut x = Array2::from_shape_fn((1001, 2), |_| rng.random_range(0.0..1.0));
        x[[1000, 0]] = 10.0;
        x[[1000, 1]] = 10.0;
        let s = hbos_score(&x, 10).unwrap();
        assert!((0..1000).all(|i| s[i] < s[1000]));
    }

    #[test]
    fn constant_feature_contributes_zero() {
        let x = Array2::from_elem((5, 1), 3.0);
        assert!(hbos_score(&x, 5).unwrap().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn matches_recount_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let x = Array2::from_shape_fn((100, 2), |_| rng.random_range(-2.0..3.0));
        let s = hbos_score(&x, 5).unwrap();
        for i in 0..100 {
            let mut expect = 0.0;
            for c in 0..2 {
                let col: Vec<f64> = x.column(c).to_vec();
                let lo = col.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = col.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let w = (hi - lo) / 5.0;
                let b = |v: f64| (((v - lo) / w).floor() as usize).min(4);
                let count = col.iter().filter(|&&v| b(v) == b(col[i])).count();
                expect -= (count as f64 / (100.0 * w)).ln();
            }
            assert!((s[i] - expect).abs() < 1e-9);
        }
    }
}
