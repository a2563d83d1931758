use crate::error::{Error, Result};

/// Midranks (1-based) of `values`; tied values share the mean of their ranks.
pub(crate) fn midranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // positions start..end hold ranks start+1..=end
        let rank = (start + 1 + end) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = rank;
        }
        start = end;
    }
    ranks
}

/// Area under the ROC curve via the Mann-Whitney U statistic: the chance a
/// random outlier (label 1) outscores a random inlier, ties counting half.
pub fn roc_auc(scores: &[f64], labels: &[u8]) -> Result<f64> {
    if scores.len() != labels.len() {
        return Err(Error::LengthMismatch(scores.len(), labels.len()));
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::Numerical("NaN score".into()));
    }
    let n_pos = labels.iter().filter(|&&y| y == 1).count();
    let n_neg = labels.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::SingleClass);
    }
    let ranks = midranks(scores);
    let rank_sum: f64 = ranks
        .iter()
        .zip(labels)
        .filter(|(_, &y)| y == 1)
        .map(|(r, _)| r)
        .sum();
    let u = rank_sum - (n_pos * (n_pos + 1)) as f64 / 2.0;
    Ok(u / (n_pos as f64 * n_neg as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pair_count(scores: &[f64], labels: &[u8]) -> f64 {
        let mut wins = 0.0;
        let mut pairs = 0.0;
        for (i, &yi) in labels.iter().enumerate() {
            for (j, &yj) in labels.iter().enumerate() {
                if yi == 1 && yj == 0 {
                    pairs += 1.0;
                    if scores[i] > scores[j] {
                        wins += 1.0;
                    } else if scores[i] == scores[j] {
                        wins += 0.5;
                    }
                }
            }
        }
        wins / pairs
    }

    #[test]
    fn perfect_and_tied() {
        assert_eq!(roc_auc(&[0.9, 0.8, 0.1, 0.2], &[1, 1, 0, 0]).unwrap(), 1.0);
        assert_eq!(roc_auc(&[3.0; 6], &[1, 0, 1, 0, 0, 0]).unwrap(), 0.5);
    }

    #[test]
    fn matches_pair_counting_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            // coarse grid so that ties actually happen
            let scores: Vec<f64> = (0..50)
                .map(|_| rng.random_range(0..12) as f64 / 4.0)
                .collect();
            let mut labels: Vec<u8> = (0..50).map(|_| rng.random_range(0..2)).collect();
            labels[0] = 0;
            labels[1] = 1;
            assert_eq!(
                roc_auc(&scores, &labels).unwrap(),
                pair_count(&scores, &labels)
            );
        }
    }

    #[test]
    fn negation_complements() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let s: Vec<f64> = (0..40).map(|_| rng.random_range(0.0..1.0)).collect();
        let y: Vec<u8> = (0..40).map(|i| u8::from(i % 3 == 0)).collect();
        let neg: Vec<f64> = s.iter().map(|v| -v).collect();
        let total = roc_auc(&s, &y).unwrap() + roc_auc(&neg, &y).unwrap();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            roc_auc(&[1.0, 2.0], &[1, 1]),
            Err(Error::SingleClass)
        ));
        assert!(roc_auc(&[1.0], &[1, 0]).is_err());
    }

    #[test]
    fn midrank_values() {
        assert_eq!(midranks(&[10.0, 20.0, 10.0, 5.0]), vec![2.5, 4.0, 2.5, 1.0]);
    }
}
