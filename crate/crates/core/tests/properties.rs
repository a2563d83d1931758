use lotus::eval::{average_rank, roc_auc, rope_test, ScoreTable};
use proptest::prelude::*;

fn labels_with_both(n: usize) -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(0u8..=1, n).prop_map(|mut y| {
        y[0] = 0;
        y[1] = 1;
        y
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn auc_of_negated_scores_is_complement(y in labels_with_both(30), perm in Just((0..30).collect::<Vec<usize>>()).prop_shuffle()) {
        // distinct scores: a permutation of 0..30
        let s: Vec<f64> = perm.iter().map(|&v| v as f64).collect();
        let neg: Vec<f64> = s.iter().map(|v| -v).collect();
        let total = roc_auc(&s, &y).unwrap() + roc_auc(&neg, &y).unwrap();
        prop_assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn auc_in_unit_interval(y in labels_with_both(25), s in prop::collection::vec(-3i32..3, 25)) {
        let s: Vec<f64> = s.into_iter().map(f64::from).collect();
        let v = roc_auc(&s, &y).unwrap();
        prop_assert!((0.0..=1.0).contains(&v));
    }

    #[test]
    fn rope_probabilities_sum_to_one_and_mirror(a in prop::collection::vec(0.0f64..1.0, 2..12), shift in -0.2f64..0.2, seed in 0u64..100) {
        let b: Vec<f64> = a.iter().enumerate().map(|(i, v)| v + shift * ((i % 3) as f64 - 0.5)).collect();
        let r = rope_test(&a, &b, 0.01, 500, seed).unwrap();
        let s = rope_test(&b, &a, 0.01, 500, seed).unwrap();
        prop_assert!((r.p_left + r.p_rope + r.p_right - 1.0).abs() < 1e-9);
        prop_assert_eq!(r.p_left, s.p_right);
        prop_assert_eq!(r.p_right, s.p_left);
    }

    #[test]
    fn average_ranks_bounded(rows in prop::collection::vec(prop::collection::vec(0u8..5, 4), 1..10)) {
        let mut t = ScoreTable::new(vec!["a".into(), "b".into(), "c".into(), "d".into()]);
        for (i, r) in rows.iter().enumerate() {
            t.push_row(format!("d{i}"), r.iter().map(|&v| Some(f64::from(v) / 4.0)).collect()).unwrap();
        }
        let ranks = average_rank(&t).unwrap();
        let sum: f64 = ranks.values().sum();
        // ranks 1..=4 always sum to 10 per row, midranks included
        prop_assert!((sum - 10.0).abs() < 1e-9);
        for v in ranks.values() {
            prop_assert!((1.0..=4.0).contains(v));
        }
    }
}
