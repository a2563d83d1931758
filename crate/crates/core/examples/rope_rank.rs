//! Compare methods on a score table: average ranks and the Bayesian
//! signed-rank test with a 1% region of practical equivalence.

use lotus::eval::{average_rank, rope_test, ScoreTable, DEFAULT_ROPE_SAMPLES};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> lotus::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut table = ScoreTable::new(vec!["new".into(), "old".into(), "coin".into()]);
    for i in 0..25 {
        let old: f64 = rng.random_range(0.6..0.9);
        let new = (old + rng.random_range(-0.01..0.05)).min(1.0);
        table.push_row(format!("ds{i:02}"), vec![Some(new), Some(old), Some(0.5)])?;
    }
    for (method, r) in average_rank(&table)? {
        println!("{method:<5} average rank {r:.2}");
    }
    let col = |m: &str| {
        table
            .column(m)
            .unwrap()
            .into_iter()
            .flatten()
            .collect::<Vec<_>>()
    };
    let r = rope_test(&col("new"), &col("old"), 0.01, DEFAULT_ROPE_SAMPLES, 0)?;
    println!(
        "p(new better) {:.3}  p(rope) {:.3}  p(old better) {:.3}",
        r.p_left, r.p_rope, r.p_right
    );
    Ok(())
}
