//! Tune a detector pipeline on a labeled dataset with a fixed budget.

use lotus::eval::{generate_synthetic, Family};
use lotus::meta_trainer::{search, SearchBudget};

fn main() -> lotus::Result<()> {
    let ds = generate_synthetic(Family::Ring, 400, 3, 0.05, 3)?;
    let budget = SearchBudget::evaluations(60, 0);
    let res = search(ds.features(), ds.labels().unwrap(), &budget)?;
    let mut top = res.history.clone();
    top.sort_by(|a, b| b.auc.total_cmp(&a.auc));
    for ev in top.iter().take(5) {
        println!("{:.4}  {}", ev.auc, ev.config);
    }
    println!(
        "best: {} (AUC {:.4}) after {} evaluations",
        res.best,
        res.best_auc,
        res.history.len()
    );
    Ok(())
}
