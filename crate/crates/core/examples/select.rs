//! Zero-shot selection: store one tuned pipeline per synthetic family, then
//! ask for a recommendation on a fresh, unlabeled sample.

use lotus::eval::{generate_synthetic, Family};
use lotus::meta_trainer::{search, SearchBudget};
use lotus::{lotus_select, MetaStore, SolverConfig, TransformConfig};

fn main() -> lotus::Result<()> {
    let dir = tempfile::tempdir().expect("temp dir");
    let tcfg = TransformConfig::default();
    let mut store = MetaStore::open_or_create(dir.path())?;
    for family in Family::ALL {
        let ds = generate_synthetic(family, 200, 2, 0.05, 100)?;
        let res = search(
            ds.features(),
            ds.labels().unwrap(),
            &SearchBudget::evaluations(12, 0),
        )?;
        store.add_entry(&ds, &res.best, res.best_auc, family.name(), &tcfg)?;
    }

    let query = generate_synthetic(Family::Ring, 200, 2, 0.05, 1)?.without_labels();
    let report = lotus_select(&query, &store, &tcfg, &SolverConfig::default(), &[])?;
    for (id, d) in &report.distances {
        let mark = if *id == report.chosen_id {
            "  <- chosen"
        } else {
            ""
        };
        println!("{id:<18} {d:>10.4}{mark}");
    }
    println!("recommended pipeline: {}", report.pipeline);
    Ok(())
}
