//! Leave-one-out evaluation of the selector against default detectors,
//! followed by average ranks and a ROPE comparison.
//!
//!     cargo run --release --example loo_evaluate -- scores.csv

use lotus::eval::{
    average_rank, generate_synthetic, loo_evaluate, rope_test, Family, DEFAULT_ROPE_SAMPLES,
    LOTUS_COLUMN,
};
use lotus::meta_trainer::{search, SearchBudget};
use lotus::{MetaStore, PipelineConfig, SolverConfig, TransformConfig};

fn main() -> lotus::Result<()> {
    let dir = tempfile::tempdir().expect("temp dir");
    let tcfg = TransformConfig::default();
    let mut store = MetaStore::open_or_create(dir.path())?;
    for family in Family::ALL {
        for seed in [0, 1] {
            let ds = generate_synthetic(family, 200, 4, 0.05, seed)?;
            let res = search(
                ds.features(),
                ds.labels().unwrap(),
                &SearchBudget::evaluations(12, seed),
            )?;
            store.add_entry(&ds, &res.best, res.best_auc, &ds.name, &tcfg)?;
        }
    }

    let report = loo_evaluate(
        &store,
        &tcfg,
        &SolverConfig::default(),
        &PipelineConfig::defaults(),
    )?;
    if let Some(path) = std::env::args().nth(1) {
        report.table.write_csv(std::path::Path::new(&path))?;
    }
    for (row, sel) in report.table.rows.iter().zip(&report.selections) {
        let chosen = sel.as_ref().map_or("-", |s| s.chosen_id.as_str());
        let cells: Vec<String> = row
            .cells
            .iter()
            .map(|c| c.map_or("NA".into(), |v| format!("{v:.3}")))
            .collect();
        println!("{:<22} <- {:<22} {}", row.dataset, chosen, cells.join(" "));
    }
    let methods: Vec<&str> = report.table.methods.iter().map(String::as_str).collect();
    let (complete, dropped) = report.table.complete_rows(&methods)?;
    println!("dropped rows: {dropped:?}");
    println!("average ranks: {:?}", average_rank(&complete)?);
    let lotus: Vec<f64> = complete
        .column(LOTUS_COLUMN)?
        .into_iter()
        .flatten()
        .collect();
    let knn: Vec<f64> = complete.column("knn")?.into_iter().flatten().collect();
    println!(
        "LOTUS vs knn: {:?}",
        rope_test(&lotus, &knn, 0.01, DEFAULT_ROPE_SAMPLES, 0)?
    );
    Ok(())
}
