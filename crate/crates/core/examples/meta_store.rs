//! Build a small store on disk, reload it and read back a pipeline.
//!
//!     cargo run --example meta_store -- /tmp/lotus-store

use lotus::eval::{generate_synthetic, Family};
use lotus::meta_trainer::{search, SearchBudget};
use lotus::{MetaStore, TransformConfig};

fn main() -> lotus::Result<()> {
    let tmp;
    let dir = match std::env::args().nth(1) {
        Some(p) => std::path::PathBuf::from(p),
        None => {
            tmp = tempfile::tempdir().expect("temp dir");
            tmp.path().to_path_buf()
        }
    };
    let tcfg = TransformConfig::default();
    let mut store = MetaStore::open_or_create(&dir)?;
    for family in [Family::GaussBlob, Family::Ring] {
        let ds = generate_synthetic(family, 300, 3, 0.05, 0)?;
        if store.ids().any(|id| id == family.name()) {
            continue;
        }
        let res = search(
            ds.features(),
            ds.labels().unwrap(),
            &SearchBudget::evaluations(20, 0),
        )?;
        let entry = store.add_entry(&ds, &res.best, res.best_auc, family.name(), &tcfg)?;
        println!(
            "added {} -> {} (AUC {:.3})",
            entry.id, res.best, entry.meta_auc
        );
    }

    let reloaded = MetaStore::load(&dir)?;
    for entry in reloaded.entries() {
        println!(
            "{:<12} {}  {}  {}",
            entry.id,
            entry.dataset_path,
            entry.created_at,
            reloaded.get_pipeline(&entry.id)?
        );
    }
    println!("index: {}", dir.join("index.json").display());
    Ok(())
}
