use rayon::prelude::*;
use serde::Serialize;

use super::auc::roc_auc;
use super::table::ScoreTable;
use crate::detectors::{fit_score, PipelineConfig};
use crate::error::{Error, Result};
use crate::meta_store::MetaStore;
use crate::ot::SolverConfig;
use crate::selector::{lotus_select, SelectionReport};
use crate::transform::TransformConfig;

/// Column name of the recommended pipeline in leave-one-out tables.
pub const LOTUS_COLUMN: &str = "LOTUS";

#[derive(Debug, Clone, Serialize)]
pub struct LooReport {
    pub table: ScoreTable,
    /// Selection per dataset, in store order; `None` when selection failed.
    pub selections: Vec<Option<SelectionReport>>,
    /// Per-cell failure messages as `(dataset, method, message)`.
    pub failures: Vec<(String, String, String)>,
}

/// Column name for a baseline: the detector name, or the full config when
/// two baselines share a detector.
fn baseline_names(baselines: &[PipelineConfig]) -> Vec<String> {
    baselines
        .iter()
        .map(|b| {
            if baselines
                .iter()
                .filter(|o| o.detector == b.detector)
                .count()
                > 1
            {
                b.to_string()
            } else {
                b.detector.to_string()
            }
        })
        .collect()
}

fn auc_of(cfg: &PipelineConfig, x: &ndarray::Array2<f64>, y: &[u8]) -> Result<f64> {
    let s = fit_score(cfg, x)?;
    roc_auc(s.as_slice().expect("contiguous scores"), y)
}

/// Leave-one-out protocol: every stored dataset in turn plays the new
/// dataset, with itself excluded from the store. The recommended pipeline
/// and every baseline are fit without labels and scored by AUC. Failed cells
/// are left missing and listed in `failures`.
pub fn loo_evaluate(
    store: &MetaStore,
    tcfg: &TransformConfig,
    scfg: &SolverConfig,
    baselines: &[PipelineConfig],
) -> Result<LooReport> {
    if store.len() < 2 {
        return Err(Error::InvalidConfig(format!(
            "leave-one-out needs at least 2 store entries, got {}",
            store.len()
        )));
    }
    for (entry, ds) in store.iter() {
        if ds.labels().is_none() {
            return Err(Error::MissingLabels(entry.id.clone()));
        }
    }
    let names = baseline_names(baselines);
    let mut methods = vec![LOTUS_COLUMN.to_string()];
    methods.extend(names.iter().cloned());

    type Row = (
        String,
        Vec<Option<f64>>,
        Option<SelectionReport>,
        Vec<(String, String, String)>,
    );
    let rows: Vec<Row> = store
        .iter()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(entry, ds)| {
            let y = ds.labels().expect("checked above");
            let x = ds.features();
            let mut failures = Vec::new();
            let mut cells = Vec::with_capacity(methods.len());
            let selection =
                match lotus_select(ds, store, tcfg, scfg, std::slice::from_ref(&entry.id)) {
                    Ok(rep) => {
                        match auc_of(&rep.pipeline, x, y) {
                            Ok(v) => cells.push(Some(v)),
                            Err(e) => {
                                failures.push((
                                    entry.id.clone(),
                                    LOTUS_COLUMN.to_string(),
                                    e.to_string(),
                                ));
                                cells.push(None);
                            }
                        }
                        Some(rep)
                    }
                    Err(e) => {
                        failures.push((entry.id.clone(), LOTUS_COLUMN.to_string(), e.to_string()));
                        cells.push(None);
                        None
                    }
                };
            for (cfg, name) in baselines.iter().zip(&names) {
                match auc_of(cfg, x, y) {
                    Ok(v) => cells.push(Some(v)),
                    Err(e) => {
                        failures.push((entry.id.clone(), name.clone(), e.to_string()));
                        cells.push(None);
                    }
                }
            }
            (entry.id.clone(), cells, selection, failures)
        })
        .collect();

    let mut table = ScoreTable::new(methods);
    let mut selections = Vec::with_capacity(rows.len());
    let mut failures = Vec::new();
    for (id, cells, sel, fails) in rows {
        table.push_row(id, cells)?;
        selections.push(sel);
        failures.extend(fails);
    }
    Ok(LooReport {
        table,
        selections,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Dataset;
    use crate::detectors::Detector;
    use crate::eval::{generate_synthetic, Family};

    #[test]
    fn two_entry_protocol() {
        let dir = tempfile::tempdir().unwrap();
        let mut store = MetaStore::open_or_create(dir.path()).unwrap();
        let tcfg = TransformConfig::default();
        for (id, fam) in [("a", Family::GaussBlob), ("b", Family::Ring)] {
            let ds = generate_synthetic(fam, 100, 3, 0.1, 0).unwrap();
            store
                .add_entry(
                    &ds,
                    &PipelineConfig::default_for(Detector::Knn),
                    0.9,
                    id,
                    &tcfg,
                )
                .unwrap();
        }
        let rep = loo_evaluate(
            &store,
            &tcfg,
            &SolverConfig::default(),
            &PipelineConfig::defaults(),
        )
        .unwrap();
        assert_eq!(rep.table.rows.len(), 2);
        assert_eq!(rep.table.methods[0], LOTUS_COLUMN);
        assert_eq!(rep.table.methods.len(), 6);
        for (row, sel) in rep.table.rows.iter().zip(&rep.selections) {
            let sel = sel.as_ref().unwrap();
            assert_eq!(sel.excluded, vec![row.dataset.clone()]);
            assert!(!sel.distances.contains_key(&row.dataset));
            assert_ne!(sel.chosen_id, row.dataset);
        }
    }

    #[test]
    fn requires_labels() {
        let dir = tempfile::tempdir().unwrap();
        let mut store = MetaStore::open_or_create(dir.path()).unwrap();
        let tcfg = TransformConfig::default();
        let ds = generate_synthetic(Family::GaussBlob, 50, 2, 0.1, 0).unwrap();
        let cfg = PipelineConfig::default_for(Detector::Hbos);
        store.add_entry(&ds, &cfg, 0.9, "a", &tcfg).unwrap();
        let unlabeled = Dataset::new("u", ds.features().clone(), None).unwrap();
        store.add_entry(&unlabeled, &cfg, 0.9, "u", &tcfg).unwrap();
        let err = loo_evaluate(&store, &tcfg, &SolverConfig::default(), &[cfg]).unwrap_err();
        assert!(matches!(err, Error::MissingLabels(id) if id == "u"));
    }
}
