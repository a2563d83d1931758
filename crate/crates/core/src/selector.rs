//! Zero-shot recommendation: the pipeline tuned on the stored dataset
//! nearest to the new one under the low-rank Gromov-Wasserstein cost.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::detectors::PipelineConfig;
use crate::error::{Error, Result};
use crate::meta_store::MetaStore;
use crate::ot::{gw_lowrank, DiscreteMeasure, SolverConfig};
use crate::transform::{phi, TransformConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionConfigs {
    pub transform: TransformConfig,
    pub solver: SolverConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionReport {
    pub chosen_id: String,
    pub pipeline: PipelineConfig,
    /// Debiased distance to every entry that was compared and succeeded.
    pub distances: BTreeMap<String, f64>,
    /// Raw low-rank cost between the query and each entry.
    pub cross_costs: BTreeMap<String, f64>,
    /// Low-rank cost of each entry against itself.
    pub self_costs: BTreeMap<String, f64>,
    /// Low-rank cost of the query against itself.
    pub query_self_cost: f64,
    /// Entries whose distance could not be computed (treated as infinitely
    /// far), with the error message.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub failed: BTreeMap<String, String>,
    pub excluded: Vec<String>,
    pub configs: SelectionConfigs,
}

fn transformed_cost(a: &DiscreteMeasure, b: &DiscreteMeasure, scfg: &SolverConfig) -> Result<f64> {
    let r = gw_lowrank(a, b, scfg)?;
    if r.cost.is_finite() {
        Ok(r.cost.max(0.0))
    } else {
        Err(Error::Numerical(format!("non-finite cost {}", r.cost)))
    }
}

/// Picks the store entry nearest to `d_new`. Labels of `d_new` are never
/// read. Ties go to the lexicographically smallest id. Excluded ids that
/// are not in the store are ignored.
///
/// The low-rank cost of a cloud against itself is not zero (a rank-r plan
/// cannot match points one to one), and it differs between datasets, so the
/// raw cost favours entries that are easy to compress. The reported distance
/// removes that bias:
/// `d(q, i) = max(0, C(q, i) - C(q, q) / 2 - C(i, i) / 2)`, which is zero for
/// an exact copy. Entry self-costs are memoized on the store.
pub fn lotus_select(
    d_new: &Dataset,
    store: &MetaStore,
    tcfg: &TransformConfig,
    scfg: &SolverConfig,
    exclude: &[String],
) -> Result<SelectionReport> {
    tcfg.validate()?;
    scfg.validate()?;
    let candidates: Vec<_> = store
        .iter()
        .filter(|(e, _)| !exclude.contains(&e.id))
        .collect();
    if candidates.is_empty() {
        return Err(Error::EmptyStore);
    }
    let query = phi(&d_new.without_labels(), tcfg)?;
    let query_self_cost = transformed_cost(&query, &query, scfg)?;
    let settings = serde_json::to_string(&(tcfg, scfg))?;

    let results: Vec<(String, Result<(f64, f64)>)> = candidates
        .par_iter()
        .map(|(entry, ds)| {
            let pair = phi(ds, tcfg).and_then(|m| {
                let own =
                    store.memoized(&entry.id, &settings, || transformed_cost(&m, &m, scfg))?;
                Ok((transformed_cost(&query, &m, scfg)?, own))
            });
            (entry.id.clone(), pair)
        })
        .collect();

    let mut distances = BTreeMap::new();
    let mut cross_costs = BTreeMap::new();
    let mut self_costs = BTreeMap::new();
    let mut failed = BTreeMap::new();
    for (id, r) in results {
        match r {
            Ok((cross, own)) => {
                distances.insert(
                    id.clone(),
                    (cross - 0.5 * query_self_cost - 0.5 * own).max(0.0),
                );
                cross_costs.insert(id.clone(), cross);
                self_costs.insert(id, own);
            }
            Err(e) => {
                failed.insert(id, e.to_string());
            }
        }
    }
    // BTreeMap iterates in id order, so the first strict minimum wins ties
    let mut best: Option<(&String, f64)> = None;
    for (id, &d) in &distances {
        if best.is_none_or(|(_, b)| d < b) {
            best = Some((id, d));
        }
    }
    let chosen_id = best.ok_or(Error::AllDistancesFailed)?.0.clone();
    let pipeline = store.get_pipeline(&chosen_id)?.clone();
    let mut excluded: Vec<String> = exclude.to_vec();
    excluded.sort();
    excluded.dedup();
    Ok(SelectionReport {
        chosen_id,
        pipeline,
        distances,
        cross_costs,
        self_costs,
        query_self_cost,
        failed,
        excluded,
        configs: SelectionConfigs {
            transform: tcfg.clone(),
            solver: scfg.clone(),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detectors::Detector;
    use crate::eval::{generate_synthetic, Family};

    fn small() -> (TransformConfig, SolverConfig) {
        (TransformConfig::default(), SolverConfig::default())
    }

    fn store_of(dir: &std::path::Path, items: &[(&str, Dataset, Detector)]) -> MetaStore {
        let mut store = MetaStore::open_or_create(dir).unwrap();
        for (id, ds, det) in items {
            store
                .add_entry(
                    ds,
                    &PipelineConfig::default_for(*det),
                    0.5,
                    id,
                    &TransformConfig::default(),
                )
                .unwrap();
        }
        store
    }

    #[test]
    fn exact_copy_is_chosen() {
        let dir = tempfile::tempdir().unwrap();
        let a = generate_synthetic(Family::Ring, 120, 3, 0.05, 0).unwrap();
        let b = generate_synthetic(Family::TwoClusters, 120, 3, 0.05, 0).unwrap();
        let store = store_of(
            dir.path(),
            &[("A", a.clone(), Detector::Knn), ("B", b, Detector::Hbos)],
        );
        let (t, s) = small();
        let rep = lotus_select(&a, &store, &t, &s, &[]).unwrap();
        assert_eq!(rep.chosen_id, "A");
        assert_eq!(rep.pipeline, PipelineConfig::default_for(Detector::Knn));
        assert_eq!(rep.distances["A"], 0.0);
        assert!(rep.distances["B"] > 0.0);
        // the debiased value is built from the reported raw costs
        let raw = rep.cross_costs["B"] - 0.5 * rep.query_self_cost - 0.5 * rep.self_costs["B"];
        assert_eq!(rep.distances["B"], raw.max(0.0));
    }

    #[test]
    fn exclusion_and_empty_store() {
        let dir = tempfile::tempdir().unwrap();
        let a = generate_synthetic(Family::GaussBlob, 80, 2, 0.05, 0).unwrap();
        let store = store_of(dir.path(), &[("A", a.clone(), Detector::Knn)]);
        let (t, s) = small();
        let err = lotus_select(&a, &store, &t, &s, &["A".to_string()]).unwrap_err();
        assert_eq!(err.to_string(), "empty effective store");
    }

    #[test]
    fn excluded_ids_absent_and_labels_ignored() {
        let dir = tempfile::tempdir().unwrap();
        let items: Vec<(&str, Dataset, Detector)> = ["f0", "f1", "f2"]
            .into_iter()
            .zip(Family::ALL)
            .map(|(id, f)| {
                (
                    id,
                    generate_synthetic(f, 100, 3, 0.05, 1).unwrap(),
                    Detector::Loda,
                )
            })
            .collect();
        let store = store_of(dir.path(), &items);
        let (t, s) = small();
        let q = generate_synthetic(Family::GaussBlob, 100, 3, 0.05, 7).unwrap();
        let rep = lotus_select(&q, &store, &t, &s, &["f1".to_string()]).unwrap();
        assert!(!rep.distances.contains_key("f1"));
        assert_eq!(rep.distances.len(), 2);
        let min = rep
            .distances
            .values()
            .copied()
            .fold(f64::INFINITY, f64::min);
        assert_eq!(rep.distances[&rep.chosen_id], min);

        let flipped: Vec<u8> = q.labels().unwrap().iter().map(|v| 1 - v).collect();
        let q2 = Dataset::new("q", q.features().clone(), Some(flipped)).unwrap();
        let rep2 = lotus_select(&q2, &store, &t, &s, &["f1".to_string()]).unwrap();
        assert_eq!(rep, rep2);
    }

    #[test]
    fn failed_entries_are_reported() {
        let dir = tempfile::tempdir().unwrap();
        let a = generate_synthetic(Family::GaussBlob, 60, 2, 0.05, 0).unwrap();
        let tiny = Dataset::new(
            "t",
            ndarray::Array2::from_shape_fn((3, 2), |(i, j)| (i * 2 + j) as f64),
            None,
        )
        .unwrap();
        let store = store_of(
            dir.path(),
            &[("A", a.clone(), Detector::Knn), ("T", tiny, Detector::Knn)],
        );
        let (t, s) = small();
        // rank 6 exceeds the 3-point entry, so that one fails
        let rep = lotus_select(&a, &store, &t, &s, &[]).unwrap();
        assert_eq!(rep.chosen_id, "A");
        assert!(rep.failed.contains_key("T"));
        assert!(!rep.distances.contains_key("T"));
    }
}
