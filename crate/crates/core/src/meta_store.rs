//! On-disk registry of meta-datasets and their tuned pipelines.
//!
//! Layout: `index.json`, `datasets/<id>.csv`, `pipelines/<id>.json`. Every
//! file is written to a temporary name and renamed into place, and the
//! index is replaced last, so a crash never leaves the index pointing at
//! files that do not exist.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, LABEL_COLUMN};
use crate::detectors::PipelineConfig;
use crate::error::{Error, Result};
use crate::transform::TransformConfig;

pub const INDEX_FILE: &str = "index.json";
pub const INDEX_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetaEntry {
    pub id: String,
    /// Relative to the store directory.
    pub dataset_path: String,
    pub pipeline_path: String,
    #[serde(skip)]
    pub pipeline: Option<PipelineConfig>,
    pub meta_auc: f64,
    pub created_at: String,
    pub transform_fingerprint: String,
}

impl MetaEntry {
    pub fn pipeline(&self) -> &PipelineConfig {
        self.pipeline
            .as_ref()
            .expect("entries from a store carry their pipeline")
    }
}

#[derive(Serialize, Deserialize)]
struct Index {
    version: u32,
    entries: Vec<MetaEntry>,
}

/// A loaded store: the index plus every referenced dataset, parsed.
#[derive(Debug, Clone)]
pub struct MetaStore {
    dir: PathBuf,
    entries: Vec<MetaEntry>,
    datasets: Vec<Dataset>,
    /// In-memory memo for per-entry values that depend on the solver
    /// settings, keyed by (id, settings key). Never written to disk.
    memo: Arc<Mutex<HashMap<(String, String), f64>>>,
}

fn validate_id(id: &str) -> Result<()> {
    let ok = !id.is_empty()
        && !id.starts_with('.')
        && id
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '.' | '-'));
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidId(id.to_string()))
    }
}

fn tmp_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(format!(".tmp{}", std::process::id()));
    path.with_file_name(name)
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = tmp_path(path);
    fs::write(&tmp, bytes).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

impl MetaStore {
    /// Opens the store at `dir`, creating an empty one if it has no index.
    pub fn open_or_create(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref();
        if dir.join(INDEX_FILE).exists() {
            return Self::load(dir);
        }
        for sub in ["datasets", "pipelines"] {
            let p = dir.join(sub);
            fs::create_dir_all(&p).map_err(|e| Error::io(&p, e))?;
        }
        let store = Self {
            dir: dir.to_path_buf(),
            entries: Vec::new(),
            datasets: Vec::new(),
            memo: Arc::default(),
        };
        store.write_index(&store.entries)?;
        Ok(store)
    }

    /// Loads and validates an existing store.
    pub fn load(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref();
        let index_path = dir.join(INDEX_FILE);
        let corrupt = |reason: String| Error::CorruptIndex {
            path: index_path.clone(),
            reason,
        };
        let text = fs::read_to_string(&index_path).map_err(|e| Error::io(&index_path, e))?;
        let index: Index = serde_json::from_str(&text).map_err(|e| corrupt(e.to_string()))?;
        if index.version != INDEX_VERSION {
            return Err(corrupt(format!("unsupported version {}", index.version)));
        }

        let mut entries = Vec::with_capacity(index.entries.len());
        let mut datasets = Vec::with_capacity(index.entries.len());
        for mut entry in index.entries {
            let bad = |reason: String| corrupt(format!("entry `{}`: {reason}", entry.id));
            validate_id(&entry.id).map_err(|e| bad(e.to_string()))?;
            if entries.iter().any(|e: &MetaEntry| e.id == entry.id) {
                return Err(bad("duplicate id".into()));
            }
            if !(0.0..=1.0).contains(&entry.meta_auc) {
                return Err(bad(format!("meta_auc {} outside [0, 1]", entry.meta_auc)));
            }
            let dpath = dir.join(&entry.dataset_path);
            let ppath = dir.join(&entry.pipeline_path);
            for p in [&dpath, &ppath] {
                if !p.is_file() {
                    return Err(bad(format!("missing file {}", p.display())));
                }
            }
            let (mut ds, _) =
                Dataset::from_csv(&dpath, Some(LABEL_COLUMN)).map_err(|e| bad(e.to_string()))?;
            ds.name = entry.id.clone();
            let ptext = fs::read_to_string(&ppath).map_err(|e| Error::io(&ppath, e))?;
            let pipeline: PipelineConfig =
                serde_json::from_str(&ptext).map_err(|e| bad(e.to_string()))?;
            pipeline.validate().map_err(|e| bad(e.to_string()))?;
            entry.pipeline = Some(pipeline);
            entries.push(entry);
            datasets.push(ds);
        }
        Ok(Self {
            dir: dir.to_path_buf(),
            entries,
            datasets,
            memo: Arc::default(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn entries(&self) -> &[MetaEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|e| e.id.as_str())
    }

    fn position(&self, id: &str) -> Result<usize> {
        self.entries
            .iter()
            .position(|e| e.id == id)
            .ok_or_else(|| Error::UnknownId(id.to_string()))
    }

    pub fn entry(&self, id: &str) -> Result<&MetaEntry> {
        Ok(&self.entries[self.position(id)?])
    }

    pub fn get_pipeline(&self, id: &str) -> Result<&PipelineConfig> {
        Ok(self.entry(id)?.pipeline())
    }

    /// The stored dataset (raw features and labels, as ingested).
    pub fn dataset(&self, id: &str) -> Result<&Dataset> {
        Ok(&self.datasets[self.position(id)?])
    }

    /// Entries paired with their datasets, in index order.
    pub fn iter(&self) -> impl Iterator<Item = (&MetaEntry, &Dataset)> {
        self.entries.iter().zip(&self.datasets)
    }

    /// Returns the memoized value for `(id, key)`, computing it on a miss.
    /// Errors are not memoized.
    pub(crate) fn memoized(
        &self,
        id: &str,
        key: &str,
        f: impl FnOnce() -> Result<f64>,
    ) -> Result<f64> {
        let k = (id.to_string(), key.to_string());
        if let Some(&v) = self.memo.lock().expect("memo lock").get(&k) {
            return Ok(v);
        }
        let v = f()?;
        self.memo.lock().expect("memo lock").insert(k, v);
        Ok(v)
    }

    fn write_index(&self, entries: &[MetaEntry]) -> Result<()> {
        let index = Index {
            version: INDEX_VERSION,
            entries: entries.to_vec(),
        };
        let json = serde_json::to_string_pretty(&index)?;
        write_atomic(&self.dir.join(INDEX_FILE), json.as_bytes())
    }

    /// Registers `dataset` with its tuned `pipeline`. On any error the
    /// store (in memory and on disk index) is unchanged.
    pub fn add_entry(
        &mut self,
        dataset: &Dataset,
        pipeline: &PipelineConfig,
        meta_auc: f64,
        id: &str,
        tcfg: &TransformConfig,
    ) -> Result<MetaEntry> {
        validate_id(id)?;
        if self.entries.iter().any(|e| e.id == id) {
            return Err(Error::DuplicateId(id.to_string()));
        }
        if !(0.0..=1.0).contains(&meta_auc) {
            return Err(Error::InvalidConfig(format!(
                "meta_auc {meta_auc} outside [0, 1]"
            )));
        }
        pipeline.validate()?;

        let dataset_path = format!("datasets/{id}.csv");
        let pipeline_path = format!("pipelines/{id}.json");
        for sub in ["datasets", "pipelines"] {
            let p = self.dir.join(sub);
            fs::create_dir_all(&p).map_err(|e| Error::io(&p, e))?;
        }
        let dfile = self.dir.join(&dataset_path);
        let dtmp = tmp_path(&dfile);
        dataset.to_csv(&dtmp)?;
        fs::rename(&dtmp, &dfile).map_err(|e| Error::io(&dfile, e))?;
        let pjson = serde_json::to_string_pretty(pipeline)?;
        write_atomic(&self.dir.join(&pipeline_path), pjson.as_bytes())?;

        let entry = MetaEntry {
            id: id.to_string(),
            dataset_path,
            pipeline_path,
            pipeline: Some(pipeline.clone()),
            meta_auc,
            created_at: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            transform_fingerprint: tcfg.fingerprint(),
        };
        let mut next = self.entries.clone();
        next.push(entry.clone());
        self.write_index(&next)?;
        self.entries = next;
        let mut stored = dataset.clone();
        stored.name = id.to_string();
        self.datasets.push(stored);
        Ok(entry)
    }
}

/// Adds one entry to the store at `store_dir`, creating the store if needed.
pub fn add_entry(
    store_dir: impl AsRef<Path>,
    dataset: &Dataset,
    pipeline: &PipelineConfig,
    meta_auc: f64,
    id: &str,
    tcfg: &TransformConfig,
) -> Result<MetaEntry> {
    MetaStore::open_or_create(store_dir)?.add_entry(dataset, pipeline, meta_auc, id, tcfg)
}

/// Entries of the store at `store_dir`, in index order.
pub fn load_store(store_dir: impl AsRef<Path>) -> Result<Vec<MetaEntry>> {
    Ok(MetaStore::load(store_dir)?.entries)
}

pub fn get_pipeline<'a>(store: &'a MetaStore, id: &str) -> Result<&'a PipelineConfig> {
    store.get_pipeline(id)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detectors::{Detector, ParamValue};
    use ndarray::Array2;

    fn sample() -> Dataset {
        let x = Array2::from_shape_fn((7, 3), |(i, j)| {
            (i as f64 + 0.1) / (j as f64 + 3.0) * 1e-3 + 1.0 / 3.0
        });
        Dataset::new("s", x, Some(vec![0, 0, 1, 0, 0, 1, 0])).unwrap()
    }

    fn knn10() -> PipelineConfig {
        let mut cfg = PipelineConfig::default_for(Detector::Knn);
        cfg.params.insert("k".into(), ParamValue::Int(10));
        cfg
    }

    #[test]
    fn add_and_reload_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let tcfg = TransformConfig::default();
        let mut store = MetaStore::open_or_create(dir.path()).unwrap();
        store
            .add_entry(&sample(), &knn10(), 0.75, "blob1", &tcfg)
            .unwrap();
        assert_eq!(store.len(), 1);
        assert_eq!(store.get_pipeline("blob1").unwrap(), &knn10());

        let reloaded = MetaStore::load(dir.path()).unwrap();
        assert_eq!(reloaded.entries(), store.entries());
        assert_eq!(reloaded.get_pipeline("blob1").unwrap(), &knn10());
        let ds = reloaded.dataset("blob1").unwrap();
        assert_eq!(ds.features(), sample().features());
        assert_eq!(ds.labels(), sample().labels());
        let text = fs::read_to_string(dir.path().join("pipelines/blob1.json")).unwrap();
        assert_eq!(text, serde_json::to_string_pretty(&knn10()).unwrap());
        assert_eq!(
            reloaded.entry("blob1").unwrap().transform_fingerprint,
            tcfg.fingerprint()
        );
    }

    #[test]
    fn duplicate_leaves_store_unchanged() {
        let dir = tempfile::tempdir().unwrap();
        let tcfg = TransformConfig::default();
        add_entry(dir.path(), &sample(), &knn10(), 0.5, "a", &tcfg).unwrap();
        let before = fs::read(dir.path().join(INDEX_FILE)).unwrap();
        let err = add_entry(dir.path(), &sample(), &knn10(), 0.9, "a", &tcfg).unwrap_err();
        assert!(matches!(err, Error::DuplicateId(_)));
        assert_eq!(fs::read(dir.path().join(INDEX_FILE)).unwrap(), before);
        assert_eq!(load_store(dir.path()).unwrap().len(), 1);
    }

    #[test]
    fn unknown_and_invalid_ids() {
        let dir = tempfile::tempdir().unwrap();
        let mut store = MetaStore::open_or_create(dir.path()).unwrap();
        assert!(matches!(
            store.get_pipeline("nope"),
            Err(Error::UnknownId(_))
        ));
        for bad in ["", "a/b", "..", "x y"] {
            let r = store.add_entry(&sample(), &knn10(), 0.5, bad, &TransformConfig::default());
            assert!(matches!(r, Err(Error::InvalidId(_))), "{bad:?}");
        }
    }

    #[test]
    fn missing_file_is_reported_per_entry() {
        let dir = tempfile::tempdir().unwrap();
        let tcfg = TransformConfig::default();
        add_entry(dir.path(), &sample(), &knn10(), 0.5, "a", &tcfg).unwrap();
        add_entry(dir.path(), &sample(), &knn10(), 0.5, "b", &tcfg).unwrap();
        fs::remove_file(dir.path().join("datasets/b.csv")).unwrap();
        let msg = MetaStore::load(dir.path()).unwrap_err().to_string();
        assert!(msg.contains("entry `b`"), "{msg}");
    }

    #[test]
    fn missing_or_corrupt_index() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(MetaStore::load(dir.path()), Err(Error::Io { .. })));
        fs::write(dir.path().join(INDEX_FILE), "{\"version\": 1").unwrap();
        assert!(matches!(
            MetaStore::load(dir.path()),
            Err(Error::CorruptIndex { .. })
        ));
    }

    #[test]
    fn no_temp_files_left_behind() {
        let dir = tempfile::tempdir().unwrap();
        add_entry(
            dir.path(),
            &sample(),
            &knn10(),
            0.5,
            "a",
            &TransformConfig::default(),
        )
        .unwrap();
        for sub in ["", "datasets", "pipelines"] {
            for f in fs::read_dir(dir.path().join(sub)).unwrap() {
                let name = f.unwrap().file_name().to_string_lossy().into_owned();
                assert!(!name.contains(".tmp"), "{name}");
            }
        }
    }
}
